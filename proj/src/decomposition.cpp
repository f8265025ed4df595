#include "cliffrb/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <optional>
#include <json.hpp>
#include <ostream>
#include <queue>
#include <set>
#include <tuple>

namespace cliffrb {

using nlohmann::json;

DecompositionTable::DecompositionTable(std::string gate_set, std::size_t n, bool quotient,
                                       std::vector<GateOp> instances, std::vector<double> weights)
    : gate_set_(std::move(gate_set)),
      n_(n),
      quotient_(quotient),
      instances_(std::move(instances)),
      weights_(std::move(weights)) {}

const DecompositionTable::Entry& DecompositionTable::entry(const CliffordTableau& c) const {
    auto it = entries_.find(key(c));
    if (it == entries_.end()) throw std::out_of_range("element not in decomposition table");
    return it->second;
}

GateSequence DecompositionTable::sequence_for_key(std::uint64_t k) const {
    GateSequence seq;
    seq.n_qubits = n_;
    std::vector<GateOp> rev;
    for (;;) {
        auto it = entries_.find(k);
        if (it == entries_.end()) throw std::out_of_range("element not in decomposition table");
        if (it->second.gate < 0) break;
        rev.push_back(instances_[static_cast<std::size_t>(it->second.gate)]);
        k = it->second.parent;
    }
    seq.gates.assign(rev.rbegin(), rev.rend());
    return seq;
}

GateSequence DecompositionTable::sequence(const CliffordTableau& c) const { return sequence_for_key(key(c)); }

std::map<long, std::size_t> DecompositionTable::primary_histogram() const {
    std::map<long, std::size_t> h;
    for (const auto& [k, e] : entries_) h[std::lround(e.primary)] += 1;
    return h;
}

double DecompositionTable::mean_primary() const {
    if (entries_.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [k, e] : entries_) s += e.primary;
    return s / static_cast<double>(entries_.size());
}

namespace {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("truncated decomposition table");
    return v;
}

void write_string(std::ostream& os, const std::string& s) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
    auto len = read_pod<std::uint32_t>(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw std::runtime_error("truncated decomposition table");
    return s;
}

constexpr std::uint32_t kTableMagic = 0x43524254;  // "TBRC"

}  // namespace

void DecompositionTable::save_binary(std::ostream& os) const {
    write_pod(os, kTableMagic);
    write_pod<std::uint32_t>(os, 1);
    write_string(os, gate_set_);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(n_));
    write_pod<std::uint8_t>(os, quotient_ ? 1 : 0);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(instances_.size()));
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        write_string(os, instances_[i].name);
        write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(instances_[i].qubits.size()));
        for (std::size_t q : instances_[i].qubits) write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(q));
        write_pod<double>(os, weights_[i]);
    }
    std::vector<std::uint64_t> keys;
    keys.reserve(entries_.size());
    for (const auto& [k, e] : entries_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    write_pod<std::uint64_t>(os, keys.size());
    for (std::uint64_t k : keys) {
        const Entry& e = entries_.at(k);
        write_pod(os, k);
        write_pod(os, e.parent);
        write_pod(os, e.gate);
        write_pod(os, e.primary);
        write_pod(os, e.total);
    }
}

DecompositionTable DecompositionTable::load_binary(std::istream& is) {
    if (read_pod<std::uint32_t>(is) != kTableMagic) throw std::runtime_error("not a decomposition table");
    if (read_pod<std::uint32_t>(is) != 1) throw std::runtime_error("unsupported decomposition table version");
    DecompositionTable t;
    t.gate_set_ = read_string(is);
    t.n_ = read_pod<std::uint32_t>(is);
    t.quotient_ = read_pod<std::uint8_t>(is) != 0;
    auto n_inst = read_pod<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < n_inst; ++i) {
        GateOp op;
        op.name = read_string(is);
        auto nq = read_pod<std::uint32_t>(is);
        for (std::uint32_t j = 0; j < nq; ++j) op.qubits.push_back(read_pod<std::uint32_t>(is));
        t.instances_.push_back(std::move(op));
        t.weights_.push_back(read_pod<double>(is));
    }
    auto count = read_pod<std::uint64_t>(is);
    t.entries_.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        auto k = read_pod<std::uint64_t>(is);
        Entry e;
        e.parent = read_pod<std::uint64_t>(is);
        e.gate = read_pod<std::int32_t>(is);
        e.primary = read_pod<double>(is);
        e.total = read_pod<std::uint32_t>(is);
        t.entries_.emplace(k, e);
    }
    return t;
}

std::string DecompositionTable::index_json() const {
    json j;
    j["gate_set"] = gate_set_;
    j["n"] = n_;
    j["quotient"] = quotient_;
    j["size"] = entries_.size();
    json h = json::object();
    for (const auto& [c, cnt] : primary_histogram()) h[std::to_string(c)] = cnt;
    j["primary_histogram"] = h;
    j["mean_primary"] = mean_primary();
    json inst = json::array();
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        inst.push_back(json{{"gate", instances_[i].name}, {"qubits", instances_[i].qubits}, {"weight", weights_[i]}});
    }
    j["instances"] = inst;
    return j.dump(2);
}

DecompositionTable cayley_search(const GateSet& gs, std::size_t n, bool quotient, bool allow_large) {
    if (n == 0) throw std::invalid_argument("cayley_search needs n >= 1");
    if (n > 3 || (n == 3 && (!quotient || !allow_large))) {
        throw ResourceLimitError("cayley_search limited to n <= 2, or the n = 3 quotient when explicitly enabled");
    }
    const auto& lib = builtin_gates();
    std::vector<GateOp> ops;
    std::vector<double> weights;
    std::vector<const CliffordTableau*> tabs;
    for (const auto& [op, w] : gs.instances(n)) {
        ops.push_back(op);
        weights.push_back(w);
        tabs.push_back(&lib.get(op.name).tableau);
    }
    DecompositionTable table(gs.name, n, quotient, ops, weights);
    auto& entries = table.mutable_entries();

    using Item = std::tuple<double, std::uint32_t, std::uint64_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    std::unordered_map<std::uint64_t, DecompositionTable::Entry> best;
    CliffordTableau id(n);
    std::uint64_t id_key = id.encode64(quotient);
    best[id_key] = DecompositionTable::Entry{0, -1, 0.0, 0};
    heap.emplace(0.0, 0u, id_key);
    constexpr double kTol = 1e-12;
    while (!heap.empty()) {
        auto [cost, total, k] = heap.top();
        heap.pop();
        if (entries.count(k)) continue;
        const auto& b = best.at(k);
        if (b.primary < cost - kTol || (std::abs(b.primary - cost) <= kTol && b.total < total)) continue;
        entries.emplace(k, b);
        CliffordTableau cur = CliffordTableau::decode64(n, k);
        for (std::size_t g = 0; g < ops.size(); ++g) {
            CliffordTableau next = cur;
            next.left_apply_local(*tabs[g], ops[g].qubits);
            std::uint64_t nk = next.encode64(quotient);
            if (entries.count(nk)) continue;
            double nc = cost + weights[g];
            std::uint32_t nt = total + 1;
            auto it = best.find(nk);
            bool better = it == best.end() || nc < it->second.primary - kTol ||
                          (std::abs(nc - it->second.primary) <= kTol && nt < it->second.total);
            if (better) {
                best[nk] = DecompositionTable::Entry{k, static_cast<std::int32_t>(g), nc, nt};
                heap.emplace(nc, nt, nk);
            }
        }
    }
    std::size_t expected = static_cast<std::size_t>(group_order(n, quotient));
    if (entries.size() != expected) {
        std::string msg = "gate set '" + gs.name + "' reaches " + std::to_string(entries.size()) + " of " +
                          std::to_string(expected) + " elements";
        if (n <= 2) {
            std::size_t listed = 0;
            for (const auto& c : enumerate_group(n, quotient)) {
                if (table.contains(c)) continue;
                msg += listed == 0 ? "; unreached:\n" : "---\n";
                msg += c.to_text();
                if (++listed == 5) break;
            }
        }
        throw CoverageError(msg);
    }
    return table;
}

std::vector<std::string> one_qubit_fix(char a, char b, char to_a, char to_b, const std::vector<std::string>& gates) {
    const auto& lib = builtin_gates();
    PauliOperator pa = PauliOperator::single(1, 0, a);
    PauliOperator pb = PauliOperator::single(1, 0, b);
    if (pa.commutes(pb) || PauliOperator::single(1, 0, to_a).commutes(PauliOperator::single(1, 0, to_b))) {
        throw std::invalid_argument("one_qubit_fix needs anticommuting pairs");
    }
    struct Node {
        char a, b;
        std::vector<std::string> seq;
    };
    std::deque<Node> frontier{{a, b, {}}};
    std::set<std::pair<char, char>> seen{{a, b}};
    while (!frontier.empty()) {
        Node cur = frontier.front();
        frontier.pop_front();
        if (cur.a == to_a && cur.b == to_b) return cur.seq;
        if (cur.seq.size() == 4) continue;
        for (const auto& g : gates) {
            const auto& t = lib.get(g).tableau;
            char na = t.apply(PauliOperator::single(1, 0, cur.a)).get(0);
            char nb = t.apply(PauliOperator::single(1, 0, cur.b)).get(0);
            if (!seen.insert({na, nb}).second) continue;
            Node next{na, nb, cur.seq};
            next.seq.push_back(g);
            frontier.push_back(std::move(next));
        }
    }
    throw UnsupportedGateError("one-qubit gates cannot realize the requested map");
}

namespace {

// The Choi-Jamiolkowski stabilizer matrix: 2n rows on 2n qubits, left half qubits 0..n-1,
// right half n..2n-1. Rows 0..n-1 are X_i (x) C(X_i), rows n..2n-1 are Z_i (x) C(Z_i).
class CJMatrix {
public:
    explicit CJMatrix(const CliffordTableau& c) : n_(c.n_qubits()) {
        for (std::size_t pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < n_; ++i) {
                const PauliOperator& img = pass == 0 ? c.image_x(i) : c.image_z(i);
                PauliOperator row(2 * n_);
                row.set(i, pass == 0 ? 'X' : 'Z');
                for (std::size_t q = 0; q < n_; ++q) row.set(n_ + q, img.get(q));
                row.set_phase(img.phase());
                rows_.push_back(std::move(row));
            }
        }
        seq_.n_qubits = n_;
    }

    // Right-half entry of top (quadrant 2) or bottom (quadrant 3) row r at column q.
    char top(std::size_t r, std::size_t q) const { return rows_[r].get(n_ + q); }
    char bottom(std::size_t r, std::size_t q) const { return rows_[n_ + r].get(n_ + q); }
    // Left-half z bit of bottom row r at column q (quadrant 4).
    bool left_z(std::size_t r, std::size_t q) const { return rows_[n_ + r].z(q); }

    void gate(const std::string& name, std::vector<std::size_t> qubits) {
        const auto& t = builtin_gates().get(name).tableau;
        std::vector<std::size_t> shifted;
        for (std::size_t q : qubits) shifted.push_back(n_ + q);
        for (auto& r : rows_) r = apply_local(t, shifted, r);
        seq_.push(name, std::move(qubits));
    }
    void multiply_bottom(std::size_t target, std::size_t source) { rows_[n_ + target].mul_right(rows_[n_ + source]); }
    void swap_bottom(std::size_t a, std::size_t b) {
        if (a != b) std::swap(rows_[n_ + a], rows_[n_ + b]);
    }

    bool is_identity_form(bool with_signs) const {
        for (std::size_t i = 0; i < n_; ++i) {
            PauliOperator xx(2 * n_), zz(2 * n_);
            xx.set(i, 'X');
            xx.set(n_ + i, 'X');
            zz.set(i, 'Z');
            zz.set(n_ + i, 'Z');
            const PauliOperator& t = rows_[i];
            const PauliOperator& b = rows_[n_ + i];
            if (!(t.unsigned_part() == xx) || !(b.unsigned_part() == zz)) return false;
            if (with_signs && (t.phase() != 0 || b.phase() != 0)) return false;
        }
        return true;
    }

    const PauliOperator& row(std::size_t i) const { return rows_[i]; }
    std::size_t n() const { return n_; }
    GateSequence& sequence() { return seq_; }

private:
    std::size_t n_;
    std::vector<PauliOperator> rows_;
    GateSequence seq_;
};

bool anticommuting_kinds(char a, char b) { return a != 'I' && b != 'I' && a != b; }

}  // namespace

BlockDecomposition block_decompose(const CliffordTableau& c, bool sign_fix) {
    std::size_t n = c.n_qubits();
    if (n == 0) throw std::invalid_argument("block_decompose needs n >= 1");
    CJMatrix m(c);
    BlockDecomposition out;
    std::size_t mark = 0;
    auto close_block = [&](const char* label) {
        out.blocks.emplace_back(label, m.sequence().size() - mark);
        mark = m.sequence().size();
    };

    // A matrix already in identity form up to signs needs no reduction gates.
    if (m.is_identity_form(false)) {
        for (const char* label : {"1q", "CZ", "CX", "1q", "CZ"}) close_block(label);
    } else {
        // Step 1: graph-state standard form on quadrant 3 by row operations among the bottom rows.
        std::vector<char> neighbor(n, 'Z');
        {
            std::vector<bool> done(n, false);
            for (;;) {
                std::size_t r = 0;
                while (r < n && done[r]) ++r;
                if (r == n) break;
                std::size_t d = 0;
                while (d < n && (done[d] || m.bottom(r, d) == 'I')) ++d;
                if (d == n) throw std::logic_error("quadrant 3 is not full rank");
                m.swap_bottom(r, d);
                char diag = m.bottom(d, d);
                char nb = 0;
                for (std::size_t a = 0; a < n && !nb; ++a) {
                    if (a != d && anticommuting_kinds(m.bottom(a, d), diag)) nb = m.bottom(a, d);
                }
                for (char k : {'Z', 'X', 'Y'}) {
                    if (!nb && anticommuting_kinds(k, diag)) nb = k;
                }
                for (std::size_t a = 0; a < n; ++a) {
                    char e = m.bottom(a, d);
                    if (a != d && e != 'I' && e != nb) m.multiply_bottom(a, d);
                }
                neighbor[d] = nb;
                done[d] = true;
            }
        }

        // Step 2: one-qubit gates making each diagonal X and each neighbor Z.
        for (std::size_t j = 0; j < n; ++j) {
            for (const auto& g : one_qubit_fix(m.bottom(j, j), neighbor[j], 'X', 'Z')) m.gate(g, {j});
        }
        close_block("1q");

        // Step 3: CZ gates clear the symmetric off-diagonal Z entries of quadrant 3.
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = k + 1; l < n; ++l) {
                if (m.bottom(k, l) == 'Z') m.gate("CZ", {k, l});
            }
        }
        close_block("CZ");

        // Step 4: row operations make quadrant 4 diagonal.
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t r = k;
            while (r < n && !m.left_z(r, k)) ++r;
            if (r == n) throw std::logic_error("quadrant 4 is not full rank");
            m.swap_bottom(k, r);
            for (std::size_t a = 0; a < n; ++a) {
                if (a != k && m.left_z(a, k)) m.multiply_bottom(a, k);
            }
        }

        // Step 5: CX gates (SWAP as three CX) diagonalize quadrant 3.
        for (std::size_t k = 0; k < n; ++k) {
            if (m.bottom(k, k) == 'I') {
                std::size_t l = k + 1;
                while (l < n && m.bottom(k, l) == 'I') ++l;
                if (l == n) throw std::logic_error("quadrant 3 lost column rank");
                m.gate("CX", {k, l});
                m.gate("CX", {l, k});
                m.gate("CX", {k, l});
            }
            for (std::size_t l = 0; l < n; ++l) {
                if (l != k && m.bottom(k, l) == 'X') m.gate("CX", {k, l});
            }
        }
        close_block("CX");

        // Step 6: one-qubit gates turning the quadrant 3 diagonal into Z and the quadrant 2 diagonal into X.
        for (std::size_t k = 0; k < n; ++k) {
            for (const auto& g : one_qubit_fix(m.bottom(k, k), m.top(k, k), 'Z', 'X')) m.gate(g, {k});
        }
        close_block("1q");

        // Step 7: CZ gates clear the off-diagonal Z entries of quadrant 2.
        for (std::size_t l = 0; l < n; ++l) {
            for (std::size_t k = l + 1; k < n; ++k) {
                if (m.top(l, k) == 'Z') m.gate("CZ", {l, k});
            }
        }
        close_block("CZ");
    }

    // Step 8: Pauli gates clear the signs.
    if (sign_fix) {
        for (std::size_t k = 0; k < n; ++k) {
            if (m.row(k).sign()) m.gate("Z", {k});
            if (m.row(n + k).sign()) m.gate("X", {k});
        }
        close_block("1q");
    }

    if (!m.is_identity_form(sign_fix)) throw std::logic_error("block decomposition did not reach the identity");
    out.reduction = m.sequence();
    out.circuit = inverse_sequence(out.reduction);
    return out;
}

std::size_t block_gate_bound(std::size_t n) { return 2 * n * n + 7 * n; }

namespace {

GateSequence local_seq(std::initializer_list<std::pair<const char*, std::vector<std::size_t>>> gates) {
    GateSequence s;
    s.n_qubits = 2;
    for (const auto& [g, q] : gates) s.push(g, q);
    return s;
}

bool equal_mod_pauli(const CliffordTableau& a, const CliffordTableau& b) {
    return a.unsigned_representative() == b.unsigned_representative();
}

}  // namespace

const std::multimap<std::string, GateSequence>& rewrite_rules() {
    static const std::multimap<std::string, GateSequence> rules = [] {
        std::multimap<std::string, GateSequence> r;
        r.emplace("CZ", local_seq({{"H", {1}}, {"CX", {0, 1}}, {"H", {1}}}));
        r.emplace("CX", local_seq({{"H", {1}}, {"CZ", {0, 1}}, {"H", {1}}}));
        r.emplace("CZ", local_seq({{"G", {0, 1}}, {"Sdg", {0}}, {"Sdg", {1}}}));
        r.emplace("G", local_seq({{"CZ", {0, 1}}, {"S", {0}}, {"S", {1}}}));
        r.emplace("CX", local_seq({{"H", {1}}, {"G", {0, 1}}, {"Sdg", {0}}, {"Sdg", {1}}, {"H", {1}}}));
        r.emplace("G", local_seq({{"Ym90", {0}}, {"Ym90", {1}}, {"MS", {0, 1}}, {"Y90", {0}}, {"Y90", {1}}}));
        r.emplace("CZ", local_seq({{"Ym90", {0}},
                                   {"Ym90", {1}},
                                   {"MS", {0, 1}},
                                   {"Y90", {0}},
                                   {"Y90", {1}},
                                   {"Sdg", {0}},
                                   {"Sdg", {1}}}));
        r.emplace("SWAP", local_seq({{"CX", {0, 1}}, {"CX", {1, 0}}, {"CX", {0, 1}}}));
        r.emplace("MS", local_seq({{"Y90", {0}}, {"Y90", {1}}, {"G", {0, 1}}, {"Ym90", {0}}, {"Ym90", {1}}}));
        r.emplace("MS", local_seq({{"Y90", {0}},
                                   {"Y90", {1}},
                                   {"S", {0}},
                                   {"S", {1}},
                                   {"CZ", {0, 1}},
                                   {"Ym90", {0}},
                                   {"Ym90", {1}}}));
        const auto& lib = builtin_gates();
        for (const auto& [name, seq] : r) {
            if (!equal_mod_pauli(lib.get(name).tableau, sequence_tableau(seq))) {
                throw std::logic_error("rewrite rule for " + name + " is wrong: " + seq.to_string());
            }
        }
        return r;
    }();
    return rules;
}

namespace {

struct Translator {
    const GateSet& target;
    std::set<std::string> names;
    std::vector<std::string> one_qubit;

    explicit Translator(const GateSet& t) : target(t) {
        const auto& lib = builtin_gates();
        for (const auto& e : t.entries) {
            names.insert(lib.get(e.gate).name);
            if (lib.get(e.gate).arity == 1) one_qubit.push_back(lib.get(e.gate).name);
        }
    }

    // Shortest word over the target one-qubit gates equal to g up to a Pauli, if any.
    std::optional<std::vector<std::string>> one_qubit_word(const CliffordTableau& g) const {
        if (one_qubit.empty()) return std::nullopt;
        const auto& lib = builtin_gates();
        std::deque<std::pair<CliffordTableau, std::vector<std::string>>> frontier{{CliffordTableau(1), {}}};
        std::set<std::uint64_t> seen{CliffordTableau(1).encode64(true)};
        while (!frontier.empty()) {
            auto [cur, word] = frontier.front();
            frontier.pop_front();
            if (equal_mod_pauli(cur, g)) return word;
            for (const auto& name : one_qubit) {
                CliffordTableau next = clifford_compose(lib.get(name).tableau, cur);
                if (!seen.insert(next.encode64(true)).second) continue;
                auto w = word;
                w.push_back(name);
                frontier.emplace_back(std::move(next), std::move(w));
            }
        }
        return std::nullopt;
    }

    // Rule expansions nest at most max_depth levels.
    bool translate(const GateOp& op, GateSequence& out, int depth, int max_depth) const {
        const auto& lib = builtin_gates();
        const auto& def = lib.get(op.name);
        if (names.count(def.name)) {
            out.push(def.name, op.qubits);
            return true;
        }
        if (def.arity == 1) {
            auto word = one_qubit_word(def.tableau);
            if (!word) return false;
            for (const auto& g : *word) out.push(g, op.qubits);
            return true;
        }
        if (depth >= max_depth) return false;
        auto [lo, hi] = rewrite_rules().equal_range(def.name);
        for (auto it = lo; it != hi; ++it) {
            GateSequence trial;
            trial.n_qubits = out.n_qubits;
            bool ok = true;
            for (const auto& g : it->second.gates) {
                GateOp mapped{g.name, {}};
                for (std::size_t q : g.qubits) mapped.qubits.push_back(op.qubits[q]);
                if (!translate(mapped, trial, depth + 1, max_depth)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                out.append(trial);
                return true;
            }
        }
        return false;
    }
};

}  // namespace

GateSequence translate_sequence(const GateSequence& seq, const GateSet& target) {
    Translator tr(target);
    GateSequence out;
    out.n_qubits = seq.n_qubits;
    for (const auto& op : seq.gates) {
        // Iterative deepening prefers the shallowest rule expansion.
        bool done = false;
        for (int max_depth = 0; max_depth <= 3 && !done; ++max_depth) done = tr.translate(op, out, 0, max_depth);
        if (!done) {
            throw UnsupportedGateError("no rewrite rule takes gate '" + op.name + "' into gate set '" + target.name +
                                       "'");
        }
    }
    return out;
}

}  // namespace cliffrb
