#include "cliffrb/clifford.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cliffrb/gates.hpp"

namespace cliffrb {

using boost::multiprecision::cpp_int;

namespace {

void require_size(std::size_t a, std::size_t b) {
    if (a != b) {
        throw DimensionError("size mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

// Appends the bits of p's masks to a growing bit string.
struct BitWriter {
    std::vector<std::uint64_t> words;
    std::size_t pos = 0;
    void push(bool b) {
        if (pos % 64 == 0) words.push_back(0);
        if (b) words.back() |= std::uint64_t{1} << (pos % 64);
        ++pos;
    }
};

}  // namespace

CliffordTableau::CliffordTableau(std::size_t n_qubits) : n_(n_qubits) {
    xs_.reserve(n_);
    zs_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        xs_.push_back(PauliOperator::single(n_, i, 'X'));
        zs_.push_back(PauliOperator::single(n_, i, 'Z'));
    }
}

CliffordTableau CliffordTableau::from_images(std::vector<PauliOperator> xs, std::vector<PauliOperator> zs) {
    if (xs.size() != zs.size()) throw DimensionError("image lists differ in length");
    CliffordTableau c;
    c.n_ = xs.size();
    for (const auto& p : xs) require_size(p.n_qubits(), c.n_);
    for (const auto& p : zs) require_size(p.n_qubits(), c.n_);
    c.xs_ = std::move(xs);
    c.zs_ = std::move(zs);
    for (std::size_t i = 0; i < c.n_; ++i) {
        if (!c.xs_[i].is_hermitian() || !c.zs_[i].is_hermitian()) {
            throw std::invalid_argument("tableau images must have phase 0 or 2");
        }
    }
    if (!c.is_valid()) throw std::invalid_argument("images do not define a Clifford operator");
    return c;
}

CliffordTableau CliffordTableau::from_pauli(const PauliOperator& p) {
    CliffordTableau c(p.n_qubits());
    for (std::size_t i = 0; i < c.n_; ++i) {
        // P X_i P^dag = -X_i iff P has Z or Y at i.
        if (p.z(i)) c.xs_[i].set_phase(2);
        if (p.x(i)) c.zs_[i].set_phase(2);
    }
    return c;
}

std::string CliffordTableau::to_text() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < n_; ++i) {
        const auto& px = xs_[i];
        os << "X_" << i << " -> " << (px.sign() ? "-" : "+") << px.unsigned_part().to_string() << "\n";
    }
    for (std::size_t i = 0; i < n_; ++i) {
        const auto& pz = zs_[i];
        os << "Z_" << i << " -> " << (pz.sign() ? "-" : "+") << pz.unsigned_part().to_string() << "\n";
    }
    return os.str();
}

CliffordTableau CliffordTableau::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::pair<std::string, PauliOperator>> entries;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto arrow = line.find("->");
        if (arrow == std::string::npos) throw std::invalid_argument("bad tableau line: " + line);
        std::string lhs = line.substr(0, arrow);
        std::string rhs = line.substr(arrow + 2);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        entries.emplace_back(trim(lhs), PauliOperator::from_string(trim(rhs)));
    }
    if (entries.size() % 2 != 0) throw std::invalid_argument("tableau text needs 2n lines");
    std::size_t n = entries.size() / 2;
    std::vector<PauliOperator> xs(n), zs(n);
    std::vector<bool> seen_x(n, false), seen_z(n, false);
    for (auto& [lhs, p] : entries) {
        if (lhs.size() < 3 || (lhs[0] != 'X' && lhs[0] != 'Z') || lhs[1] != '_') {
            throw std::invalid_argument("bad tableau label: " + lhs);
        }
        std::size_t i = std::stoul(lhs.substr(2));
        if (i >= n) throw std::invalid_argument("tableau label out of range: " + lhs);
        if (lhs[0] == 'X') { xs[i] = p; seen_x[i] = true; } else { zs[i] = p; seen_z[i] = true; }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen_x[i] || !seen_z[i]) throw std::invalid_argument("tableau text missing an image");
    }
    return from_images(std::move(xs), std::move(zs));
}

PauliOperator CliffordTableau::apply(const PauliOperator& p) const {
    require_size(p.n_qubits(), n_);
    PauliOperator out(n_);
    int phase = static_cast<int>(p.phase());
    const auto& xw = p.x_words();
    const auto& zw = p.z_words();
    for (std::size_t w = 0; w < xw.size(); ++w) {
        phase += std::popcount(xw[w] & zw[w]);
        std::uint64_t m = xw[w] | zw[w];
        while (m) {
            std::size_t q = w * 64 + static_cast<std::size_t>(std::countr_zero(m));
            m &= m - 1;
            if (p.x(q)) out.mul_right(xs_[q]);
            if (p.z(q)) out.mul_right(zs_[q]);
        }
    }
    out.add_phase(phase);
    return out;
}

bool CliffordTableau::is_valid() const {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i; j < n_; ++j) {
            if (!xs_[i].commutes(xs_[j]) || !zs_[i].commutes(zs_[j])) return false;
            bool xz = xs_[i].commutes(zs_[j]);
            if ((i == j) == xz) return false;
            if (i != j && !xs_[j].commutes(zs_[i])) return false;
        }
    }
    std::vector<PauliOperator> rows = xs_;
    rows.insert(rows.end(), zs_.begin(), zs_.end());
    return gf2_rank(rows) == 2 * n_;
}

bool CliffordTableau::is_pauli() const {
    for (std::size_t i = 0; i < n_; ++i) {
        if (xs_[i].unsigned_part() != PauliOperator::single(n_, i, 'X')) return false;
        if (zs_[i].unsigned_part() != PauliOperator::single(n_, i, 'Z')) return false;
    }
    return true;
}

bool CliffordTableau::is_identity() const { return *this == CliffordTableau(n_); }

PauliOperator CliffordTableau::as_pauli() const {
    if (!is_pauli()) throw std::invalid_argument("tableau is not a Pauli operator");
    PauliOperator p(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        p.set_z(i, xs_[i].sign());
        p.set_x(i, zs_[i].sign());
    }
    return p;
}

CliffordTableau CliffordTableau::unsigned_representative() const {
    CliffordTableau c = *this;
    for (std::size_t i = 0; i < n_; ++i) {
        c.xs_[i].set_phase(0);
        c.zs_[i].set_phase(0);
    }
    return c;
}

std::vector<std::uint64_t> CliffordTableau::encode(bool quotient) const {
    BitWriter bw;
    auto push_pauli = [&](const PauliOperator& p) {
        for (std::size_t q = 0; q < n_; ++q) bw.push(p.x(q));
        for (std::size_t q = 0; q < n_; ++q) bw.push(p.z(q));
    };
    for (std::size_t i = 0; i < n_; ++i) {
        push_pauli(xs_[i]);
        push_pauli(zs_[i]);
    }
    for (std::size_t i = 0; i < n_; ++i) {
        bw.push(!quotient && xs_[i].sign());
        bw.push(!quotient && zs_[i].sign());
    }
    return bw.words;
}

std::uint64_t CliffordTableau::encode64(bool quotient) const {
    if (n_ > 3) throw DimensionError("single-word encoding needs n <= 3");
    std::uint64_t code = 0;
    std::size_t pos = 0;
    auto push = [&](bool b) {
        if (b) code |= std::uint64_t{1} << pos;
        ++pos;
    };
    for (std::size_t i = 0; i < n_; ++i) {
        for (const PauliOperator* p : {&xs_[i], &zs_[i]}) {
            for (std::size_t q = 0; q < n_; ++q) push(p->x(q));
            for (std::size_t q = 0; q < n_; ++q) push(p->z(q));
        }
    }
    for (std::size_t i = 0; i < n_; ++i) {
        push(!quotient && xs_[i].sign());
        push(!quotient && zs_[i].sign());
    }
    return code;
}

CliffordTableau CliffordTableau::decode64(std::size_t n, std::uint64_t code) {
    if (n > 3) throw DimensionError("single-word encoding needs n <= 3");
    CliffordTableau c(n);
    std::size_t pos = 0;
    auto pop = [&]() { return ((code >> pos++) & 1u) != 0; };
    for (std::size_t i = 0; i < n; ++i) {
        for (PauliOperator* p : {&c.xs_[i], &c.zs_[i]}) {
            for (std::size_t q = 0; q < n; ++q) p->set_x(q, pop());
            for (std::size_t q = 0; q < n; ++q) p->set_z(q, pop());
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        c.xs_[i].set_phase(pop() ? 2 : 0);
        c.zs_[i].set_phase(pop() ? 2 : 0);
    }
    return c;
}

static void check_gate_qubits(const std::vector<std::size_t>& qubits, std::size_t n) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] >= n) throw std::out_of_range("gate qubit out of range");
        for (std::size_t j = 0; j < i; ++j) {
            if (qubits[i] == qubits[j]) throw std::invalid_argument("gate qubits must be distinct");
        }
    }
}

PauliOperator apply_local(const CliffordTableau& g, const std::vector<std::size_t>& qubits,
                          const PauliOperator& p) {
    std::size_t k = g.n_qubits();
    require_size(qubits.size(), k);
    PauliOperator local(k);
    bool touched = false;
    for (std::size_t j = 0; j < k; ++j) {
        local.set_x(j, p.x(qubits[j]));
        local.set_z(j, p.z(qubits[j]));
        touched = touched || p.x(qubits[j]) || p.z(qubits[j]);
    }
    if (!touched) return p;
    PauliOperator image = g.apply(local);
    PauliOperator out = p;
    for (std::size_t j = 0; j < k; ++j) {
        out.set_x(qubits[j], image.x(j));
        out.set_z(qubits[j], image.z(j));
    }
    out.add_phase(static_cast<int>(image.phase()));
    return out;
}

void CliffordTableau::left_apply_local(const CliffordTableau& g, const std::vector<std::size_t>& qubits) {
    check_gate_qubits(qubits, n_);
    for (std::size_t i = 0; i < n_; ++i) {
        xs_[i] = cliffrb::apply_local(g, qubits, xs_[i]);
        zs_[i] = cliffrb::apply_local(g, qubits, zs_[i]);
    }
}

void CliffordTableau::right_apply_local(const CliffordTableau& g, const std::vector<std::size_t>& qubits) {
    std::size_t k = g.n_qubits();
    require_size(qubits.size(), k);
    check_gate_qubits(qubits, n_);
    std::vector<PauliOperator> new_x, new_z;
    for (std::size_t j = 0; j < k; ++j) {
        for (int kind = 0; kind < 2; ++kind) {
            const PauliOperator& gi = kind == 0 ? g.image_x(j) : g.image_z(j);
            PauliOperator embedded(n_);
            for (std::size_t t = 0; t < k; ++t) {
                embedded.set_x(qubits[t], gi.x(t));
                embedded.set_z(qubits[t], gi.z(t));
            }
            embedded.set_phase(gi.phase());
            (kind == 0 ? new_x : new_z).push_back(apply(embedded));
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        xs_[qubits[j]] = std::move(new_x[j]);
        zs_[qubits[j]] = std::move(new_z[j]);
    }
}

std::size_t TableauHash::operator()(const CliffordTableau& c) const {
    std::size_t h = c.n_qubits();
    for (auto w : c.encode(false)) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

CliffordTableau clifford_compose(const CliffordTableau& c, const CliffordTableau& d) {
    require_size(c.n_qubits(), d.n_qubits());
    std::size_t n = c.n_qubits();
    std::vector<PauliOperator> xs, zs;
    xs.reserve(n);
    zs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs.push_back(c.apply(d.image_x(i)));
        zs.push_back(c.apply(d.image_z(i)));
    }
    CliffordTableau out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.set_image_x(i, std::move(xs[i]));
        out.set_image_z(i, std::move(zs[i]));
    }
    return out;
}

CliffordTableau clifford_inverse(const CliffordTableau& c) {
    // The inverse of a symplectic matrix M is Omega M^T Omega; in image form the
    // inverse image of X_i takes its bits at qubit j from the images of X_j and Z_j at qubit i.
    std::size_t n = c.n_qubits();
    CliffordTableau inv(n);
    for (std::size_t i = 0; i < n; ++i) {
        PauliOperator ix(n), iz(n);
        for (std::size_t j = 0; j < n; ++j) {
            ix.set_x(j, c.image_z(j).z(i));
            ix.set_z(j, c.image_x(j).z(i));
            iz.set_x(j, c.image_z(j).x(i));
            iz.set_z(j, c.image_x(j).x(i));
        }
        inv.set_image_x(i, std::move(ix));
        inv.set_image_z(i, std::move(iz));
    }
    // Signs: c(inv(X_i)) must be +X_i exactly.
    for (std::size_t i = 0; i < n; ++i) {
        PauliOperator back = c.apply(inv.image_x(i));
        if (back.phase() == 2) {
            PauliOperator p = inv.image_x(i);
            p.set_phase(2);
            inv.set_image_x(i, std::move(p));
        }
        back = c.apply(inv.image_z(i));
        if (back.phase() == 2) {
            PauliOperator p = inv.image_z(i);
            p.set_phase(2);
            inv.set_image_z(i, std::move(p));
        }
    }
    return inv;
}

PauliOperator clifford_apply(const CliffordTableau& c, const PauliOperator& p) { return c.apply(p); }

CliffordTableau embed(const CliffordTableau& g, const std::vector<std::size_t>& qubits, std::size_t n) {
    CliffordTableau out(n);
    out.left_apply_local(g, qubits);
    return out;
}

CliffordTableau tensor(const CliffordTableau& a, const CliffordTableau& b) {
    std::size_t na = a.n_qubits(), nb = b.n_qubits();
    CliffordTableau out(na + nb);
    std::vector<std::size_t> qa(na), qb(nb);
    for (std::size_t i = 0; i < na; ++i) qa[i] = i;
    for (std::size_t i = 0; i < nb; ++i) qb[i] = na + i;
    out.left_apply_local(a, qa);
    out.left_apply_local(b, qb);
    return out;
}

std::size_t gf2_rank(const std::vector<PauliOperator>& rows) {
    if (rows.empty()) return 0;
    std::size_t words = rows[0].n_words();
    // Row vectors as concatenated x and z words.
    std::vector<std::vector<std::uint64_t>> m;
    m.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<std::uint64_t> v(r.x_words());
        v.insert(v.end(), r.z_words().begin(), r.z_words().end());
        m.push_back(std::move(v));
    }
    std::size_t rank = 0;
    std::size_t total_bits = 2 * words * 64;
    for (std::size_t col = 0; col < total_bits && rank < m.size(); ++col) {
        std::size_t w = col / 64;
        std::uint64_t bit = std::uint64_t{1} << (col % 64);
        std::size_t pivot = rank;
        while (pivot < m.size() && !(m[pivot][w] & bit)) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(m[pivot], m[rank]);
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r != rank && (m[r][w] & bit)) {
                for (std::size_t t = 0; t < m[r].size(); ++t) m[r][t] ^= m[rank][t];
            }
        }
        ++rank;
    }
    return rank;
}

void GateSequence::append(const GateSequence& other) {
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

std::string GateSequence::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        if (i) os << " ";
        os << gates[i].name << "(";
        for (std::size_t j = 0; j < gates[i].qubits.size(); ++j) {
            if (j) os << ",";
            os << gates[i].qubits[j];
        }
        os << ")";
    }
    return os.str();
}

namespace {

// Appends a one-qubit gate taking kind `from` to +-`to` at qubit q (nothing if equal).
void push_local_map(GateSequence& seq, std::size_t q, char from, char to) {
    const std::string& name = one_qubit_map_gate(from, to);
    if (!name.empty()) seq.push(name, {q});
}

void apply_gate_to(PauliOperator& p, const GateOp& op) {
    p = apply_local(builtin_gates().get(op.name).tableau, op.qubits, p);
}

}  // namespace

GateSequence find_mapping(const PauliOperator& p, const PauliOperator& q) {
    require_size(p.n_qubits(), q.n_qubits());
    if (p.is_identity() || q.is_identity()) throw std::invalid_argument("find_mapping needs non-identity Paulis");
    std::size_t n = p.n_qubits();
    GateSequence seq;
    seq.n_qubits = n;
    PauliOperator cur = p.unsigned_part();
    std::size_t l = cur.support().front();
    std::size_t m = q.support().front();
    if (l != m) {
        seq.push("SWAP", {l, m});
        apply_gate_to(cur, seq.gates.back());
    }
    for (std::size_t a : cur.support()) {
        push_local_map(seq, a, cur.get(a), a == m ? 'X' : 'Z');
    }
    std::vector<bool> in_cur(n, false);
    for (std::size_t a : cur.support()) in_cur[a] = true;
    std::vector<bool> in_q(n, false);
    for (std::size_t a : q.support()) in_q[a] = true;
    for (std::size_t a = 0; a < n; ++a) {
        if (a != m && in_cur[a] != in_q[a]) seq.push("CZ", {m, a});
    }
    // Now the operator is X at m and Z on the rest of q's support.
    for (std::size_t a : q.support()) {
        push_local_map(seq, a, a == m ? 'X' : 'Z', q.get(a));
    }
    return seq;
}

cpp_int group_order(std::size_t n, bool quotient) {
    if (n == 0) throw std::invalid_argument("group_order needs n >= 1");
    cpp_int order = cpp_int(1) << (n * n + 2 * n);
    for (std::size_t k = 1; k <= n; ++k) {
        order *= (cpp_int(1) << (2 * (n - k + 1))) - 1;
    }
    if (quotient) order >>= 2 * n;
    return order;
}

std::vector<std::pair<cpp_int, cpp_int>> sampling_choice_counts(std::size_t n) {
    std::vector<std::pair<cpp_int, cpp_int>> out;
    for (std::size_t k = 1; k <= n; ++k) {
        cpp_int x_choices = 2 * ((cpp_int(1) << (2 * (n - k + 1))) - 1);
        cpp_int z_choices = 4 * (cpp_int(1) << (2 * (n - k)));
        out.emplace_back(x_choices, z_choices);
    }
    return out;
}

std::vector<CliffordTableau> enumerate_group(std::size_t n, bool quotient) {
    if (n == 0) throw std::invalid_argument("enumerate_group needs n >= 1");
    if (n > 3 || (n == 3 && !quotient)) {
        throw ResourceLimitError("enumeration limited to n <= 2 (full) or n <= 3 (quotient)");
    }
    const auto& lib = builtin_gates();
    std::vector<CliffordTableau> gens;
    for (std::size_t q = 0; q < n; ++q) {
        gens.push_back(embed(lib.get("H").tableau, {q}, n));
        gens.push_back(embed(lib.get("S").tableau, {q}, n));
        if (!quotient) {
            gens.push_back(embed(lib.get("X").tableau, {q}, n));
            gens.push_back(embed(lib.get("Z").tableau, {q}, n));
        }
    }
    for (std::size_t a = 0; a + 1 < n; ++a) gens.push_back(embed(lib.get("CX").tableau, {a, a + 1}, n));

    std::unordered_set<std::uint64_t> seen;
    std::vector<CliffordTableau> out;
    std::deque<std::size_t> frontier;
    CliffordTableau id(n);
    seen.insert(id.encode64(quotient));
    out.push_back(id);
    frontier.push_back(0);
    while (!frontier.empty()) {
        std::size_t idx = frontier.front();
        frontier.pop_front();
        for (const auto& g : gens) {
            CliffordTableau next = clifford_compose(g, out[idx]);
            if (quotient) next = next.unsigned_representative();
            if (seen.insert(next.encode64(quotient)).second) {
                out.push_back(std::move(next));
                frontier.push_back(out.size() - 1);
            }
        }
    }
    return out;
}

PauliOperator random_pauli(std::size_t n, Rng& rng) {
    PauliOperator p(n);
    auto& xw = p.x_words();
    auto& zw = p.z_words();
    for (std::size_t w = 0; w < xw.size(); ++w) {
        std::uint64_t mask = (n - w * 64 >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (n - w * 64)) - 1);
        xw[w] = rng() & mask;
        zw[w] = rng() & mask;
    }
    return p;
}

CliffordTableau sample_uniform(std::size_t n, Rng& rng) {
    const auto& lib = builtin_gates();
    // linv holds L_k^{-1}, the inverse of the gates applied so far.
    CliffordTableau linv(n);
    std::vector<PauliOperator> xs(n), zs(n);
    auto right_apply_inverse = [&](const GateSequence& seq) {
        for (const auto& op : seq.gates) linv.right_apply_local(lib.get(op.name).inverse_tableau, op.qubits);
    };
    for (std::size_t k = 0; k < n; ++k) {
        // X image: non-identity Pauli on qubits >= k, random sign.
        PauliOperator a(n);
        do {
            PauliOperator r = random_pauli(n, rng);
            for (std::size_t q = k; q < n; ++q) a.set(q, r.get(q));
        } while (a.is_identity());
        bool sx = random_bit(rng);
        PauliOperator img_x = linv.apply(a);
        if (sx) img_x.add_phase(2);
        xs[k] = img_x;
        GateSequence cx = find_mapping(a, PauliOperator::single(n, k, 'X'));
        right_apply_inverse(cx);

        // Z image: Z or Y at k (anticommuting with X_k), random Paulis above k, random sign.
        PauliOperator b(n);
        b.set(k, random_bit(rng) ? 'Y' : 'Z');
        PauliOperator r = random_pauli(n, rng);
        for (std::size_t q = k + 1; q < n; ++q) b.set(q, r.get(q));
        bool sz = random_bit(rng);
        PauliOperator img_z = linv.apply(b);
        if (sz) img_z.add_phase(2);
        zs[k] = img_z;

        // Gates taking b to +-Z_k while keeping X_k fixed up to sign.
        GateSequence cz;
        cz.n_qubits = n;
        PauliOperator cur = b;
        auto push = [&](std::string name, std::vector<std::size_t> qs) {
            cz.push(std::move(name), std::move(qs));
            apply_gate_to(cur, cz.gates.back());
        };
        push("H", {k});
        if (cur.get(k) == 'Y') push("Sdg", {k});
        for (std::size_t q = k + 1; q < n; ++q) {
            char c = cur.get(q);
            if (c == 'I') continue;
            if (c != 'Z') push(one_qubit_map_gate(c, 'Z'), {q});
            push("CZ", {k, q});
        }
        push("H", {k});
        right_apply_inverse(cz);
    }
    CliffordTableau out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.set_image_x(i, std::move(xs[i]));
        out.set_image_z(i, std::move(zs[i]));
    }
    return out;
}

}  // namespace cliffrb
