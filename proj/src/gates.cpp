#include "cliffrb/gates.hpp"

#include <cmath>
#include <deque>
#include <json.hpp>
#include <unordered_set>

namespace cliffrb {

namespace {

const Complex kI(0.0, 1.0);
const double kR = 1.0 / std::sqrt(2.0);

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix diag4(Complex a, Complex b, Complex c, Complex d) {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    m(3, 3) = d;
    return m;
}

// Declared images "X->..." in the order X_0, Z_0, X_1, Z_1.
CliffordTableau declared(std::initializer_list<const char*> images) {
    std::vector<PauliOperator> xs, zs;
    std::size_t i = 0;
    for (const char* s : images) {
        (i % 2 == 0 ? xs : zs).push_back(PauliOperator::from_string(s));
        ++i;
    }
    return CliffordTableau::from_images(std::move(xs), std::move(zs));
}

void add(GateLibrary& lib, std::string name, std::vector<std::string> aliases, Matrix dense,
         const CliffordTableau* expected = nullptr) {
    GateDefinition def;
    def.name = std::move(name);
    def.aliases = std::move(aliases);
    def.arity = dense.rows() == 2 ? 1 : 2;
    def.dense = std::move(dense);
    def.tableau = tableau_from_unitary(def.dense);
    if (expected && !(def.tableau == *expected)) {
        throw std::logic_error("gate " + def.name + " dense matrix disagrees with its declared action");
    }
    lib.register_gate(std::move(def));
}

GateLibrary build_library() {
    GateLibrary lib;
    CliffordTableau t;
    t = declared({"X", "Z"});
    add(lib, "I", {"ID"}, mat2(1, 0, 0, 1), &t);
    t = declared({"X", "-Z"});
    add(lib, "X", {"X(pi)"}, mat2(0, 1, 1, 0), &t);
    t = declared({"-X", "Z"});
    add(lib, "Z", {"Z(pi)"}, mat2(1, 0, 0, -1), &t);
    t = declared({"-X", "-Z"});
    add(lib, "Y", {"Y(pi)"}, mat2(0, -kI, kI, 0), &t);
    t = declared({"X", "-Y"});
    add(lib, "X90", {"X(pi/2)"}, kR * mat2(1, -kI, -kI, 1), &t);
    add(lib, "Xm90", {"X(-pi/2)"}, kR * mat2(1, kI, kI, 1));
    add(lib, "Y90", {"Y(pi/2)"}, kR * mat2(1, -1, 1, 1));
    add(lib, "Ym90", {"Y(-pi/2)"}, kR * mat2(1, 1, -1, 1));
    t = declared({"Y", "Z"});
    add(lib, "S", {"Z90", "Z(pi/2)", "P"}, mat2(1, 0, 0, kI), &t);
    add(lib, "Sdg", {"Zm90", "Z(-pi/2)"}, mat2(1, 0, 0, -kI));
    // Axis-cycling gate X -> Y -> Z -> X.
    t = declared({"Y", "X"});
    add(lib, "T", {"PH"}, (-kI * kR) * mat2(1, -kI, 1, kI), &t);
    add(lib, "Tdg", {}, (kI * kR) * mat2(1, 1, kI, -kI));
    t = declared({"Z", "X"});
    add(lib, "H", {"Hadamard"}, kR * mat2(1, 1, 1, -1), &t);

    Matrix cx = Matrix::Zero(4, 4);
    cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
    t = declared({"XX", "ZI", "IX", "ZZ"});
    add(lib, "CX", {"CNOT"}, cx, &t);
    t = declared({"XZ", "ZI", "ZX", "IZ"});
    add(lib, "CZ", {"CPHASE"}, diag4(1, 1, 1, -1), &t);
    Matrix ms = Matrix::Identity(4, 4);
    ms(0, 3) = ms(1, 2) = ms(2, 1) = ms(3, 0) = -kI;
    t = declared({"XI", "-YX", "IX", "-XY"});
    add(lib, "MS", {}, kR * ms, &t);
    add(lib, "MSdg", {}, Matrix(kR * ms).adjoint());
    t = declared({"YZ", "ZI", "ZY", "IZ"});
    add(lib, "G", {}, kI * diag4(1, kI, kI, 1), &t);
    add(lib, "Gdg", {}, Matrix(kI * diag4(1, kI, kI, 1)).adjoint());
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    add(lib, "SWAP", {}, swap);
    return lib;
}

}  // namespace

void GateLibrary::register_gate(GateDefinition def) {
    if (contains(def.name)) throw std::invalid_argument("duplicate gate name " + def.name);
    if (def.dense.rows() != (Eigen::Index{1} << def.arity)) throw DimensionError("gate matrix size mismatch");
    Matrix prod = def.dense * def.dense.adjoint();
    if ((prod - Matrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("gate " + def.name + " is not unitary");
    }
    // Tableau and dense conjugation must agree on every generator.
    if (!(tableau_from_unitary(def.dense) == def.tableau)) {
        throw std::invalid_argument("gate " + def.name + " tableau disagrees with its matrix");
    }
    def.inverse_tableau = clifford_inverse(def.tableau);
    std::size_t idx = gates_.size();
    index_[def.name] = idx;
    for (const auto& a : def.aliases) index_[a] = idx;
    gates_.push_back(std::move(def));
}

const GateDefinition& GateLibrary::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnsupportedGateError("unknown gate '" + name + "'");
    return gates_[it->second];
}

bool GateLibrary::contains(const std::string& name) const { return index_.count(name) != 0; }

std::vector<std::string> GateLibrary::names() const {
    std::vector<std::string> out;
    for (const auto& g : gates_) out.push_back(g.name);
    return out;
}

const GateLibrary& builtin_gates() {
    static const GateLibrary lib = build_library();
    return lib;
}

const std::string& one_qubit_map_gate(char from, char to) {
    static const std::string none;
    static const std::map<std::pair<char, char>, std::string> table = [] {
        std::map<std::pair<char, char>, std::string> m;
        const auto& lib = builtin_gates();
        for (char a : {'X', 'Y', 'Z'}) {
            for (char b : {'X', 'Y', 'Z'}) {
                if (a == b) continue;
                for (const char* g : {"H", "S", "Sdg", "X90", "Xm90", "Y90", "Ym90"}) {
                    PauliOperator img = lib.get(g).tableau.apply(PauliOperator::single(1, 0, a));
                    if (img.get(0) == b) {
                        m[{a, b}] = g;
                        break;
                    }
                }
            }
        }
        return m;
    }();
    if (from == to) return none;
    auto it = table.find({from, to});
    if (it == table.end()) throw std::invalid_argument("no one-qubit map between the given kinds");
    return it->second;
}

const std::string& inverse_gate_name(const std::string& name) {
    static const std::map<std::string, std::string> table = [] {
        std::map<std::string, std::string> m;
        const auto& lib = builtin_gates();
        auto names = lib.names();
        for (const auto& a : names) {
            for (const auto& b : names) {
                const auto& ga = lib.get(a);
                const auto& gb = lib.get(b);
                if (ga.arity == gb.arity && ga.inverse_tableau == gb.tableau) {
                    m[a] = b;
                    break;
                }
            }
        }
        return m;
    }();
    auto it = table.find(builtin_gates().get(name).name);
    if (it == table.end()) throw UnsupportedGateError("no registered inverse for gate '" + name + "'");
    return it->second;
}

CliffordTableau sequence_tableau(const GateSequence& seq) {
    const auto& lib = builtin_gates();
    CliffordTableau c(seq.n_qubits);
    for (const auto& op : seq.gates) c.left_apply_local(lib.get(op.name).tableau, op.qubits);
    return c;
}

Matrix sequence_unitary(const GateSequence& seq) {
    const auto& lib = builtin_gates();
    std::size_t dim = std::size_t{1} << seq.n_qubits;
    Matrix u = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& op : seq.gates) u = embed_matrix(lib.get(op.name).dense, op.qubits, seq.n_qubits) * u;
    return u;
}

GateSequence inverse_sequence(const GateSequence& seq) {
    GateSequence out;
    out.n_qubits = seq.n_qubits;
    for (auto it = seq.gates.rbegin(); it != seq.gates.rend(); ++it) out.push(inverse_gate_name(it->name), it->qubits);
    return out;
}

std::vector<std::pair<GateOp, double>> GateSet::instances(std::size_t n) const {
    const auto& lib = builtin_gates();
    std::vector<std::pair<GateOp, double>> out;
    for (const auto& e : entries) {
        if (e.weight < 0) throw std::invalid_argument("gate weights must be nonnegative");
        std::size_t arity = lib.get(e.gate).arity;
        if (e.pattern == "explicit") {
            for (const auto& qs : e.qubits) {
                if (qs.size() != arity) throw DimensionError("explicit qubit tuple has wrong arity");
                for (auto q : qs) {
                    if (q >= n) throw std::out_of_range("gate-set qubit out of range");
                }
                out.push_back({GateOp{e.gate, qs}, e.weight});
            }
        } else if (arity == 1) {
            for (std::size_t q = 0; q < n; ++q) out.push_back({GateOp{e.gate, {q}}, e.weight});
        } else if (e.pattern == "each") {
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    if (a != b) out.push_back({GateOp{e.gate, {a, b}}, e.weight});
        } else if (e.pattern == "all-pairs") {
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b) out.push_back({GateOp{e.gate, {a, b}}, e.weight});
        } else {
            throw std::invalid_argument("unknown qubit pattern '" + e.pattern + "'");
        }
    }
    return out;
}

GateSet GateSet::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    GateSet gs;
    gs.name = j.value("name", "");
    for (const auto& g : j.at("gates")) {
        GateSetEntry e;
        e.gate = g.at("gate").get<std::string>();
        builtin_gates().get(e.gate);
        e.weight = g.value("weight", 1.0);
        if (e.weight < 0) throw std::invalid_argument("gate weights must be nonnegative");
        if (g.contains("qubits")) {
            const auto& q = g.at("qubits");
            if (q.is_string()) {
                e.pattern = q.get<std::string>();
            } else {
                e.pattern = "explicit";
                for (const auto& t : q) e.qubits.push_back(t.get<std::vector<std::size_t>>());
            }
        }
        gs.entries.push_back(std::move(e));
    }
    return gs;
}

std::string GateSet::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["gates"] = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json g;
        g["gate"] = e.gate;
        g["weight"] = e.weight;
        if (e.pattern == "explicit") g["qubits"] = e.qubits; else g["qubits"] = e.pattern;
        j["gates"].push_back(g);
    }
    return j.dump();
}

GateSet builtin_gate_set(const std::string& name) {
    GateSet gs;
    gs.name = name;
    auto one = [&](const char* g) { gs.entries.push_back(GateSetEntry{g, "each", {}, 0.0}); };
    if (name == "1q-clifford+cx") {
        one("H");
        one("S");
        gs.entries.push_back(GateSetEntry{"CX", "each", {}, 1.0});
    } else if (name == "1q-clifford+cz") {
        one("H");
        one("S");
        gs.entries.push_back(GateSetEntry{"CZ", "all-pairs", {}, 1.0});
    } else if (name == "pi2") {
        for (const char* g : {"X90", "Xm90", "Y90", "Ym90"}) one(g);
    } else if (name == "pi2+G") {
        for (const char* g : {"X90", "Xm90", "Y90", "Ym90"}) one(g);
        gs.entries.push_back(GateSetEntry{"G", "all-pairs", {}, 1.0});
    } else if (name == "pi2+ms") {
        for (const char* g : {"X90", "Xm90", "Y90", "Ym90"}) one(g);
        gs.entries.push_back(GateSetEntry{"MS", "all-pairs", {}, 1.0});
    } else {
        throw std::invalid_argument("unknown gate set '" + name + "'");
    }
    return gs;
}

bool generates_clifford_group(const GateSet& gs, std::size_t n, bool quotient) {
    if (n == 0 || n > 2) throw ResourceLimitError("generation check limited to n <= 2");
    const auto& lib = builtin_gates();
    std::vector<CliffordTableau> gens;
    for (const auto& [op, w] : gs.instances(n)) gens.push_back(embed(lib.get(op.name).tableau, op.qubits, n));
    std::unordered_set<std::uint64_t> seen;
    std::deque<CliffordTableau> frontier;
    CliffordTableau id(n);
    seen.insert(id.encode64(quotient));
    frontier.push_back(id);
    while (!frontier.empty()) {
        CliffordTableau c = std::move(frontier.front());
        frontier.pop_front();
        for (const auto& g : gens) {
            CliffordTableau next = clifford_compose(g, c);
            if (seen.insert(next.encode64(quotient)).second) frontier.push_back(std::move(next));
        }
    }
    return seen.size() == static_cast<std::size_t>(group_order(n, quotient));
}

}  // namespace cliffrb
