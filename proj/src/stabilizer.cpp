#include "cliffrb/stabilizer.hpp"

#include <sstream>

#include "cliffrb/gates.hpp"

namespace cliffrb {

namespace {

bool kinds_anticommute(char a, char b) { return a != 'I' && b != 'I' && a != b; }

void check_rows(const std::vector<PauliOperator>& rows) {
    std::size_t n = rows.size();
    for (const auto& r : rows) {
        if (r.n_qubits() != n) throw InvalidStateError("stabilizer rows must be n Paulis on n qubits");
        if (!r.is_hermitian()) throw InvalidStateError("stabilizer rows must be Hermitian");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!rows[i].commutes(rows[j])) throw InvalidStateError("stabilizer rows do not commute");
        }
    }
    if (gf2_rank(rows) != n) throw InvalidStateError("stabilizer rows are dependent");
}

// Bit b of the 2n-bit vector (x bits of qubits 0..n-1, then z bits).
bool row_bit(const PauliOperator& p, std::size_t b) {
    std::size_t n = p.n_qubits();
    return b < n ? p.x(b) : p.z(b - n);
}

// Reduced row echelon form over GF(2) with exact phases; returns pivot bit per row.
std::vector<std::size_t> echelonize(std::vector<PauliOperator>& rows) {
    std::size_t n = rows.empty() ? 0 : rows.front().n_qubits();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t b = 0; b < 2 * n && r < rows.size(); ++b) {
        std::size_t sel = r;
        while (sel < rows.size() && !row_bit(rows[sel], b)) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != r && row_bit(rows[i], b)) rows[i].mul_right(rows[r]);
        }
        pivots.push_back(b);
        ++r;
    }
    rows.resize(r);
    return pivots;
}

}  // namespace

StabilizerState::StabilizerState(std::size_t n) : n_(n), neighbor_(n, 'X') {
    rows_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rows_.push_back(PauliOperator::single(n, i, 'Z'));
}

StabilizerState StabilizerState::from_rows(std::vector<PauliOperator> rows) { return reduce_gssf(std::move(rows)); }

StabilizerState reduce_gssf(std::vector<PauliOperator> rows) {
    check_rows(rows);
    StabilizerState s;
    s.n_ = rows.size();
    s.rows_ = std::move(rows);
    s.neighbor_.assign(s.n_, 'X');
    s.reduce(std::vector<bool>(s.n_, false));
    return s;
}

void StabilizerState::multiply_row(std::size_t target, std::size_t source) {
    rows_[target].mul_right(rows_[source]);
    if (observer_) observer_->row_multiplied(target, source);
}

void StabilizerState::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap(rows_[a], rows_[b]);
    if (observer_) observer_->rows_swapped(a, b);
}

char StabilizerState::choose_neighbor(std::size_t col) const {
    char diag = rows_[col].get(col);
    for (std::size_t a = 0; a < n_; ++a) {
        if (a == col) continue;
        char e = rows_[a].get(col);
        if (kinds_anticommute(e, diag)) return e;
    }
    for (char c : {'Z', 'X', 'Y'}) {
        if (kinds_anticommute(c, diag)) return c;
    }
    throw InvalidStateError("identity on the diagonal");
}

void StabilizerState::reduce(std::vector<bool> done) {
    if (done.size() != n_) throw DimensionError("reduce: column mask size mismatch");
    for (;;) {
        std::size_t r = 0;
        while (r < n_ && done[r]) ++r;
        if (r == n_) break;
        std::size_t d = 0;
        while (d < n_ && (done[d] || rows_[r].get(d) == 'I')) ++d;
        if (d == n_) throw InvalidStateError("stabilizer rows are dependent");
        swap_rows(r, d);
        char nb = choose_neighbor(d);
        for (std::size_t a = 0; a < n_; ++a) {
            if (a == d) continue;
            char e = rows_[a].get(d);
            if (e != 'I' && e != nb) multiply_row(a, d);
        }
        neighbor_[d] = nb;
        done[d] = true;
    }
}

void StabilizerState::prepare_zero() {
    std::size_t n = n_ + 1;
    std::vector<PauliOperator> rows;
    rows.reserve(n);
    for (const auto& r : rows_) {
        PauliOperator e(n);
        for (std::size_t q = 0; q < n_; ++q) e.set(q, r.get(q));
        e.set_phase(r.phase());
        rows.push_back(std::move(e));
    }
    rows.push_back(PauliOperator::single(n, n_, 'Z'));
    rows_ = std::move(rows);
    neighbor_.push_back('X');
    n_ = n;
}

void StabilizerState::apply(const CliffordTableau& g, const std::vector<std::size_t>& qubits) {
    if (g.n_qubits() != qubits.size()) throw DimensionError("gate arity does not match qubit list");
    std::vector<bool> done(n_, true);
    for (std::size_t q : qubits) {
        if (q >= n_) throw std::out_of_range("qubit index out of range");
        done[q] = false;
    }
    for (auto& r : rows_) r = apply_local(g, qubits, r);
    reduce(std::move(done));
}

void StabilizerState::apply_gate(const std::string& name, const std::vector<std::size_t>& qubits) {
    apply(builtin_gates().get(name).tableau, qubits);
}

void StabilizerState::apply(const CliffordTableau& c) {
    if (c.n_qubits() != n_) throw DimensionError("Clifford size does not match state");
    for (auto& r : rows_) r = c.apply(r);
    reduce(std::vector<bool>(n_, false));
}

bool StabilizerState::is_deterministic_z(std::size_t j) const {
    if (j >= n_) throw std::out_of_range("qubit index out of range");
    if (rows_[j].get(j) != 'Z') return false;
    for (std::size_t a = 0; a < n_; ++a) {
        if (a != j && rows_[a].get(j) != 'I') return false;
    }
    return true;
}

bool StabilizerState::measure_z(std::size_t j, Rng& rng) {
    if (is_deterministic_z(j)) return rows_[j].sign();
    return measure_z_forced(j, random_bit(rng));
}

bool StabilizerState::measure_z_forced(std::size_t j, bool outcome_if_random) {
    if (is_deterministic_z(j)) return rows_[j].sign();

    // Step 1: make the diagonal of column j anticommute with Z.
    if (rows_[j].get(j) == 'Z') {
        std::size_t i = 0;
        while (i < n_ && (i == j || rows_[i].get(j) == 'I')) ++i;
        swap_rows(i, j);
        std::vector<bool> done(n_, true);
        done[i] = false;
        done[j] = false;
        reduce(std::move(done));
        if (rows_[j].get(j) == 'Z') throw std::logic_error("measure_z: diagonal still Z after reduction");
    }

    // Step 2: make Z the neighbor operator of column j.
    if (neighbor_[j] != 'Z') {
        for (std::size_t a = 0; a < n_; ++a) {
            if (a != j && rows_[a].get(j) != 'I') multiply_row(a, j);
        }
        neighbor_[j] = 'Z';
    }

    // Step 3: row j is now the only row anticommuting with Z_j.
    PauliOperator zj = PauliOperator::single(n_, j, 'Z');
    if (outcome_if_random) zj.set_phase(2);
    rows_[j] = zj;
    if (observer_) observer_->row_replaced(j);
    for (std::size_t a = 0; a < n_; ++a) {
        if (a != j && rows_[a].get(j) != 'I') multiply_row(a, j);
    }
    neighbor_[j] = choose_neighbor(j);
    return outcome_if_random;
}

bool StabilizerState::is_deterministic_pauli(const PauliOperator& p) const {
    return stabilizer_eigenvalue(p).has_value();
}

bool StabilizerState::measure_pauli(const PauliOperator& p, Rng& rng) {
    if (p.n_qubits() != n_) throw DimensionError("Pauli size does not match state");
    if (p.is_identity()) throw std::invalid_argument("cannot measure the identity");
    if (!p.is_hermitian()) throw std::invalid_argument("measured Pauli must be Hermitian");
    if (auto ev = stabilizer_eigenvalue(p)) return *ev < 0;
    return measure_pauli_forced(p, random_bit(rng));
}

bool StabilizerState::measure_pauli_forced(const PauliOperator& p, bool outcome_if_random) {
    if (p.n_qubits() != n_) throw DimensionError("Pauli size does not match state");
    if (p.is_identity()) throw std::invalid_argument("cannot measure the identity");
    if (!p.is_hermitian()) throw std::invalid_argument("measured Pauli must be Hermitian");
    if (auto ev = stabilizer_eigenvalue(p)) return *ev < 0;

    const auto& lib = builtin_gates();
    GateSequence seq = find_mapping(p, PauliOperator::single(n_, 0, 'Z'));
    PauliOperator image = p;
    for (const auto& op : seq.gates) {
        const auto& g = lib.get(op.name).tableau;
        image = apply_local(g, op.qubits, image);
        apply(g, op.qubits);
    }
    // image is +-Z_0; a minus sign flips the reported outcome.
    bool flip = image.sign();
    bool b = measure_z_forced(0, outcome_if_random != flip);
    for (const auto& op : inverse_sequence(seq).gates) apply(lib.get(op.name).tableau, op.qubits);
    return b != flip;
}

std::optional<std::vector<bool>> StabilizerState::stabilizer_combination(const PauliOperator& p) const {
    if (p.n_qubits() != n_) throw DimensionError("Pauli size does not match state");
    for (const auto& r : rows_) {
        if (!r.commutes(p)) return std::nullopt;
    }
    // Echelonize bit masks while tracking which original rows make up each reduced row.
    std::vector<PauliOperator> rows;
    std::vector<std::vector<bool>> combos;
    for (std::size_t i = 0; i < n_; ++i) {
        rows.push_back(rows_[i].unsigned_part());
        combos.emplace_back(n_, false);
        combos.back()[i] = true;
    }
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t b = 0; b < 2 * n_ && r < n_; ++b) {
        std::size_t sel = r;
        while (sel < n_ && !row_bit(rows[sel], b)) ++sel;
        if (sel == n_) continue;
        std::swap(rows[r], rows[sel]);
        std::swap(combos[r], combos[sel]);
        for (std::size_t i = 0; i < n_; ++i) {
            if (i != r && row_bit(rows[i], b)) {
                rows[i].mul_right(rows[r]);
                for (std::size_t k = 0; k < n_; ++k) combos[i][k] = combos[i][k] != combos[r][k];
            }
        }
        pivots.push_back(b);
        ++r;
    }
    PauliOperator residual = p.unsigned_part();
    std::vector<bool> combo(n_, false);
    for (std::size_t k = 0; k < pivots.size(); ++k) {
        if (row_bit(residual, pivots[k])) {
            residual.mul_right(rows[k]);
            for (std::size_t i = 0; i < n_; ++i) combo[i] = combo[i] != combos[k][i];
        }
    }
    if (!residual.is_identity()) return std::nullopt;
    return combo;
}

std::optional<int> StabilizerState::stabilizer_eigenvalue(const PauliOperator& p) const {
    auto combo = stabilizer_combination(p);
    if (!combo) return std::nullopt;
    PauliOperator acc(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if ((*combo)[i]) acc.mul_right(rows_[i]);
    }
    // acc = i^a sigma and p = i^b sigma share their masks.
    unsigned diff = (acc.phase() + 4u - p.phase()) & 3u;
    if (diff == 0) return 1;
    if (diff == 2) return -1;
    return std::nullopt;
}

bool StabilizerState::is_gssf() const {
    for (std::size_t j = 0; j < n_; ++j) {
        char diag = rows_[j].get(j);
        if (diag == 'I') return false;
        if (!kinds_anticommute(neighbor_[j], diag)) return false;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == j) continue;
            char e = rows_[i].get(j);
            if (e != 'I' && e != neighbor_[j]) return false;
            if ((e == 'I') != (rows_[j].get(i) == 'I')) return false;
        }
    }
    return true;
}

std::vector<PauliOperator> StabilizerState::canonical_rows() const {
    std::vector<PauliOperator> rows = rows_;
    echelonize(rows);
    return rows;
}

std::string StabilizerState::to_text() const {
    std::ostringstream os;
    for (const auto& r : rows_) {
        std::string s = r.to_string();
        if (s.empty() || (s[0] != '+' && s[0] != '-')) s = "+" + s;
        os << s << '\n';
    }
    return os.str();
}

}  // namespace cliffrb
