#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cliffrb/clifford.hpp"
#include "cliffrb/pauli.hpp"
#include "cliffrb/rng.hpp"

namespace cliffrb {

class InvalidStateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Receives every row operation performed on a StabilizerState, so that data indexed by rows
// (such as a distribution over sign lists) can follow along.
class RowObserver {
public:
    virtual ~RowObserver() = default;
    // row target <- row target * row source
    virtual void row_multiplied(std::size_t target, std::size_t source) = 0;
    virtual void rows_swapped(std::size_t a, std::size_t b) = 0;
    // Row j replaced by +-Z_j after a random measurement outcome.
    virtual void row_replaced(std::size_t j) = 0;
};

// Pure stabilizer state kept in graph-state standard form: row j carries a non-identity
// diagonal entry at column j, every other entry of column j is the identity or the column's
// neighbor operator (which anticommutes with the diagonal), and the identity pattern is symmetric.
class StabilizerState {
public:
    StabilizerState() = default;
    // |0...0> on n qubits.
    explicit StabilizerState(std::size_t n);
    // Rows must be n Hermitian, mutually commuting, independent Paulis on n qubits.
    static StabilizerState from_rows(std::vector<PauliOperator> rows);

    std::size_t n_qubits() const { return n_; }
    const std::vector<PauliOperator>& rows() const { return rows_; }
    const PauliOperator& row(std::size_t i) const { return rows_[i]; }
    bool sign(std::size_t i) const { return rows_[i].sign(); }
    char diagonal(std::size_t j) const { return rows_[j].get(j); }
    char neighbor(std::size_t j) const { return neighbor_[j]; }

    // Adds a fresh qubit in |0> as the last index.
    void prepare_zero();
    // Conjugates every row by g acting on the listed qubits, then restores the standard form.
    void apply(const CliffordTableau& g, const std::vector<std::size_t>& qubits);
    void apply_gate(const std::string& name, const std::vector<std::size_t>& qubits);
    // Full n-qubit Clifford.
    void apply(const CliffordTableau& c);

    // True when +-Z_j is a stabilizer, so a Z_j measurement is deterministic.
    bool is_deterministic_z(std::size_t j) const;
    // Measures Z_j. A random outcome consumes exactly one rng draw.
    bool measure_z(std::size_t j, Rng& rng);
    // Measures Z_j, using `outcome_if_random` when the result is not determined.
    bool measure_z_forced(std::size_t j, bool outcome_if_random);
    // Measures a non-identity Hermitian Pauli; outcome 1 means eigenvalue -1.
    bool measure_pauli(const PauliOperator& p, Rng& rng);
    bool measure_pauli_forced(const PauliOperator& p, bool outcome_if_random);
    bool is_deterministic_pauli(const PauliOperator& p) const;

    // +1 if p is in the stabilizer group, -1 if -p is, nothing otherwise.
    std::optional<int> stabilizer_eigenvalue(const PauliOperator& p) const;
    // Rows whose product is +-p (flag per row), if such a product exists.
    std::optional<std::vector<bool>> stabilizer_combination(const PauliOperator& p) const;

    // Not owned; copies of the state keep the same pointer.
    void set_observer(RowObserver* obs) { observer_ = obs; }

    // All three standard-form conditions.
    bool is_gssf() const;
    // Rows re-expressed in reduced echelon form; equal for states with equal stabilizer groups.
    std::vector<PauliOperator> canonical_rows() const;
    std::string to_text() const;

    // Restores the standard form, treating columns with done[j] set as already finished.
    void reduce(std::vector<bool> done);

private:
    friend StabilizerState reduce_gssf(std::vector<PauliOperator> rows);
    void multiply_row(std::size_t target, std::size_t source);
    void swap_rows(std::size_t a, std::size_t b);
    char choose_neighbor(std::size_t col) const;

    std::size_t n_ = 0;
    std::vector<PauliOperator> rows_;
    std::vector<char> neighbor_;
    RowObserver* observer_ = nullptr;
};

// Brings an arbitrary generating set to standard form; throws InvalidStateError if the rows
// do not commute or are dependent.
StabilizerState reduce_gssf(std::vector<PauliOperator> rows);

}  // namespace cliffrb
