#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cliffrb/clifford.hpp"
#include "cliffrb/pauli.hpp"
#include "cliffrb/rng.hpp"

namespace cliffrb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dense matrices use the tensor order qubit 0 (x) qubit 1 (x) ..., so qubit 0 is the most
// significant bit of a basis index.

// Matrix of p including its i^phase scalar.
Matrix pauli_matrix(const PauliOperator& p);
// Embeds a 2^k x 2^k matrix acting on the listed qubits into an n-qubit register.
Matrix embed_matrix(const Matrix& u, const std::vector<std::size_t>& qubits, std::size_t n);
// Tableau of conjugation by u (u P u^dag); throws if u is not Clifford within tol.
CliffordTableau tableau_from_unitary(const Matrix& u, double tol = 1e-9);
bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol = 1e-9);
// exp(-i theta P) for a Hermitian Pauli P.
Matrix pauli_rotation(const PauliOperator& p, double theta);
// Haar-random unitary of dimension d.
Matrix random_unitary(std::size_t d, Rng& rng);

// Trace-preserving map on n <= 3 qubits held as its Pauli-basis process matrix chi:
// rho -> sum_ab chi_ab P_a rho P_b, with P_a indexed by pauli_index.
class DenseSuperoperator {
public:
    DenseSuperoperator() = default;
    static DenseSuperoperator from_kraus(const std::vector<Matrix>& kraus);
    static DenseSuperoperator from_unitary(const Matrix& u);
    static DenseSuperoperator from_process_matrix(std::size_t n, Matrix chi);
    static DenseSuperoperator from_pauli_channel(const PauliChannel& ch);
    static DenseSuperoperator identity(std::size_t n);
    // (1-p) rho + p tr(rho) I / D.
    static DenseSuperoperator depolarizing(std::size_t n, double p);
    // Random trace-preserving channel with the given number of Kraus terms.
    static DenseSuperoperator random_channel(std::size_t n, std::size_t n_kraus, Rng& rng);

    std::size_t n_qubits() const { return n_; }
    std::size_t dim() const { return std::size_t{1} << n_; }
    const Matrix& process_matrix() const { return chi_; }
    // Superoperator trace sum_i |tr A_i|^2 = D^2 chi_00.
    double trace() const;
    bool is_trace_preserving(double tol = 1e-10) const;
    Matrix apply(const Matrix& rho) const;
    // Channel of applying this then next.
    DenseSuperoperator then(const DenseSuperoperator& next) const;
    // Tensor product: this on the first qubits, other on the rest.
    DenseSuperoperator tensor(const DenseSuperoperator& other) const;
    // Maximum absolute entry difference of the process matrices.
    double distance(const DenseSuperoperator& other) const;
    bool is_pauli_channel(double tol = 1e-9) const;

private:
    std::size_t n_ = 0;
    Matrix chi_;
};

// p_d = (D^2 - tr s) / (D^2 - 1).
double depolarization_strength(const DenseSuperoperator& s);
// Average over C in group of C^dag o s o C (conjugation maps taken from the tableaux).
DenseSuperoperator group_twirl(const DenseSuperoperator& s, const std::vector<CliffordTableau>& group);
// Uniform average over the 4^n Paulis.
DenseSuperoperator pauli_twirl(const DenseSuperoperator& s);
// Average gate fidelity of s against the target unitary u: (1 + D chi'_00)/(1 + D).
double gate_fidelity(const DenseSuperoperator& s, const Matrix& u);

// Plain state-vector simulator used as a reference for the stabilizer engine.
class StateVector {
public:
    explicit StateVector(std::size_t n);
    std::size_t n_qubits() const { return n_; }
    const Vector& amplitudes() const { return amps_; }
    void apply(const Matrix& u, const std::vector<std::size_t>& qubits);
    double probability_one(std::size_t q) const;
    // Projects qubit q onto the given bit and renormalizes.
    void collapse(std::size_t q, bool bit);
    // <psi| P |psi>.
    Complex expectation(const PauliOperator& p) const;

private:
    std::size_t n_;
    Vector amps_;
};

}  // namespace cliffrb
