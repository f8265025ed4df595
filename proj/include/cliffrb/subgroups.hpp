#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cliffrb/clifford.hpp"
#include "cliffrb/pauli.hpp"

namespace cliffrb {

using FieldElement = std::uint32_t;

// GF(2^n), n <= 8, with elements stored as polynomial-basis bit masks, plus a chosen basis
// b_1..b_n (b_1 = 1) and its dual basis under the form (u * v)_1.
class FieldContext {
public:
    // Built-in irreducible polynomial for n and the polynomial basis {1, x, x^2, ...}.
    explicit FieldContext(std::size_t n);
    // Same field with a custom basis (polynomial-basis bit masks, first element must be 1).
    FieldContext(std::size_t n, std::vector<FieldElement> basis);

    std::size_t degree() const { return n_; }
    std::uint32_t polynomial() const { return poly_; }
    std::size_t size() const { return std::size_t{1} << n_; }
    const std::vector<FieldElement>& basis() const { return basis_; }
    const std::vector<FieldElement>& dual_basis() const { return dual_; }

    FieldElement mul(FieldElement a, FieldElement b) const;
    FieldElement inv(FieldElement a) const;
    // Coordinates of a in the basis b (bit i = coefficient of b_{i+1}).
    std::uint32_t coordinates(FieldElement a) const;
    // Coefficient of b_1 in the basis expansion of a.
    bool first(FieldElement a) const { return coordinates(a) & 1u; }

    // P(a, c) = X_1^a Z_1^c: x bit of qubit i is (a * dual_i)_1, z bit is (c * b_i)_1.
    PauliOperator pauli(FieldElement a, FieldElement c) const;
    // Inverse of pauli(): the (a, c) pair of a phase-free Pauli.
    std::pair<FieldElement, FieldElement> encode(const PauliOperator& p) const;

private:
    void init();

    std::size_t n_;
    std::uint32_t poly_;
    std::vector<FieldElement> basis_;
    std::vector<FieldElement> dual_;
    // Row i: polynomial-basis mask whose coordinate map picks coefficient i.
    std::vector<std::uint32_t> coord_rows_;
};

// Irreducible polynomial used for GF(2^n), including the x^n term.
std::uint32_t irreducible_polynomial(std::size_t n);

FieldElement field_mul(const FieldContext& ctx, FieldElement a, FieldElement b);
FieldElement field_inv(const FieldContext& ctx, FieldElement a);
// Dual of the context's basis, recomputed by solving the GF(2) linear system.
std::vector<FieldElement> dual_basis(const FieldContext& ctx);

// P = X_1^a Z_1^c  ->  X_1^{k*a} Z_1^{k*c}.
PauliOperator vectorial_power(const FieldContext& ctx, const PauliOperator& p, FieldElement k);

// {I, T, T^2} with T(X) = Y, T(Z) = X.
std::vector<CliffordTableau> t_subgroup();

// The 2^n (4^n - 1) operators with [C](X_1) = P(a, c), [C](Z_1) = P(d, e), c*d + a*e = 1,
// extended to X_j, Z_j by vectorial powers; all signs +.
std::vector<CliffordTableau> q_subgroup(const FieldContext& ctx);
std::vector<CliffordTableau> q_subgroup(std::size_t n);

// counts[i][j] = |{C in K : C(P_i) = +-P_j}| over non-identity Paulis in index order.
std::vector<std::vector<std::size_t>> twirl_action_counts(const std::vector<CliffordTableau>& k_set);
// True iff every entry of twirl_action_counts is equal (n <= 2).
bool verify_twirl_set(const std::vector<CliffordTableau>& k_set);

}  // namespace cliffrb
