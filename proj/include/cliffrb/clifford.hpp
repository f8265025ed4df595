#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cliffrb/pauli.hpp"
#include "cliffrb/rng.hpp"

namespace cliffrb {

class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A Clifford operator stored by the signed images C(X_i) and C(Z_i) under conjugation.
// Images are Hermitian (phase 0 or 2); the sign is the only scalar kept.
class CliffordTableau {
public:
    CliffordTableau() = default;
    // Identity on n qubits.
    explicit CliffordTableau(std::size_t n_qubits);

    static CliffordTableau identity(std::size_t n) { return CliffordTableau(n); }
    // Throws std::invalid_argument if the images do not form a valid tableau.
    static CliffordTableau from_images(std::vector<PauliOperator> xs, std::vector<PauliOperator> zs);
    // Conjugation by the Pauli p (signs only).
    static CliffordTableau from_pauli(const PauliOperator& p);
    // Text form: 2n lines "X_i -> <signed pauli>" / "Z_i -> <signed pauli>".
    static CliffordTableau from_text(const std::string& text);
    std::string to_text() const;

    std::size_t n_qubits() const { return n_; }
    const PauliOperator& image_x(std::size_t i) const { return xs_[i]; }
    const PauliOperator& image_z(std::size_t i) const { return zs_[i]; }
    void set_image_x(std::size_t i, PauliOperator p) { xs_[i] = std::move(p); }
    void set_image_z(std::size_t i, PauliOperator p) { zs_[i] = std::move(p); }
    const std::vector<PauliOperator>& images_x() const { return xs_; }
    const std::vector<PauliOperator>& images_z() const { return zs_; }

    // C(p) with exact phase; p = i^k X^a Z^b is decomposed with Y = i X Z.
    PauliOperator apply(const PauliOperator& p) const;

    // Commutation structure and independence of the 2n images.
    bool is_valid() const;
    // True when every image equals +-X_i / +-Z_i, i.e. the operator is a Pauli.
    bool is_pauli() const;
    bool is_identity() const;
    // The Pauli P with conjugation action equal to this tableau, if is_pauli().
    PauliOperator as_pauli() const;
    // Distinguished coset representative: all signs cleared.
    CliffordTableau unsigned_representative() const;

    // Canonical bit encoding: 4n^2 + 2n bits, signs zeroed when quotient is set.
    std::vector<std::uint64_t> encode(bool quotient) const;
    // Single-word form, n <= 3.
    std::uint64_t encode64(bool quotient) const;
    static CliffordTableau decode64(std::size_t n, std::uint64_t code);

    // this <- g o this with g acting on the listed qubits.
    void left_apply_local(const CliffordTableau& g, const std::vector<std::size_t>& qubits);
    // this <- this o g with g acting on the listed qubits.
    void right_apply_local(const CliffordTableau& g, const std::vector<std::size_t>& qubits);

    friend bool operator==(const CliffordTableau& a, const CliffordTableau& b) = default;

private:
    std::size_t n_ = 0;
    std::vector<PauliOperator> xs_;
    std::vector<PauliOperator> zs_;
};

struct TableauHash {
    std::size_t operator()(const CliffordTableau& c) const;
};

// (c o d): apply d first.
CliffordTableau clifford_compose(const CliffordTableau& c, const CliffordTableau& d);
CliffordTableau clifford_inverse(const CliffordTableau& c);
PauliOperator clifford_apply(const CliffordTableau& c, const PauliOperator& p);

// g (a k-qubit tableau) acting on the given qubits of p.
PauliOperator apply_local(const CliffordTableau& g, const std::vector<std::size_t>& qubits,
                          const PauliOperator& p);
// Embeds a k-qubit tableau on the given qubits of an n-qubit register.
CliffordTableau embed(const CliffordTableau& g, const std::vector<std::size_t>& qubits, std::size_t n);
// Tensor product a (qubits 0..k-1) with b (qubits k..).
CliffordTableau tensor(const CliffordTableau& a, const CliffordTableau& b);

// Rank of a list of Pauli masks over GF(2) (phases ignored).
std::size_t gf2_rank(const std::vector<PauliOperator>& rows);

struct GateOp {
    std::string name;
    std::vector<std::size_t> qubits;
    friend bool operator==(const GateOp&, const GateOp&) = default;
};

// Ordered gate list, applied first to last.
struct GateSequence {
    std::size_t n_qubits = 0;
    std::vector<GateOp> gates;

    void push(std::string name, std::vector<std::size_t> qubits) {
        gates.push_back(GateOp{std::move(name), std::move(qubits)});
    }
    void append(const GateSequence& other);
    std::size_t size() const { return gates.size(); }
    bool empty() const { return gates.empty(); }
    std::string to_string() const;
    friend bool operator==(const GateSequence&, const GateSequence&) = default;
};

// Gates mapping p to +-q (p, q non-identity). Uses one-qubit gates, SWAP and CZ on the union of supports.
GateSequence find_mapping(const PauliOperator& p, const PauliOperator& q);

// |C_n| (or |C_n / P_n| when quotient) as an exact integer.
boost::multiprecision::cpp_int group_order(std::size_t n, bool quotient);

// Per-step choice-set sizes of the uniform sampler: (2(4^{n-k+1}-1), 4 * 4^{n-k}) for k = 1..n.
std::vector<std::pair<boost::multiprecision::cpp_int, boost::multiprecision::cpp_int>>
sampling_choice_counts(std::size_t n);

// Complete deduplicated list of C_n (n <= 2) or of the quotient (n <= 3), identity first.
std::vector<CliffordTableau> enumerate_group(std::size_t n, bool quotient);

// Exactly uniform Clifford on n qubits.
CliffordTableau sample_uniform(std::size_t n, Rng& rng);

// Uniform Pauli (including identity) as an unsigned operator.
PauliOperator random_pauli(std::size_t n, Rng& rng);

}  // namespace cliffrb
