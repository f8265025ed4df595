#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cliffrb {

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// n-qubit Pauli operator P = i^phase * (tensor over qubits of sigma(x_i, z_i)),
// where sigma(1,0)=X, sigma(0,1)=Z and sigma(1,1)=Y (the Hermitian Y matrix).
// Masks are packed 64 qubits per word, qubit i lives in bit (i % 64) of word i / 64.
class PauliOperator {
public:
    PauliOperator() = default;
    explicit PauliOperator(std::size_t n_qubits);

    static PauliOperator identity(std::size_t n) { return PauliOperator(n); }
    static PauliOperator single(std::size_t n, std::size_t qubit, char kind);
    // Accepts an optional sign prefix (+, -, i, -i, +i) followed by I/X/Y/Z,
    // qubit 0 first.
    static PauliOperator from_string(std::string_view text);
    std::string to_string() const;

    std::size_t n_qubits() const { return n_; }
    std::size_t n_words() const { return x_.size(); }

    bool x(std::size_t q) const { return (x_[q >> 6] >> (q & 63)) & 1u; }
    bool z(std::size_t q) const { return (z_[q >> 6] >> (q & 63)) & 1u; }
    void set_x(std::size_t q, bool v);
    void set_z(std::size_t q, bool v);
    // 'I', 'X', 'Y' or 'Z' at qubit q (phase untouched).
    char get(std::size_t q) const;
    void set(std::size_t q, char kind);

    unsigned phase() const { return phase_; }
    void set_phase(unsigned p) { phase_ = p & 3u; }
    void add_phase(int p) { phase_ = static_cast<unsigned>((static_cast<int>(phase_) + p) & 3); }
    bool sign() const { return phase_ == 2; }

    const std::vector<std::uint64_t>& x_words() const { return x_; }
    const std::vector<std::uint64_t>& z_words() const { return z_; }
    std::vector<std::uint64_t>& x_words() { return x_; }
    std::vector<std::uint64_t>& z_words() { return z_; }

    bool is_identity() const;
    // Phase 0 or 2, i.e. a Hermitian operator.
    bool is_hermitian() const { return (phase_ & 1u) == 0; }
    std::size_t weight() const;
    std::vector<std::size_t> support() const;
    // Same masks, phase 0.
    PauliOperator unsigned_part() const;

    // this <- this * q (matrix product, exact phase).
    PauliOperator& mul_right(const PauliOperator& q);
    // this <- q * this.
    PauliOperator& mul_left(const PauliOperator& q);

    bool commutes(const PauliOperator& q) const;

    friend bool operator==(const PauliOperator& a, const PauliOperator& b) = default;

    std::size_t hash() const;

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> x_;
    std::vector<std::uint64_t> z_;
    unsigned phase_ = 0;
};

PauliOperator operator*(const PauliOperator& p, const PauliOperator& q);
PauliOperator pauli_multiply(const PauliOperator& p, const PauliOperator& q);
bool pauli_commutes(const PauliOperator& p, const PauliOperator& q);
std::vector<std::size_t> pauli_support(const PauliOperator& p);

// Exponent g with sigma(x1,z1) * sigma(x2,z2) = i^g sigma(x1^x2, z1^z2), summed over words.
int pauli_product_phase(const std::vector<std::uint64_t>& x1, const std::vector<std::uint64_t>& z1,
                        const std::vector<std::uint64_t>& x2, const std::vector<std::uint64_t>& z2);

// Index of the phase-0 Pauli on n <= 31 qubits as base-4 digits (I=0, X=1, Z=2, Y=3), qubit 0 lowest.
std::uint64_t pauli_index(const PauliOperator& p);
PauliOperator pauli_from_index(std::size_t n, std::uint64_t index);

struct PauliHash {
    std::size_t operator()(const PauliOperator& p) const { return p.hash(); }
};

struct PauliLess {
    bool operator()(const PauliOperator& a, const PauliOperator& b) const;
};

// Stochastic Pauli channel: probability gamma_P for each phase-0 Pauli P.
class PauliChannel {
public:
    PauliChannel() = default;
    explicit PauliChannel(std::size_t n_qubits);
    PauliChannel(std::size_t n_qubits, std::map<PauliOperator, double, PauliLess> weights);

    static PauliChannel identity(std::size_t n);
    // gamma_I = 1 - p (4^n - 1)/4^n, gamma_P = p / 4^n otherwise.
    static PauliChannel depolarizing(std::size_t n, double p);
    // Keys are Pauli strings without sign, e.g. {"X": 0.01}; the identity weight is the remainder.
    static PauliChannel from_strings(std::size_t n, const std::map<std::string, double>& weights);

    std::size_t n_qubits() const { return n_; }
    const std::map<PauliOperator, double, PauliLess>& weights() const { return weights_; }
    double weight(const PauliOperator& p) const;
    // Total weight on non-identity Paulis.
    double error_weight() const;
    bool is_identity() const { return error_weight() == 0.0; }
    // Multiplies every non-identity weight by factor (identity weight absorbs the rest).
    PauliChannel scaled(double factor) const;
    // Channel of applying a then b.
    PauliChannel compose(const PauliChannel& next) const;
    // Embeds a k-qubit channel onto the given qubits of an n-qubit register.
    PauliChannel embed(std::size_t n, const std::vector<std::size_t>& qubits) const;

private:
    void validate() const;

    std::size_t n_ = 0;
    std::map<PauliOperator, double, PauliLess> weights_;
};

}  // namespace cliffrb
