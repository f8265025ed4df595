#include "cliffrb/pauli.hpp"

#include <cmath>
#include <functional>

namespace cliffrb {

namespace {

std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

void require_same_size(const PauliOperator& p, const PauliOperator& q) {
    if (p.n_qubits() != q.n_qubits()) {
        throw DimensionError("Pauli size mismatch: " + std::to_string(p.n_qubits()) + " vs " +
                             std::to_string(q.n_qubits()));
    }
}

}  // namespace

PauliOperator::PauliOperator(std::size_t n_qubits)
    : n_(n_qubits), x_(words_for(n_qubits), 0), z_(words_for(n_qubits), 0) {}

PauliOperator PauliOperator::single(std::size_t n, std::size_t qubit, char kind) {
    if (qubit >= n) throw std::out_of_range("qubit index out of range");
    PauliOperator p(n);
    p.set(qubit, kind);
    return p;
}

PauliOperator PauliOperator::from_string(std::string_view text) {
    unsigned phase = 0;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (!text.empty() && text.front() == '-') {
        phase = 2;
        text.remove_prefix(1);
    }
    if (!text.empty() && text.front() == 'i') {
        phase += 1;
        text.remove_prefix(1);
    }
    PauliOperator p(text.size());
    for (std::size_t q = 0; q < text.size(); ++q) {
        char c = text[q];
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z' && c != '_') {
            throw std::invalid_argument("bad Pauli character '" + std::string(1, c) + "'");
        }
        p.set(q, c == '_' ? 'I' : c);
    }
    p.phase_ = phase & 3u;
    return p;
}

std::string PauliOperator::to_string() const {
    static const char* prefixes[4] = {"", "i", "-", "-i"};
    std::string s = prefixes[phase_];
    s.reserve(s.size() + n_);
    for (std::size_t q = 0; q < n_; ++q) s.push_back(get(q));
    return s;
}

void PauliOperator::set_x(std::size_t q, bool v) {
    std::uint64_t bit = std::uint64_t{1} << (q & 63);
    if (v) x_[q >> 6] |= bit; else x_[q >> 6] &= ~bit;
}

void PauliOperator::set_z(std::size_t q, bool v) {
    std::uint64_t bit = std::uint64_t{1} << (q & 63);
    if (v) z_[q >> 6] |= bit; else z_[q >> 6] &= ~bit;
}

char PauliOperator::get(std::size_t q) const {
    static const char table[4] = {'I', 'X', 'Z', 'Y'};
    return table[(x(q) ? 1 : 0) | (z(q) ? 2 : 0)];
}

void PauliOperator::set(std::size_t q, char kind) {
    switch (kind) {
        case 'I': set_x(q, false); set_z(q, false); break;
        case 'X': set_x(q, true); set_z(q, false); break;
        case 'Y': set_x(q, true); set_z(q, true); break;
        case 'Z': set_x(q, false); set_z(q, true); break;
        default: throw std::invalid_argument("bad Pauli kind");
    }
}

bool PauliOperator::is_identity() const {
    for (std::size_t w = 0; w < x_.size(); ++w) {
        if (x_[w] | z_[w]) return false;
    }
    return true;
}

std::size_t PauliOperator::weight() const {
    std::size_t c = 0;
    for (std::size_t w = 0; w < x_.size(); ++w) c += std::popcount(x_[w] | z_[w]);
    return c;
}

std::vector<std::size_t> PauliOperator::support() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < x_.size(); ++w) {
        std::uint64_t m = x_[w] | z_[w];
        while (m) {
            int b = std::countr_zero(m);
            out.push_back(w * 64 + static_cast<std::size_t>(b));
            m &= m - 1;
        }
    }
    return out;
}

PauliOperator PauliOperator::unsigned_part() const {
    PauliOperator p = *this;
    p.phase_ = 0;
    return p;
}

int pauli_product_phase(const std::vector<std::uint64_t>& x1, const std::vector<std::uint64_t>& z1,
                        const std::vector<std::uint64_t>& x2, const std::vector<std::uint64_t>& z2) {
    int total = 0;
    for (std::size_t w = 0; w < x1.size(); ++w) {
        std::uint64_t a_x = x1[w] & ~z1[w], a_y = x1[w] & z1[w], a_z = ~x1[w] & z1[w];
        std::uint64_t b_x = x2[w] & ~z2[w], b_y = x2[w] & z2[w], b_z = ~x2[w] & z2[w];
        std::uint64_t pos = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
        std::uint64_t neg = (a_y & b_x) | (a_z & b_y) | (a_x & b_z);
        total += std::popcount(pos) - std::popcount(neg);
    }
    return total;
}

PauliOperator& PauliOperator::mul_right(const PauliOperator& q) {
    require_same_size(*this, q);
    int g = pauli_product_phase(x_, z_, q.x_, q.z_);
    for (std::size_t w = 0; w < x_.size(); ++w) {
        x_[w] ^= q.x_[w];
        z_[w] ^= q.z_[w];
    }
    add_phase(static_cast<int>(q.phase_) + g);
    return *this;
}

PauliOperator& PauliOperator::mul_left(const PauliOperator& q) {
    require_same_size(*this, q);
    int g = pauli_product_phase(q.x_, q.z_, x_, z_);
    for (std::size_t w = 0; w < x_.size(); ++w) {
        x_[w] ^= q.x_[w];
        z_[w] ^= q.z_[w];
    }
    add_phase(static_cast<int>(q.phase_) + g);
    return *this;
}

bool PauliOperator::commutes(const PauliOperator& q) const {
    require_same_size(*this, q);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < x_.size(); ++w) {
        acc ^= static_cast<std::uint64_t>(std::popcount((x_[w] & q.z_[w]) ^ (z_[w] & q.x_[w])) & 1);
    }
    return acc == 0;
}

std::size_t PauliOperator::hash() const {
    std::size_t h = std::hash<std::size_t>{}(n_) ^ (static_cast<std::size_t>(phase_) * 0x9e3779b97f4a7c15ULL);
    for (std::size_t w = 0; w < x_.size(); ++w) {
        h ^= std::hash<std::uint64_t>{}(x_[w]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= std::hash<std::uint64_t>{}(z_[w]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

PauliOperator operator*(const PauliOperator& p, const PauliOperator& q) {
    PauliOperator r = p;
    r.mul_right(q);
    return r;
}

PauliOperator pauli_multiply(const PauliOperator& p, const PauliOperator& q) { return p * q; }

bool pauli_commutes(const PauliOperator& p, const PauliOperator& q) { return p.commutes(q); }

std::vector<std::size_t> pauli_support(const PauliOperator& p) { return p.support(); }

std::uint64_t pauli_index(const PauliOperator& p) {
    if (p.n_qubits() > 31) throw DimensionError("pauli_index supports at most 31 qubits");
    std::uint64_t idx = 0;
    for (std::size_t q = p.n_qubits(); q-- > 0;) {
        idx = idx * 4 + (p.x(q) ? 1u : 0u) + (p.z(q) ? 2u : 0u);
    }
    return idx;
}

PauliOperator pauli_from_index(std::size_t n, std::uint64_t index) {
    PauliOperator p(n);
    for (std::size_t q = 0; q < n; ++q) {
        p.set_x(q, index & 1u);
        p.set_z(q, index & 2u);
        index >>= 2;
    }
    return p;
}

bool PauliLess::operator()(const PauliOperator& a, const PauliOperator& b) const {
    if (a.n_qubits() != b.n_qubits()) return a.n_qubits() < b.n_qubits();
    for (std::size_t w = a.n_words(); w-- > 0;) {
        if (a.x_words()[w] != b.x_words()[w]) return a.x_words()[w] < b.x_words()[w];
        if (a.z_words()[w] != b.z_words()[w]) return a.z_words()[w] < b.z_words()[w];
    }
    return a.phase() < b.phase();
}

PauliChannel::PauliChannel(std::size_t n_qubits) : n_(n_qubits) {
    weights_[PauliOperator(n_qubits)] = 1.0;
}

PauliChannel::PauliChannel(std::size_t n_qubits, std::map<PauliOperator, double, PauliLess> weights)
    : n_(n_qubits), weights_(std::move(weights)) {
    validate();
}

PauliChannel PauliChannel::identity(std::size_t n) { return PauliChannel(n); }

PauliChannel PauliChannel::depolarizing(std::size_t n, double p) {
    if (n > 12) throw DimensionError("explicit depolarizing channel limited to 12 qubits");
    double d2 = std::ldexp(1.0, static_cast<int>(2 * n));
    if (p < 0.0 || p > d2 / (d2 - 1.0) + 1e-15) {
        throw std::invalid_argument("depolarizing strength out of range");
    }
    std::map<PauliOperator, double, PauliLess> w;
    std::uint64_t count = std::uint64_t{1} << (2 * n);
    w[PauliOperator(n)] = 1.0 - p * (d2 - 1.0) / d2;
    for (std::uint64_t i = 1; i < count; ++i) w[pauli_from_index(n, i)] = p / d2;
    return PauliChannel(n, std::move(w));
}

PauliChannel PauliChannel::from_strings(std::size_t n, const std::map<std::string, double>& weights) {
    std::map<PauliOperator, double, PauliLess> w;
    double err = 0.0;
    for (const auto& [text, prob] : weights) {
        PauliOperator p = PauliOperator::from_string(text);
        if (p.n_qubits() != n) throw DimensionError("channel key '" + text + "' has wrong length");
        if (p.phase() != 0) throw std::invalid_argument("channel keys must carry no sign");
        if (p.is_identity()) continue;
        w[p] += prob;
        err += prob;
    }
    w[PauliOperator(n)] = 1.0 - err;
    return PauliChannel(n, std::move(w));
}

double PauliChannel::weight(const PauliOperator& p) const {
    auto it = weights_.find(p);
    return it == weights_.end() ? 0.0 : it->second;
}

double PauliChannel::error_weight() const {
    double s = 0.0;
    for (const auto& [p, w] : weights_) {
        if (!p.is_identity()) s += w;
    }
    return s;
}

PauliChannel PauliChannel::scaled(double factor) const {
    std::map<PauliOperator, double, PauliLess> w;
    double err = 0.0;
    for (const auto& [p, g] : weights_) {
        if (p.is_identity()) continue;
        w[p] = g * factor;
        err += g * factor;
    }
    w[PauliOperator(n_)] = 1.0 - err;
    return PauliChannel(n_, std::move(w));
}

PauliChannel PauliChannel::compose(const PauliChannel& next) const {
    if (next.n_ != n_) throw DimensionError("channel size mismatch");
    std::map<PauliOperator, double, PauliLess> w;
    for (const auto& [p, a] : weights_) {
        for (const auto& [q, b] : next.weights_) {
            PauliOperator r = (p * q).unsigned_part();
            w[r] += a * b;
        }
    }
    return PauliChannel(n_, std::move(w));
}

PauliChannel PauliChannel::embed(std::size_t n, const std::vector<std::size_t>& qubits) const {
    if (qubits.size() != n_) throw DimensionError("embedding qubit list has wrong length");
    std::map<PauliOperator, double, PauliLess> w;
    for (const auto& [p, g] : weights_) {
        PauliOperator big(n);
        for (std::size_t k = 0; k < n_; ++k) {
            if (qubits[k] >= n) throw std::out_of_range("embedding qubit out of range");
            big.set(qubits[k], p.get(k));
        }
        w[big] += g;
    }
    return PauliChannel(n, std::move(w));
}

void PauliChannel::validate() const {
    double total = 0.0;
    for (const auto& [p, g] : weights_) {
        if (p.n_qubits() != n_) throw DimensionError("channel key has wrong size");
        if (p.phase() != 0) throw std::invalid_argument("channel keys must have phase 0");
        if (g < -1e-15 || g > 1.0 + 1e-12) throw std::invalid_argument("channel weight outside [0,1]");
        total += g;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("channel weights sum to " + std::to_string(total));
    }
}

}  // namespace cliffrb
