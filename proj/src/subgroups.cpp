#include "cliffrb/subgroups.hpp"

#include <bit>
#include <stdexcept>

#include "cliffrb/gates.hpp"

namespace cliffrb {

namespace {

// Solves M y = rhs over GF(2); rows of M are bit masks over n unknowns. Returns nothing if singular.
bool solve_gf2(std::vector<std::uint32_t> rows, std::vector<std::uint32_t> rhs, std::size_t n,
               std::uint32_t& solution) {
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t sel = r;
        while (sel < rows.size() && !((rows[sel] >> c) & 1u)) ++sel;
        if (sel == rows.size()) return false;
        std::swap(rows[r], rows[sel]);
        std::swap(rhs[r], rhs[sel]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != r && ((rows[i] >> c) & 1u)) {
                rows[i] ^= rows[r];
                rhs[i] ^= rhs[r];
            }
        }
        pivot_col.push_back(c);
        ++r;
    }
    solution = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rhs[i] & 1u) solution |= 1u << pivot_col[i];
    }
    return true;
}

}  // namespace

std::uint32_t irreducible_polynomial(std::size_t n) {
    static const std::uint32_t table[9] = {0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011,
                                           0b100011011};
    if (n == 0 || n > 8) throw DimensionError("GF(2^n) supported for 1 <= n <= 8");
    return table[n];
}

FieldContext::FieldContext(std::size_t n) : n_(n), poly_(irreducible_polynomial(n)) {
    for (std::size_t i = 0; i < n; ++i) basis_.push_back(1u << i);
    init();
}

FieldContext::FieldContext(std::size_t n, std::vector<FieldElement> basis)
    : n_(n), poly_(irreducible_polynomial(n)), basis_(std::move(basis)) {
    if (basis_.size() != n || basis_.front() != 1u) throw std::invalid_argument("basis must have n elements, b_1 = 1");
    init();
}

void FieldContext::init() {
    // Coordinate map: invert the matrix whose columns are the basis elements.
    coord_rows_.assign(n_, 0);
    for (std::size_t bit = 0; bit < n_; ++bit) {
        // Coordinates of the monomial x^bit: solve sum_i alpha_i b_i = x^bit.
        std::vector<std::uint32_t> rows(n_, 0), rhs(n_, 0);
        for (std::size_t k = 0; k < n_; ++k) {
            for (std::size_t i = 0; i < n_; ++i) {
                if ((basis_[i] >> k) & 1u) rows[k] |= 1u << i;
            }
            rhs[k] = (k == bit) ? 1u : 0u;
        }
        std::uint32_t alpha = 0;
        if (!solve_gf2(rows, rhs, n_, alpha)) throw std::invalid_argument("basis elements are dependent");
        for (std::size_t i = 0; i < n_; ++i) {
            if ((alpha >> i) & 1u) coord_rows_[i] |= 1u << bit;
        }
    }
    dual_ = cliffrb::dual_basis(*this);
}

FieldElement FieldContext::mul(FieldElement a, FieldElement b) const {
    std::uint32_t r = 0;
    std::uint32_t top = 1u << n_;
    while (b) {
        if (b & 1u) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top) a ^= poly_;
    }
    return r;
}

FieldElement FieldContext::inv(FieldElement a) const {
    if (a == 0) throw std::domain_error("inverse of zero field element");
    // a^(2^n - 2)
    FieldElement result = 1;
    FieldElement base = a;
    std::uint32_t e = (1u << n_) - 2u;
    while (e) {
        if (e & 1u) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

std::uint32_t FieldContext::coordinates(FieldElement a) const {
    std::uint32_t out = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        if (std::popcount(coord_rows_[i] & a) & 1) out |= 1u << i;
    }
    return out;
}

PauliOperator FieldContext::pauli(FieldElement a, FieldElement c) const {
    PauliOperator p(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        p.set_x(i, first(mul(a, dual_[i])));
        p.set_z(i, first(mul(c, basis_[i])));
    }
    return p;
}

std::pair<FieldElement, FieldElement> FieldContext::encode(const PauliOperator& p) const {
    if (p.n_qubits() != n_) throw DimensionError("Pauli size does not match field degree");
    FieldElement a = 0, c = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        if (p.x(i)) a ^= basis_[i];
        if (p.z(i)) c ^= dual_[i];
    }
    return {a, c};
}

FieldElement field_mul(const FieldContext& ctx, FieldElement a, FieldElement b) { return ctx.mul(a, b); }
FieldElement field_inv(const FieldContext& ctx, FieldElement a) { return ctx.inv(a); }

std::vector<FieldElement> dual_basis(const FieldContext& ctx) {
    std::size_t n = ctx.degree();
    // Row i of the system: the linear functional y -> (b_i * y)_1 as a mask over monomials.
    std::vector<std::uint32_t> rows(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (ctx.first(ctx.mul(ctx.basis()[i], 1u << k))) rows[i] |= 1u << k;
        }
    }
    std::vector<FieldElement> dual;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::uint32_t> rhs(n, 0);
        rhs[j] = 1;
        std::uint32_t y = 0;
        if (!solve_gf2(rows, rhs, n, y)) throw std::logic_error("dual basis system is singular");
        dual.push_back(y);
    }
    return dual;
}

PauliOperator vectorial_power(const FieldContext& ctx, const PauliOperator& p, FieldElement k) {
    if (p.phase() != 0) throw std::invalid_argument("vectorial power needs a phase-free Pauli");
    auto [a, c] = ctx.encode(p);
    return ctx.pauli(ctx.mul(k, a), ctx.mul(k, c));
}

std::vector<CliffordTableau> t_subgroup() {
    const CliffordTableau& t = builtin_gates().get("T").tableau;
    CliffordTableau t2 = clifford_compose(t, t);
    return {CliffordTableau(1), t, t2};
}

std::vector<CliffordTableau> q_subgroup(const FieldContext& ctx) {
    std::size_t n = ctx.degree();
    if (n > 4) throw ResourceLimitError("q_subgroup enumeration limited to n <= 4");
    FieldElement q = static_cast<FieldElement>(ctx.size());
    std::vector<CliffordTableau> out;
    for (FieldElement a = 0; a < q; ++a) {
        for (FieldElement c = 0; c < q; ++c) {
            if (a == 0 && c == 0) continue;
            for (FieldElement d = 0; d < q; ++d) {
                for (FieldElement e = 0; e < q; ++e) {
                    if ((ctx.mul(c, d) ^ ctx.mul(a, e)) != 1u) continue;
                    std::vector<PauliOperator> xs, zs;
                    for (std::size_t j = 0; j < n; ++j) {
                        FieldElement bj = ctx.basis()[j];
                        FieldElement dj = ctx.dual_basis()[j];
                        xs.push_back(ctx.pauli(ctx.mul(bj, a), ctx.mul(bj, c)));
                        zs.push_back(ctx.pauli(ctx.mul(dj, d), ctx.mul(dj, e)));
                    }
                    out.push_back(CliffordTableau::from_images(std::move(xs), std::move(zs)));
                }
            }
        }
    }
    return out;
}

std::vector<CliffordTableau> q_subgroup(std::size_t n) { return q_subgroup(FieldContext(n)); }

std::vector<std::vector<std::size_t>> twirl_action_counts(const std::vector<CliffordTableau>& k_set) {
    if (k_set.empty()) throw std::invalid_argument("empty twirl set");
    std::size_t n = k_set.front().n_qubits();
    if (n > 2) throw ResourceLimitError("twirl-set verification limited to n <= 2");
    std::size_t count = std::size_t{1} << (2 * n);
    std::vector<std::vector<std::size_t>> counts(count - 1, std::vector<std::size_t>(count - 1, 0));
    for (const auto& c : k_set) {
        if (c.n_qubits() != n) throw DimensionError("twirl set mixes register sizes");
        for (std::size_t i = 1; i < count; ++i) {
            PauliOperator img = c.apply(pauli_from_index(n, i));
            counts[i - 1][pauli_index(img.unsigned_part()) - 1] += 1;
        }
    }
    return counts;
}

bool verify_twirl_set(const std::vector<CliffordTableau>& k_set) {
    auto counts = twirl_action_counts(k_set);
    std::size_t ref = counts[0][0];
    for (const auto& row : counts) {
        for (std::size_t v : row) {
            if (v != ref) return false;
        }
    }
    return true;
}

}  // namespace cliffrb
