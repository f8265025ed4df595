#include "cliffrb/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace cliffrb {

namespace {

const Complex kI(0.0, 1.0);

Matrix single_pauli(char c) {
    Matrix m(2, 2);
    switch (c) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -kI, kI, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("bad Pauli kind");
    }
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

void require_small(std::size_t n) {
    if (n > 3) throw ResourceLimitError("dense oracle limited to 3 qubits");
}

// Pauli matrices for all 4^n indices, phase 0.
const std::vector<Matrix>& pauli_basis(std::size_t n) {
    static std::vector<std::vector<Matrix>> cache(4);
    require_small(n);
    if (cache[n].empty()) {
        std::size_t count = std::size_t{1} << (2 * n);
        for (std::size_t a = 0; a < count; ++a) cache[n].push_back(pauli_matrix(pauli_from_index(n, a)));
    }
    return cache[n];
}

std::size_t log2_dim(Eigen::Index d) {
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < d) ++n;
    if ((Eigen::Index{1} << n) != d) throw DimensionError("matrix dimension is not a power of two");
    return n;
}

}  // namespace

Matrix pauli_matrix(const PauliOperator& p) {
    Matrix m = Matrix::Identity(1, 1);
    for (std::size_t q = 0; q < p.n_qubits(); ++q) m = kron(m, single_pauli(p.get(q)));
    static const Complex phases[4] = {1.0, kI, -1.0, -kI};
    return phases[p.phase()] * m;
}

Matrix embed_matrix(const Matrix& u, const std::vector<std::size_t>& qubits, std::size_t n) {
    std::size_t k = qubits.size();
    if (u.rows() != (Eigen::Index{1} << k)) throw DimensionError("gate matrix does not match qubit count");
    std::size_t dim = std::size_t{1} << n;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    auto local_index = [&](std::size_t basis) {
        std::size_t li = 0;
        for (std::size_t j = 0; j < k; ++j) li = (li << 1) | ((basis >> (n - 1 - qubits[j])) & 1u);
        return li;
    };
    std::size_t mask = 0;
    for (auto q : qubits) mask |= std::size_t{1} << (n - 1 - q);
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t lc = local_index(col);
        for (std::size_t lr = 0; lr < (std::size_t{1} << k); ++lr) {
            std::size_t row = col & ~mask;
            for (std::size_t j = 0; j < k; ++j) {
                if ((lr >> (k - 1 - j)) & 1u) row |= std::size_t{1} << (n - 1 - qubits[j]);
            }
            out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                u(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc));
        }
    }
    return out;
}

bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    Eigen::Index bi = 0, bj = 0;
    b.cwiseAbs().maxCoeff(&bi, &bj);
    if (std::abs(a(bi, bj)) < tol) return false;
    Complex ratio = b(bi, bj) / a(bi, bj);
    if (std::abs(std::abs(ratio) - 1.0) > tol) return false;
    return (a * ratio - b).cwiseAbs().maxCoeff() < tol;
}

CliffordTableau tableau_from_unitary(const Matrix& u, double tol) {
    std::size_t n = log2_dim(u.rows());
    require_small(n);
    const auto& basis = pauli_basis(n);
    double d = static_cast<double>(u.rows());
    auto image = [&](const PauliOperator& p) {
        Matrix m = u * pauli_matrix(p) * u.adjoint();
        for (std::size_t a = 0; a < basis.size(); ++a) {
            Complex c = (basis[a].adjoint() * m).trace() / d;
            if (std::abs(std::abs(c) - 1.0) < tol) {
                if (std::abs(c.imag()) > tol) break;
                PauliOperator q = pauli_from_index(n, a);
                if (c.real() < 0) q.set_phase(2);
                return q;
            }
        }
        throw std::invalid_argument("matrix is not a Clifford unitary");
    };
    std::vector<PauliOperator> xs, zs;
    for (std::size_t i = 0; i < n; ++i) {
        xs.push_back(image(PauliOperator::single(n, i, 'X')));
        zs.push_back(image(PauliOperator::single(n, i, 'Z')));
    }
    return CliffordTableau::from_images(std::move(xs), std::move(zs));
}

Matrix pauli_rotation(const PauliOperator& p, double theta) {
    Matrix pm = pauli_matrix(p);
    Matrix id = Matrix::Identity(pm.rows(), pm.cols());
    return std::cos(theta) * id - kI * std::sin(theta) * pm;
}

Matrix random_unitary(std::size_t d, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix z(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = Complex(g(rng), g(rng));
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        Complex rd = r(i, i);
        q.col(i) *= rd / std::abs(rd);
    }
    return q;
}

DenseSuperoperator DenseSuperoperator::from_kraus(const std::vector<Matrix>& kraus) {
    if (kraus.empty()) throw std::invalid_argument("no Kraus operators");
    std::size_t n = log2_dim(kraus.front().rows());
    require_small(n);
    const auto& basis = pauli_basis(n);
    double d = static_cast<double>(kraus.front().rows());
    Eigen::Index count = static_cast<Eigen::Index>(basis.size());
    Matrix chi = Matrix::Zero(count, count);
    for (const auto& a : kraus) {
        Vector c(count);
        for (Eigen::Index i = 0; i < count; ++i) c(i) = (basis[static_cast<std::size_t>(i)] * a).trace() / d;
        chi += c * c.adjoint();
    }
    DenseSuperoperator s = from_process_matrix(n, std::move(chi));
    if (!s.is_trace_preserving()) throw std::invalid_argument("Kraus operators are not trace preserving");
    return s;
}

DenseSuperoperator DenseSuperoperator::from_unitary(const Matrix& u) { return from_kraus({u}); }

DenseSuperoperator DenseSuperoperator::from_process_matrix(std::size_t n, Matrix chi) {
    require_small(n);
    DenseSuperoperator s;
    s.n_ = n;
    s.chi_ = std::move(chi);
    return s;
}

DenseSuperoperator DenseSuperoperator::from_pauli_channel(const PauliChannel& ch) {
    std::size_t n = ch.n_qubits();
    require_small(n);
    Eigen::Index count = Eigen::Index{1} << (2 * n);
    Matrix chi = Matrix::Zero(count, count);
    for (const auto& [p, g] : ch.weights()) {
        auto a = static_cast<Eigen::Index>(pauli_index(p));
        chi(a, a) += g;
    }
    return from_process_matrix(n, std::move(chi));
}

DenseSuperoperator DenseSuperoperator::identity(std::size_t n) {
    Eigen::Index count = Eigen::Index{1} << (2 * n);
    Matrix chi = Matrix::Zero(count, count);
    chi(0, 0) = 1.0;
    return from_process_matrix(n, std::move(chi));
}

DenseSuperoperator DenseSuperoperator::depolarizing(std::size_t n, double p) {
    return from_pauli_channel(PauliChannel::depolarizing(n, p));
}

DenseSuperoperator DenseSuperoperator::random_channel(std::size_t n, std::size_t n_kraus, Rng& rng) {
    require_small(n);
    std::size_t d = std::size_t{1} << n;
    // Columns of a random isometry d -> d * n_kraus give the Kraus operators.
    Matrix v = random_unitary(d * n_kraus, rng).leftCols(static_cast<Eigen::Index>(d));
    std::vector<Matrix> kraus;
    for (std::size_t k = 0; k < n_kraus; ++k) {
        kraus.push_back(v.block(static_cast<Eigen::Index>(k * d), 0, static_cast<Eigen::Index>(d),
                                static_cast<Eigen::Index>(d)));
    }
    return from_kraus(kraus);
}

double DenseSuperoperator::trace() const {
    double d = static_cast<double>(dim());
    return d * d * chi_(0, 0).real();
}

bool DenseSuperoperator::is_trace_preserving(double tol) const {
    const auto& basis = pauli_basis(n_);
    Eigen::Index d = static_cast<Eigen::Index>(dim());
    Matrix acc = Matrix::Zero(d, d);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
            Complex c = chi_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (c != Complex(0.0)) acc += c * basis[b] * basis[a];
        }
    }
    return (acc - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < tol;
}

Matrix DenseSuperoperator::apply(const Matrix& rho) const {
    const auto& basis = pauli_basis(n_);
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (std::size_t a = 0; a < basis.size(); ++a) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
            Complex c = chi_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (c != Complex(0.0)) out += c * basis[a] * rho * basis[b];
        }
    }
    return out;
}

DenseSuperoperator DenseSuperoperator::then(const DenseSuperoperator& next) const {
    if (next.n_ != n_) throw DimensionError("superoperator size mismatch");
    // next(this(rho)) = sum chi'_cd chi_ab P_c P_a rho P_b P_d.
    std::size_t count = std::size_t{1} << (2 * n_);
    Matrix chi = Matrix::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    std::vector<PauliOperator> ps;
    for (std::size_t a = 0; a < count; ++a) ps.push_back(pauli_from_index(n_, a));
    static const Complex phases[4] = {1.0, kI, -1.0, -kI};
    for (std::size_t c = 0; c < count; ++c) {
        for (std::size_t a = 0; a < count; ++a) {
            PauliOperator left = ps[c] * ps[a];
            Complex fl = phases[left.phase()];
            auto li = static_cast<Eigen::Index>(pauli_index(left.unsigned_part()));
            for (std::size_t d = 0; d < count; ++d) {
                Complex x1 = next.chi_(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(d));
                if (x1 == Complex(0.0)) continue;
                for (std::size_t b = 0; b < count; ++b) {
                    Complex x2 = chi_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                    if (x2 == Complex(0.0)) continue;
                    PauliOperator right = ps[b] * ps[d];
                    auto ri = static_cast<Eigen::Index>(pauli_index(right.unsigned_part()));
                    chi(li, ri) += x1 * x2 * fl * phases[right.phase()];
                }
            }
        }
    }
    return from_process_matrix(n_, std::move(chi));
}

DenseSuperoperator DenseSuperoperator::tensor(const DenseSuperoperator& other) const {
    std::size_t n = n_ + other.n_;
    require_small(n);
    std::size_t ca = std::size_t{1} << (2 * n_), cb = std::size_t{1} << (2 * other.n_);
    Matrix chi = Matrix::Zero(static_cast<Eigen::Index>(ca * cb), static_cast<Eigen::Index>(ca * cb));
    // Joint index: qubits of this occupy the low base-4 digits.
    for (std::size_t a1 = 0; a1 < ca; ++a1)
        for (std::size_t b1 = 0; b1 < ca; ++b1)
            for (std::size_t a2 = 0; a2 < cb; ++a2)
                for (std::size_t b2 = 0; b2 < cb; ++b2) {
                    chi(static_cast<Eigen::Index>(a1 + ca * a2), static_cast<Eigen::Index>(b1 + ca * b2)) =
                        chi_(static_cast<Eigen::Index>(a1), static_cast<Eigen::Index>(b1)) *
                        other.chi_(static_cast<Eigen::Index>(a2), static_cast<Eigen::Index>(b2));
                }
    return from_process_matrix(n, std::move(chi));
}

double DenseSuperoperator::distance(const DenseSuperoperator& other) const {
    if (other.n_ != n_) throw DimensionError("superoperator size mismatch");
    return (chi_ - other.chi_).cwiseAbs().maxCoeff();
}

bool DenseSuperoperator::is_pauli_channel(double tol) const {
    Matrix off = chi_;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() < tol;
}

double depolarization_strength(const DenseSuperoperator& s) {
    if (!s.is_trace_preserving()) throw std::invalid_argument("depolarization strength needs a TP map");
    double d2 = static_cast<double>(s.dim() * s.dim());
    return (d2 - s.trace()) / (d2 - 1.0);
}

DenseSuperoperator group_twirl(const DenseSuperoperator& s, const std::vector<CliffordTableau>& group) {
    if (group.empty()) throw std::invalid_argument("empty twirling group");
    std::size_t n = s.n_qubits();
    std::size_t count = std::size_t{1} << (2 * n);
    const Matrix& chi = s.process_matrix();
    Matrix acc = Matrix::Zero(chi.rows(), chi.cols());
    std::vector<std::size_t> perm(count);
    std::vector<double> sign(count);
    for (const auto& c : group) {
        if (c.n_qubits() != n) throw DimensionError("twirl element has wrong size");
        // C^dag P_a C = sign_a P_perm(a).
        CliffordTableau inv = clifford_inverse(c);
        for (std::size_t a = 0; a < count; ++a) {
            PauliOperator img = inv.apply(pauli_from_index(n, a));
            sign[a] = img.phase() == 2 ? -1.0 : 1.0;
            perm[a] = pauli_index(img.unsigned_part());
        }
        for (std::size_t a = 0; a < count; ++a) {
            for (std::size_t b = 0; b < count; ++b) {
                acc(static_cast<Eigen::Index>(perm[a]), static_cast<Eigen::Index>(perm[b])) +=
                    sign[a] * sign[b] * chi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
        }
    }
    acc /= static_cast<double>(group.size());
    return DenseSuperoperator::from_process_matrix(n, std::move(acc));
}

DenseSuperoperator pauli_twirl(const DenseSuperoperator& s) {
    std::size_t n = s.n_qubits();
    std::vector<CliffordTableau> paulis;
    for (std::size_t a = 0; a < (std::size_t{1} << (2 * n)); ++a) {
        paulis.push_back(CliffordTableau::from_pauli(pauli_from_index(n, a)));
    }
    return group_twirl(s, paulis);
}

double gate_fidelity(const DenseSuperoperator& s, const Matrix& u) {
    if (static_cast<std::size_t>(u.rows()) != s.dim()) throw DimensionError("target unitary has wrong size");
    const auto& basis = pauli_basis(s.n_qubits());
    double d = static_cast<double>(s.dim());
    Vector t(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a) t(static_cast<Eigen::Index>(a)) = (u.adjoint() * basis[a]).trace();
    // chi'_00 of the error map u^dag o s is sum_ab chi_ab tr(u^dag P_a) conj(tr(u^dag P_b)) / D^2.
    Complex direct(0.0);
    const Matrix& chi = s.process_matrix();
    for (Eigen::Index a = 0; a < t.size(); ++a)
        for (Eigen::Index b = 0; b < t.size(); ++b) direct += chi(a, b) * t(a) * std::conj(t(b));
    double e = direct.real() / (d * d);
    return (1.0 + d * e) / (1.0 + d);
}

StateVector::StateVector(std::size_t n) : n_(n), amps_(Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n))) {
    amps_(0) = 1.0;
}

void StateVector::apply(const Matrix& u, const std::vector<std::size_t>& qubits) {
    std::size_t k = qubits.size();
    std::size_t dim = std::size_t{1} << n_;
    std::size_t mask = 0;
    for (auto q : qubits) {
        if (q >= n_) throw std::out_of_range("qubit out of range");
        mask |= std::size_t{1} << (n_ - 1 - q);
    }
    std::size_t ldim = std::size_t{1} << k;
    std::vector<std::size_t> offsets(ldim);
    for (std::size_t l = 0; l < ldim; ++l) {
        std::size_t off = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if ((l >> (k - 1 - j)) & 1u) off |= std::size_t{1} << (n_ - 1 - qubits[j]);
        }
        offsets[l] = off;
    }
    Vector local(static_cast<Eigen::Index>(ldim));
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & mask) continue;
        for (std::size_t l = 0; l < ldim; ++l) local(static_cast<Eigen::Index>(l)) = amps_(static_cast<Eigen::Index>(base | offsets[l]));
        Vector out = u * local;
        for (std::size_t l = 0; l < ldim; ++l) amps_(static_cast<Eigen::Index>(base | offsets[l])) = out(static_cast<Eigen::Index>(l));
    }
}

double StateVector::probability_one(std::size_t q) const {
    std::size_t bit = std::size_t{1} << (n_ - 1 - q);
    double p = 0.0;
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
        if (static_cast<std::size_t>(i) & bit) p += std::norm(amps_(i));
    }
    return p;
}

void StateVector::collapse(std::size_t q, bool one) {
    std::size_t bit = std::size_t{1} << (n_ - 1 - q);
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
        bool is_one = (static_cast<std::size_t>(i) & bit) != 0;
        if (is_one != one) amps_(i) = 0.0;
    }
    double norm = amps_.norm();
    if (norm < 1e-12) throw std::runtime_error("collapse onto a zero-probability outcome");
    amps_ /= norm;
}

Complex StateVector::expectation(const PauliOperator& p) const {
    Matrix m = pauli_matrix(p);
    return (amps_.adjoint() * m * amps_)(0, 0);
}

}  // namespace cliffrb
