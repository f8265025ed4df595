#include "cliffrb/twirl_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <mutex>
#include <numeric>

#include "cliffrb/rb_protocol.hpp"

namespace cliffrb {

using nlohmann::json;

GroupIndex::GroupIndex(std::size_t n, bool quotient) : n_(n), quotient_(quotient) {
    if (n > 3 || (n == 3 && !quotient) || n == 0) {
        throw ResourceLimitError("group enumeration unavailable: needs n <= 2, or n = 3 with the quotient");
    }
    elements_ = enumerate_group(n, quotient);
    for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i].encode64(quotient), i);
}

std::shared_ptr<const GroupIndex> GroupIndex::get(std::size_t n, bool quotient) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, bool>, std::shared_ptr<const GroupIndex>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, quotient);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::shared_ptr<const GroupIndex> g(new GroupIndex(n, quotient));
    cache.emplace(key, g);
    return g;
}

std::size_t GroupIndex::index_of(const CliffordTableau& c) const {
    if (c.n_qubits() != n_) throw DimensionError("tableau size does not match the group");
    auto it = index_.find(c.encode64(quotient_));
    if (it == index_.end()) throw std::invalid_argument("tableau is not a group element");
    return it->second;
}

GroupDistribution::GroupDistribution(std::shared_ptr<const GroupIndex> group, std::vector<double> probs)
    : group_(std::move(group)), probs_(std::move(probs)) {
    if (probs_.size() != group_->size()) throw DimensionError("probability vector does not match group size");
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative group probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("group probabilities do not sum to 1");
}

GroupDistribution GroupDistribution::uniform(std::size_t n, bool quotient) {
    auto g = GroupIndex::get(n, quotient);
    return GroupDistribution(g, std::vector<double>(g->size(), 1.0 / static_cast<double>(g->size())));
}

GroupDistribution GroupDistribution::delta_identity(std::size_t n, bool quotient) {
    auto g = GroupIndex::get(n, quotient);
    std::vector<double> p(g->size(), 0.0);
    p[g->index_of(CliffordTableau(n))] = 1.0;
    return GroupDistribution(g, std::move(p));
}

GroupDistribution GroupDistribution::from_weights(std::size_t n, bool quotient,
                                                  const std::vector<std::pair<CliffordTableau, double>>& weights) {
    auto g = GroupIndex::get(n, quotient);
    std::vector<double> p(g->size(), 0.0);
    for (const auto& [c, w] : weights) p[g->index_of(c)] += w;
    return GroupDistribution(g, std::move(p));
}

GroupDistribution GroupDistribution::from_steps(const StepDistribution& d, bool quotient) {
    return from_weights(d.n_qubits(), quotient, d.items());
}

std::size_t GroupDistribution::support_size() const {
    return static_cast<std::size_t>(std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }));
}

GroupDistribution convolve(const GroupDistribution& first, const GroupDistribution& second) {
    if (first.group_ptr() != second.group_ptr()) throw DimensionError("distributions use different groups");
    const GroupIndex& g = first.group();
    std::vector<double> out(g.size(), 0.0);
    const auto& pa = first.probabilities();
    const auto& pb = second.probabilities();
    // Iterate over the smaller support on the outside so each composition is computed once.
    for (std::size_t b = 0; b < g.size(); ++b) {
        if (pb[b] == 0.0) continue;
        for (std::size_t a = 0; a < g.size(); ++a) {
            if (pa[a] == 0.0) continue;
            out[g.index_of(clifford_compose(g.element(b), g.element(a)))] += pa[a] * pb[b];
        }
    }
    return GroupDistribution(first.group_ptr(), std::move(out));
}

GroupDistribution convolve_steps(const GroupDistribution& d, std::size_t j) {
    if (j == 0) throw std::invalid_argument("convolution power must be positive");
    const GroupIndex& g = d.group();
    const auto& pd = d.probabilities();
    // Left-multiplication permutation for every element in the support of d.
    std::vector<std::pair<double, std::vector<std::uint32_t>>> moves;
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (pd[s] == 0.0) continue;
        std::vector<std::uint32_t> perm(g.size());
        for (std::size_t h = 0; h < g.size(); ++h) {
            perm[h] = static_cast<std::uint32_t>(g.index_of(clifford_compose(g.element(s), g.element(h))));
        }
        moves.emplace_back(pd[s], std::move(perm));
    }
    std::vector<double> cur = pd;
    for (std::size_t step = 1; step < j; ++step) {
        std::vector<double> next(g.size(), 0.0);
        for (std::size_t h = 0; h < g.size(); ++h) {
            if (cur[h] == 0.0) continue;
            for (const auto& [w, perm] : moves) next[perm[h]] += w * cur[h];
        }
        cur = std::move(next);
    }
    double total = std::accumulate(cur.begin(), cur.end(), 0.0);
    for (double& v : cur) v /= total;
    return GroupDistribution(d.group_ptr(), std::move(cur));
}

GroupDistribution inverse_distribution(const GroupDistribution& d) {
    const GroupIndex& g = d.group();
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (d.probabilities()[i] == 0.0) continue;
        out[g.index_of(clifford_inverse(g.element(i)))] += d.probabilities()[i];
    }
    return GroupDistribution(d.group_ptr(), std::move(out));
}

double total_variation(const GroupDistribution& d) {
    double u = 1.0 / static_cast<double>(d.group().size());
    double s = 0.0;
    for (double p : d.probabilities()) s += std::abs(p - u);
    return 0.5 * s;
}

std::vector<double> tv_series(const GroupDistribution& d, std::size_t jmax) {
    std::vector<double> out;
    GroupDistribution cur = d;
    for (std::size_t j = 1; j <= jmax; ++j) {
        if (j > 1) cur = convolve(d, cur);
        out.push_back(total_variation(cur));
    }
    return out;
}

double tv_decay_rate(const std::vector<double>& series, std::size_t first_j, double floor) {
    std::vector<double> x, y;
    for (std::size_t j = first_j; j <= series.size(); ++j) {
        double v = series[j - 1];
        if (v > floor) {
            x.push_back(static_cast<double>(j));
            y.push_back(std::log(v));
        }
    }
    if (x.size() < 2) throw std::invalid_argument("too few points above the floor to fit a decay rate");
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return std::exp(sxy / sxx);
}

double box_lp_maximize(const std::vector<double>& c, const std::vector<double>& a, double b, double upper,
                       std::vector<double>* s_out) {
    std::size_t m = c.size();
    if (a.size() != m) throw DimensionError("objective and constraint sizes differ");
    std::vector<double> s(m, 0.0);
    double value = 0.0;
    std::vector<std::size_t> active;
    double capacity = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i] < 0.0) throw std::invalid_argument("constraint coefficients must be nonnegative");
        if (a[i] == 0.0) {
            if (c[i] > 0.0) {
                s[i] = upper;
                value += c[i] * upper;
            }
        } else {
            active.push_back(i);
            capacity += a[i] * upper;
        }
    }
    double tol = 1e-12 * std::max(1.0, std::abs(b));
    if (b < -tol || b > capacity + tol) throw InfeasibleError("constraint value outside the reachable range");
    std::stable_sort(active.begin(), active.end(),
                     [&](std::size_t i, std::size_t j) { return c[i] / a[i] > c[j] / a[j]; });
    double budget = std::max(0.0, b);
    for (std::size_t i : active) {
        if (budget <= 0.0) break;
        double take = std::min(upper, budget / a[i]);
        s[i] = take;
        value += c[i] * take;
        budget -= a[i] * take;
    }
    if (s_out) *s_out = std::move(s);
    return value;
}

double box_lp_vertex_enumeration(const std::vector<double>& c, const std::vector<double>& a, double b, double upper) {
    std::size_t m = c.size();
    if (m > 24) throw ResourceLimitError("vertex enumeration limited to 24 variables");
    double tol = 1e-12 * std::max(1.0, std::abs(b));
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t count = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        double lhs = 0.0, val = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if ((mask >> i) & 1u) {
                lhs += a[i] * upper;
                val += c[i] * upper;
            }
        }
        if (std::abs(lhs - b) <= tol) best = std::max(best, val);
        // One coordinate strictly between its bounds, chosen among the zero bits.
        for (std::size_t j = 0; j < m; ++j) {
            if (((mask >> j) & 1u) || a[j] == 0.0) continue;
            double sj = (b - lhs) / a[j];
            if (sj > 0.0 && sj < upper) best = std::max(best, val + c[j] * sj);
        }
    }
    if (!std::isfinite(best)) throw InfeasibleError("no feasible vertex");
    return best;
}

ComparisonBound step_comparison_bound(const GroupDistribution& p_a, double eps_a, double alpha, std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (!(alpha > 0.0) || !(eps_a >= 0.0) || eps_a > alpha) throw std::invalid_argument("eps_A must lie in [0, alpha]");
    GroupDistribution pk = convolve_steps(p_a, k);
    const auto& a = pk.probabilities();
    std::size_t m = a.size();
    double d = std::ldexp(1.0, static_cast<int>(p_a.group().n_qubits()));
    double upper = d * d / (d * d - 1.0);
    ComparisonBound out;
    out.eps_k = alpha * (1.0 - std::pow(1.0 - eps_a / alpha, static_cast<double>(k)));
    out.rhs = out.eps_k / alpha;
    std::vector<double> c(m), neg(m);
    double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        c[i] = alpha * (inv - a[i]);
        neg[i] = -c[i];
    }
    out.delta_max = box_lp_maximize(c, a, out.rhs, upper, &out.s_max);
    out.delta_min = -box_lp_maximize(neg, a, out.rhs, upper, &out.s_min);
    return out;
}

std::vector<double> undetected_probabilities(const GroupDistribution& p_prime, const PauliOperator& measured) {
    const GroupIndex& g = p_prime.group();
    std::size_t n = g.n_qubits();
    if (measured.n_qubits() != n || measured.is_identity()) throw std::invalid_argument("measured Pauli must be non-identity on n qubits");
    std::size_t count = std::size_t{1} << (2 * n);
    std::vector<double> q(count - 1, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double p = p_prime.probabilities()[i];
        if (p == 0.0) continue;
        for (std::size_t r = 1; r < count; ++r) {
            if (g.element(i).apply(pauli_from_index(n, r)).commutes(measured)) q[r - 1] += p;
        }
    }
    return q;
}

std::vector<GroupDistribution> exact_inversion_aggregates(const GroupDistribution& step, std::size_t l,
                                                          const std::optional<CliffordTableau>& g) {
    if (l == 0) throw std::invalid_argument("length must be positive");
    GroupDistribution per_step = step;
    if (g) {
        std::size_t n = step.group().n_qubits();
        per_step = convolve(step, GroupDistribution::from_weights(n, step.group().quotient(), {{*g, 1.0}}));
    }
    std::vector<GroupDistribution> prefix;
    GroupDistribution cur = per_step;
    for (std::size_t j = 1; j <= l; ++j) {
        if (j > 1) cur = convolve(cur, per_step);
        prefix.push_back(inverse_distribution(cur));
    }
    std::vector<GroupDistribution> out;
    for (std::size_t k = 1; k <= l; ++k) out.push_back(prefix[l - k]);
    return out;
}

KappaReport kappa_bounds(const std::vector<GroupDistribution>& p_prime, std::size_t l, double e,
                         const std::optional<PauliOperator>& measured) {
    if (l == 0 || p_prime.size() != l) throw std::invalid_argument("need one aggregate distribution per step");
    if (!(e >= 0.0)) throw std::invalid_argument("observed error must be nonnegative");
    std::size_t n = p_prime.front().group().n_qubits();
    PauliOperator m = measured ? *measured : PauliOperator::single(n, 0, 'Z');
    double d2 = std::ldexp(1.0, static_cast<int>(2 * n));
    double strength_scale = d2 / (d2 - 1.0);
    std::size_t anticommuting = 0;
    for (std::size_t r = 1; r < static_cast<std::size_t>(d2); ++r) {
        if (!pauli_from_index(n, r).commutes(m)) ++anticommuting;
    }
    KappaReport rep;
    // Depolarizing strength p detects with probability p (D^2-1)/D^2 times the uniform detection rate.
    rep.detection_factor = strength_scale / (static_cast<double>(anticommuting) / (d2 - 1.0));
    for (std::size_t k = 1; k <= l; ++k) {
        auto q = undetected_probabilities(p_prime[k - 1], m);
        auto mx = std::max_element(q.begin(), q.end());
        auto mn = std::min_element(q.begin(), q.end());
        rep.q_max.push_back(*mx);
        rep.q_min.push_back(*mn);
        rep.r_max.push_back(pauli_from_index(n, static_cast<std::size_t>(mx - q.begin()) + 1));
        rep.r_min.push_back(pauli_from_index(n, static_cast<std::size_t>(mn - q.begin()) + 1));
        rep.sum_max += 1.0 - *mx;
        rep.sum_min += 1.0 - *mn;
    }
    double dl = static_cast<double>(l);
    double gamma_max = rep.sum_max > 0.0 ? std::min(1.0, e / rep.sum_max) : 1.0;
    rep.kappa_max = gamma_max * strength_scale - rep.detection_factor * e / dl;
    rep.kappa_min = rep.detection_factor * e / dl - (rep.sum_min > 0.0 ? e / rep.sum_min : 0.0) * strength_scale;
    if (dl * e > 0.2) rep.warnings.push_back("l * e exceeds 0.2: outside the first-order regime");
    return rep;
}

std::string KappaReport::to_json() const {
    json j;
    j["kappa_max"] = kappa_max;
    j["kappa_min"] = kappa_min;
    j["detection_factor"] = detection_factor;
    j["sum_max"] = sum_max;
    j["sum_min"] = sum_min;
    j["q_max"] = q_max;
    j["q_min"] = q_min;
    std::vector<std::string> rmax, rmin;
    for (const auto& p : r_max) rmax.push_back(p.to_string());
    for (const auto& p : r_min) rmin.push_back(p.to_string());
    j["r_max"] = rmax;
    j["r_min"] = rmin;
    j["warnings"] = warnings;
    return j.dump(2);
}

}  // namespace cliffrb
