#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cliffrb/clifford.hpp"
#include "cliffrb/pauli.hpp"

namespace cliffrb {

class StepDistribution;

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reference enumeration of C_n (n <= 2) or of its quotient by the Paulis (n <= 3), identity first.
class GroupIndex {
public:
    // Shared, lazily built enumeration.
    static std::shared_ptr<const GroupIndex> get(std::size_t n, bool quotient);

    std::size_t n_qubits() const { return n_; }
    bool quotient() const { return quotient_; }
    std::size_t size() const { return elements_.size(); }
    const std::vector<CliffordTableau>& elements() const { return elements_; }
    const CliffordTableau& element(std::size_t i) const { return elements_[i]; }
    std::size_t index_of(const CliffordTableau& c) const;

private:
    GroupIndex(std::size_t n, bool quotient);
    std::size_t n_;
    bool quotient_;
    std::vector<CliffordTableau> elements_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

class GroupDistribution {
public:
    GroupDistribution() = default;
    GroupDistribution(std::shared_ptr<const GroupIndex> group, std::vector<double> probs);

    static GroupDistribution uniform(std::size_t n, bool quotient);
    static GroupDistribution delta_identity(std::size_t n, bool quotient);
    static GroupDistribution from_steps(const StepDistribution& d, bool quotient);
    static GroupDistribution from_weights(std::size_t n, bool quotient,
                                          const std::vector<std::pair<CliffordTableau, double>>& weights);

    const GroupIndex& group() const { return *group_; }
    std::shared_ptr<const GroupIndex> group_ptr() const { return group_; }
    const std::vector<double>& probabilities() const { return probs_; }
    double probability(const CliffordTableau& c) const { return probs_[group_->index_of(c)]; }
    std::size_t support_size() const;

private:
    std::shared_ptr<const GroupIndex> group_;
    std::vector<double> probs_;
};

// Distribution of b o a with a ~ first and b ~ second.
GroupDistribution convolve(const GroupDistribution& first, const GroupDistribution& second);
// j-step distribution of the Markov chain driven by d.
GroupDistribution convolve_steps(const GroupDistribution& d, std::size_t j);
// Distribution of C^-1 with C ~ d.
GroupDistribution inverse_distribution(const GroupDistribution& d);

// 1/2 sum |d(g) - 1/|G||.
double total_variation(const GroupDistribution& d);
// v_1, ..., v_jmax.
std::vector<double> tv_series(const GroupDistribution& d, std::size_t jmax);
// Per-step factor r of a fit v_j ~ A r^j over the listed j range (entries above floor only).
double tv_decay_rate(const std::vector<double>& series, std::size_t first_j = 1, double floor = 1e-13);

struct ComparisonBound {
    double delta_max = 0.0;
    double delta_min = 0.0;
    // Right-hand side of the constraint: eps_k / alpha.
    double rhs = 0.0;
    double eps_k = 0.0;
    std::vector<double> s_max;
    std::vector<double> s_min;
};

// Maximum of c.s subject to a.s = b and 0 <= s_g <= upper, with every a_g >= 0, solved exactly by the ratio greedy.
// Returns the optimal value and fills s. Throws InfeasibleError.
double box_lp_maximize(const std::vector<double>& c, const std::vector<double>& a, double b, double upper,
                       std::vector<double>* s = nullptr);
// Same problem by enumerating every vertex (at most one coordinate off its bounds); size <= 24.
double box_lp_vertex_enumeration(const std::vector<double>& c, const std::vector<double>& a, double b, double upper);

// Bounds on eps_B - eps_{A,k} with eps_{A,k} = alpha (1 - (1 - eps_A/alpha)^k) and the k-fold convolution of p_A.
ComparisonBound step_comparison_bound(const GroupDistribution& p_a, double eps_a, double alpha, std::size_t k);

// Probability, under p'_k, that each non-identity Pauli R (index order) goes undetected by a measurement of m.
std::vector<double> undetected_probabilities(const GroupDistribution& p_prime, const PauliOperator& measured);

// p'_k for k = 1..l under exact inversion: the aggregate after the error of the k-th step from the end is the
// inverse of the product of the first l-k+1 steps (each step followed by g when given).
std::vector<GroupDistribution> exact_inversion_aggregates(const GroupDistribution& step, std::size_t l,
                                                          const std::optional<CliffordTableau>& g = std::nullopt);

struct KappaReport {
    // The true strength minus the depolarizing estimate lies in [-kappa_min, kappa_max].
    double kappa_max = 0.0;
    double kappa_min = 0.0;
    // Strength a depolarizing error needs to produce detection probability e: factor * e.
    double detection_factor = 2.0;
    double sum_max = 0.0;
    double sum_min = 0.0;
    std::vector<double> q_max;
    std::vector<double> q_min;
    std::vector<PauliOperator> r_max;
    std::vector<PauliOperator> r_min;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

// First-order bounds on the estimation error: p_prime[k-1] is p'_k for k = 1..l, e the observed total error probability.
KappaReport kappa_bounds(const std::vector<GroupDistribution>& p_prime, std::size_t l, double e,
                         const std::optional<PauliOperator>& measured = std::nullopt);

}  // namespace cliffrb
