#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cliffrb/rng.hpp"

namespace cliffrb {

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), objective_trace(std::move(trace)) {}
    std::vector<double> objective_trace;
};

class DegenerateFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// alpha_n = (2^n - 1) / 2^n.
double alpha_for(std::size_t n_qubits);

struct RBRecord {
    std::string protocol;
    std::size_t length = 0;
    std::size_t seq_index = 0;
    std::size_t n_shots = 0;
    std::size_t n_correct = 0;
    // Exact success probability when known (simulation), NaN otherwise. Not part of the CSV.
    double expected_fidelity = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
};

struct RBDataset {
    std::string protocol;
    std::size_t n_qubits = 1;
    double alpha = 0.5;
    std::vector<RBRecord> records;

    // Throws std::invalid_argument on n_correct > n_shots or zero shots.
    void validate() const;
    std::vector<std::size_t> lengths() const;
    // Header: protocol,length,seq_index,n_shots,n_correct
    std::string to_csv() const;
    static RBDataset from_csv(const std::string& text, std::size_t n_qubits);
    // Records whose length lies in [lo, hi].
    RBDataset window(std::size_t lo, std::size_t hi) const;
};

struct LengthStatistic {
    std::size_t length = 0;
    std::size_t n_sequences = 0;
    double mean = 0.0;
    // Unbiased variance of the mean; NaN when only one sequence exists.
    double variance_of_mean = 0.0;
    bool variance_defined = true;
};

std::vector<LengthStatistic> length_statistics(const RBDataset& ds);

enum class RBModel { Main, MainApp, ThreeParam, Magesan };

std::string model_tag(RBModel m);
RBModel model_from_tag(const std::string& tag);
std::vector<std::string> parameter_names(RBModel m);
std::size_t parameter_count(RBModel m);
// Model value at length l. Parameter order: eps_s, eps_m, then C (ThreeParam) or a, b (Magesan).
double model_value(RBModel m, const std::vector<double>& params, double alpha, double l);

struct FitOptions {
    std::size_t max_iterations = 500;
    double sigma_floor = 1e-12;
    double tolerance = 1e-15;
    double significance = 0.95;
};

struct FitReport {
    RBModel model = RBModel::Main;
    double alpha = 0.5;
    std::vector<double> params;
    Eigen::MatrixXd covariance;
    double chi2 = 0.0;
    long dof = 0;
    // P(chi^2_dof <= chi2): the fit is rejected when this exceeds the significance level.
    double p_value = 0.0;
    // P(chi^2_dof > chi2), the conventional upper-tail probability.
    double upper_tail = 1.0;
    bool significant = false;
    std::vector<double> lengths;
    std::vector<double> observed;
    std::vector<double> sigma;
    std::vector<double> residuals;
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
    std::vector<std::string> warnings;

    double eps_s() const { return params.at(0); }
    double eps_m() const { return params.at(1); }
    double standard_error(std::size_t i) const;
    // 2-norm condition number of the covariance matrix.
    double covariance_condition() const;
    std::string to_json() const;
    // length,observed,sigma,model,residual
    std::string residuals_csv() const;
};

// Weighted least squares of the model to (l, F_l, sigma_l).
FitReport fit_curve(RBModel model, double alpha, const std::vector<double>& lengths,
                    const std::vector<double>& values, const std::vector<double>& sigma,
                    const FitOptions& opt = {});
FitReport fit(const RBDataset& ds, RBModel model, const FitOptions& opt = {});

// Regularized lower incomplete gamma P(dof/2, x/2), i.e. the chi-square CDF.
double chi2_cdf(double x, double dof);
// x with chi2_cdf(x, dof) = q.
double chi2_quantile(double q, double dof);

struct BootstrapOptions {
    std::size_t n_resamples = 1000;
    std::size_t threads = 1;
    double max_failure_fraction = 0.10;
    double bias_threshold = 0.25;
};

struct BootstrapReport {
    RBModel model = RBModel::Main;
    std::size_t n_resamples = 0;
    std::size_t n_failed = 0;
    std::vector<double> original;
    std::vector<std::vector<double>> samples;
    std::vector<double> means;
    std::vector<double> bias;
    std::vector<double> standard_errors;
    std::vector<bool> bias_significant;
    // 95% ellipse of (eps_s, eps_m): center, semi-axis lengths and the major-axis angle.
    double ellipse_center[2] = {0.0, 0.0};
    double ellipse_axes[2] = {0.0, 0.0};
    double ellipse_angle = 0.0;
    double ellipse_covariance[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    // True if (eps_s, eps_m) lies inside the ellipse.
    bool ellipse_contains(double eps_s, double eps_m) const;
    std::string to_json() const;
    std::string samples_csv() const;
};

BootstrapReport bootstrap(const RBDataset& ds, RBModel model, std::uint64_t seed,
                          const BootstrapOptions& opt = {}, const FitOptions& fit_opt = {});

struct InterleavedResult {
    double eps_g = 0.0;
    double standard_error = 0.0;
};

// eps_g = alpha (1 - (1 - p')/(1 - p)) with p = eps_s/alpha; with printed_form the prefactor is 1/alpha.
InterleavedResult interleaved_gate_error(double eps_s, double eps_s_prime, double alpha, double se = 0.0,
                                         double se_prime = 0.0, bool printed_form = false);
InterleavedResult interleaved_gate_error(const FitReport& primary, const FitReport& interleaved,
                                         bool printed_form = false);

struct Embedding {
    double p_n = 0.0;
    double strength_factor = 0.0;
    double eps_factor = 0.0;
};

// Depolarizing strength p_k on k qubits seen as a strength on n qubits.
Embedding embed_depolarizing(double p_k, std::size_t k, std::size_t n);

struct ConsistencyWeights {
    double gate = 1.5;
    double one_qubit = 6.5;
};

// w_G eps_G + (6/5) w_1q (eps_s1 + eps_s2) / (2 * 1.8).
double consistency_check(double eps_g, double eps_s1, double eps_s2, const ConsistencyWeights& w = {});

struct TruncationRow {
    std::size_t lo = 0;
    std::size_t hi = 0;
    FitReport report;
};

std::vector<TruncationRow> truncation_scan(const RBDataset& ds, RBModel model,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& windows,
                                           const FitOptions& opt = {});

}  // namespace cliffrb
