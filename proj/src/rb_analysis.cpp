#include "cliffrb/rb_analysis.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace cliffrb {

using nlohmann::json;

double alpha_for(std::size_t n_qubits) {
    double d = std::ldexp(1.0, static_cast<int>(n_qubits));
    return (d - 1.0) / d;
}

void RBDataset::validate() const {
    for (const auto& r : records) {
        if (r.n_shots == 0) throw std::invalid_argument("record with zero shots");
        if (r.n_correct > r.n_shots) throw std::invalid_argument("n_correct exceeds n_shots");
        if (r.length == 0) throw std::invalid_argument("record with zero length");
    }
}

std::vector<std::size_t> RBDataset::lengths() const {
    std::vector<std::size_t> out;
    for (const auto& r : records) out.push_back(r.length);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string RBDataset::to_csv() const {
    std::ostringstream os;
    os << "protocol,length,seq_index,n_shots,n_correct\n";
    for (const auto& r : records) {
        os << r.protocol << ',' << r.length << ',' << r.seq_index << ',' << r.n_shots << ',' << r.n_correct << '\n';
    }
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

std::size_t parse_count(const std::string& s, std::size_t line_no) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (s.empty() || pos != s.size() || s[0] == '-') {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

RBDataset RBDataset::from_csv(const std::string& text, std::size_t n_qubits) {
    RBDataset ds;
    ds.n_qubits = n_qubits;
    ds.alpha = alpha_for(n_qubits);
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(ss, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (!header) {
            if (cells != std::vector<std::string>{"protocol", "length", "seq_index", "n_shots", "n_correct"}) {
                throw std::invalid_argument("dataset header must be protocol,length,seq_index,n_shots,n_correct");
            }
            header = true;
            continue;
        }
        if (cells.size() != 5) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 5 fields");
        RBRecord r;
        r.protocol = cells[0];
        r.length = parse_count(cells[1], line_no);
        r.seq_index = parse_count(cells[2], line_no);
        r.n_shots = parse_count(cells[3], line_no);
        r.n_correct = parse_count(cells[4], line_no);
        if (ds.protocol.empty()) ds.protocol = r.protocol;
        ds.records.push_back(r);
    }
    if (!header) throw std::invalid_argument("empty dataset");
    ds.validate();
    return ds;
}

RBDataset RBDataset::window(std::size_t lo, std::size_t hi) const {
    RBDataset out = *this;
    out.records.clear();
    for (const auto& r : records) {
        if (r.length >= lo && r.length <= hi) out.records.push_back(r);
    }
    return out;
}

std::vector<LengthStatistic> length_statistics(const RBDataset& ds) {
    ds.validate();
    std::map<std::size_t, std::vector<double>> by_length;
    for (const auto& r : ds.records) {
        by_length[r.length].push_back(static_cast<double>(r.n_correct) / static_cast<double>(r.n_shots));
    }
    std::vector<LengthStatistic> out;
    for (const auto& [l, ps] : by_length) {
        LengthStatistic st;
        st.length = l;
        st.n_sequences = ps.size();
        st.mean = std::accumulate(ps.begin(), ps.end(), 0.0) / static_cast<double>(ps.size());
        if (ps.size() < 2) {
            st.variance_defined = false;
            st.variance_of_mean = std::numeric_limits<double>::quiet_NaN();
        } else {
            double ss = 0.0;
            for (double p : ps) ss += (p - st.mean) * (p - st.mean);
            double nl = static_cast<double>(ps.size());
            st.variance_of_mean = ss / (nl * (nl - 1.0));
        }
        out.push_back(st);
    }
    return out;
}

std::string model_tag(RBModel m) {
    switch (m) {
        case RBModel::Main: return "main";
        case RBModel::MainApp: return "main-app";
        case RBModel::ThreeParam: return "three-param";
        case RBModel::Magesan: return "magesan";
    }
    return "main";
}

RBModel model_from_tag(const std::string& tag) {
    if (tag == "main") return RBModel::Main;
    if (tag == "main-app") return RBModel::MainApp;
    if (tag == "three-param") return RBModel::ThreeParam;
    if (tag == "magesan") return RBModel::Magesan;
    throw std::invalid_argument("unknown model '" + tag + "' (main, main-app, three-param, magesan)");
}

std::vector<std::string> parameter_names(RBModel m) {
    switch (m) {
        case RBModel::ThreeParam: return {"eps_s", "eps_m", "C"};
        case RBModel::Magesan: return {"eps_s", "eps_m", "a", "b"};
        default: return {"eps_s", "eps_m"};
    }
}

std::size_t parameter_count(RBModel m) { return parameter_names(m).size(); }

double model_value(RBModel m, const std::vector<double>& p, double alpha, double l) {
    double r = 1.0 - p[0] / alpha;
    double spam = 1.0 - p[1] / alpha;
    switch (m) {
        case RBModel::Main: return (1.0 - alpha) + alpha * spam * std::pow(r, l);
        case RBModel::MainApp: return 0.5 + 0.5 * spam * std::pow(r, l);
        case RBModel::ThreeParam: return p[2] * (1.0 - alpha) + p[2] * alpha * spam * std::pow(r, l);
        case RBModel::Magesan: return p[2] + alpha * spam * std::pow(r, l) + p[3] * (l - 1.0) * std::pow(r, l - 2.0);
    }
    return 0.0;
}

double FitReport::standard_error(std::size_t i) const {
    if (covariance.rows() <= static_cast<long>(i)) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(std::max(0.0, covariance(static_cast<long>(i), static_cast<long>(i))));
}

double FitReport::covariance_condition() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(covariance);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0.0;
    double lo = s(s.size() - 1);
    return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> initial_guess(RBModel model, double alpha, const std::vector<double>& ls,
                                  const std::vector<double>& fs) {
    double asym = (model == RBModel::MainApp) ? 0.5 : 1.0 - alpha;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        double d = fs[i] - asym;
        if (d > 1e-9) {
            x.push_back(ls[i]);
            y.push_back(std::log(d));
        }
    }
    double eps_s = 0.01 * alpha;
    double eps_m = 0.0;
    if (x.size() >= 2) {
        double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        if (sxx > 0.0) {
            double slope = sxy / sxx;
            double amp = std::exp(my - slope * mx);
            eps_s = alpha * (1.0 - std::exp(slope));
            eps_m = (model == RBModel::MainApp) ? alpha * (1.0 - 2.0 * amp) : alpha - amp;
        }
    }
    switch (model) {
        case RBModel::ThreeParam: return {eps_s, eps_m, 1.0};
        case RBModel::Magesan: return {eps_s, eps_m, 1.0 - alpha, 0.0};
        default: return {eps_s, eps_m};
    }
}

}  // namespace

FitReport fit_curve(RBModel model, double alpha, const std::vector<double>& lengths, const std::vector<double>& values,
                    const std::vector<double>& sigma, const FitOptions& opt) {
    std::size_t n = lengths.size();
    std::size_t k = parameter_count(model);
    if (values.size() != n || sigma.size() != n) throw std::invalid_argument("lengths, values and sigma differ in size");
    {
        std::vector<double> distinct = lengths;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < k + 1) {
            throw std::invalid_argument("model " + model_tag(model) + " needs at least " + std::to_string(k + 1) +
                                        " distinct lengths, got " + std::to_string(distinct.size()));
        }
    }
    std::vector<double> sig(n);
    for (std::size_t i = 0; i < n; ++i) sig[i] = std::max(sigma[i], opt.sigma_floor);

    auto residuals = [&](const std::vector<double>& p) {
        Eigen::VectorXd r(static_cast<long>(n));
        for (std::size_t i = 0; i < n; ++i) r(static_cast<long>(i)) = (values[i] - model_value(model, p, alpha, lengths[i])) / sig[i];
        return r;
    };
    auto jacobian = [&](const std::vector<double>& p) {
        Eigen::MatrixXd j(static_cast<long>(n), static_cast<long>(k));
        for (std::size_t c = 0; c < k; ++c) {
            double h = 1e-6 * std::max(std::abs(p[c]), 1.0);
            std::vector<double> up = p, dn = p;
            up[c] += h;
            dn[c] -= h;
            for (std::size_t i = 0; i < n; ++i) {
                double d = (model_value(model, up, alpha, lengths[i]) - model_value(model, dn, alpha, lengths[i])) / (2.0 * h);
                j(static_cast<long>(i), static_cast<long>(c)) = d / sig[i];
            }
        }
        return j;
    };

    std::vector<double> p = initial_guess(model, alpha, lengths, values);
    Eigen::VectorXd r = residuals(p);
    double cost = r.squaredNorm();
    std::vector<double> trace{cost};
    double lambda = 1e-3;
    bool converged = cost == 0.0;
    std::size_t it = 0;
    for (; it < opt.max_iterations && !converged; ++it) {
        Eigen::MatrixXd j = jacobian(p);
        Eigen::MatrixXd a = j.transpose() * j;
        Eigen::VectorXd g = j.transpose() * r;
        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd damped = a;
            for (long c = 0; c < static_cast<long>(k); ++c) damped(c, c) += lambda * std::max(a(c, c), 1e-30);
            Eigen::VectorXd step = damped.ldlt().solve(g);
            std::vector<double> trial = p;
            for (std::size_t c = 0; c < k; ++c) trial[c] += step(static_cast<long>(c));
            Eigen::VectorXd rt = residuals(trial);
            double ct = rt.squaredNorm();
            if (std::isfinite(ct) && ct <= cost) {
                double reduction = cost - ct;
                double step_norm = step.norm();
                double p_norm = 0.0;
                for (double v : p) p_norm += v * v;
                p = trial;
                r = rt;
                cost = ct;
                trace.push_back(cost);
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (reduction <= opt.tolerance * cost || step_norm <= 1e-14 * (std::sqrt(p_norm) + 1e-14) || cost == 0.0) {
                    converged = true;
                }
            } else {
                lambda *= 10.0;
                if (lambda > 1e16) {
                    // No downhill step exists at working precision: the point is stationary.
                    converged = true;
                    break;
                }
            }
        }
    }
    if (!converged) {
        throw ConvergenceError("fit of model " + model_tag(model) + " did not converge in " +
                                   std::to_string(opt.max_iterations) + " iterations",
                               trace);
    }

    FitReport rep;
    rep.model = model;
    rep.alpha = alpha;
    rep.params = p;
    rep.lengths = lengths;
    rep.observed = values;
    rep.sigma = sig;
    rep.iterations = it;
    rep.objective_trace = trace;
    rep.chi2 = cost;
    for (std::size_t i = 0; i < n; ++i) rep.residuals.push_back(values[i] - model_value(model, p, alpha, lengths[i]));
    Eigen::MatrixXd j = jacobian(p);
    Eigen::MatrixXd a = j.transpose() * j;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) {
        rep.covariance = lu.inverse();
    } else {
        rep.covariance = a.completeOrthogonalDecomposition().pseudoInverse();
        rep.warnings.push_back("singular normal matrix; covariance is a pseudo-inverse");
    }
    rep.dof = static_cast<long>(n) - static_cast<long>(k);
    if (rep.dof > 0) {
        rep.p_value = chi2_cdf(rep.chi2, static_cast<double>(rep.dof));
        rep.upper_tail = 1.0 - rep.p_value;
    } else {
        rep.p_value = 0.0;
        rep.upper_tail = 1.0;
        rep.warnings.push_back("zero degrees of freedom");
    }
    rep.significant = rep.p_value > opt.significance;
    for (std::size_t c = 0; c < k; ++c) {
        if (p[c] < 0.0) rep.warnings.push_back(parameter_names(model)[c] + " is negative");
    }
    double cond = rep.covariance_condition();
    if (cond > 1e6) rep.warnings.push_back("parameter covariance condition number " + std::to_string(cond) + " exceeds 1e6");
    return rep;
}

FitReport fit(const RBDataset& ds, RBModel model, const FitOptions& opt) {
    auto stats = length_statistics(ds);
    std::vector<double> ls, fs, ss;
    for (const auto& st : stats) {
        if (!st.variance_defined) {
            throw std::invalid_argument("length " + std::to_string(st.length) +
                                        " has a single sequence; its variance is undefined");
        }
        ls.push_back(static_cast<double>(st.length));
        fs.push_back(st.mean);
        ss.push_back(std::sqrt(st.variance_of_mean));
    }
    return fit_curve(model, ds.alpha, ls, fs, ss, opt);
}

double chi2_cdf(double x, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("chi-square dof must be positive");
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(dof / 2.0, x / 2.0);
}

double chi2_quantile(double q, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("chi-square dof must be positive");
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("quantile must lie in [0, 1)");
    return 2.0 * boost::math::gamma_p_inv(dof / 2.0, q);
}

std::string FitReport::to_json() const {
    json j;
    j["model"] = model_tag(model);
    j["alpha"] = alpha;
    json pj = json::object();
    json se = json::object();
    auto names = parameter_names(model);
    for (std::size_t i = 0; i < params.size(); ++i) {
        pj[names[i]] = params[i];
        se[names[i]] = number_or_null(standard_error(i));
    }
    j["parameters"] = pj;
    j["standard_errors"] = se;
    json cov = json::array();
    for (long r = 0; r < covariance.rows(); ++r) {
        json row = json::array();
        for (long c = 0; c < covariance.cols(); ++c) row.push_back(number_or_null(covariance(r, c)));
        cov.push_back(row);
    }
    j["covariance"] = cov;
    j["chi2"] = chi2;
    j["dof"] = dof;
    j["p_value"] = p_value;
    j["upper_tail"] = upper_tail;
    j["significant"] = significant;
    j["iterations"] = iterations;
    j["lengths"] = lengths;
    j["observed"] = observed;
    j["sigma"] = sigma;
    j["residuals"] = residuals;
    j["warnings"] = warnings;
    return j.dump(2);
}

std::string FitReport::residuals_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "length,observed,sigma,model,residual\n";
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        os << lengths[i] << ',' << observed[i] << ',' << sigma[i] << ',' << observed[i] - residuals[i] << ','
           << residuals[i] << '\n';
    }
    return os.str();
}

bool BootstrapReport::ellipse_contains(double eps_s, double eps_m) const {
    Eigen::Matrix2d cov;
    cov << ellipse_covariance[0][0], ellipse_covariance[0][1], ellipse_covariance[1][0], ellipse_covariance[1][1];
    Eigen::Vector2d d(eps_s - ellipse_center[0], eps_m - ellipse_center[1]);
    double scale = cov.norm();
    if (scale == 0.0) return d.norm() <= 1e-15;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    double dist = 0.0;
    for (int i = 0; i < 2; ++i) {
        double proj = es.eigenvectors().col(i).dot(d);
        double lam = es.eigenvalues()(i);
        if (lam <= 1e-15 * scale) {
            if (std::abs(proj) > 1e-12) return false;
            continue;
        }
        dist += proj * proj / lam;
    }
    return dist <= chi2_quantile(0.95, 2.0);
}

std::string BootstrapReport::to_json() const {
    json j;
    j["model"] = model_tag(model);
    j["n_resamples"] = n_resamples;
    j["n_failed"] = n_failed;
    auto names = parameter_names(model);
    json params = json::object();
    for (std::size_t i = 0; i < original.size(); ++i) {
        params[names[i]] = json{{"original", original[i]},
                                {"mean", means[i]},
                                {"bias", bias[i]},
                                {"standard_error", standard_errors[i]},
                                {"bias_significant", static_cast<bool>(bias_significant[i])}};
    }
    j["parameters"] = params;
    j["ellipse"] = json{{"center", {ellipse_center[0], ellipse_center[1]}},
                        {"axes", {ellipse_axes[0], ellipse_axes[1]}},
                        {"angle", ellipse_angle}};
    return j.dump(2);
}

std::string BootstrapReport::samples_csv() const {
    std::ostringstream os;
    os.precision(17);
    auto names = parameter_names(model);
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    os << '\n';
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
        os << '\n';
    }
    return os.str();
}

BootstrapReport bootstrap(const RBDataset& ds, RBModel model, std::uint64_t seed, const BootstrapOptions& opt,
                          const FitOptions& fit_opt) {
    if (opt.n_resamples == 0) throw std::invalid_argument("bootstrap needs at least one resample");
    FitReport base = fit(ds, model, fit_opt);
    std::map<std::size_t, std::vector<const RBRecord*>> by_length;
    for (const auto& r : ds.records) by_length[r.length].push_back(&r);

    std::size_t k = parameter_count(model);
    std::vector<std::vector<double>> results(opt.n_resamples);
    std::vector<char> ok(opt.n_resamples, 0);
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t rep = begin; rep < opt.n_resamples; rep += stride) {
            Rng rng(derive_seed(seed, "bootstrap", rep));
            RBDataset resampled;
            resampled.protocol = ds.protocol;
            resampled.n_qubits = ds.n_qubits;
            resampled.alpha = ds.alpha;
            for (const auto& [l, recs] : by_length) {
                std::uniform_int_distribution<std::size_t> pick(0, recs.size() - 1);
                for (std::size_t s = 0; s < recs.size(); ++s) {
                    RBRecord r = *recs[pick(rng)];
                    double p_hat = static_cast<double>(r.n_correct) / static_cast<double>(r.n_shots);
                    std::binomial_distribution<std::size_t> draw(r.n_shots, p_hat);
                    r.n_correct = draw(rng);
                    r.seq_index = s;
                    resampled.records.push_back(r);
                }
            }
            try {
                results[rep] = fit(resampled, model, fit_opt).params;
                ok[rep] = 1;
            } catch (const std::exception&) {
                ok[rep] = 0;
            }
        }
    };
    std::size_t threads = std::max<std::size_t>(1, std::min(opt.threads, opt.n_resamples));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& th : pool) th.join();
    }

    BootstrapReport rep;
    rep.model = model;
    rep.n_resamples = opt.n_resamples;
    rep.original = base.params;
    for (std::size_t i = 0; i < opt.n_resamples; ++i) {
        if (ok[i]) {
            rep.samples.push_back(results[i]);
        } else {
            ++rep.n_failed;
        }
    }
    if (static_cast<double>(rep.n_failed) > opt.max_failure_fraction * static_cast<double>(opt.n_resamples)) {
        throw std::runtime_error("bootstrap aborted: " + std::to_string(rep.n_failed) + " of " +
                                 std::to_string(opt.n_resamples) + " replicate fits failed");
    }
    double m = static_cast<double>(rep.samples.size());
    rep.means.assign(k, 0.0);
    for (const auto& s : rep.samples) {
        for (std::size_t i = 0; i < k; ++i) rep.means[i] += s[i] / m;
    }
    rep.standard_errors.assign(k, 0.0);
    for (const auto& s : rep.samples) {
        for (std::size_t i = 0; i < k; ++i) rep.standard_errors[i] += (s[i] - rep.means[i]) * (s[i] - rep.means[i]);
    }
    for (std::size_t i = 0; i < k; ++i) {
        rep.standard_errors[i] = m > 1.0 ? std::sqrt(rep.standard_errors[i] / (m - 1.0)) : 0.0;
        rep.bias.push_back(rep.means[i] - rep.original[i]);
        rep.bias_significant.push_back(std::abs(rep.bias[i]) > opt.bias_threshold * rep.standard_errors[i]);
    }

    double c00 = 0.0, c01 = 0.0, c11 = 0.0;
    for (const auto& s : rep.samples) {
        double d0 = s[0] - rep.means[0];
        double d1 = s[1] - rep.means[1];
        c00 += d0 * d0;
        c01 += d0 * d1;
        c11 += d1 * d1;
    }
    double denom = m > 1.0 ? m - 1.0 : 1.0;
    rep.ellipse_covariance[0][0] = c00 / denom;
    rep.ellipse_covariance[0][1] = rep.ellipse_covariance[1][0] = c01 / denom;
    rep.ellipse_covariance[1][1] = c11 / denom;
    rep.ellipse_center[0] = rep.original[0];
    rep.ellipse_center[1] = rep.original[1];
    Eigen::Matrix2d cov;
    cov << rep.ellipse_covariance[0][0], rep.ellipse_covariance[0][1], rep.ellipse_covariance[1][0],
        rep.ellipse_covariance[1][1];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    double q = chi2_quantile(0.95, 2.0);
    rep.ellipse_axes[0] = std::sqrt(std::max(0.0, es.eigenvalues()(1)) * q);
    rep.ellipse_axes[1] = std::sqrt(std::max(0.0, es.eigenvalues()(0)) * q);
    rep.ellipse_angle = std::atan2(es.eigenvectors()(1, 1), es.eigenvectors()(0, 1));
    return rep;
}

InterleavedResult interleaved_gate_error(double eps_s, double eps_s_prime, double alpha, double se, double se_prime,
                                         bool printed_form) {
    double p = eps_s / alpha;
    double pp = eps_s_prime / alpha;
    if (!(1.0 - p > 0.0)) throw DegenerateFitError("reference fit has 1 - p_e <= 0");
    double pref = printed_form ? 1.0 / alpha : alpha;
    InterleavedResult out;
    out.eps_g = pref * (1.0 - (1.0 - pp) / (1.0 - p));
    double d_prime = pref / alpha / (1.0 - p);
    double d_ref = -pref / alpha * (1.0 - pp) / ((1.0 - p) * (1.0 - p));
    out.standard_error = std::sqrt(d_prime * d_prime * se_prime * se_prime + d_ref * d_ref * se * se);
    return out;
}

InterleavedResult interleaved_gate_error(const FitReport& primary, const FitReport& interleaved, bool printed_form) {
    if (std::abs(primary.alpha - interleaved.alpha) > 1e-15) throw std::invalid_argument("fits use different alpha");
    return interleaved_gate_error(primary.eps_s(), interleaved.eps_s(), primary.alpha, primary.standard_error(0),
                                  interleaved.standard_error(0), printed_form);
}

Embedding embed_depolarizing(double p_k, std::size_t k, std::size_t n) {
    if (k < 1 || k > n || n > 30) throw std::invalid_argument("embedding needs 1 <= k <= n <= 30");
    // Exact integer numerators and denominators keep the factors correctly rounded.
    long double four_k = std::ldexp(1.0L, static_cast<int>(2 * k));
    long double four_n = std::ldexp(1.0L, static_cast<int>(2 * n));
    long double two_k = std::ldexp(1.0L, static_cast<int>(k));
    long double two_n = std::ldexp(1.0L, static_cast<int>(n));
    long double s_num = (four_k - 1.0L) * four_n;
    long double s_den = four_k * (four_n - 1.0L);
    Embedding e;
    e.strength_factor = static_cast<double>(s_num / s_den);
    e.p_n = p_k * e.strength_factor;
    e.eps_factor = static_cast<double>(((two_n - 1.0L) * two_k * s_num) / ((two_k - 1.0L) * two_n * s_den));
    return e;
}

double consistency_check(double eps_g, double eps_s1, double eps_s2, const ConsistencyWeights& w) {
    if (eps_g < 0.0 || eps_s1 < 0.0 || eps_s2 < 0.0 || w.gate < 0.0 || w.one_qubit < 0.0) {
        throw std::invalid_argument("consistency check inputs must be nonnegative");
    }
    double factor = embed_depolarizing(1.0, 1, 2).eps_factor;
    return w.gate * eps_g + factor * w.one_qubit * (eps_s1 + eps_s2) / (2.0 * 1.8);
}

std::vector<TruncationRow> truncation_scan(const RBDataset& ds, RBModel model,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& windows,
                                           const FitOptions& opt) {
    std::vector<TruncationRow> out;
    for (const auto& [lo, hi] : windows) {
        RBDataset sub = ds.window(lo, hi);
        if (sub.lengths().size() < parameter_count(model) + 1) {
            throw std::invalid_argument("window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                        "] keeps too few lengths");
        }
        out.push_back(TruncationRow{lo, hi, fit(sub, model, opt)});
    }
    return out;
}

}  // namespace cliffrb
