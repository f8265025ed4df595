#include <gtest/gtest.h>

#include "cliffrb/gates.hpp"
#include "cliffrb/rb_protocol.hpp"
#include "cliffrb/twirl_bounds.hpp"

using namespace cliffrb;

namespace {

GroupDistribution knill(bool quotient) {
    auto k = ApproximateStep::knill_1q();
    return GroupDistribution::from_steps(StepDistribution::convolve(k.pauli_part, k.computational), quotient);
}

// Uniform over the one-qubit quotient group except one non-identity element.
GroupDistribution omit_one() {
    auto g = GroupIndex::get(1, true);
    std::vector<double> p(g->size(), 1.0 / (g->size() - 1));
    p[3] = 0.0;
    return GroupDistribution(g, p);
}

double max_gap(const GroupDistribution& a, const GroupDistribution& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.probabilities().size(); ++i)
        m = std::max(m, std::abs(a.probabilities()[i] - b.probabilities()[i]));
    return m;
}

}  // namespace

TEST(TwirlBounds, ConvolutionIdentities) {
    auto d = knill(false);
    EXPECT_LT(max_gap(convolve_steps(d, 1), d), 1e-15);
    for (auto [n, q] : {std::pair{1, false}, std::pair{1, true}, std::pair{2, true}}) {
        auto u = GroupDistribution::uniform(n, q);
        EXPECT_LT(max_gap(convolve_steps(u, 3), u), 1e-15);
        auto delta = GroupDistribution::delta_identity(n, q);
        EXPECT_LT(max_gap(convolve_steps(delta, 4), delta), 1e-15);
    }
    EXPECT_LT(max_gap(convolve(d, GroupDistribution::uniform(1, false)), GroupDistribution::uniform(1, false)), 1e-15);
    EXPECT_LT(max_gap(inverse_distribution(inverse_distribution(d)), d), 1e-15);
    auto five = convolve_steps(d, 5);
    double total = 0.0;
    for (double p : five.probabilities()) total += p;
    EXPECT_NEAR(total, 1.0, 1e-13);
}

TEST(TwirlBounds, TotalVariationValues) {
    EXPECT_NEAR(total_variation(GroupDistribution::uniform(2, true)), 0.0, 1e-15);
    EXPECT_NEAR(total_variation(GroupDistribution::delta_identity(1, false)), 1.0 - 1.0 / 24, 1e-15);
    auto periodic = tv_series(knill(false), 40);
    ASSERT_EQ(periodic.size(), 40u);
    EXPECT_GT(periodic.back(), 0.4);
}

TEST(TwirlBounds, IdentityWeightGivesGeometricDecay) {
    auto k = knill(false);
    std::vector<std::pair<CliffordTableau, double>> w;
    for (std::size_t i = 0; i < k.group().size(); ++i) {
        double p = 0.8 * k.probabilities()[i] + (i == 0 ? 0.2 : 0.0);
        if (p > 0) w.emplace_back(k.group().element(i), p);
    }
    auto lazy = GroupDistribution::from_weights(1, false, w);
    auto series = tv_series(lazy, 60);
    EXPECT_LT(series.back(), 1e-6);
    double r = tv_decay_rate(series, 10);
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 1.0);
    EXPECT_NEAR(series[40] / series[30], std::pow(r, 10), 0.05 * std::pow(r, 10));
}

TEST(TwirlBounds, DecayRateOfExactGeometricSeries) {
    std::vector<double> s;
    for (int j = 1; j <= 20; ++j) s.push_back(3.0 * std::pow(0.6, j));
    EXPECT_NEAR(tv_decay_rate(s), 0.6, 1e-12);
}

TEST(TwirlBounds, GreedyMatchesVertexEnumeration) {
    Rng rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        std::size_t m = t < 2 ? 24 : 2 + t % 15;
        std::vector<double> c(m), a(m);
        for (auto& v : c) v = u(rng);
        for (auto& v : a) v = pos(rng);
        if (t % 5 == 0) a[0] = 0.0;
        double upper = 4.0 / 3.0;
        double hi = 0.0;
        for (double v : a) hi += v * upper;
        double b = hi * pos(rng);
        std::vector<double> s;
        double g = box_lp_maximize(c, a, b, upper, &s);
        EXPECT_NEAR(g, box_lp_vertex_enumeration(c, a, b, upper), 1e-10);
        double lhs = 0.0, obj = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            EXPECT_GE(s[i], -1e-12);
            EXPECT_LE(s[i], upper + 1e-12);
            lhs += a[i] * s[i];
            obj += c[i] * s[i];
        }
        EXPECT_NEAR(lhs, b, 1e-10);
        EXPECT_NEAR(obj, g, 1e-10);
    }
    EXPECT_THROW(box_lp_maximize({1.0}, {1.0}, 2.0, 1.0), InfeasibleError);
    EXPECT_THROW(box_lp_maximize({1.0}, {-1.0}, 0.5, 1.0), std::invalid_argument);
}

TEST(TwirlBounds, UniformStepHasZeroComparisonBound) {
    auto b = step_comparison_bound(GroupDistribution::uniform(1, true), 0.01, 0.5, 1);
    EXPECT_NEAR(b.delta_max, 0.0, 1e-14);
    EXPECT_NEAR(b.delta_min, 0.0, 1e-14);
}

TEST(TwirlBounds, OmittedElementTakesFullWeight) {
    auto b = step_comparison_bound(omit_one(), 0.01, 0.5, 1);
    ASSERT_EQ(b.s_max.size(), 6u);
    EXPECT_NEAR(b.s_max[3], 4.0 / 3.0, 1e-12);
    EXPECT_GT(b.delta_max, 0.0);
    EXPECT_LE(b.delta_min, b.delta_max);
}

TEST(TwirlBounds, MoreStepsTightenTheBound) {
    auto d = omit_one();
    auto one = step_comparison_bound(d, 0.01, 0.5, 1);
    auto four = step_comparison_bound(d, 0.01, 0.5, 4);
    EXPECT_LT(four.delta_max, one.delta_max);
    EXPECT_LT(four.delta_max - four.delta_min, one.delta_max - one.delta_min);
}

TEST(TwirlBounds, ExactTwirlHasZeroKappa) {
    for (std::size_t n : {1, 2}) {
        auto agg = exact_inversion_aggregates(GroupDistribution::uniform(n, true), 5);
        auto rep = kappa_bounds(agg, 5, 0.02);
        EXPECT_NEAR(rep.kappa_max, 0.0, 1e-12) << n;
        EXPECT_NEAR(rep.kappa_min, 0.0, 1e-12) << n;
        double dd = std::ldexp(1.0, 2 * n);
        for (double q : rep.q_max) EXPECT_NEAR(1.0 - q, dd / (2 * (dd - 1)), 1e-12);
    }
}

TEST(TwirlBounds, KnillKappaPositiveAndShrinking) {
    auto d = knill(false);
    auto first = kappa_bounds(exact_inversion_aggregates(d, 1), 1, 0.001);
    EXPECT_GT(first.kappa_max, 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t l : {2, 8, 32}) {
        auto rep = kappa_bounds(exact_inversion_aggregates(d, l), l, 0.001 * l);
        EXPECT_LT(rep.kappa_max, prev);
        EXPECT_GE(rep.kappa_max, 0.0);
        EXPECT_GE(rep.kappa_min, 0.0);
        prev = rep.kappa_max;
    }
}

TEST(TwirlBounds, QValuesAreProbabilities) {
    auto agg = exact_inversion_aggregates(knill(false), 6);
    for (const auto& p : agg) {
        auto und = undetected_probabilities(p, PauliOperator::from_string("Z"));
        ASSERT_EQ(und.size(), 3u);
        for (double q : und) {
            EXPECT_GE(q, -1e-15);
            EXPECT_LE(q, 1.0 + 1e-15);
        }
    }
    auto rep = kappa_bounds(agg, 6, 0.01);
    for (std::size_t k = 0; k < rep.q_max.size(); ++k) EXPECT_GE(rep.q_max[k], rep.q_min[k]);
}

TEST(TwirlBounds, FirstOrderWarning) {
    auto agg = exact_inversion_aggregates(GroupDistribution::uniform(1, true), 10);
    EXPECT_TRUE(kappa_bounds(agg, 10, 0.01).warnings.empty());
    EXPECT_FALSE(kappa_bounds(agg, 10, 0.05).warnings.empty());
}

TEST(TwirlBounds, InterleavedAggregates) {
    auto u = GroupDistribution::uniform(1, false);
    auto g = builtin_gates().get("H").tableau;
    auto with = exact_inversion_aggregates(u, 4, g);
    ASSERT_EQ(with.size(), 4u);
    for (const auto& p : with) EXPECT_LT(max_gap(p, u), 1e-15);
}
