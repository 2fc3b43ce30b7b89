#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "rmp/clt.hpp"
#include "rmp/estimators.hpp"

using namespace rmp;
using std::numbers::ln2;
using std::numbers::pi;

namespace {

std::uint64_t histogram_total(const CltReport& r) {
    std::uint64_t total = 0;
    for (const auto& b : r.histogram) total += b.count;
    return total;
}

const DistributionSpec kConstant{ConstantTriple{{1, 1, 1}}};
const DistributionSpec kBinary{BinaryHill{2, 3, 0.5}};
const DistributionSpec kTelescoping{DiscreteAtoms{{{{1, 2, 1}, 0.5}, {{2, 1, 2}, 0.5}}}};

}  // namespace

TEST(KsDistance, QuantileSamplesAreWithinHalfAStep) {
    const boost::math::normal_distribution<double> normal;
    constexpr int m = 100;
    std::vector<double> xs;
    for (int k = 1; k <= m; ++k) xs.push_back(boost::math::quantile(normal, (k - 0.5) / m));
    EXPECT_LE(ks_distance(xs, 1.0), 0.5 / m + 1e-9);
}

TEST(KsDistance, PointMassAtZero) {
    const std::vector<double> zeros(50, 0.0);
    EXPECT_DOUBLE_EQ(ks_distance(zeros, 1.0), 0.5);
}

TEST(KsDistance, SeededNormalDrawsPass) {
    std::mt19937_64 gen(20240601);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = normal(gen);
    EXPECT_LT(ks_distance(xs, 1.0), 0.0437);
    EXPECT_NEAR(ks_critical_001(2000), 1.9495 / std::sqrt(2000.0), 1e-15);
}

TEST(KsDistance, ScalesWithVariance) {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> normal(0.0, 3.0);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = normal(gen);
    EXPECT_LT(ks_distance(xs, 9.0), 0.0437);
    EXPECT_GT(ks_distance(xs, 1.0), 0.2);
}

TEST(KsDistance, InvariantUnderReordering) {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> normal;
    std::vector<double> xs(500);
    for (auto& x : xs) x = normal(gen);
    const double base = ks_distance(xs, 1.0);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(xs.begin(), xs.end(), gen);
        EXPECT_EQ(ks_distance(xs, 1.0), base);
    }
    std::reverse(xs.begin(), xs.end());
    EXPECT_EQ(ks_distance(xs, 1.0), base);
}

TEST(KsDistance, RejectsBadInput) {
    const std::vector<double> xs{0.1, 0.2};
    EXPECT_THROW(ks_distance(xs, 0.0), std::invalid_argument);
    EXPECT_THROW(ks_distance(std::vector<double>{}, 1.0), std::invalid_argument);
}

TEST(SimulateNormalized, ConstantHasNoSpread) {
    const CltReport r = simulate_normalized(kConstant, 100, 50, ln2, 0.0, 0);
    EXPECT_EQ(r.empirical_var, 0.0);
    EXPECT_FALSE(r.ks_defined());
    EXPECT_TRUE(std::isnan(r.ks_distance));
    EXPECT_EQ(histogram_total(r), 50u);
}

TEST(SimulateNormalized, CauchyMatchesNormalLimit) {
    const CltReport r = simulate_normalized(DistributionSpec(CauchyRankOne{}), 10000, 2000, ln2, pi * pi / 4, 0);
    EXPECT_LE(r.ks_distance, 0.05);
    EXPECT_LE(std::abs(r.empirical_mean), 4.0 * std::sqrt(pi * pi / 4 / 2000));
}

TEST(SimulateNormalized, BinaryVarianceMatchesEnumeration) {
    const ExactValues e = exact_discrete(kBinary);
    const CltReport r = simulate_normalized(kBinary, 10000, 2000, e.lambda, e.sigma2, 0);
    EXPECT_LE(std::abs(r.empirical_var - e.sigma2), 0.1 * e.sigma2);
    EXPECT_LE(std::abs(r.empirical_mean), 4.0 * std::sqrt(e.sigma2 / 2000));
}

TEST(SimulateNormalized, WrongLambdaIsDetected) {
    const ExactValues e = exact_discrete(kBinary);
    const CltReport r = simulate_normalized(kBinary, 10000, 500, e.lambda + 0.01, e.sigma2, 0);
    EXPECT_GT(r.ks_distance, ks_critical_001(500));
}

TEST(SimulateNormalized, HistogramAccountsForEveryChain) {
    const DistributionSpec cancelling(DiscreteAtoms{{{{2, 1, 1}, 0.5}, {{1, -2, 3}, 0.5}}});
    const DistributionSpec exp1(ExponentialRankOne{1});
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const CltReport r = simulate_normalized(exp1, 50, 300, 1 - kEulerGamma, pi * pi / 6 - 1, seed);
        EXPECT_EQ(r.histogram.size(), kHistogramBins);
        EXPECT_EQ(histogram_total(r) + r.minus_inf_events, r.m_chains);
        EXPECT_EQ(r.statistics.size(), r.m_chains - r.minus_inf_events);
        for (std::size_t i = 1; i < r.histogram.size(); ++i)
            EXPECT_EQ(r.histogram[i].left, r.histogram[i - 1].right);
    }
    // Almost every chain of this law collapses to -inf.
    const CltReport c = simulate_normalized(cancelling, 40, 100, 1.0, 1.0, 1);
    EXPECT_GT(c.minus_inf_events, 0u);
    EXPECT_EQ(histogram_total(c) + c.minus_inf_events, c.m_chains);
}

TEST(SimulateNormalized, ThreadCountDoesNotChangeResults) {
    const DistributionSpec exp1(ExponentialRankOne{1});
    const CltReport a = simulate_normalized(exp1, 200, 400, 1 - kEulerGamma, pi * pi / 6 - 1, 8, Parallelism{1});
    const CltReport b = simulate_normalized(exp1, 200, 400, 1 - kEulerGamma, pi * pi / 6 - 1, 8, Parallelism{4});
    EXPECT_EQ(a.statistics, b.statistics);
    EXPECT_EQ(a.ks_distance, b.ks_distance);
}

TEST(Degeneracy, ConstantHillOnes) {
    const DegeneracyVerdict v = degeneracy_check(kConstant);
    EXPECT_TRUE(v.is_degenerate_candidate);
    EXPECT_EQ(v.sigma2, 0.0);
    const auto& sel = v.candidates.at(v.selected);
    EXPECT_LE(sel.lambda_residual, 1e-12);
    for (const auto& r : sel.pairwise_residuals) EXPECT_GE(r.residual, 0.0);
}

TEST(Degeneracy, BinaryIsNotDegenerate) {
    const DegeneracyVerdict v = degeneracy_check(kBinary);
    EXPECT_FALSE(v.is_degenerate_candidate);
    EXPECT_GT(v.sigma2, 0.0);
    EXPECT_GT(exact_discrete(kBinary).sigma2, 0.0);
}

TEST(Degeneracy, HillPointMasses) {
    for (double x : {2.0, 0.5, -3.0, 7.25}) {
        const DistributionSpec spec(DiscreteAtoms{{{{1, x, 1 / x}, 1.0}}});
        const DegeneracyVerdict v = degeneracy_check(spec);
        EXPECT_TRUE(v.is_degenerate_candidate) << x;
        EXPECT_EQ(exact_discrete(spec).sigma2, 0.0) << x;
    }
}

// Cross terms 3, 3/2, 6, 3 form log 3 plus a coboundary, so sigma^2 = 0 with
// two atoms that are not a point mass.
TEST(Degeneracy, TelescopingTwoAtomLaw) {
    const ExactValues e = exact_discrete(kTelescoping);
    EXPECT_NEAR(e.lambda, std::log(3.0), 1e-15);
    EXPECT_NEAR(e.sigma2, 0.0, 1e-14);
    const DegeneracyVerdict v = degeneracy_check(kTelescoping);
    EXPECT_TRUE(v.is_degenerate_candidate);
    for (const auto& c : v.candidates) EXPECT_TRUE(c.passes);
}

TEST(Degeneracy, VerdictIsConsistentWithExactVariance) {
    std::mt19937_64 gen(99);
    const std::vector<double> values{-3, -2, -1, -0.5, 0.5, 1, 2, 3};
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    int degenerate = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t k = 1 + trial % 3;
        std::vector<Atom> atoms;
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double w = weight(gen);
            atoms.push_back({{values[pick(gen)], values[pick(gen)], values[pick(gen)]}, w});
            total += w;
        }
        for (auto& a : atoms) a.probability /= total;
        total = 0.0;
        for (std::size_t i = 0; i + 1 < atoms.size(); ++i) total += atoms[i].probability;
        atoms.back().probability = 1.0 - total;
        const DistributionSpec spec(DiscreteAtoms{atoms});
        const ExactValues e = exact_discrete(spec);
        if (!std::isfinite(e.lambda)) continue;
        const DegeneracyVerdict v = degeneracy_check(spec);
        if (!v.is_degenerate_candidate) {
            EXPECT_GT(e.sigma2, 1e-12) << to_json_text(spec);
        }
        if (std::abs(e.sigma2) <= 1e-12) {
            EXPECT_TRUE(v.is_degenerate_candidate) << to_json_text(spec);
            ++degenerate;
        }
    }
    EXPECT_GT(degenerate, 0);
}
