#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmp/distributions.hpp"
#include "rmp/parallel.hpp"

namespace rmp {

inline constexpr std::size_t kHistogramBins = 40;

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::uint64_t count = 0;
};

struct CltReport {
    std::uint64_t n = 0;
    std::uint64_t m_chains = 0;
    std::uint64_t seed = 0;
    double lambda_used = 0.0;
    double sigma2_used = 0.0;
    double empirical_mean = 0.0;
    double empirical_var = 0.0;
    double ks_distance = 0.0;  // NaN (undefined) when sigma2_used == 0
    std::vector<HistogramBin> histogram;
    std::uint64_t minus_inf_events = 0;
    std::vector<double> statistics;  // Z_k for finite chains, in chain order

    bool ks_defined() const noexcept { return sigma2_used > 0.0; }
};

// Standard normal CDF via erfc (full double accuracy in both tails).
double normal_cdf(double z) noexcept;

// One-sample Kolmogorov-Smirnov distance against N(0, sigma2). Throws
// std::invalid_argument if sigma2 <= 0 or samples is empty.
double ks_distance(std::span<const double> samples, double sigma2);

// Asymptotic KS critical value at level 0.001.
double ks_critical_001(std::uint64_t m) noexcept;

/// Runs m_chains independent chains of n triples and summarizes
/// Z = (log||S_n|| - n lambda) / sqrt(n). Histogram covers [-5 sigma, 5 sigma]
/// with out-of-range values clamped into the edge bins; when sigma2 is 0 the
/// range falls back to [-h, h] with h = max(|Z|, 1).
CltReport simulate_normalized(const DistributionSpec& spec, std::uint64_t n, std::uint64_t m_chains, double lambda,
                              double sigma2, std::uint64_t seed, Parallelism par = {});

struct AtomResidual {
    EntryTriple atom;
    double residual = 0.0;
};

struct DegeneracyCandidate {
    EntryTriple atom;
    double probability = 0.0;
    double lambda_residual = 0.0;  // |lambda - log|a + bc/a||
    std::vector<AtomResidual> pairwise_residuals;
    bool passes = false;
};

/// Necessary conditions for sigma^2 = 0 given an atom. A false verdict proves
/// sigma^2 > 0; a true verdict only means degeneracy is not ruled out.
struct DegeneracyVerdict {
    bool is_degenerate_candidate = false;
    double lambda = 0.0;
    double sigma2 = 0.0;
    double tolerance = 0.0;
    std::size_t selected = 0;  // first passing candidate, else the closest one
    std::vector<DegeneracyCandidate> candidates;
};

inline constexpr double kDefaultDegeneracyTolerance = 1e-9;

// Throws NotDiscreteError for continuous laws.
DegeneracyVerdict degeneracy_check(const DistributionSpec& spec, double tolerance = kDefaultDegeneracyTolerance);

}  // namespace rmp
