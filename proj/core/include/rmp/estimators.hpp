#pragma once

#include <cstdint>
#include <optional>

#include "rmp/distributions.hpp"
#include "rmp/parallel.hpp"

namespace rmp {

inline constexpr double kEulerGamma = 0.57721566490153286061;

struct EstimateResult {
    double value = 0.0;                   // may be -inf; NaN means undefined
    std::optional<double> std_error;      // present iff Monte Carlo
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t minus_inf_events = 0;
    double wall_seconds = 0.0;
};

// Autocovariances of the 1-dependent sequence A_j = cross_j - lambda.
// sigma2 is defined as c0 + 2 c1.
struct CovarianceLadder {
    double c0 = 0.0;
    double c1 = 0.0;
    double lambda = 0.0;
    std::optional<double> c0_std_error;
    std::optional<double> c1_std_error;

    double sigma2() const noexcept { return c0 + 2.0 * c1; }
};

struct Sigma2Estimate {
    EstimateResult sigma2;
    CovarianceLadder ladder;
};

struct ExactValues {
    double lambda = 0.0;  // -inf if some positive-probability pair cancels
    double sigma2 = 0.0;  // NaN when lambda is -inf
    CovarianceLadder ladder;
};

struct ClosedFormValues {
    double lambda = 0.0;
    double sigma2 = 0.0;
};

struct MeanWithError {
    double mean = 0.0;
    double std_error = 0.0;
};

struct MomentDiagnostics {
    MeanWithError log_plus_a_plus_c;      // E log+(|a| + |c|)
    MeanWithError log_one_plus_b_over_a;  // E log(1 + |b|/|a|)
    MeanWithError cross_term_squared;     // E (log|a1 + b2 c1/a2|)^2
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t minus_inf_events = 0;   // pairs excluded from the squared-cross mean
};

// log|a1 + b2 c1 / a2|; -inf on exact cancellation. Note the asymmetry: b of
// the second triple couples to c of the first.
double cross_term(const EntryTriple& first, const EntryTriple& second) noexcept;

EstimateResult estimate_lambda_mc(const DistributionSpec& spec, std::uint64_t n_samples, std::uint64_t seed,
                                  Parallelism par = {});

/// sigma^2 = E[X1^2] + 2 E[X1 X2] - 3 lambda^2 from independent triples
/// (xi1, xi2, xi3), X1 = cross(xi1, xi2), X2 = cross(xi2, xi3). The lambda is
/// the mean of X1 from the same triples. Standard errors are leave-one-out
/// jackknife over triples.
Sigma2Estimate estimate_sigma2_mc(const DistributionSpec& spec, std::uint64_t n_samples, std::uint64_t seed,
                                  Parallelism par = {});

// Enumerates pairs and triples of atoms. Throws NotDiscreteError, or
// std::length_error beyond kMaxExactAtoms atoms.
inline constexpr std::size_t kMaxExactAtoms = 64;
ExactValues exact_discrete(const DistributionSpec& spec);

// Known closed forms for the example families. Throws NoClosedFormError.
ClosedFormValues closed_form(const DistributionSpec& spec);

// log||S_n|| for one chain of n triples drawn from the stream.
double chain_log_norm(const DistributionSpec& spec, std::uint64_t n, RandomStream& stream);

// Mean over independent chains of log||S_n|| / n.
EstimateResult trajectory_lambda(const DistributionSpec& spec, std::uint64_t n, std::uint64_t n_chains,
                                 std::uint64_t seed, Parallelism par = {});

MomentDiagnostics moment_diagnostics(const DistributionSpec& spec, std::uint64_t n_samples, std::uint64_t seed,
                                     Parallelism par = {});

}  // namespace rmp
