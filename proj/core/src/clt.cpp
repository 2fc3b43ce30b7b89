#include "rmp/clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rmp/estimators.hpp"
#include "rmp/stats.hpp"

namespace rmp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<HistogramBin> make_histogram(std::span<const double> z, double half_width) {
    std::vector<HistogramBin> bins(kHistogramBins);
    const double width = 2.0 * half_width / static_cast<double>(kHistogramBins);
    for (std::size_t i = 0; i < kHistogramBins; ++i) {
        bins[i].left = -half_width + width * static_cast<double>(i);
        bins[i].right = i + 1 == kHistogramBins ? half_width : -half_width + width * static_cast<double>(i + 1);
    }
    for (double x : z) {
        const double pos = std::floor((x + half_width) / width);
        const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(kHistogramBins - 1)));
        ++bins[idx].count;
    }
    return bins;
}

}  // namespace

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ks_distance(std::span<const double> samples, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("ks_distance: sigma2 must be > 0");
    if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double sigma = std::sqrt(sigma2);
    const double m = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = normal_cdf(sorted[i] / sigma);
        d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return d;
}

double ks_critical_001(std::uint64_t m) noexcept { return 1.9495 / std::sqrt(static_cast<double>(m)); }

CltReport simulate_normalized(const DistributionSpec& spec, std::uint64_t n, std::uint64_t m_chains, double lambda,
                              double sigma2, std::uint64_t seed, Parallelism par) {
    if (n < 10) throw std::invalid_argument("simulate_normalized: n must be >= 10");
    if (m_chains < 10) throw std::invalid_argument("simulate_normalized: need at least 10 chains");
    if (!std::isfinite(lambda)) throw std::invalid_argument("simulate_normalized: lambda must be finite");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("simulate_normalized: sigma2 must be >= 0");

    const double nd = static_cast<double>(n);
    const double root_n = std::sqrt(nd);
    std::vector<double> log_norms(m_chains);
    parallel_for(m_chains, par, [&](std::size_t i) {
        auto stream = RandomStream::derive(seed, StreamDomain::CltChains, i);
        log_norms[i] = chain_log_norm(spec, n, stream);
    });

    CltReport r;
    r.n = n;
    r.m_chains = m_chains;
    r.seed = seed;
    r.lambda_used = lambda;
    r.sigma2_used = sigma2;
    r.statistics.reserve(m_chains);
    RunningStats stats;
    for (double ln : log_norms) {
        if (std::isinf(ln) && ln < 0) {
            ++r.minus_inf_events;
            continue;
        }
        const double z = (ln - nd * lambda) / root_n;
        r.statistics.push_back(z);
        stats.add(z);
    }
    r.empirical_mean = stats.count() ? stats.mean() : kNaN;
    r.empirical_var = stats.count() > 1 ? stats.variance() : kNaN;

    double half_width = 5.0 * std::sqrt(sigma2);
    if (!(half_width > 0.0)) {
        half_width = 1.0;
        for (double z : r.statistics) half_width = std::max(half_width, std::abs(z));
    }
    r.histogram = make_histogram(r.statistics, half_width);
    r.ks_distance = (sigma2 > 0.0 && !r.statistics.empty()) ? ks_distance(r.statistics, sigma2) : kNaN;
    return r;
}

DegeneracyVerdict degeneracy_check(const DistributionSpec& spec, double tolerance) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("degeneracy_check: tolerance must be > 0");
    const std::vector<Atom> atoms = enumerate_atoms(spec);
    const ExactValues exact = exact_discrete(spec);

    DegeneracyVerdict v;
    v.lambda = exact.lambda;
    v.sigma2 = exact.sigma2;
    v.tolerance = tolerance;

    const auto residual_of = [](double x, double y) {
        if (x == y) return 0.0;  // covers matching infinities
        return std::abs(x - y);
    };

    double best_excess = std::numeric_limits<double>::infinity();
    for (const Atom& atom : atoms) {
        const auto [a, b, c] = atom.triple;
        const double self = a + b * c / a;
        const double self4 = self * self * self * self;

        DegeneracyCandidate cand;
        cand.atom = atom.triple;
        cand.probability = atom.probability;
        cand.lambda_residual = residual_of(exact.lambda, std::log(std::abs(self)));
        double excess = cand.lambda_residual / (tolerance * std::max(1.0, std::abs(exact.lambda)));
        if (std::isnan(excess)) excess = std::numeric_limits<double>::infinity();

        for (const Atom& other : atoms) {
            const auto [aj, bj, cj] = other.triple;
            const double left = a + bj * c / aj;
            const double right = aj + b * cj / a;
            const double res = std::abs(left * left * right * right - self4);
            cand.pairwise_residuals.push_back({other.triple, res});
            excess = std::max(excess, res / (tolerance * std::max(1.0, self4)));
        }
        cand.passes = excess <= 1.0;
        if (cand.passes && !v.is_degenerate_candidate) {
            v.is_degenerate_candidate = true;
            v.selected = v.candidates.size();
        } else if (!v.is_degenerate_candidate && excess < best_excess) {
            v.selected = v.candidates.size();
        }
        if (!v.is_degenerate_candidate) best_excess = std::min(best_excess, excess);
        v.candidates.push_back(std::move(cand));
    }
    return v;
}

}  // namespace rmp
