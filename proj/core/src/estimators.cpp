#include "rmp/estimators.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmp/errors.hpp"
#include "rmp/matrix.hpp"
#include "rmp/stats.hpp"

namespace rmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Samples per Monte Carlo chunk. Part of the reproducibility contract: chunk i
// always draws from substream (seed, domain, i), whatever the worker count.
constexpr std::uint64_t kChunk = 1u << 14;

std::uint64_t chunk_count(std::uint64_t n) { return (n + kChunk - 1) / kChunk; }

struct ChunkRange {
    std::uint64_t begin;
    std::uint64_t end;
};

ChunkRange chunk_range(std::uint64_t chunk, std::uint64_t n) {
    const std::uint64_t begin = chunk * kChunk;
    return {begin, std::min(n, begin + kChunk)};
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

struct TallyChunk {
    RunningStats stats;
    std::uint64_t minus_inf = 0;
};

}  // namespace

double cross_term(const EntryTriple& first, const EntryTriple& second) noexcept {
    const double v = first.a + second.b * first.c / second.a;
    return v == 0.0 ? -kInf : std::log(std::abs(v));
}

EstimateResult estimate_lambda_mc(const DistributionSpec& spec, std::uint64_t n_samples, std::uint64_t seed,
                                  Parallelism par) {
    require(n_samples >= 2, "estimate_lambda_mc: n_samples must be >= 2");
    const Stopwatch clock;
    std::vector<TallyChunk> chunks(chunk_count(n_samples));
    parallel_for(chunks.size(), par, [&](std::size_t i) {
        auto stream = RandomStream::derive(seed, StreamDomain::LambdaPairs, i);
        const auto [begin, end] = chunk_range(i, n_samples);
        TallyChunk& out = chunks[i];
        for (auto k = begin; k < end; ++k) {
            const EntryTriple first = sample_triple(spec, stream);
            const EntryTriple second = sample_triple(spec, stream);
            const double x = cross_term(first, second);
            if (std::isinf(x) && x < 0)
                ++out.minus_inf;
            else
                out.stats.add(x);
        }
    });

    RunningStats total;
    std::uint64_t minus_inf = 0;
    for (const auto& c : chunks) {
        total.merge(c.stats);
        minus_inf += c.minus_inf;
    }

    EstimateResult r;
    r.n_samples = n_samples;
    r.seed = seed;
    r.minus_inf_events = minus_inf;
    if (minus_inf > 0) {
        r.value = -kInf;
        r.std_error = kInf;
    } else {
        r.value = total.mean();
        r.std_error = total.std_error();
    }
    r.wall_seconds = clock.seconds();
    return r;
}

Sigma2Estimate estimate_sigma2_mc(const DistributionSpec& spec, std::uint64_t n_samples, std::uint64_t seed,
                                  Parallelism par) {
    require(n_samples >= 2, "estimate_sigma2_mc: n_samples must be >= 2");
    const Stopwatch clock;
    const std::uint64_t n = n_samples;
    std::vector<double> first(n);   // cross(xi1, xi2)
    std::vector<double> second(n);  // cross(xi2, xi3)

    struct MomentChunk {
        CompensatedSum x, xx, xy;
        std::uint64_t minus_inf = 0;
    };
    std::vector<MomentChunk> chunks(chunk_count(n));
    parallel_for(chunks.size(), par, [&](std::size_t i) {
        auto stream = RandomStream::derive(seed, StreamDomain::Sigma2Triples, i);
        const auto [begin, end] = chunk_range(i, n);
        MomentChunk& out = chunks[i];
        for (auto k = begin; k < end; ++k) {
            const EntryTriple t1 = sample_triple(spec, stream);
            const EntryTriple t2 = sample_triple(spec, stream);
            const EntryTriple t3 = sample_triple(spec, stream);
            const double x = cross_term(t1, t2);
            const double y = cross_term(t2, t3);
            first[k] = x;
            second[k] = y;
            if (std::isinf(x) || std::isinf(y)) {
                ++out.minus_inf;
                continue;
            }
            out.x.add(x);
            out.xx.add(x * x);
            out.xy.add(x * y);
        }
    });

    CompensatedSum sx, sxx, sxy;
    std::uint64_t minus_inf = 0;
    for (const auto& c : chunks) {
        sx.merge(c.x);
        sxx.merge(c.xx);
        sxy.merge(c.xy);
        minus_inf += c.minus_inf;
    }

    Sigma2Estimate out;
    out.sigma2.n_samples = n;
    out.sigma2.seed = seed;
    out.sigma2.minus_inf_events = minus_inf;
    if (minus_inf > 0) {
        out.sigma2.value = kNaN;
        out.sigma2.std_error = kNaN;
        out.ladder = {kNaN, kNaN, -kInf, kNaN, kNaN};
        out.sigma2.wall_seconds = clock.seconds();
        return out;
    }

    const double nd = static_cast<double>(n);
    const double m1 = sx.value() / nd;
    const double m2 = sxx.value() / nd;
    const double m12 = sxy.value() / nd;
    out.ladder.lambda = m1;
    out.ladder.c0 = m2 - m1 * m1;
    out.ladder.c1 = m12 - m1 * m1;
    out.sigma2.value = out.ladder.sigma2();

    // Leave-one-out replicates, expressed as exact deviations from the
    // full-sample functional to avoid cancellation in (n m - x_i)/(n - 1).
    struct JackChunk {
        RunningStats c0, c1, s2;
    };
    std::vector<JackChunk> jack(chunks.size());
    const double inv = 1.0 / (nd - 1.0);
    parallel_for(jack.size(), par, [&](std::size_t i) {
        const auto [begin, end] = chunk_range(i, n);
        JackChunk& out_chunk = jack[i];
        for (auto k = begin; k < end; ++k) {
            const double x = first[k];
            const double y = second[k];
            const double d1 = (m1 - x) * inv;
            const double d2 = (m2 - x * x) * inv;
            const double d12 = (m12 - x * y) * inv;
            const double shift = 2.0 * m1 * d1 + d1 * d1;
            const double dc0 = d2 - shift;
            const double dc1 = d12 - shift;
            out_chunk.c0.add(dc0);
            out_chunk.c1.add(dc1);
            out_chunk.s2.add(dc0 + 2.0 * dc1);
        }
    });
    RunningStats jc0, jc1, js2;
    for (const auto& c : jack) {
        jc0.merge(c.c0);
        jc1.merge(c.c1);
        js2.merge(c.s2);
    }
    // var_jack = (n-1)/n * sum (theta_i - mean)^2 = (n-1)^2/n * sample variance
    const auto jack_se = [&](const RunningStats& s) { return (nd - 1.0) * std::sqrt(s.variance() / nd); };
    out.sigma2.std_error = jack_se(js2);
    out.ladder.c0_std_error = jack_se(jc0);
    out.ladder.c1_std_error = jack_se(jc1);
    out.sigma2.wall_seconds = clock.seconds();
    return out;
}

ExactValues exact_discrete(const DistributionSpec& spec) {
    const std::vector<Atom> atoms = enumerate_atoms(spec);
    const std::size_t k = atoms.size();
    if (k > kMaxExactAtoms)
        throw std::length_error("exact_discrete: " + std::to_string(k) + " atoms exceeds the cap of " +
                                std::to_string(kMaxExactAtoms));

    std::vector<double> cross(k * k);
    bool cancels = false;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            cross[i * k + j] = cross_term(atoms[i].triple, atoms[j].triple);
            cancels = cancels || std::isinf(cross[i * k + j]);
        }

    ExactValues out;
    if (cancels) {
        out.lambda = -kInf;
        out.sigma2 = kNaN;
        out.ladder = {kNaN, kNaN, -kInf, std::nullopt, std::nullopt};
        return out;
    }

    CompensatedSum lambda, m2, m12;
    // into[j] = sum_i p_i cross(i, j), out_of[j] = sum_k p_k cross(j, k)
    std::vector<CompensatedSum> into(k), out_of(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double x = cross[i * k + j];
            const double pij = atoms[i].probability * atoms[j].probability;
            lambda.add(pij * x);
            m2.add(pij * x * x);
            into[j].add(atoms[i].probability * x);
            out_of[i].add(atoms[j].probability * x);
        }
    }
    // E[X1 X2] = sum_{i,j,k} p_i p_j p_k cross(i,j) cross(j,k), factorized over j.
    for (std::size_t j = 0; j < k; ++j) m12.add(atoms[j].probability * into[j].value() * out_of[j].value());

    const double lam = lambda.value();
    out.lambda = lam;
    out.ladder.lambda = lam;
    out.ladder.c0 = m2.value() - lam * lam;
    out.ladder.c1 = m12.value() - lam * lam;
    out.sigma2 = out.ladder.sigma2();
    return out;
}

ClosedFormValues closed_form(const DistributionSpec& spec) {
    using std::numbers::ln2;
    using std::numbers::pi;
    switch (spec.family()) {
        case Family::CauchyRankOne:
            return {ln2, pi * pi / 4.0};
        case Family::ExponentialRankOne: {
            const double theta = spec.as<ExponentialRankOne>().theta;
            return {1.0 - kEulerGamma - std::log(theta), pi * pi / 6.0 - 1.0};
        }
        case Family::UniformRankOne: {
            const auto& d = spec.as<UniformRankOne>();
            if (d.a == 0.0) return {2.0 * ln2 - 1.5 + std::log(d.b), 1.25 - 2.0 * ln2 * ln2};
            if (d.b == 0.0) return {2.0 * ln2 - 1.5 + std::log(d.a), 1.25 - 2.0 * ln2 * ln2};
            if (d.a == d.b) return {std::log(2.0 * d.b) - 1.5, 1.25};
            throw NoClosedFormError("no closed form for UniformRankOne with 0 < a != b");
        }
        case Family::BinaryHill: {
            const auto& d = spec.as<BinaryHill>();
            const double a = d.alpha;
            const double b = d.beta;
            const double p = d.p;
            const double q = 1.0 - p;
            const double u = std::log(std::abs(a + 1.0 / (a * a)));
            const double v = std::log(std::abs(a + 1.0 / (b * b)) * std::abs(b + 1.0 / (a * a)));
            const double w = std::log(std::abs(b + 1.0 / (b * b)));
            const double lambda = p * p * u + p * q * v + q * q * w;
            // The u*w coefficient is -6 p^2 q^2 (checked against exact enumeration).
            const double sigma2 = p * p * (1.0 + (2.0 - 3.0 * p) * p) * u * u -
                                  2.0 * q * p * p * u * ((3.0 * p - 1.0) * v + 3.0 * q * w) +
                                  q * (1.0 + 3.0 * (p - 1.0) * p) * p * v * v +
                                  2.0 * q * q * (3.0 * p - 2.0) * p * v * w - q * q * (3.0 * p - 4.0) * p * w * w;
            return {lambda, sigma2};
        }
        default:
            throw NoClosedFormError("no closed form for family " + std::string(family_name(spec.family())));
    }
}

double chain_log_norm(const DistributionSpec& spec, std::uint64_t n, RandomStream& stream) {
    ProductAccumulator acc(sample_triple(spec, stream));
    for (std::uint64_t k = 1; k < n; ++k) acc.step(sample_triple(spec, stream));
    return acc.log_norm();
}

EstimateResult trajectory_lambda(const DistributionSpec& spec, std::uint64_t n, std::uint64_t n_chains,
                                 std::uint64_t seed, Parallelism par) {
    require(n >= 2, "trajectory_lambda: chain length must be >= 2");
    require(n_chains >= 1, "trajectory_lambda: need at least one chain");
    const Stopwatch clock;
    std::vector<double> per_chain(n_chains);
    parallel_for(n_chains, par, [&](std::size_t i) {
        auto stream = RandomStream::derive(seed, StreamDomain::TrajectoryChains, i);
        per_chain[i] = chain_log_norm(spec, n, stream) / static_cast<double>(n);
    });

    RunningStats stats;
    std::uint64_t minus_inf = 0;
    for (double v : per_chain) {
        if (std::isinf(v) && v < 0)
            ++minus_inf;
        else
            stats.add(v);
    }
    EstimateResult r;
    r.n_samples = n_chains;
    r.seed = seed;
    r.minus_inf_events = minus_inf;
    if (minus_inf > 0) {
        r.value = -kInf;
        r.std_error = kInf;
    } else {
        r.value = stats.mean();
        r.std_error = n_chains > 1 ? stats.std_error() : kNaN;
    }
    r.wall_seconds = clock.seconds();
    return r;
}

MomentDiagnostics moment_diagnostics(const DistributionSpec& spec, std::uint64_t n_samples, std::uint64_t seed,
                                     Parallelism par) {
    require(n_samples >= 100, "moment_diagnostics: n_samples must be >= 100");
    struct DiagChunk {
        RunningStats lp, lb, sq;
        std::uint64_t minus_inf = 0;
    };
    std::vector<DiagChunk> chunks(chunk_count(n_samples));
    parallel_for(chunks.size(), par, [&](std::size_t i) {
        auto stream = RandomStream::derive(seed, StreamDomain::Diagnostics, i);
        const auto [begin, end] = chunk_range(i, n_samples);
        DiagChunk& out = chunks[i];
        for (auto k = begin; k < end; ++k) {
            const EntryTriple t1 = sample_triple(spec, stream);
            const EntryTriple t2 = sample_triple(spec, stream);
            out.lp.add(std::max(0.0, std::log(std::abs(t1.a) + std::abs(t1.c))));
            out.lb.add(std::log1p(std::abs(t1.b) / std::abs(t1.a)));
            const double x = cross_term(t1, t2);
            if (std::isinf(x))
                ++out.minus_inf;
            else
                out.sq.add(x * x);
        }
    });
    RunningStats lp, lb, sq;
    MomentDiagnostics d;
    for (const auto& c : chunks) {
        lp.merge(c.lp);
        lb.merge(c.lb);
        sq.merge(c.sq);
        d.minus_inf_events += c.minus_inf;
    }
    d.log_plus_a_plus_c = {lp.mean(), lp.std_error()};
    d.log_one_plus_b_over_a = {lb.mean(), lb.std_error()};
    d.cross_term_squared = {sq.mean(), sq.std_error()};
    d.n_samples = n_samples;
    d.seed = seed;
    return d;
}

}  // namespace rmp
