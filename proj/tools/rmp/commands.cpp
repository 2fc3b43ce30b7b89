#include "rmp/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rmp/clt.hpp"
#include "rmp/errors.hpp"
#include "rmp/estimators.hpp"

namespace rmp::cli {

namespace {

using Json = nlohmann::ordered_json;

// JSON has no infinities: -inf/inf become strings, NaN (undefined) becomes null.
Json real(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
    return x;
}

Json triple(const EntryTriple& t) { return Json::array({real(t.a), real(t.b), real(t.c)}); }

Json estimate_json(const EstimateResult& r) {
    Json j;
    j["value"] = real(r.value);
    if (r.std_error) j["std_error"] = real(*r.std_error);
    j["n_samples"] = r.n_samples;
    j["seed"] = r.seed;
    j["minus_inf_events"] = r.minus_inf_events;
    return j;
}

Json ladder_json(const CovarianceLadder& l) {
    Json j;
    j["c0"] = real(l.c0);
    j["c1"] = real(l.c1);
    j["lambda"] = real(l.lambda);
    if (l.c0_std_error) j["c0_std_error"] = real(*l.c0_std_error);
    if (l.c1_std_error) j["c1_std_error"] = real(*l.c1_std_error);
    return j;
}

Json mean_json(const MeanWithError& m) {
    Json j;
    j["mean"] = real(m.mean);
    j["std_error"] = real(m.std_error);
    return j;
}

Json closed_form_json(const DistributionSpec& spec) {
    try {
        const ClosedFormValues cf = closed_form(spec);
        Json j;
        j["lambda"] = real(cf.lambda);
        j["sigma2"] = real(cf.sigma2);
        return j;
    } catch (const NoClosedFormError&) {
        return nullptr;
    }
}

Json header(std::string_view command, const ExperimentConfig& config) {
    Json j;
    j["command"] = command;
    j["distribution"] = Json::parse(to_json_text(config.distribution));
    j["seed"] = config.seed;
    return j;
}

std::string finish(const Json& j) { return j.dump(2) + "\n"; }

std::string timing(std::string_view label, double seconds) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*s wall time: %.3f s\n", static_cast<int>(label.size()), label.data(), seconds);
    return buf;
}

}  // namespace

std::string_view source_name(ValueSource s) noexcept {
    switch (s) {
        case ValueSource::ClosedForm: return "closed-form";
        case ValueSource::Exact: return "exact";
        case ValueSource::MonteCarlo: return "mc";
    }
    return "unknown";
}

std::optional<ValueSource> parse_source(std::string_view text) noexcept {
    if (text == "closed-form") return ValueSource::ClosedForm;
    if (text == "exact") return ValueSource::Exact;
    if (text == "mc") return ValueSource::MonteCarlo;
    return std::nullopt;
}

std::string csv_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

DistributionSpec load_distribution(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CommandError(1, "cannot open distribution file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_spec(text.str());
    } catch (const SpecError& e) {
        throw CommandError(1, path + ": " + e.what());
    }
}

CommandOutput cmd_estimate(const ExperimentConfig& config) {
    const DistributionSpec& spec = config.distribution;
    const Parallelism par{config.threads};
    Json j = header("estimate", config);
    CommandOutput out;

    if (config.exact) {
        ExactValues exact;
        try {
            exact = exact_discrete(spec);
        } catch (const NotDiscreteError& e) {
            throw CommandError(1, std::string("--exact requires finite support: ") + e.what());
        } catch (const std::length_error& e) {
            throw CommandError(1, e.what());
        }
        j["method"] = "exact";
        Json lambda;
        lambda["value"] = real(exact.lambda);
        Json sigma2;
        sigma2["value"] = real(exact.sigma2);
        j["lambda"] = std::move(lambda);
        j["sigma2"] = std::move(sigma2);
        j["ladder"] = ladder_json(exact.ladder);
        j["closed_form"] = closed_form_json(spec);
        out.json = finish(j);
        return out;
    }

    if (config.samples < 2) throw CommandError(1, "--samples must be >= 2");
    const EstimateResult lambda = estimate_lambda_mc(spec, config.samples, config.seed, par);
    const Sigma2Estimate sigma2 = estimate_sigma2_mc(spec, config.samples, config.seed, par);
    j["method"] = "monte-carlo";
    j["samples"] = config.samples;
    j["lambda"] = estimate_json(lambda);
    j["sigma2"] = estimate_json(sigma2.sigma2);
    j["ladder"] = ladder_json(sigma2.ladder);
    if (config.samples >= 100) {
        const MomentDiagnostics d = moment_diagnostics(spec, config.samples, config.seed, par);
        Json diag;
        diag["log_plus_a_plus_c"] = mean_json(d.log_plus_a_plus_c);
        diag["log_one_plus_b_over_a"] = mean_json(d.log_one_plus_b_over_a);
        diag["cross_term_squared"] = mean_json(d.cross_term_squared);
        diag["minus_inf_events"] = d.minus_inf_events;
        j["diagnostics"] = std::move(diag);
    } else {
        j["diagnostics"] = nullptr;
    }
    j["closed_form"] = closed_form_json(spec);
    out.json = finish(j);
    out.diagnostics = timing("lambda", lambda.wall_seconds) + timing("sigma2", sigma2.sigma2.wall_seconds);
    return out;
}

CommandOutput cmd_clt(const ExperimentConfig& config) {
    const DistributionSpec& spec = config.distribution;
    const Parallelism par{config.threads};
    if (config.n < 10) throw CommandError(1, "--n must be >= 10");
    if (config.chains < 10) throw CommandError(1, "--chains must be >= 10");

    double lambda = 0.0;
    double sigma2 = 0.0;
    switch (config.source) {
        case ValueSource::ClosedForm:
            try {
                const ClosedFormValues cf = closed_form(spec);
                lambda = cf.lambda;
                sigma2 = cf.sigma2;
            } catch (const NoClosedFormError& e) {
                throw CommandError(2, e.what());
            }
            break;
        case ValueSource::Exact:
            try {
                const ExactValues ex = exact_discrete(spec);
                lambda = ex.lambda;
                sigma2 = ex.sigma2;
            } catch (const NotDiscreteError& e) {
                throw CommandError(2, e.what());
            } catch (const std::length_error& e) {
                throw CommandError(2, e.what());
            }
            break;
        case ValueSource::MonteCarlo: {
            if (config.samples < 2) throw CommandError(1, "--samples must be >= 2");
            lambda = estimate_lambda_mc(spec, config.samples, config.seed, par).value;
            sigma2 = estimate_sigma2_mc(spec, config.samples, config.seed, par).sigma2.value;
            break;
        }
    }
    if (!std::isfinite(lambda) || !std::isfinite(sigma2))
        throw CommandError(2, "source '" + std::string(source_name(config.source)) +
                                  "' gives no finite (lambda, sigma2) for this distribution");
    // Monte Carlo can land marginally below zero for a degenerate law.
    sigma2 = std::max(sigma2, 0.0);

    const CltReport r = simulate_normalized(spec, config.n, config.chains, lambda, sigma2, config.seed, par);

    Json j = header("clt", config);
    j["source"] = source_name(config.source);
    if (config.source == ValueSource::MonteCarlo) j["samples"] = config.samples;
    j["n"] = r.n;
    j["m_chains"] = r.m_chains;
    j["lambda_used"] = real(r.lambda_used);
    j["sigma2_used"] = real(r.sigma2_used);
    j["empirical_mean"] = real(r.empirical_mean);
    j["empirical_var"] = real(r.empirical_var);
    j["ks_defined"] = r.ks_defined();
    j["ks_distance"] = real(r.ks_distance);
    j["ks_critical_001"] = real(ks_critical_001(r.m_chains - r.minus_inf_events));
    j["minus_inf_events"] = r.minus_inf_events;
    Json hist = Json::array();
    std::string csv = "bin_left,bin_right,count\n";
    for (const HistogramBin& b : r.histogram) {
        Json bin;
        bin["bin_left"] = real(b.left);
        bin["bin_right"] = real(b.right);
        bin["count"] = b.count;
        hist.push_back(std::move(bin));
        csv += csv_real(b.left) + "," + csv_real(b.right) + "," + std::to_string(b.count) + "\n";
    }
    j["histogram"] = std::move(hist);

    CommandOutput out;
    out.json = finish(j);
    out.histogram_csv = std::move(csv);
    return out;
}

CommandOutput cmd_degeneracy(const ExperimentConfig& config) {
    if (!config.distribution.is_discrete())
        throw CommandError(1, "degeneracy check requires finite support");
    if (!(config.tolerance > 0.0)) throw CommandError(1, "--tolerance must be > 0");
    DegeneracyVerdict v;
    try {
        v = degeneracy_check(config.distribution, config.tolerance);
    } catch (const std::length_error& e) {
        throw CommandError(1, e.what());
    }

    const auto residual_list = [](const DegeneracyCandidate& c) {
        Json list = Json::array();
        for (const AtomResidual& r : c.pairwise_residuals) {
            Json item;
            item["atom"] = triple(r.atom);
            item["residual"] = real(r.residual);
            list.push_back(std::move(item));
        }
        return list;
    };

    Json j = header("degeneracy", config);
    j["tolerance"] = real(v.tolerance);
    j["is_degenerate_candidate"] = v.is_degenerate_candidate;
    j["lambda"] = real(v.lambda);
    j["sigma2"] = real(v.sigma2);
    const DegeneracyCandidate& sel = v.candidates.at(v.selected);
    Json check;
    check["atom"] = triple(sel.atom);
    check["residual"] = real(sel.lambda_residual);
    j["lambda_atom_check"] = std::move(check);
    j["pairwise_residuals"] = residual_list(sel);
    Json candidates = Json::array();
    for (const DegeneracyCandidate& c : v.candidates) {
        Json item;
        item["atom"] = triple(c.atom);
        item["probability"] = real(c.probability);
        item["lambda_residual"] = real(c.lambda_residual);
        item["pairwise_residuals"] = residual_list(c);
        item["passes"] = c.passes;
        candidates.push_back(std::move(item));
    }
    j["candidates"] = std::move(candidates);

    CommandOutput out;
    out.json = finish(j);
    return out;
}

}  // namespace rmp::cli
