#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rmp/acceptance.hpp"
#include "rmp/commands.hpp"

namespace {

struct Flags {
    std::string dist;
    std::uint64_t samples = 100000;
    std::uint64_t n = 10000;
    std::uint64_t chains = 500;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    std::string source;
    bool exact = false;
    bool quick = false;
    unsigned threads = 0;
    std::string out;
    std::string hist;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw rmp::cli::CommandError(1, "cannot write '" + path + "'");
    f << content;
    if (!f) throw rmp::cli::CommandError(1, "failed writing '" + path + "'");
}

rmp::cli::ExperimentConfig resolve(const Flags& f) {
    rmp::cli::ExperimentConfig cfg{rmp::cli::load_distribution(f.dist)};
    cfg.samples = f.samples;
    cfg.n = f.n;
    cfg.chains = f.chains;
    cfg.seed = f.seed;
    cfg.tolerance = f.tolerance;
    cfg.exact = f.exact;
    cfg.threads = f.threads;
    if (!f.source.empty()) {
        const auto s = rmp::cli::parse_source(f.source);
        if (!s) throw rmp::cli::CommandError(1, "--source must be one of closed-form, exact, mc");
        cfg.source = *s;
    }
    return cfg;
}

void emit(const rmp::cli::CommandOutput& out, const Flags& f) {
    if (!out.diagnostics.empty()) std::cerr << out.diagnostics;
    if (f.out.empty())
        std::cout << out.json;
    else
        write_file(f.out, out.json);
    if (!out.histogram_csv.empty()) {
        const std::string hist = !f.hist.empty() ? f.hist : (!f.out.empty() ? f.out + ".hist.csv" : std::string{});
        if (!hist.empty()) write_file(hist, out.histogram_csv);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov exponents and CLT variances for products of random singular 2x2 matrices", "rmp"};
    app.require_subcommand(1);
    Flags f;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--dist", f.dist, "Distribution JSON document")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", f.seed, "64-bit seed")->capture_default_str();
        sub->add_option("--threads", f.threads, "Worker cap (0 = all cores); results do not depend on it");
        sub->add_option("--out", f.out, "Write the JSON result here instead of stdout");
    };

    auto* estimate = app.add_subcommand("estimate", "Estimate lambda and sigma^2");
    add_common(estimate);
    estimate->add_option("--samples", f.samples, "Monte Carlo pairs / triples")->capture_default_str();
    estimate->add_flag("--exact", f.exact, "Exact enumeration (finite support only)");

    auto* clt = app.add_subcommand("clt", "Simulate (log||S_n|| - n lambda)/sqrt(n) and test against N(0, sigma^2)");
    add_common(clt);
    clt->add_option("--n", f.n, "Chain length")->capture_default_str();
    clt->add_option("--chains", f.chains, "Number of independent chains")->capture_default_str();
    clt->add_option("--source", f.source, "Where (lambda, sigma^2) come from: closed-form, exact, mc")->required();
    clt->add_option("--samples", f.samples, "Monte Carlo samples for --source mc")->capture_default_str();
    clt->add_option("--hist", f.hist, "Histogram CSV path (default <out>.hist.csv when --out is given)");

    auto* degeneracy = app.add_subcommand("degeneracy", "Atomic-case necessary conditions for sigma^2 = 0");
    add_common(degeneracy);
    degeneracy->add_option("--tolerance", f.tolerance, "Relative tolerance")->capture_default_str();

    auto* selftest = app.add_subcommand("selftest", "Run the acceptance battery");
    selftest->add_flag("--quick", f.quick, "Reduced sample counts");
    selftest->add_option("--threads", f.threads, "Worker cap (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*selftest) {
            rmp::acceptance::Options options;
            options.quick = f.quick;
            options.threads = f.threads;
            const auto results = rmp::acceptance::run_all(options, std::cout);
            for (const auto& r : results)
                if (!r.passed) return 3;
            return 0;
        }
        const rmp::cli::ExperimentConfig cfg = resolve(f);
        if (*estimate) emit(rmp::cli::cmd_estimate(cfg), f);
        if (*clt) emit(rmp::cli::cmd_clt(cfg), f);
        if (*degeneracy) emit(rmp::cli::cmd_degeneracy(cfg), f);
        return 0;
    } catch (const rmp::cli::CommandError& e) {
        std::cerr << "rmp: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "rmp: " << e.what() << '\n';
        return 1;
    }
}
