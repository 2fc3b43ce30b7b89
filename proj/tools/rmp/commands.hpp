#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "rmp/distributions.hpp"

namespace rmp::cli {

enum class ValueSource { ClosedForm, Exact, MonteCarlo };

std::string_view source_name(ValueSource s) noexcept;
std::optional<ValueSource> parse_source(std::string_view text) noexcept;

// Fully resolved flags for one invocation. Defaults mirror the CLI.
struct ExperimentConfig {
    DistributionSpec distribution;
    std::uint64_t samples = 100000;
    std::uint64_t n = 10000;
    std::uint64_t chains = 500;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    ValueSource source = ValueSource::ClosedForm;
    bool exact = false;
    unsigned threads = 0;
};

// Carries the process exit code: 1 for configuration errors, 2 when the
// requested (lambda, sigma^2) source is unavailable for the family.
class CommandError : public std::runtime_error {
public:
    CommandError(int exit_code, const std::string& message) : std::runtime_error(message), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

struct CommandOutput {
    std::string json;           // one document, trailing newline
    std::string histogram_csv;  // clt only
    std::string diagnostics;    // for stderr; never part of the result document
};

// Reads and validates a distribution document. Throws CommandError(1).
DistributionSpec load_distribution(const std::string& path);

CommandOutput cmd_estimate(const ExperimentConfig& config);
CommandOutput cmd_clt(const ExperimentConfig& config);
CommandOutput cmd_degeneracy(const ExperimentConfig& config);

// Formats a real for CSV output: 17 significant digits.
std::string csv_real(double x);

}  // namespace rmp::cli
