#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmp/estimators.hpp"

namespace rmp::acceptance {

struct Options {
    bool quick = false;  // reduced sample counts; thresholds rescale with them
    unsigned threads = 0;
    // Oracle under test. Replaceable so a corrupted oracle can be shown to fail.
    std::function<ClosedFormValues(const DistributionSpec&)> closed_form = rmp::closed_form;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::vector<std::string> details;  // one line per individual check
    double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id, const Options& options);

// Runs every criterion, printing one PASS/FAIL line each (plus details) to out.
std::vector<CriterionResult> run_all(const Options& options, std::ostream& out);

void print_result(const CriterionResult& result, std::ostream& out);

// Transcription of the printed two-point (Binary) example formulas, kept
// separate from closed_form() as an independent route.
ClosedFormValues printed_binary_formulas(double alpha, double beta, double p);

}  // namespace rmp::acceptance
