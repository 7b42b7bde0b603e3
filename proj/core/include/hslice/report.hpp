#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hslice {

enum class Verdict { Pass, Vacuous, Fail };

std::string verdict_name(Verdict v);

// One empirically checked quantity next to the bound it is compared against.
// Vacuous (bound >= 1 for probabilities, or no bound at all) rows are
// reported but never tested; Fail means even the CI lower end clears the bound.
struct EstimateReport {
    std::string quantity;
    double estimate = 0.0;
    double ciLow = 0.0;
    double ciHigh = 0.0;
    uint64_t trials = 0;
    double paperBound = std::numeric_limits<double>::infinity();
    Verdict verdict = Verdict::Vacuous;
};

// Verdict rules: Vacuous iff the bound is >= vacuous_at (1.0 for
// probabilities) or non-finite; otherwise Fail iff ciLow > bound.
EstimateReport make_report(std::string quantity, double estimate, double ciLow, double ciHigh,
                           uint64_t trials, double paperBound, double vacuousAt = 1.0);

// columns: quantity, estimate, ci_lo, ci_hi, paper_bound, vacuous_flag
std::string reports_to_csv(const std::vector<EstimateReport>& rows);

// fixed-format float printing used across all emitted artifacts ("%.17g")
std::string format_double(double x);

bool any_failure(const std::vector<EstimateReport>& rows);

}  // namespace hslice
