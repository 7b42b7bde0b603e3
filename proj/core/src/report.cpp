#include "hslice/report.hpp"

#include <cmath>
#include <cstdio>

namespace hslice {

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "Pass";
        case Verdict::Vacuous: return "Vacuous";
        case Verdict::Fail: return "Fail";
    }
    return "?";
}

EstimateReport make_report(std::string quantity, double estimate, double ciLow, double ciHigh,
                           uint64_t trials, double paperBound, double vacuousAt) {
    EstimateReport r;
    r.quantity = std::move(quantity);
    r.estimate = estimate;
    r.ciLow = ciLow;
    r.ciHigh = ciHigh;
    r.trials = trials;
    r.paperBound = paperBound;
    if (!std::isfinite(paperBound) || paperBound >= vacuousAt)
        r.verdict = Verdict::Vacuous;
    else
        r.verdict = ciLow > paperBound ? Verdict::Fail : Verdict::Pass;
    return r;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string reports_to_csv(const std::vector<EstimateReport>& rows) {
    std::string out = "quantity,estimate,ci_lo,ci_hi,paper_bound,vacuous_flag\n";
    for (const auto& r : rows) {
        out += r.quantity;
        out += ',';
        out += format_double(r.estimate);
        out += ',';
        out += format_double(r.ciLow);
        out += ',';
        out += format_double(r.ciHigh);
        out += ',';
        out += std::isfinite(r.paperBound) ? format_double(r.paperBound) : "inf";
        out += ',';
        out += r.verdict == Verdict::Vacuous ? '1' : '0';
        out += '\n';
    }
    return out;
}

bool any_failure(const std::vector<EstimateReport>& rows) {
    for (const auto& r : rows)
        if (r.verdict == Verdict::Fail) return true;
    return false;
}

}  // namespace hslice
