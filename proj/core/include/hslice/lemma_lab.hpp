#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hslice/decompose.hpp"
#include "hslice/hyperplane.hpp"
#include "hslice/rational.hpp"
#include "hslice/report.hpp"
#include "hslice/scales.hpp"
#include "hslice/witness.hpp"

namespace hslice {

struct McOptions {
    uint64_t trials = 100000;
    uint64_t seed = 0;
    int workers = 1;
};

// P[|<x,w> - b| < t] (strict) for x over {-1,+1}^len with independent entries,
// x_i = +1 with probability (1 + bias_i)/2. Exact rational arithmetic via a
// partial-sum distribution walk; len <= 20. Empty bias = uniform signs.
Rational exact_lo_probability(const std::vector<Rational>& w, const Rational& b,
                              const Rational& t, const std::vector<Rational>& bias = {});

struct LoCheckOptions : McOptions {
    bool forceMonteCarlo = false;
    int exactCap = 20;
};

// Biased-form anticoncentration: with mt = #{i : |w_i| >= t} and ||bias||_inf
// <= 1/2, P[|<x,w> - b| < t] <= 10/sqrt(mt). Evaluated exactly when the
// dimension allows, by Monte Carlo otherwise (the reported trial count is 0
// for exact evaluations).
EstimateReport check_lo_bound(const std::vector<double>& w, double b, double t,
                              const std::vector<double>& bias = {},
                              const LoCheckOptions& opts = {});

struct ManyScalesCheck {
    EstimateReport report;
    scales::ScaleCertificate certificate;  // greedy certificate for 10*delta
};

// Many-scales anticoncentration: if w contains s >= 100 scales of size
// >= 10*delta, then P[|<x,w> - b| <= delta] <= e^{-s/100} for uniform signs x.
// The certificate is found greedily; fewer than 100 scales make the check
// vacuous. Long double throughout (the interesting vectors span ~100^s).
ManyScalesCheck check_many_scales(const std::vector<scales::Real>& w, scales::Real b,
                                  scales::Real delta, const McOptions& opts = {});

// CDF-difference P[|X - b| < t] for X = sum of independent X_i ~ U[lo_i, hi_i],
// by inclusion-exclusion over the box corners. 1..8 variables.
double continuous_lo_probability(const std::vector<std::pair<double, double>>& ranges,
                                 double b, double t);

struct ContinuousLoOptions : McOptions {
    bool forceMonteCarlo = false;
    int exactCap = 4;
};

// Continuous anticoncentration: X = sum X_i, X_i ~ U[lo_i, hi_i] independent
// (lo_i < hi_i strictly), P[|X - b| < t] <= 2t/sqrt(Var X) with
// Var X = sum (hi_i - lo_i)^2 / 12.
EstimateReport check_continuous_lo(const std::vector<std::pair<double, double>>& ranges,
                                   double b, double t, const ContinuousLoOptions& opts = {});

// Hoeffding tail checked at the extreme points: X_i uniform on {lo_i, hi_i},
// P[|X - E X| >= t] <= 2 exp(-2 t^2 / sum (hi_i - lo_i)^2).
EstimateReport check_chernoff(const std::vector<std::pair<double, double>>& ranges, double t,
                              const McOptions& opts = {});

struct HyperplaneClaimsOptions {
    uint64_t trials = 100000;
    uint64_t seed = 0;
    int workers = 1;
    uint64_t xBudget = 1000;  // attempts at drawing (w, X) through the gates
    int maxRows = 16;
    std::optional<DecompConstants> constants;
    bool samplerFormulasAnyM = false;
    std::map<std::string, double> samplerOverrides;
};

struct HyperplaneClaimsReport {
    std::vector<EstimateReport> rows;
    std::vector<int> k1Star;          // rows within 4 sqrt(ln n) of their target
    double k1StarBudget = 0.0;        // sqrt(n)/200
    uint64_t xAttempts = 0;
    uint64_t k2MarginViolations = 0;  // expect 0: the K2 margin is deterministic
    int m = 0;
};

// Decomposes the collection, fixes (w, X) through the usual pipeline gates,
// then drives only the rounding randomness (y ~ mu_X, uniform h in N1): a row
// outside K1* comes within 2|a'_ih| of slicing with probability <= 2/n^4, a
// row in K1* with probability <= 100/sqrt(n).
HyperplaneClaimsReport check_hyperplane_claims(const FloatCollection& fc,
                                               const HyperplaneClaimsOptions& opts = {});

}  // namespace hslice
