#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hslice/cube.hpp"
#include "hslice/decompose.hpp"
#include "hslice/hyperplane.hpp"
#include "hslice/matrix.hpp"
#include "hslice/report.hpp"
#include "hslice/rng.hpp"
#include "hslice/stats.hpp"

namespace hslice {

struct GramStats {
    std::vector<double> S;  // S_i = sum_j <v_i, v_j>^2 (Gram row mass)
    std::vector<double> rowNorms;
    std::optional<Matrix> gram;  // retained when rows <= gramCap
};

GramStats gram_stats(const Matrix& V, int gramCap = 1024);

// Two-stage sampler parameters. Paper defaults are functions of m = |N1|;
// every probabilistic check re-evaluates its bound at whatever values are
// actually in effect, so overrides stay coherent.
struct SamplerParams {
    int m = 0;
    double rho0 = 1.0;
    double rho1 = 1.0;
    double deltaHeavy = 1.0;
    double badThreshold = 1.0;    // 10 sqrt(log m) at paper defaults
    double closeThreshold = 1.0;  // 5 sqrt(log m)
    double nearBadDot = 0.9;
    int activationLevels = 1;  // t = 2^h for h in {0, ..., ceil(log2 m)}
    bool paperDefaults = true;

    static SamplerParams paper(int m);        // enforces the m >= 16 floor
    static SamplerParams formulas_at(int m);  // same formulas, floor disabled (stamped override)
    SamplerParams with_overrides(const std::map<std::string, double>& kv) const;
};

struct PointSample {
    std::vector<double> alpha;  // U[-1,1) per row
    std::vector<double> X0;     // rho0 * sum alpha_i v_i
    std::vector<int> badSet;    // rows with |<X0, v_i> - lambda_i| <= badThreshold
    std::vector<double> beta;   // aligned with badSet
    std::vector<double> X1;     // rho1 * sum_{bad} beta_i v_i
    std::vector<double> X;      // X0 + X1
};

PointSample sample_point(const Matrix& V, const std::vector<double>& lambda,
                         const SamplerParams& params, RngStream& rng);

// Five overlapping index types from the close-index case analysis:
//   1 bad, 2 not bad & not activated, 3 activated & heavy,
//   4 light & near bad, 5 activated & not near bad.
// Every index must satisfy at least one. An index is t-activated when both
// E1(j,t) and E2(j,t) hold; activated means t-activated for some level t = 2^h.
struct IndexClassification {
    std::vector<uint8_t> bad, close, nearBad, heavy, activated;
    std::vector<double> dotX0, dotX;  // <X0, v_j>, <X, v_j>
    std::vector<double> T;            // (rho1^2/3) sum_{i bad} <v_i, v_j>^2
    int levels = 0;
    std::vector<uint8_t> e1, e2;  // [j * levels + h]
    std::vector<uint8_t> typeMask;

    bool e1_at(int j, int h) const { return e1[static_cast<size_t>(j) * levels + h] != 0; }
    bool e2_at(int j, int h) const { return e2[static_cast<size_t>(j) * levels + h] != 0; }
};

IndexClassification classify(const PointSample& sample, const Matrix& V,
                             const std::vector<double>& lambda, const GramStats& stats,
                             const SamplerParams& params);

// mu_p rounding: coordinate i is +1 with probability (1 + p_i)/2.
// Requires ||p||_inf <= 1.
std::vector<int8_t> round_mu_p(const std::vector<double>& p, RngStream& rng);

struct WitnessConfig {
    uint64_t seed = 0;
    uint64_t budget = 10000;
    int workers = 1;
    int cap = 24;
    bool finalExactCheck = true;
    bool wiggleEnabled = true;  // applies to exact-mode inputs
    Rational wiggleMagnitude = Rational(1, 1024);
    std::optional<DecompConstants> constants;  // else paper(k, n)
    bool samplerFormulasAnyM = false;          // allow m < 16 via formulas_at
    std::map<std::string, double> samplerOverrides;
};

struct StageTally {
    uint64_t wSearch = 0;
    uint64_t xConstruction = 0;
    uint64_t xInfNorm = 0;
    uint64_t roundingDistance = 0;
    uint64_t finalExact = 0;

    void merge(const StageTally& o) {
        wSearch += o.wSearch;
        xConstruction += o.xConstruction;
        xInfNorm += o.xInfNorm;
        roundingDistance += o.roundingDistance;
        finalExact += o.finalExact;
    }
};

struct WitnessResult {
    enum class Status { Found, Exhausted };
    Status status = Status::Exhausted;
    EdgeId edge{};
    uint64_t attempts = 0;  // success index + 1, or the full budget
    StageTally tally;
    std::vector<int8_t> w;  // over N2 in ascending column order
    int m = 0;              // |N1|
    uint64_t degenerateOnWitness = 0;
    SamplerParams params;
    DecompositionResult decomposition;
    uint64_t wigglePerturbed = 0;
    uint64_t wiggleResolvedDegenerate = 0;
};

// Full pipeline: (wiggle) -> decompose -> per-attempt {w draw, X sample,
// ||X||_inf gate, mu_X rounding + distance gate, exact slicing recheck against
// the ORIGINAL collection}. Attempts use per-index RNG streams; when a witness
// exists the reported one is the smallest succeeding attempt index, so results
// are identical for any worker count.
WitnessResult end_to_end_witness(const AnyCollection& collection, const WitnessConfig& config);

struct BreakdownOptions {
    uint64_t trials = 10000;
    uint64_t seed = 0;
    int workers = 1;
    int maxIndexRows = 16;
    int maxPairRows = 8;
    std::vector<int> reportLevels = {0, 1};  // activation levels to report (t = 2^h)
};

struct BreakdownReport {
    uint64_t trials = 0;
    std::vector<EstimateReport> rows;
    uint64_t typeGaps = 0;        // indices left without any type label (must be 0)
    uint64_t badNotNearBad = 0;   // bad => nearBad violations (must be 0)
    std::array<uint64_t, 5> closeByType{};
    uint64_t closeTotal = 0;
};

// Monte Carlo estimates of the close-index quantities, each against the bound
// evaluated at the run's parameters (vacuous entries reported, not tested).
BreakdownReport close_type_breakdown(const Matrix& V, const std::vector<double>& lambda,
                                     const SamplerParams& params, const BreakdownOptions& opts);

struct MomentCheckRow {
    int index = 0;
    double sampleVariance = 0, varianceSe = 0, analyticVariance = 0;  // rho0^2 S_i / 3
    double meanX = 0, meanXSe = 0;                                    // <X, v_i>, expect 0
};

// Variance identity Var[<X0, v_i>] = rho0^2 S_i / 3 plus the zero-mean check.
std::vector<MomentCheckRow> sampler_moment_check(const Matrix& V,
                                                 const std::vector<double>& lambda,
                                                 const SamplerParams& params, uint64_t trials,
                                                 uint64_t seed, int workers = 1);

}  // namespace hslice
