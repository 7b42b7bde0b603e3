#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hslice/cube.hpp"
#include "hslice/hyperplane.hpp"
#include "hslice/matrix.hpp"
#include "hslice/rng.hpp"
#include "hslice/witness.hpp"

using namespace hslice;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
    return m;
}

// two unit rows at angle arccos(0.95); S_0 = S_1 = 1 + 0.95^2 = 1.9025
Matrix pair_rows() {
    return from_rows({{1.0, 0.0}, {0.95, std::sqrt(1.0 - 0.95 * 0.95)}});
}

SamplerParams tuned(int m, std::map<std::string, double> kv) {
    return SamplerParams::formulas_at(m).with_overrides(kv);
}

FloatCollection make_float(int n, std::vector<FloatHyperplane> hps) {
    FloatCollection c;
    c.n = n;
    c.hyperplanes = std::move(hps);
    return c;
}

}  // namespace

TEST_CASE("gram_stats matches direct sums and honors the cache cap") {
    Matrix V = from_rows({{1, 0, 2}, {0.5, -1, 0}, {0, 3, 1}});
    GramStats g = gram_stats(V);
    REQUIRE(g.gram.has_value());
    for (int i = 0; i < 3; ++i) {
        CHECK(g.rowNorms[i] == doctest::Approx(std::sqrt(dot(V.row(i), V.row(i), 3))));
        double s = 0.0;
        for (int j = 0; j < 3; ++j) {
            double gij = dot(V.row(i), V.row(j), 3);
            CHECK(g.gram->at(i, j) == doctest::Approx(gij));
            s += gij * gij;
        }
        CHECK(g.S[i] == doctest::Approx(s));
    }

    GramStats capped = gram_stats(V, 2);  // 3 rows > cap
    CHECK(!capped.gram.has_value());
    for (int i = 0; i < 3; ++i) CHECK(capped.S[i] == doctest::Approx(g.S[i]));
}

TEST_CASE("sampler parameter formulas and overrides") {
    SamplerParams p = SamplerParams::paper(16);
    const double lm = std::log(16.0);
    CHECK(p.m == 16);
    CHECK(p.rho0 == doctest::Approx(std::pow(16.0, 3.0 / 19.0) * std::pow(lm, -3.0 / 19.0)));
    CHECK(p.rho1 == doctest::Approx(std::pow(16.0, 1.0 / 19.0) * std::pow(lm, -1.0 / 19.0)));
    CHECK(p.deltaHeavy ==
          doctest::Approx(std::pow(16.0, 1.0 / 38.0) * std::pow(lm, 9.0 / 19.0)));
    CHECK(p.badThreshold == doctest::Approx(10.0 * std::sqrt(lm)));
    CHECK(p.closeThreshold == doctest::Approx(5.0 * std::sqrt(lm)));
    CHECK(p.nearBadDot == 0.9);
    CHECK(p.activationLevels == 5);  // ceil(log2 16) + 1
    CHECK(p.paperDefaults);

    CHECK_THROWS_AS(SamplerParams::paper(15), std::invalid_argument);
    CHECK(SamplerParams::formulas_at(15).m == 15);
    CHECK(!SamplerParams::formulas_at(15).paperDefaults);
    CHECK_THROWS_AS(SamplerParams::formulas_at(1), std::invalid_argument);

    SamplerParams o = p.with_overrides({{"rho1", 2.5}, {"levels", 3.0}});
    CHECK(o.rho1 == 2.5);
    CHECK(o.activationLevels == 3);
    CHECK(o.rho0 == p.rho0);
    CHECK(!o.paperDefaults);
    CHECK_THROWS_AS(p.with_overrides({{"bogus", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(p.with_overrides({{"rho0", -1.0}}), std::invalid_argument);
}

TEST_CASE("sample_point replays its documented draw order") {
    Matrix V = pair_rows();
    std::vector<double> lambda{0.1, -0.2};
    SamplerParams params = tuned(2, {{"rho0", 0.7}, {"rho1", 0.3}, {"bad_threshold", 0.5}});

    for (uint64_t t = 0; t < 25; ++t) {
        RngStream rng(9, t);
        PointSample s = sample_point(V, lambda, params, rng);

        RngStream replay(9, t);
        std::vector<double> alpha(2);
        for (auto& a : alpha) a = replay.uniform_pm1();  // all alphas first
        std::vector<double> x0(2, 0.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) x0[j] += params.rho0 * alpha[i] * V.at(i, j);
        std::vector<int> bad;
        for (int i = 0; i < 2; ++i)
            if (std::fabs(dot(x0.data(), V.row(i), 2) - lambda[i]) <= params.badThreshold)
                bad.push_back(i);
        std::vector<double> x1(2, 0.0);
        std::vector<double> beta;
        for (int i : bad) {
            beta.push_back(replay.uniform_pm1());  // betas only for bad rows, in order
            for (int j = 0; j < 2; ++j) x1[j] += params.rho1 * beta.back() * V.at(i, j);
        }

        CHECK(s.alpha == alpha);
        CHECK(s.X0 == x0);
        CHECK(s.badSet == bad);
        CHECK(s.beta == beta);
        CHECK(s.X1 == x1);
        for (int j = 0; j < 2; ++j) CHECK(s.X[j] == x0[j] + x1[j]);
    }

    CHECK_THROWS_AS(
        [&] {
            RngStream rng(1, 1);
            sample_point(V, {0.0}, params, rng);
        }(),
        std::invalid_argument);
}

TEST_CASE("classify on a fully hand-worked two-row sample") {
    Matrix V = pair_rows();
    std::vector<double> lambda{0.0, 0.0};
    GramStats stats = gram_stats(V);
    CHECK(stats.S[0] == doctest::Approx(1.9025));
    CHECK(stats.S[1] == doctest::Approx(1.9025));

    PointSample s;
    s.X0 = {0.3, 0.4};
    s.X = {0.05, 0.0};
    s.badSet = {0};

    SUBCASE("heavy path: types 1|3 and 3") {
        SamplerParams p = tuned(2, {{"rho1", 3.0},
                                    {"bad_threshold", 0.5},
                                    {"close_threshold", 0.1},
                                    {"delta_heavy", 1.0},
                                    {"levels", 2.0}});
        IndexClassification c = classify(s, V, lambda, stats, p);
        CHECK(c.dotX0[0] == doctest::Approx(0.3));
        CHECK(c.dotX0[1] == doctest::Approx(0.3 * 0.95 + 0.4 * std::sqrt(0.0975)));
        CHECK(c.dotX[0] == doctest::Approx(0.05));
        CHECK(c.dotX[1] == doctest::Approx(0.0475));
        CHECK(c.T[0] == doctest::Approx(3.0));       // (9/3) * g00^2
        CHECK(c.T[1] == doctest::Approx(2.7075));    // (9/3) * 0.95^2
        CHECK(c.bad == std::vector<uint8_t>{1, 0});
        CHECK(c.nearBad == std::vector<uint8_t>{1, 1});  // g00 = 1, g01 = 0.95 > 0.9
        CHECK(c.heavy == std::vector<uint8_t>{1, 1});    // 1.9025 >= 1
        CHECK(c.close == std::vector<uint8_t>{1, 1});
        CHECK(c.activated == std::vector<uint8_t>{1, 1});
        for (int j = 0; j < 2; ++j)
            for (int h = 0; h < 2; ++h) {
                CHECK(c.e1_at(j, h));
                CHECK(c.e2_at(j, h));
            }
        CHECK(c.typeMask[0] == 0b101);  // bad + activated&heavy
        CHECK(c.typeMask[1] == 0b100);  // activated&heavy only
    }

    SUBCASE("light path: types 1|4 and 4") {
        SamplerParams p = tuned(2, {{"rho1", 3.0},
                                    {"bad_threshold", 0.5},
                                    {"close_threshold", 0.1},
                                    {"delta_heavy", 1.5},  // 1.9025 < 2.25
                                    {"levels", 2.0}});
        IndexClassification c = classify(s, V, lambda, stats, p);
        CHECK(c.heavy == std::vector<uint8_t>{0, 0});
        CHECK(c.typeMask[0] == 0b1001);  // bad + light&nearBad
        CHECK(c.typeMask[1] == 0b1000);
    }

    SUBCASE("activation levels are separate closed/strict events") {
        // t=1 fails E1 for index 1 (|0.40990| > 0.35) but t=2 passes
        SamplerParams p = tuned(2, {{"rho1", 3.0},
                                    {"bad_threshold", 0.35},
                                    {"close_threshold", 0.1},
                                    {"delta_heavy", 1.0},
                                    {"levels", 2.0}});
        IndexClassification c = classify(s, V, lambda, stats, p);
        CHECK(!c.e1_at(1, 0));
        CHECK(c.e1_at(1, 1));
        CHECK(c.activated == std::vector<uint8_t>{1, 1});

        SamplerParams one = p.with_overrides({{"levels", 1.0}});
        IndexClassification c1 = classify(s, V, lambda, stats, one);
        CHECK(c1.activated == std::vector<uint8_t>{1, 0});
        CHECK(c1.typeMask[1] == 0b10);  // type 2 only: not bad, not activated
    }

    SUBCASE("near-bad is a strict inequality on the gram entry") {
        SamplerParams p = tuned(2, {{"rho1", 3.0},
                                    {"bad_threshold", 0.5},
                                    {"close_threshold", 0.1},
                                    {"delta_heavy", 1.5},
                                    {"near_bad_dot", 0.95},  // g01 == 0.95 no longer counts
                                    {"levels", 2.0}});
        IndexClassification c = classify(s, V, lambda, stats, p);
        CHECK(c.nearBad == std::vector<uint8_t>{1, 0});
        CHECK(c.typeMask[1] == 0b10000);  // type 5: activated & not nearBad
        CHECK(c.typeMask[0] == 0b1001);
        for (int j = 0; j < 2; ++j) CHECK(c.typeMask[j] != 0);
    }

    SUBCASE("close threshold is a closed inequality") {
        SamplerParams p = tuned(2, {{"rho1", 3.0},
                                    {"bad_threshold", 0.5},
                                    {"close_threshold", 0.05},  // == |<X, v_0>|
                                    {"delta_heavy", 1.0},
                                    {"levels", 2.0}});
        IndexClassification c = classify(s, V, lambda, stats, p);
        CHECK(c.close[0] == 1);
        CHECK(c.close[1] == 1);  // 0.0475 < 0.05
    }

    SUBCASE("dimension mismatches throw") {
        PointSample shortX = s;
        shortX.X.pop_back();
        SamplerParams p = tuned(2, {});
        CHECK_THROWS_AS(classify(shortX, V, lambda, stats, p), std::invalid_argument);
        CHECK_THROWS_AS(classify(s, V, {0.0}, stats, p), std::invalid_argument);
    }
}

TEST_CASE("classify works identically without the cached gram") {
    Matrix V = pair_rows();
    std::vector<double> lambda{0.0, 0.0};
    GramStats with = gram_stats(V);
    GramStats without = gram_stats(V, 1);
    REQUIRE(!without.gram.has_value());
    SamplerParams p = tuned(2, {{"rho1", 3.0}, {"bad_threshold", 0.5}, {"levels", 2.0}});

    PointSample s;
    s.X0 = {0.3, 0.4};
    s.X = {0.05, 0.0};
    s.badSet = {0};
    IndexClassification a = classify(s, V, lambda, with, p);
    IndexClassification b = classify(s, V, lambda, without, p);
    CHECK(a.typeMask == b.typeMask);
    CHECK(a.nearBad == b.nearBad);
    CHECK(a.T == b.T);
}

TEST_CASE("round_mu_p hits the endpoints deterministically and stays unbiased") {
    RngStream rng(42, 0);
    std::vector<double> p{1.0, -1.0, 0.0};
    double sum = 0.0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        std::vector<int8_t> y = round_mu_p(p, rng);
        CHECK(y[0] == 1);
        CHECK(y[1] == -1);
        sum += y[2];
    }
    // mean of y[2] is 0 with sd 1/sqrt(trials) ~ 0.0158
    CHECK(std::fabs(sum / trials) < 5.0 / std::sqrt(static_cast<double>(trials)));

    CHECK_THROWS_AS(round_mu_p({1.0000001}, rng), std::invalid_argument);
    CHECK_THROWS_AS(round_mu_p({std::nan("")}, rng), std::invalid_argument);
}

TEST_CASE("moment identity: Var[<X0,v_i>] = rho0^2 S_i / 3, E[<X,v_i>] = 0") {
    Matrix V = pair_rows();
    std::vector<double> lambda{0.1, -0.2};
    SamplerParams params =
        tuned(2, {{"rho0", 0.8}, {"rho1", 0.25}, {"bad_threshold", 0.6}});
    auto rows = sampler_moment_check(V, lambda, params, 20000, 77);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.analyticVariance == doctest::Approx(0.64 * 1.9025 / 3.0));
        CHECK(r.varianceSe > 0.0);
        CHECK(std::fabs(r.sampleVariance - r.analyticVariance) < 5.0 * r.varianceSe);
        CHECK(std::fabs(r.meanX) < 5.0 * r.meanXSe);
    }

    auto again = sampler_moment_check(V, lambda, params, 20000, 77, 3);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].sampleVariance == again[i].sampleVariance);  // block-merged: exact
        CHECK(rows[i].meanX == again[i].meanX);
    }

    CHECK_THROWS_AS(sampler_moment_check(V, lambda, params, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sampler_moment_check(V, {0.0}, params, 10, 1), std::invalid_argument);
}

TEST_CASE("close_type_breakdown invariants and row inventory") {
    Matrix V = pair_rows();
    std::vector<double> lambda{0.0, 0.0};
    SamplerParams params = tuned(2, {{"rho1", 3.0},
                                     {"bad_threshold", 0.5},
                                     {"close_threshold", 0.1},
                                     {"delta_heavy", 1.0},
                                     {"levels", 2.0}});
    BreakdownOptions opts;
    opts.trials = 3000;
    opts.seed = 5;
    BreakdownReport rep = close_type_breakdown(V, lambda, params, opts);

    CHECK(rep.trials == 3000);
    CHECK(rep.typeGaps == 0);
    CHECK(rep.badNotNearBad == 0);
    uint64_t typeSum = 0;
    for (uint64_t c : rep.closeByType) typeSum += c;
    CHECK(typeSum >= rep.closeTotal);  // every close index carries >= 1 type

    // both rows are gram-close (|g01| = 0.95 > 0.9), so no pair rows appear:
    // 2 bad + 2*2 e1 + 1 xinf + 2 closeAct + 2 badClose + 0 pairs + 6 close-count
    REQUIRE(rep.rows.size() == 17);
    for (const auto& row : rep.rows) {
        if (row.quantity.rfind("prob_", 0) == 0) {
            CHECK(row.estimate >= row.ciLow);
            CHECK(row.estimate <= row.ciHigh);
            CHECK(row.ciLow >= 0.0);
            CHECK(row.ciHigh <= 1.0);
        }
        CHECK(row.verdict != Verdict::Fail);
        if (row.quantity.rfind("exp_close_count", 0) == 0)
            CHECK(row.verdict == Verdict::Vacuous);  // overridden params: no bound
    }

    BreakdownReport again = close_type_breakdown(V, lambda, params, opts);
    REQUIRE(again.rows.size() == rep.rows.size());
    for (size_t i = 0; i < rep.rows.size(); ++i)
        CHECK(again.rows[i].estimate == rep.rows[i].estimate);

    BreakdownOptions par = opts;
    par.workers = 4;
    BreakdownReport parRep = close_type_breakdown(V, lambda, params, par);
    for (size_t i = 0; i < rep.rows.size(); ++i)
        CHECK(parRep.rows[i].estimate == rep.rows[i].estimate);
    CHECK(parRep.closeTotal == rep.closeTotal);

    BreakdownOptions bad = opts;
    bad.trials = 0;
    CHECK_THROWS_AS(close_type_breakdown(V, lambda, params, bad), std::invalid_argument);
    CHECK_THROWS_AS(close_type_breakdown(V, {0.0}, params, opts), std::invalid_argument);
}

TEST_CASE("close_type_breakdown emits pair rows for gram-separated rows") {
    Matrix V = from_rows({{1.0, 0.0}, {0.95, std::sqrt(0.0975)}, {0.0, 1.0}});
    std::vector<double> lambda{0.0, 0.0, 0.0};
    SamplerParams params = tuned(2, {{"bad_threshold", 1.0}, {"levels", 2.0}});
    BreakdownOptions opts;
    opts.trials = 500;
    opts.seed = 3;
    BreakdownReport rep = close_type_breakdown(V, lambda, params, opts);
    int pairRows = 0;
    for (const auto& row : rep.rows)
        if (row.quantity.rfind("prob_bad_and_e1", 0) == 0) ++pairRows;
    // pairs with |g| <= 0.9: (0,2), (1,2), (2,0), (2,1); two report levels each
    CHECK(pairRows == 8);
    CHECK(rep.typeGaps == 0);
    CHECK(rep.badNotNearBad == 0);
}

TEST_CASE("end-to-end witness: single float hyperplane leaves plenty of edges") {
    FloatCollection fc = make_float(
        5, {FloatHyperplane{{0.3, 0.4, 0.5, 0.7, 0.2}, 0.05}});
    WitnessConfig cfg;
    cfg.seed = 1;
    cfg.budget = 200;
    cfg.samplerFormulasAnyM = true;  // m = 5
    WitnessResult r = end_to_end_witness(AnyCollection{fc}, cfg);

    REQUIRE(r.status == WitnessResult::Status::Found);
    CHECK(r.attempts >= 1);
    CHECK(r.m == 5);
    CHECK(r.w.empty());  // paper constants remove nothing at this scale
    CHECK(r.decomposition.N2.empty());
    CHECK(r.edge.flip < 5);
    CHECK((r.edge.base >> r.edge.flip & 1u) == 0);
    CHECK(r.edge.base < (1u << 5));
    uint64_t rejected = r.tally.wSearch + r.tally.xConstruction + r.tally.xInfNorm +
                        r.tally.roundingDistance + r.tally.finalExact;
    CHECK(rejected == r.attempts - 1);

    // the witness is genuinely unsliced in the original collection
    ExactCollection exact = to_exact(fc);
    for (const auto& h : exact.hyperplanes)
        CHECK(slices_edge(h, r.edge, 5).kind == SliceOutcome::Kind::NotSliced);
}

TEST_CASE("end-to-end witness: fully covered cube exhausts the budget") {
    ExactCollection c;
    c.n = 4;
    for (int i = 0; i < 4; ++i) {
        ExactHyperplane h;
        h.a.assign(4, Rational(1));
        h.b = Rational(-3 + 2 * i);
        c.hyperplanes.push_back(std::move(h));
    }
    WitnessConfig cfg;
    cfg.seed = 3;
    cfg.budget = 64;
    cfg.samplerFormulasAnyM = true;
    WitnessResult r = end_to_end_witness(AnyCollection{c}, cfg);

    CHECK(r.status == WitnessResult::Status::Exhausted);
    CHECK(r.attempts == 64);
    CHECK(r.wigglePerturbed == 15);  // all-ones rows leave one coefficient fixed
    CHECK(r.m == 4);
    uint64_t rejected = r.tally.wSearch + r.tally.xConstruction + r.tally.xInfNorm +
                        r.tally.roundingDistance + r.tally.finalExact;
    CHECK(rejected == 64);
    CHECK(r.degenerateOnWitness == 0);
}

TEST_CASE("end-to-end witness: empty collection returns a canonical edge immediately") {
    FloatCollection fc = make_float(8, {});
    WitnessConfig cfg;
    cfg.seed = 9;
    WitnessResult a = end_to_end_witness(AnyCollection{fc}, cfg);
    WitnessResult b = end_to_end_witness(AnyCollection{fc}, cfg);
    CHECK(a.status == WitnessResult::Status::Found);
    CHECK(a.edge.flip < 8);
    CHECK((a.edge.base >> a.edge.flip & 1u) == 0);
    CHECK(a.edge.base < (1u << 8));
    CHECK(b.edge.base == a.edge.base);
    CHECK(b.edge.flip == a.edge.flip);
}

TEST_CASE("end-to-end witness: K2 sign search rejects exactly the aligned w") {
    // one row dominated by column 0 (spike 1000, background 1e-5) with S = 1,
    // W = 1 forces that column into N2 and the row into K2; b = 1000 makes
    // b' equal the rescaled spike, so w = +1 fails the 2 sqrt(n) margin and
    // w = -1 clears it by ~2 * 3.8e7
    std::vector<double> a(8, 1e-5);
    a[0] = 1000.0;
    FloatCollection fc = make_float(8, {FloatHyperplane{a, 1000.0}});
    WitnessConfig cfg;
    cfg.seed = 2;
    cfg.budget = 256;
    cfg.samplerFormulasAnyM = true;  // m = 7
    cfg.constants = DecompConstants::with_overrides(1, 8, 1, 1.0, {});
    WitnessResult r = end_to_end_witness(AnyCollection{fc}, cfg);

    REQUIRE(r.status == WitnessResult::Status::Found);
    CHECK(r.m == 7);
    CHECK(r.decomposition.N2 == std::vector<int>{0});
    CHECK(r.decomposition.K2 == std::vector<int>{0});
    REQUIRE(r.w.size() == 1);
    CHECK(r.w[0] == -1);
    CHECK(r.tally.wSearch == r.attempts - 1);
    CHECK(r.tally.finalExact == 0);

    ExactCollection exact = to_exact(fc);
    CHECK(slices_edge(exact.hyperplanes[0], r.edge, 8).kind == SliceOutcome::Kind::NotSliced);
}

TEST_CASE("end-to-end witness: reruns and worker counts do not change the result") {
    FloatCollection fc = make_float(
        6, {FloatHyperplane{{0.31, -0.47, 0.11, 0.52, -0.29, 0.4}, 0.03},
            FloatHyperplane{{-0.22, 0.38, 0.45, -0.17, 0.33, -0.41}, -0.11}});
    WitnessConfig cfg;
    cfg.seed = 11;
    cfg.budget = 512;
    cfg.samplerFormulasAnyM = true;
    WitnessResult one = end_to_end_witness(AnyCollection{fc}, cfg);
    WitnessResult rerun = end_to_end_witness(AnyCollection{fc}, cfg);
    WitnessConfig par = cfg;
    par.workers = 4;
    WitnessResult four = end_to_end_witness(AnyCollection{fc}, par);

    for (const WitnessResult* r : {&rerun, &four}) {
        CHECK(r->status == one.status);
        CHECK(r->edge.base == one.edge.base);
        CHECK(r->edge.flip == one.edge.flip);
        CHECK(r->attempts == one.attempts);
        CHECK(r->w == one.w);
        CHECK(r->tally.wSearch == one.tally.wSearch);
        CHECK(r->tally.xInfNorm == one.tally.xInfNorm);
        CHECK(r->tally.roundingDistance == one.tally.roundingDistance);
        CHECK(r->tally.finalExact == one.tally.finalExact);
    }
}

TEST_CASE("end-to-end witness guards") {
    std::vector<double> row(32, 1.0);
    FloatCollection big = make_float(32, {FloatHyperplane{row, 0.0}});
    WitnessConfig cfg;
    cfg.samplerFormulasAnyM = true;
    CHECK_THROWS_AS(end_to_end_witness(AnyCollection{big}, cfg), CapExceeded);

    // the m >= 16 floor stays on unless explicitly disabled
    FloatCollection small = make_float(8, {FloatHyperplane{{1, 1, 1, 1, 1, 1, 1, 1}, 0.1}});
    WitnessConfig floor;
    floor.budget = 4;
    CHECK_THROWS_AS(end_to_end_witness(AnyCollection{small}, floor), std::invalid_argument);
}
