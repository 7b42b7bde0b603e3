#include "hslice/witness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hslice/parallel.hpp"
#include "hslice/wiggle.hpp"

namespace hslice {

namespace {

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, args...);
    return std::string(buf);
}

}  // namespace

GramStats gram_stats(const Matrix& V, int gramCap) {
    int k = V.rows, m = V.cols;
    GramStats g;
    g.S.assign(k, 0.0);
    g.rowNorms.assign(k, 0.0);
    for (int i = 0; i < k; ++i) g.rowNorms[i] = std::sqrt(dot(V.row(i), V.row(i), m));
    bool keep = k <= gramCap;
    if (keep) g.gram = Matrix(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            double gij = dot(V.row(i), V.row(j), m);
            g.S[i] += gij * gij;
            if (keep) g.gram->at(i, j) = gij;
        }
    }
    return g;
}

SamplerParams SamplerParams::formulas_at(int m) {
    if (m < 2) throw std::invalid_argument("sampler needs m >= 2");
    SamplerParams p;
    p.m = m;
    double lm = std::log(static_cast<double>(m));
    p.rho0 = std::pow(static_cast<double>(m), 3.0 / 19.0) * std::pow(lm, -3.0 / 19.0);
    p.rho1 = std::pow(static_cast<double>(m), 1.0 / 19.0) * std::pow(lm, -1.0 / 19.0);
    p.deltaHeavy = std::pow(static_cast<double>(m), 1.0 / 38.0) * std::pow(lm, 9.0 / 19.0);
    p.badThreshold = 10.0 * std::sqrt(lm);
    p.closeThreshold = 5.0 * std::sqrt(lm);
    p.nearBadDot = 0.9;
    p.activationLevels = static_cast<int>(std::ceil(std::log2(static_cast<double>(m)))) + 1;
    p.paperDefaults = false;
    return p;
}

SamplerParams SamplerParams::paper(int m) {
    if (m < 16) throw std::invalid_argument("default sampler parameters need m >= 16");
    SamplerParams p = formulas_at(m);
    p.paperDefaults = true;
    return p;
}

SamplerParams SamplerParams::with_overrides(const std::map<std::string, double>& kv) const {
    SamplerParams p = *this;
    for (const auto& [key, val] : kv) {
        if (key == "rho0")
            p.rho0 = val;
        else if (key == "rho1")
            p.rho1 = val;
        else if (key == "delta_heavy")
            p.deltaHeavy = val;
        else if (key == "bad_threshold")
            p.badThreshold = val;
        else if (key == "close_threshold")
            p.closeThreshold = val;
        else if (key == "near_bad_dot")
            p.nearBadDot = val;
        else if (key == "levels")
            p.activationLevels = static_cast<int>(val);
        else
            throw std::invalid_argument("unknown sampler override: " + key);
        p.paperDefaults = false;
    }
    if (!(p.rho0 > 0) || !(p.rho1 > 0) || !(p.deltaHeavy > 0) || !(p.badThreshold > 0) ||
        !(p.closeThreshold > 0) || !(p.nearBadDot >= 0) || p.activationLevels < 1)
        throw std::invalid_argument("sampler parameter out of range");
    return p;
}

PointSample sample_point(const Matrix& V, const std::vector<double>& lambda,
                         const SamplerParams& params, RngStream& rng) {
    int k = V.rows, m = V.cols;
    if (static_cast<int>(lambda.size()) != k)
        throw std::invalid_argument("lambda size must match the row count");
    PointSample s;
    s.alpha.resize(k);
    for (int i = 0; i < k; ++i) s.alpha[i] = rng.uniform_pm1();
    s.X0.assign(m, 0.0);
    for (int i = 0; i < k; ++i) {
        const double* v = V.row(i);
        double c = params.rho0 * s.alpha[i];
        for (int j = 0; j < m; ++j) s.X0[j] += c * v[j];
    }
    for (int i = 0; i < k; ++i) {
        double d = dot(s.X0.data(), V.row(i), m);
        if (std::fabs(d - lambda[i]) <= params.badThreshold) s.badSet.push_back(i);
    }
    s.beta.resize(s.badSet.size());
    s.X1.assign(m, 0.0);
    for (size_t bi = 0; bi < s.badSet.size(); ++bi) {
        s.beta[bi] = rng.uniform_pm1();
        const double* v = V.row(s.badSet[bi]);
        double c = params.rho1 * s.beta[bi];
        for (int j = 0; j < m; ++j) s.X1[j] += c * v[j];
    }
    s.X.resize(m);
    for (int j = 0; j < m; ++j) s.X[j] = s.X0[j] + s.X1[j];
    return s;
}

IndexClassification classify(const PointSample& sample, const Matrix& V,
                             const std::vector<double>& lambda, const GramStats& stats,
                             const SamplerParams& params) {
    int k = V.rows, m = V.cols;
    if (static_cast<int>(sample.X.size()) != m || static_cast<int>(sample.X0.size()) != m)
        throw std::invalid_argument("sample dimension mismatch");
    if (static_cast<int>(lambda.size()) != k || static_cast<int>(stats.S.size()) != k)
        throw std::invalid_argument("lambda / gram stats size mismatch");

    IndexClassification c;
    int L = params.activationLevels;
    c.levels = L;
    c.bad.assign(k, 0);
    for (int i : sample.badSet) c.bad.at(i) = 1;
    c.close.assign(k, 0);
    c.nearBad.assign(k, 0);
    c.heavy.assign(k, 0);
    c.activated.assign(k, 0);
    c.dotX0.resize(k);
    c.dotX.resize(k);
    c.T.assign(k, 0.0);
    c.e1.assign(static_cast<size_t>(k) * L, 0);
    c.e2.assign(static_cast<size_t>(k) * L, 0);
    c.typeMask.assign(k, 0);

    for (int j = 0; j < k; ++j) {
        c.dotX0[j] = dot(sample.X0.data(), V.row(j), m);
        c.dotX[j] = dot(sample.X.data(), V.row(j), m);
    }

    for (int j = 0; j < k; ++j) {
        bool nb = false;
        double acc = 0.0;
        for (int i : sample.badSet) {
            double g = stats.gram ? stats.gram->at(i, j) : dot(V.row(i), V.row(j), m);
            if (std::fabs(g) > params.nearBadDot) nb = true;
            acc += g * g;
        }
        c.nearBad[j] = nb ? 1 : 0;
        c.T[j] = params.rho1 * params.rho1 / 3.0 * acc;
        c.heavy[j] = stats.S[j] >= params.deltaHeavy * params.deltaHeavy ? 1 : 0;
        c.close[j] = std::fabs(c.dotX[j] - lambda[j]) <= params.closeThreshold ? 1 : 0;
        bool act = false;
        for (int h = 0; h < L; ++h) {
            double t = std::ldexp(1.0, h);
            bool e1 = std::fabs(c.dotX0[j] - lambda[j]) <= t * params.badThreshold;
            bool e2 = c.T[j] > t * t / 4.0;
            c.e1[static_cast<size_t>(j) * L + h] = e1 ? 1 : 0;
            c.e2[static_cast<size_t>(j) * L + h] = e2 ? 1 : 0;
            if (e1 && e2) act = true;
        }
        c.activated[j] = act ? 1 : 0;

        uint8_t mask = 0;
        bool bad = c.bad[j], heavy = c.heavy[j], near = c.nearBad[j];
        if (bad) mask |= 1u << 0;
        if (!bad && !act) mask |= 1u << 1;
        if (act && heavy) mask |= 1u << 2;
        if (!heavy && near) mask |= 1u << 3;
        if (act && !near) mask |= 1u << 4;
        c.typeMask[j] = mask;
    }
    return c;
}

std::vector<int8_t> round_mu_p(const std::vector<double>& p, RngStream& rng) {
    std::vector<int8_t> y(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        if (!(std::fabs(p[i]) <= 1.0))
            throw std::invalid_argument("round_mu_p needs ||p||_inf <= 1");
        y[i] = rng.uniform01() < 0.5 * (1.0 + p[i]) ? int8_t{1} : int8_t{-1};
    }
    return y;
}

namespace {

struct SuccessRec {
    EdgeId edge;
    std::vector<int8_t> w;
    uint64_t degenerate = 0;
};

}  // namespace

WitnessResult end_to_end_witness(const AnyCollection& collection, const WitnessConfig& config) {
    validate_collection(collection);
    const int n = dim_of(collection);
    const int k = static_cast<int>(size_of(collection));
    if (n > 31) throw CapExceeded("dimension " + std::to_string(n) + " exceeds the 31-bit vertex mask");

    WitnessResult res;

    if (k == 0) {
        // no hyperplanes: any edge is a witness
        RngStream rng(config.seed, 0);
        int flip = static_cast<int>(rng.bounded(static_cast<uint64_t>(n)));
        uint32_t base =
            static_cast<uint32_t>(rng.bounded(uint64_t{1} << n)) & ~(1u << flip);
        res.status = WitnessResult::Status::Found;
        res.edge = EdgeId{base, static_cast<uint8_t>(flip)};
        return res;
    }

    // the final recheck always runs against the input as given
    ExactCollection original = exact_view(collection);

    FloatCollection fc;
    if (mode_of(collection) == NumericMode::Exact && config.wiggleEnabled) {
        WiggleOptions wopts;
        wopts.magnitude = config.wiggleMagnitude;
        wopts.cap = config.cap;
        WiggleResult wr = wiggle(std::get<ExactCollection>(collection), wopts);
        res.wigglePerturbed = wr.perturbedCoefficients;
        res.wiggleResolvedDegenerate = wr.resolvedDegenerate;
        fc = to_float(wr.collection);
    } else if (mode_of(collection) == NumericMode::Exact) {
        fc = to_float(std::get<ExactCollection>(collection));
    } else {
        fc = std::get<FloatCollection>(collection);
    }

    Matrix A(k, n);
    std::vector<double> b(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) A.at(i, j) = fc.hyperplanes[i].a[j];
        b[i] = fc.hyperplanes[i].b;
    }

    DecompConstants constants = config.constants ? *config.constants : DecompConstants::paper(k, n);
    res.decomposition = decompose(A, constants);
    const DecompositionResult& dec = res.decomposition;
    const Matrix& ap = dec.rescaled;

    std::vector<double> bPrime(k);
    for (int i = 0; i < k; ++i) bPrime[i] = dec.rowScale[i] * b[i];

    const std::vector<int>& N1 = dec.N1;
    const std::vector<int>& N2 = dec.N2;
    const int m = static_cast<int>(N1.size());
    const int q = static_cast<int>(N2.size());
    res.m = m;

    SamplerParams params = (config.samplerFormulasAnyM ? SamplerParams::formulas_at(m)
                                                       : SamplerParams::paper(m))
                               .with_overrides(config.samplerOverrides);
    res.params = params;

    Matrix V(k, m);
    Matrix A2(k, q);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) V.at(i, j) = ap.at(i, N1[j]);
        for (int j = 0; j < q; ++j) A2.at(i, j) = ap.at(i, N2[j]);
    }

    const double wMargin = 2.0 * std::sqrt(static_cast<double>(n));

    // outcome codes per attempt: 0 skipped, 1..5 rejection stage, 6 success
    auto runAttempt = [&](uint64_t t, SuccessRec& rec) -> uint8_t {
        RngStream rng(config.seed, t + 1);

        std::vector<int8_t> w(q);
        for (int j = 0; j < q; ++j) w[j] = static_cast<int8_t>(rng.sign());
        for (int i : dec.K2) {
            double acc = -bPrime[i];
            const double* a2 = A2.row(i);
            for (int j = 0; j < q; ++j) acc += a2[j] * w[j];
            if (!(std::fabs(acc) > wMargin)) return 1;
        }

        std::vector<double> lambda(k);
        for (int i = 0; i < k; ++i) {
            double acc = 0.0;
            const double* a2 = A2.row(i);
            for (int j = 0; j < q; ++j) acc += a2[j] * w[j];
            lambda[i] = bPrime[i] - acc;
        }

        PointSample s = sample_point(V, lambda, params, rng);
        for (double x : s.X)
            if (!std::isfinite(x)) return 2;

        double xinf = 0.0;
        for (double x : s.X) xinf = std::max(xinf, std::fabs(x));
        if (xinf > 0.5) return 3;

        std::vector<int8_t> y = round_mu_p(s.X, rng);
        int h = N1[static_cast<int>(rng.bounded(static_cast<uint64_t>(m)))];

        uint32_t bits = 0;
        for (int j = 0; j < m; ++j)
            if (y[j] > 0) bits |= 1u << N1[j];
        for (int j = 0; j < q; ++j)
            if (w[j] > 0) bits |= 1u << N2[j];

        for (int i = 0; i < k; ++i) {
            double val = -bPrime[i];
            const double* row = ap.row(i);
            for (int j = 0; j < n; ++j) val += (bits >> j & 1u) ? row[j] : -row[j];
            if (!(std::fabs(val) >= 2.0 * std::fabs(row[h]))) return 4;
        }

        EdgeId e{bits & ~(1u << h), static_cast<uint8_t>(h)};
        uint64_t degen = 0;
        for (const auto& hp : original.hyperplanes) {
            SliceOutcome out = slices_edge(hp, e, n);
            if (out.kind == SliceOutcome::Kind::Sliced) return 5;
            if (out.kind == SliceOutcome::Kind::Degenerate) ++degen;
        }
        rec = SuccessRec{e, std::move(w), degen};
        return 6;
    };

    const uint64_t budget = config.budget;
    std::vector<uint8_t> codes(budget, 0);
    std::atomic<uint64_t> nextBlock{0};
    std::atomic<uint64_t> best{std::numeric_limits<uint64_t>::max()};
    std::mutex recMu;
    std::map<uint64_t, SuccessRec> recs;

    const uint64_t kBlock = 64;
    const uint64_t nblocks = (budget + kBlock - 1) / kBlock;

    auto workerFn = [&] {
        for (;;) {
            uint64_t blk = nextBlock.fetch_add(1);
            if (blk >= nblocks) return;
            uint64_t lo = blk * kBlock, hi = std::min(budget, lo + kBlock);
            if (lo > best.load(std::memory_order_relaxed)) continue;
            for (uint64_t t = lo; t < hi; ++t) {
                if (t > best.load(std::memory_order_relaxed)) break;
                SuccessRec rec;
                uint8_t code = runAttempt(t, rec);
                codes[t] = code;
                if (code == 6) {
                    {
                        std::lock_guard<std::mutex> lk(recMu);
                        recs.emplace(t, std::move(rec));
                    }
                    uint64_t cur = best.load();
                    while (t < cur && !best.compare_exchange_weak(cur, t)) {
                    }
                }
            }
        }
    };

    int pool = resolve_workers(config.workers);
    if (pool <= 1 || nblocks <= 1) {
        workerFn();
    } else {
        std::vector<std::thread> threads;
        size_t nthreads = std::min<uint64_t>(pool, nblocks);
        threads.reserve(nthreads);
        for (size_t i = 0; i < nthreads; ++i) threads.emplace_back(workerFn);
        for (auto& th : threads) th.join();
    }

    // the reported witness is the smallest succeeding attempt index, and the
    // tallies cover exactly the attempts before it, so any worker count (or a
    // rerun) reproduces the same result
    uint64_t successIdx = std::numeric_limits<uint64_t>::max();
    for (uint64_t t = 0; t < budget; ++t) {
        if (codes[t] == 6) {
            successIdx = t;
            break;
        }
    }
    uint64_t end = successIdx == std::numeric_limits<uint64_t>::max() ? budget : successIdx;
    for (uint64_t t = 0; t < end; ++t) {
        switch (codes[t]) {
            case 1: ++res.tally.wSearch; break;
            case 2: ++res.tally.xConstruction; break;
            case 3: ++res.tally.xInfNorm; break;
            case 4: ++res.tally.roundingDistance; break;
            case 5: ++res.tally.finalExact; break;
            default: break;
        }
    }

    if (successIdx != std::numeric_limits<uint64_t>::max()) {
        SuccessRec& rec = recs.at(successIdx);
        res.status = WitnessResult::Status::Found;
        res.edge = rec.edge;
        res.w = std::move(rec.w);
        res.degenerateOnWitness = rec.degenerate;
        res.attempts = successIdx + 1;
    } else {
        res.status = WitnessResult::Status::Exhausted;
        res.attempts = budget;
    }
    return res;
}

BreakdownReport close_type_breakdown(const Matrix& V, const std::vector<double>& lambda,
                                     const SamplerParams& params, const BreakdownOptions& opts) {
    const int k = V.rows, mV = V.cols;
    if (static_cast<int>(lambda.size()) != k)
        throw std::invalid_argument("lambda size must match the row count");
    if (opts.trials == 0) throw std::invalid_argument("breakdown needs trials >= 1");

    GramStats stats = gram_stats(V);
    const int L = params.activationLevels;

    const int nIdx = std::min(k, opts.maxIndexRows);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < k && static_cast<int>(pairs.size()) < opts.maxPairRows; ++i)
        for (int j = 0; j < k && static_cast<int>(pairs.size()) < opts.maxPairRows; ++j) {
            if (i == j) continue;
            double g = stats.gram ? stats.gram->at(i, j) : dot(V.row(i), V.row(j), mV);
            if (std::fabs(g) <= params.nearBadDot) pairs.emplace_back(i, j);
        }
    std::vector<int> lvls;
    for (int h : opts.reportLevels)
        if (h >= 0 && h < L) lvls.push_back(h);

    struct Counters {
        std::vector<uint64_t> bad, e1, closeAct, badClose, badE1;
        uint64_t xInf = 0, typeGaps = 0, badNotNearBad = 0, closeTotal = 0;
        std::array<uint64_t, 5> closeByType{};
        PowerSums closeCount;
        std::array<PowerSums, 5> closeTypeCount;
    };

    auto blocks = map_blocks<Counters>(
        opts.trials, 1024, opts.workers, [&](uint64_t lo, uint64_t hi, uint64_t) {
            Counters c;
            c.bad.assign(k, 0);
            c.e1.assign(static_cast<size_t>(k) * L, 0);
            c.closeAct.assign(k, 0);
            c.badClose.assign(k, 0);
            c.badE1.assign(pairs.size() * L, 0);
            for (uint64_t t = lo; t < hi; ++t) {
                RngStream rng(opts.seed, t);
                PointSample s = sample_point(V, lambda, params, rng);
                IndexClassification cls = classify(s, V, lambda, stats, params);
                double xinf = 0.0;
                for (double x : s.X) xinf = std::max(xinf, std::fabs(x));
                if (xinf > 0.5) ++c.xInf;
                uint64_t closeCnt = 0;
                std::array<uint64_t, 5> typeCnt{};
                for (int j = 0; j < k; ++j) {
                    if (cls.bad[j]) {
                        ++c.bad[j];
                        if (!cls.nearBad[j]) ++c.badNotNearBad;
                        if (cls.close[j]) ++c.badClose[j];
                    }
                    if (!cls.typeMask[j]) ++c.typeGaps;
                    if (cls.close[j]) {
                        ++closeCnt;
                        if (cls.activated[j]) ++c.closeAct[j];
                        for (int r = 0; r < 5; ++r)
                            if (cls.typeMask[j] >> r & 1u) ++typeCnt[r];
                    }
                    for (int h = 0; h < L; ++h)
                        if (cls.e1_at(j, h)) ++c.e1[static_cast<size_t>(j) * L + h];
                }
                for (size_t pi = 0; pi < pairs.size(); ++pi) {
                    auto [bi, cj] = pairs[pi];
                    if (!cls.bad[bi]) continue;
                    for (int h = 0; h < L; ++h)
                        if (cls.e1_at(cj, h)) ++c.badE1[pi * L + h];
                }
                c.closeTotal += closeCnt;
                c.closeCount.add(static_cast<double>(closeCnt));
                for (int r = 0; r < 5; ++r) {
                    c.closeByType[r] += typeCnt[r];
                    c.closeTypeCount[r].add(static_cast<double>(typeCnt[r]));
                }
            }
            return c;
        });

    Counters tot;
    tot.bad.assign(k, 0);
    tot.e1.assign(static_cast<size_t>(k) * L, 0);
    tot.closeAct.assign(k, 0);
    tot.badClose.assign(k, 0);
    tot.badE1.assign(pairs.size() * L, 0);
    for (const Counters& c : blocks) {
        for (int j = 0; j < k; ++j) {
            tot.bad[j] += c.bad[j];
            tot.closeAct[j] += c.closeAct[j];
            tot.badClose[j] += c.badClose[j];
        }
        for (size_t x = 0; x < tot.e1.size(); ++x) tot.e1[x] += c.e1[x];
        for (size_t x = 0; x < tot.badE1.size(); ++x) tot.badE1[x] += c.badE1[x];
        tot.xInf += c.xInf;
        tot.typeGaps += c.typeGaps;
        tot.badNotNearBad += c.badNotNearBad;
        tot.closeTotal += c.closeTotal;
        tot.closeCount.merge(c.closeCount);
        for (int r = 0; r < 5; ++r) {
            tot.closeByType[r] += c.closeByType[r];
            tot.closeTypeCount[r].merge(c.closeTypeCount[r]);
        }
    }

    BreakdownReport rep;
    rep.trials = opts.trials;
    rep.typeGaps = tot.typeGaps;
    rep.badNotNearBad = tot.badNotNearBad;
    rep.closeByType = tot.closeByType;
    rep.closeTotal = tot.closeTotal;

    const uint64_t T = opts.trials;
    const double inf = std::numeric_limits<double>::infinity();
    const double lm = std::log(static_cast<double>(mV));
    const double z = normal_two_sided_z(0.99);
    const double bt = params.badThreshold, ct = params.closeThreshold;
    const double r0 = params.rho0, r1 = params.rho1;

    auto probRow = [&](std::string q, uint64_t cnt, double bound) {
        BinomialCi ci = clopper_pearson(cnt, T, 0.99);
        rep.rows.push_back(make_report(std::move(q), static_cast<double>(cnt) / T, ci.lo, ci.hi,
                                       T, bound));
    };
    auto expRow = [&](std::string q, const PowerSums& ps, double bound) {
        double mean = ps.mean(), se = ps.mean_se();
        rep.rows.push_back(make_report(std::move(q), mean, mean - z * se, mean + z * se, T,
                                       bound, inf));
    };

    for (int j = 0; j < nIdx; ++j)
        probRow(fmt("prob_bad[i=%d]", j), tot.bad[j], 4.0 * bt / (r0 * std::sqrt(stats.S[j])));
    for (int j = 0; j < nIdx; ++j)
        for (int h : lvls) {
            double t = std::ldexp(1.0, h);
            probRow(fmt("prob_e1[j=%d,t=%.0f]", j, t), tot.e1[static_cast<size_t>(j) * L + h],
                    4.0 * t * bt / (r0 * std::sqrt(stats.S[j])));
        }
    // the 1/m^2 tail holds at the paper parameter scalings only
    probRow("prob_x_inf_gt_half", tot.xInf,
            params.paperDefaults ? 1.0 / (static_cast<double>(mV) * mV) : inf);
    for (int j = 0; j < nIdx; ++j) {
        double bound = params.paperDefaults
                           ? 1600.0 * lm * lm / (r0 * std::sqrt(stats.S[j]))
                           : 16.0 * bt * ct * L / (r0 * std::sqrt(stats.S[j]));
        probRow(fmt("prob_close_and_activated[j=%d]", j), tot.closeAct[j], bound);
    }
    for (int j = 0; j < nIdx; ++j)
        probRow(fmt("prob_bad_and_close[j=%d]", j), tot.badClose[j], 16.0 * bt * ct / (r0 * r1));
    for (size_t pi = 0; pi < pairs.size(); ++pi) {
        auto [bi, cj] = pairs[pi];
        for (int h : lvls) {
            double t = std::ldexp(1.0, h);
            probRow(fmt("prob_bad_and_e1[i=%d,j=%d,t=%.0f]", bi, cj, t), tot.badE1[pi * L + h],
                    400.0 * t * bt * bt / (r0 * r0 * std::sqrt(stats.S[cj])));
        }
    }
    double closeBound = params.paperDefaults ? std::sqrt(static_cast<double>(mV)) / 400.0 : inf;
    expRow("exp_close_count", tot.closeCount, closeBound);
    for (int r = 0; r < 5; ++r)
        expRow(fmt("exp_close_count_type%d", r + 1), tot.closeTypeCount[r], closeBound);

    return rep;
}

std::vector<MomentCheckRow> sampler_moment_check(const Matrix& V,
                                                 const std::vector<double>& lambda,
                                                 const SamplerParams& params, uint64_t trials,
                                                 uint64_t seed, int workers) {
    const int k = V.rows, m = V.cols;
    if (static_cast<int>(lambda.size()) != k)
        throw std::invalid_argument("lambda size must match the row count");
    if (trials == 0) throw std::invalid_argument("moment check needs trials >= 1");

    struct Acc {
        std::vector<PowerSums> p0, px;
    };
    auto blocks = map_blocks<Acc>(trials, 1024, workers, [&](uint64_t lo, uint64_t hi, uint64_t) {
        Acc a;
        a.p0.resize(k);
        a.px.resize(k);
        for (uint64_t t = lo; t < hi; ++t) {
            RngStream rng(seed, t);
            PointSample s = sample_point(V, lambda, params, rng);
            for (int i = 0; i < k; ++i) {
                a.p0[i].add(dot(s.X0.data(), V.row(i), m));
                a.px[i].add(dot(s.X.data(), V.row(i), m));
            }
        }
        return a;
    });

    Acc tot;
    tot.p0.resize(k);
    tot.px.resize(k);
    for (const Acc& a : blocks)
        for (int i = 0; i < k; ++i) {
            tot.p0[i].merge(a.p0[i]);
            tot.px[i].merge(a.px[i]);
        }

    GramStats stats = gram_stats(V);
    std::vector<MomentCheckRow> out(k);
    for (int i = 0; i < k; ++i) {
        out[i].index = i;
        out[i].sampleVariance = tot.p0[i].variance();
        out[i].varianceSe = tot.p0[i].variance_se();
        out[i].analyticVariance = params.rho0 * params.rho0 * stats.S[i] / 3.0;
        out[i].meanX = tot.px[i].mean();
        out[i].meanXSe = tot.px[i].mean_se();
    }
    return out;
}

}  // namespace hslice
