#include "hslice/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "hslice/cube.hpp"
#include "hslice/parallel.hpp"
#include "hslice/rng.hpp"
#include "hslice/stats.hpp"

namespace hslice {

namespace {

constexpr uint64_t kTrialBlock = 1024;

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, args...);
    return std::string(buf);
}

EstimateReport mc_probability_report(std::string quantity, uint64_t hits, uint64_t trials,
                                     double bound) {
    BinomialCi ci = clopper_pearson(hits, trials, 0.99);
    return make_report(std::move(quantity), static_cast<double>(hits) / trials, ci.lo, ci.hi,
                       trials, bound);
}

template <typename Fn>
uint64_t mc_count(uint64_t trials, int workers, Fn&& trialHit) {
    if (trials == 0) throw std::invalid_argument("Monte Carlo checks need trials >= 1");
    auto blocks = map_blocks<uint64_t>(trials, kTrialBlock, workers,
                                       [&](uint64_t lo, uint64_t hi, uint64_t) {
                                           uint64_t hits = 0;
                                           for (uint64_t t = lo; t < hi; ++t)
                                               if (trialHit(t)) ++hits;
                                           return hits;
                                       });
    uint64_t total = 0;
    for (uint64_t h : blocks) total += h;
    return total;
}

void validate_ranges(const std::vector<std::pair<double, double>>& ranges) {
    if (ranges.empty()) throw std::invalid_argument("at least one interval required");
    for (const auto& [lo, hi] : ranges) {
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("interval endpoints must be finite");
        if (!(lo < hi)) throw std::invalid_argument("intervals need lo < hi");
    }
}

}  // namespace

Rational exact_lo_probability(const std::vector<Rational>& w, const Rational& b,
                              const Rational& t, const std::vector<Rational>& bias) {
    const size_t len = w.size();
    if (len == 0 || len > 20)
        throw std::invalid_argument("exact LO probability limited to 1..20 coordinates");
    std::vector<Rational> p = bias.empty() ? std::vector<Rational>(len, Rational(0)) : bias;
    if (p.size() != len) throw std::invalid_argument("bias length mismatch");
    for (const Rational& pi : p)
        if (abs(pi) > 1) throw std::invalid_argument("||bias||_inf <= 1 required");

    std::map<Rational, Rational> dist{{Rational(0), Rational(1)}};
    for (size_t i = 0; i < len; ++i) {
        Rational up = (1 + p[i]) / 2;
        Rational down = (1 - p[i]) / 2;
        std::map<Rational, Rational> next;
        for (const auto& [s, q] : dist) {
            if (up != 0) next[s + w[i]] += q * up;
            if (down != 0) next[s - w[i]] += q * down;
        }
        dist.swap(next);
    }
    Rational acc(0);
    for (const auto& [s, q] : dist)
        if (abs(s - b) < t) acc += q;
    return acc;
}

EstimateReport check_lo_bound(const std::vector<double>& w, double b, double t,
                              const std::vector<double>& bias, const LoCheckOptions& opts) {
    const size_t len = w.size();
    if (len == 0) throw std::invalid_argument("empty weight vector");
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    std::vector<double> p = bias.empty() ? std::vector<double>(len, 0.0) : bias;
    if (p.size() != len) throw std::invalid_argument("bias length mismatch");
    for (double pi : p)
        if (!(std::fabs(pi) <= 0.5)) throw std::invalid_argument("||bias||_inf <= 1/2 required");

    uint64_t mt = 0;
    for (double wi : w)
        if (std::fabs(wi) >= t) ++mt;
    double bound = mt ? 10.0 / std::sqrt(static_cast<double>(mt))
                      : std::numeric_limits<double>::infinity();

    if (!opts.forceMonteCarlo && len <= static_cast<size_t>(opts.exactCap)) {
        std::vector<Rational> wr, pr;
        wr.reserve(len);
        pr.reserve(len);
        for (size_t i = 0; i < len; ++i) {
            wr.push_back(rational_from_double(w[i]));
            pr.push_back(rational_from_double(p[i]));
        }
        Rational v =
            exact_lo_probability(wr, rational_from_double(b), rational_from_double(t), pr);
        double est = v.get_d();
        return make_report(fmt("lo_probability_exact[len=%zu,mt=%llu]", len,
                               static_cast<unsigned long long>(mt)),
                           est, est, est, 0, bound);
    }

    uint64_t hits = mc_count(opts.trials, opts.workers, [&](uint64_t trial) {
        RngStream rng(opts.seed, trial);
        std::vector<int8_t> x = round_mu_p(p, rng);
        double acc = -b;
        for (size_t i = 0; i < len; ++i) acc += x[i] > 0 ? w[i] : -w[i];
        return std::fabs(acc) < t;
    });
    return mc_probability_report(fmt("lo_probability_mc[len=%zu,mt=%llu]", len,
                                     static_cast<unsigned long long>(mt)),
                                 hits, opts.trials, bound);
}

ManyScalesCheck check_many_scales(const std::vector<scales::Real>& w, scales::Real b,
                                  scales::Real delta, const McOptions& opts) {
    if (w.empty()) throw std::invalid_argument("empty weight vector");
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");

    ManyScalesCheck out;
    out.certificate = scales::greedy_scales(w, 10 * delta);
    int s = out.certificate.s();
    double bound = s >= 100 ? std::exp(-s / 100.0) : std::numeric_limits<double>::infinity();

    uint64_t hits = mc_count(opts.trials, opts.workers, [&](uint64_t trial) {
        RngStream rng(opts.seed, trial);
        scales::Real acc = -b;
        for (scales::Real wi : w) acc += rng.sign() > 0 ? wi : -wi;
        return fabsl(acc) <= delta;
    });
    out.report = mc_probability_report(fmt("many_scales_probability[s=%d]", s), hits,
                                       opts.trials, bound);
    return out;
}

double continuous_lo_probability(const std::vector<std::pair<double, double>>& ranges,
                                 double b, double t) {
    validate_ranges(ranges);
    const int d = static_cast<int>(ranges.size());
    if (d > 8) throw std::invalid_argument("exact continuous LO limited to 8 variables");
    if (!(t > 0)) throw std::invalid_argument("t must be positive");

    std::vector<double> c(d);
    double shift = 0.0, total = 0.0;
    for (int i = 0; i < d; ++i) {
        c[i] = ranges[i].second - ranges[i].first;
        shift += ranges[i].first;
        total += c[i];
    }
    double norm = 1.0;
    for (int i = 1; i <= d; ++i) norm *= i;
    for (int i = 0; i < d; ++i) norm *= c[i];

    // T = sum of U[0, c_i]; F_T(y) by inclusion-exclusion over corner shifts
    auto cdf = [&](double y) {
        if (y <= 0.0) return 0.0;
        if (y >= total) return 1.0;
        double acc = 0.0;
        for (uint32_t mask = 0; mask < (1u << d); ++mask) {
            double yj = y;
            int bits = 0;
            for (int i = 0; i < d; ++i)
                if (mask >> i & 1u) {
                    yj -= c[i];
                    ++bits;
                }
            if (yj <= 0.0) continue;
            double term = 1.0;
            for (int i = 0; i < d; ++i) term *= yj;
            acc += (bits % 2 ? -1.0 : 1.0) * term;
        }
        return acc / norm;
    };
    return std::clamp(cdf(b + t - shift) - cdf(b - t - shift), 0.0, 1.0);
}

EstimateReport check_continuous_lo(const std::vector<std::pair<double, double>>& ranges,
                                   double b, double t, const ContinuousLoOptions& opts) {
    validate_ranges(ranges);
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    const int d = static_cast<int>(ranges.size());

    double varX = 0.0;
    for (const auto& [lo, hi] : ranges) varX += (hi - lo) * (hi - lo) / 12.0;
    double bound = 2.0 * t / std::sqrt(varX);

    if (!opts.forceMonteCarlo && d <= opts.exactCap) {
        double est = continuous_lo_probability(ranges, b, t);
        return make_report(fmt("continuous_lo_exact[len=%d]", d), est, est, est, 0, bound);
    }

    uint64_t hits = mc_count(opts.trials, opts.workers, [&](uint64_t trial) {
        RngStream rng(opts.seed, trial);
        double acc = -b;
        for (const auto& [lo, hi] : ranges) acc += lo + (hi - lo) * rng.uniform01();
        return std::fabs(acc) < t;
    });
    return mc_probability_report(fmt("continuous_lo_mc[len=%d]", d), hits, opts.trials, bound);
}

EstimateReport check_chernoff(const std::vector<std::pair<double, double>>& ranges, double t,
                              const McOptions& opts) {
    validate_ranges(ranges);
    if (!(t > 0)) throw std::invalid_argument("t must be positive");

    double ssq = 0.0, mean = 0.0;
    for (const auto& [lo, hi] : ranges) {
        ssq += (hi - lo) * (hi - lo);
        mean += 0.5 * (lo + hi);
    }
    double bound = 2.0 * std::exp(-2.0 * t * t / ssq);

    uint64_t hits = mc_count(opts.trials, opts.workers, [&](uint64_t trial) {
        RngStream rng(opts.seed, trial);
        double acc = -mean;
        for (const auto& [lo, hi] : ranges) acc += rng.sign() > 0 ? hi : lo;
        return std::fabs(acc) >= t;
    });
    return mc_probability_report(fmt("chernoff_tail[len=%zu]", ranges.size()), hits,
                                 opts.trials, bound);
}

HyperplaneClaimsReport check_hyperplane_claims(const FloatCollection& fc,
                                               const HyperplaneClaimsOptions& opts) {
    validate_collection(AnyCollection{fc});
    const int n = fc.n;
    const int k = static_cast<int>(fc.hyperplanes.size());
    if (k == 0) throw std::invalid_argument("claims check needs at least one hyperplane");
    if (opts.trials == 0) throw std::invalid_argument("claims check needs trials >= 1");

    Matrix A(k, n);
    std::vector<double> b(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) A.at(i, j) = fc.hyperplanes[i].a[j];
        b[i] = fc.hyperplanes[i].b;
    }

    DecompConstants constants = opts.constants ? *opts.constants : DecompConstants::paper(k, n);
    DecompositionResult dec = decompose(A, constants);
    const Matrix& ap = dec.rescaled;

    std::vector<double> bPrime(k);
    for (int i = 0; i < k; ++i) bPrime[i] = dec.rowScale[i] * b[i];

    const std::vector<int>& N1 = dec.N1;
    const std::vector<int>& N2 = dec.N2;
    const int m = static_cast<int>(N1.size());
    const int q = static_cast<int>(N2.size());

    SamplerParams params = (opts.samplerFormulasAnyM ? SamplerParams::formulas_at(m)
                                                     : SamplerParams::paper(m))
                               .with_overrides(opts.samplerOverrides);

    Matrix V(k, m);
    Matrix A2(k, q);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) V.at(i, j) = ap.at(i, N1[j]);
        for (int j = 0; j < q; ++j) A2.at(i, j) = ap.at(i, N2[j]);
    }

    const double wMargin = 2.0 * std::sqrt(static_cast<double>(n));

    // fix (w, X) through the same gates the end-to-end pipeline uses
    HyperplaneClaimsReport rep;
    rep.m = m;
    std::vector<int8_t> w;
    std::vector<double> lambda(k);
    std::vector<double> X;
    bool fixed = false;
    for (uint64_t a = 0; a < opts.xBudget && !fixed; ++a) {
        RngStream rng(opts.seed, a + 1);
        std::vector<int8_t> wTry(q);
        for (int j = 0; j < q; ++j) wTry[j] = static_cast<int8_t>(rng.sign());
        bool ok = true;
        for (int i : dec.K2) {
            double acc = -bPrime[i];
            const double* a2 = A2.row(i);
            for (int j = 0; j < q; ++j) acc += a2[j] * wTry[j];
            if (!(std::fabs(acc) > wMargin)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (int i = 0; i < k; ++i) {
            double acc = 0.0;
            const double* a2 = A2.row(i);
            for (int j = 0; j < q; ++j) acc += a2[j] * wTry[j];
            lambda[i] = bPrime[i] - acc;
        }
        PointSample s = sample_point(V, lambda, params, rng);
        double xinf = 0.0;
        bool fin = true;
        for (double x : s.X) {
            if (!std::isfinite(x)) fin = false;
            xinf = std::max(xinf, std::fabs(x));
        }
        if (!fin || xinf > 0.5) continue;
        w = std::move(wTry);
        X = std::move(s.X);
        rep.xAttempts = a + 1;
        fixed = true;
    }
    if (!fixed)
        throw std::runtime_error("could not draw (w, X) through the pipeline gates; "
                                 "raise the budget or adjust the sampler parameters");

    const double starThreshold = 4.0 * std::sqrt(std::log(static_cast<double>(n)));
    std::vector<char> inK1(k, 0), inStar(k, 0);
    for (int i : dec.K1) inK1[i] = 1;
    for (int i : dec.K1) {
        double d = dot(X.data(), V.row(i), m) - lambda[i];
        if (std::fabs(d) <= starThreshold) {
            inStar[i] = 1;
            rep.k1Star.push_back(i);
        }
    }
    rep.k1StarBudget = std::sqrt(static_cast<double>(n)) / 200.0;

    struct Counters {
        std::vector<uint64_t> hits;
        uint64_t any = 0, k2viol = 0;
    };
    auto blocks = map_blocks<Counters>(
        opts.trials, kTrialBlock, opts.workers, [&](uint64_t lo, uint64_t hi, uint64_t) {
            Counters c;
            c.hits.assign(k, 0);
            for (uint64_t t = lo; t < hi; ++t) {
                RngStream rng(opts.seed, opts.xBudget + 1 + t);
                std::vector<int8_t> y = round_mu_p(X, rng);
                int h = N1[static_cast<int>(rng.bounded(static_cast<uint64_t>(m)))];
                uint32_t bits = 0;
                for (int j = 0; j < m; ++j)
                    if (y[j] > 0) bits |= 1u << N1[j];
                for (int j = 0; j < q; ++j)
                    if (w[j] > 0) bits |= 1u << N2[j];
                bool any = false;
                for (int i = 0; i < k; ++i) {
                    double val = -bPrime[i];
                    const double* row = ap.row(i);
                    for (int j = 0; j < n; ++j) val += (bits >> j & 1u) ? row[j] : -row[j];
                    if (std::fabs(val) < 2.0 * std::fabs(row[h])) {
                        ++c.hits[i];
                        any = true;
                        if (!inK1[i]) ++c.k2viol;
                    }
                }
                if (any) ++c.any;
            }
            return c;
        });
    std::vector<uint64_t> hits(k, 0);
    uint64_t anyHits = 0;
    for (const Counters& c : blocks) {
        for (int i = 0; i < k; ++i) hits[i] += c.hits[i];
        anyHits += c.any;
        rep.k2MarginViolations += c.k2viol;
    }

    const double farBound = 2.0 / (std::pow(static_cast<double>(n), 4.0));
    const double starBound = 100.0 / std::sqrt(static_cast<double>(n));
    int emitted = 0;
    double unionBound = 0.0;
    for (int i : dec.K1) unionBound += inStar[i] ? starBound : farBound;
    for (int i : dec.K1) {
        if (emitted >= opts.maxRows) break;
        ++emitted;
        if (inStar[i])
            rep.rows.push_back(mc_probability_report(fmt("prob_margin_fail[i=%d,k1star]", i),
                                                     hits[i], opts.trials, starBound));
        else
            rep.rows.push_back(mc_probability_report(fmt("prob_margin_fail[i=%d,far]", i),
                                                     hits[i], opts.trials, farBound));
    }
    rep.rows.push_back(
        mc_probability_report("prob_margin_fail_any", anyHits, opts.trials, unionBound));
    return rep;
}

}  // namespace hslice
