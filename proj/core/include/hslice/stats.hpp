#pragma once

#include <cstdint>

namespace hslice {

// Regularized incomplete beta I_x(a, b), continued fraction per the modified
// Lentz scheme. Accurate to ~1e-14 for the (a, b) ranges binomial CIs need.
double regularized_incomplete_beta(double a, double b, double x);

// Inverse of I_x(a, b) in x, by bisection (monotone, robust).
double incomplete_beta_inv(double a, double b, double p);

struct BinomialCi {
    double lo = 0.0;
    double hi = 1.0;
};

// Exact (Clopper–Pearson) two-sided binomial confidence interval.
BinomialCi clopper_pearson(uint64_t successes, uint64_t trials, double confidence);

// Two-sided normal quantile for a given confidence level (e.g. 0.99 -> 2.5758).
double normal_two_sided_z(double confidence);

// Power-sum accumulator: mergeable moment tracking for mean/variance checks.
// Merging is plain addition, so block-ordered reduction keeps results
// independent of worker count.
struct PowerSums {
    uint64_t n = 0;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;

    void add(double x) {
        ++n;
        double x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
    }
    void merge(const PowerSums& o) {
        n += o.n;
        s1 += o.s1;
        s2 += o.s2;
        s3 += o.s3;
        s4 += o.s4;
    }

    double mean() const;
    double variance() const;         // unbiased
    double fourth_central() const;   // biased plug-in estimate
    double variance_se() const;      // delta-method SE of the sample variance
    double mean_se() const;
};

}  // namespace hslice
