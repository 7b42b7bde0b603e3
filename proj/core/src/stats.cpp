#include "hslice/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace hslice {

namespace {

// Continued fraction for the incomplete beta, modified Lentz algorithm.
// See Numerical Recipes 6.4 / https://dlmf.nist.gov/8.17#v
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta needs a,b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double incomplete_beta_inv(double a, double b, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (regularized_incomplete_beta(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

BinomialCi clopper_pearson(uint64_t successes, uint64_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("clopper_pearson: zero trials");
    if (successes > trials) throw std::invalid_argument("clopper_pearson: successes > trials");
    double alpha = 1.0 - confidence;
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("clopper_pearson: bad confidence");
    double k = static_cast<double>(successes);
    double n = static_cast<double>(trials);
    BinomialCi ci;
    ci.lo = successes == 0 ? 0.0 : incomplete_beta_inv(k, n - k + 1.0, alpha / 2.0);
    ci.hi = successes == trials ? 1.0 : incomplete_beta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
    return ci;
}

double normal_two_sided_z(double confidence) {
    // inverse error function via Newton on erf; plenty for CI half-widths
    double p = 0.5 * (1.0 + confidence);  // one-sided quantile level
    double x = 0.0;
    for (int i = 0; i < 80; ++i) {
        double err = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) - p;
        double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
        if (density < 1e-300) break;
        double step = err / density;
        x -= step;
        if (std::fabs(step) < 1e-13) break;
    }
    return x;
}

double PowerSums::mean() const { return n == 0 ? 0.0 : s1 / static_cast<double>(n); }

double PowerSums::variance() const {
    if (n < 2) return 0.0;
    double nn = static_cast<double>(n);
    double m = s1 / nn;
    double ss = s2 - nn * m * m;
    if (ss < 0.0) ss = 0.0;
    return ss / (nn - 1.0);
}

double PowerSums::fourth_central() const {
    if (n == 0) return 0.0;
    double nn = static_cast<double>(n);
    double m = s1 / nn;
    double m2 = m * m;
    // E[(x-m)^4] from raw power sums
    return (s4 - 4.0 * m * s3 + 6.0 * m2 * s2 - 4.0 * m2 * m * s1 + nn * m2 * m2) / nn;
}

double PowerSums::variance_se() const {
    if (n < 2) return 0.0;
    double v = variance();
    double m4 = fourth_central();
    double spread = m4 - v * v;
    if (spread < 0.0) spread = 0.0;
    return std::sqrt(spread / static_cast<double>(n));
}

double PowerSums::mean_se() const {
    if (n < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n));
}

}  // namespace hslice
