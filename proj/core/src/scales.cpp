#include "hslice/scales.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hslice::scales {

namespace {

Real group_norm(const std::vector<Real>& v, const std::vector<int>& group) {
    Real sq = 0;
    for (int idx : group) sq += v[idx] * v[idx];
    return std::sqrt(sq);
}

}  // namespace

bool verify_certificate(const std::vector<Real>& v, const ScaleCertificate& cert) {
    std::vector<char> used(v.size(), 0);
    for (const auto& group : cert.groups) {
        if (group.empty()) throw std::invalid_argument("certificate group is empty");
        for (int idx : group) {
            if (idx < 0 || idx >= static_cast<int>(v.size()))
                throw std::invalid_argument("certificate index out of range");
            if (used[idx]) throw std::invalid_argument("certificate groups overlap");
            used[idx] = 1;
        }
    }
    if (cert.groups.empty()) return true;
    if (!(cert.delta > 0)) throw std::invalid_argument("certificate delta must be positive");

    Real prev = std::numeric_limits<Real>::infinity();
    for (const auto& group : cert.groups) {
        Real norm = group_norm(v, group);
        if (std::isinf(norm)) throw std::invalid_argument("certificate norms overflow");
        if (norm * 100 > prev) return false;  // needs prev >= 100 * norm
        prev = norm;
    }
    return group_norm(v, cert.groups.back()) >= cert.delta;
}

ScaleCertificate greedy_scales(const std::vector<Real>& v, Real delta) {
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::fabs(v[a]) > std::fabs(v[b]);
    });

    ScaleCertificate cert;
    cert.delta = delta;
    std::vector<std::vector<int>> reversed;  // built last-group-first
    std::vector<Real> norms;
    Real target = delta;
    int right = static_cast<int>(order.size());  // exclusive
    while (right > 0) {
        Real sq = 0;
        int left = right;
        while (left > 0) {
            --left;
            Real c = v[order[left]];
            sq += c * c;
            if (sq >= target * target) break;
        }
        if (sq < target * target) break;  // ran out of coordinates
        std::vector<int> group(order.begin() + left, order.begin() + right);
        std::sort(group.begin(), group.end());
        Real norm = std::sqrt(sq);
        reversed.push_back(std::move(group));
        norms.push_back(norm);
        target = norm * 100;
        right = left;
    }
    for (size_t i = reversed.size(); i-- > 0;) {
        cert.groups.push_back(std::move(reversed[i]));
        cert.groupNorms.push_back(norms[i]);
    }
    return cert;
}

int brute_max_scales(const std::vector<Real>& v, Real delta) {
    int len = static_cast<int>(v.size());
    if (len > 12) throw std::invalid_argument("brute_max_scales limited to 12 coordinates");
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    if (len == 0) return 0;
    int full = (1 << len) - 1;

    std::vector<Real> norm2(full + 1, 0);
    for (int mask = 1; mask <= full; ++mask) {
        int low = std::countr_zero(static_cast<unsigned>(mask));
        norm2[mask] = norm2[mask & (mask - 1)] + v[low] * v[low];
    }

    constexpr Real kInf = std::numeric_limits<Real>::infinity();
    // h[mask] = minimal achievable norm of the top (largest) group over all
    // valid chains of the current length inside mask; infinity = impossible.
    // The bottom group is tested against delta directly (no /100 round trip)
    // so boundary-equal chains agree with verify_certificate.
    std::vector<Real> h(full + 1, kInf);
    int best = 0;
    for (int s = 1; s <= len; ++s) {
        std::vector<Real> next(full + 1, kInf);
        for (int mask = 1; mask <= full; ++mask) {
            Real bestTop = kInf;
            // enumerate nonempty submasks G of mask as the new top group
            for (int g = mask; g != 0; g = (g - 1) & mask) {
                Real normG = std::sqrt(norm2[g]);
                if (s == 1) {
                    if (normG >= delta && normG < bestTop) bestTop = normG;
                    continue;
                }
                Real rest = h[mask ^ g];
                if (rest == kInf) continue;
                if (normG >= 100 * rest && normG < bestTop) bestTop = normG;
            }
            next[mask] = bestTop;
        }
        h = std::move(next);
        // a chain inside any mask is a chain inside `full`, so h[full] is the
        // global feasibility indicator for length s
        if (h[full] == kInf) break;
        best = s;
    }
    return best;
}

ScaleCertificate truncate_certificate(const ScaleCertificate& cert, Real deltaPrime) {
    if (!(deltaPrime >= cert.delta))
        throw std::invalid_argument("truncate_certificate: deltaPrime must be >= delta");
    int drop = static_cast<int>(std::ceil(
        static_cast<double>(std::log(deltaPrime / cert.delta) / std::log(Real(100))) - 1e-12));
    if (drop < 0) drop = 0;
    if (drop >= cert.s())
        throw std::invalid_argument("truncate_certificate: not enough groups to truncate");
    ScaleCertificate out;
    out.delta = deltaPrime;
    out.groups.assign(cert.groups.begin(), cert.groups.end() - drop);
    if (static_cast<int>(cert.groupNorms.size()) == cert.s())
        out.groupNorms.assign(cert.groupNorms.begin(), cert.groupNorms.end() - drop);
    return out;
}

std::vector<Real> geometric_scale_vector(int s, Real delta) {
    if (s < 1) throw std::invalid_argument("geometric_scale_vector: s must be >= 1");
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    std::vector<Real> v(s);
    Real value = 10 * delta;  // v_s, then scale upward
    for (int i = s - 1; i >= 0; --i) {
        v[i] = value;
        value *= 100;
        if (std::isinf(value) && i > 0)
            throw std::invalid_argument("geometric_scale_vector overflows long double");
    }
    return v;
}

}  // namespace hslice::scales
