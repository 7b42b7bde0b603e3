#pragma once

#include <vector>

namespace hslice::scales {

// All scale arithmetic runs in long double: a chain of s groups with 100x
// norm gaps spans a dynamic range of 100^(s-1), which for s >= 200 overflows
// IEEE double entirely but fits x87 extended precision up to s ~ 1200.
using Real = long double;

// Disjoint coordinate groups I_1, ..., I_s with ||v|_{I_i}|| >= 100 ||v|_{I_{i+1}}||
// and ||v|_{I_s}|| >= delta ("s scales of size delta").
struct ScaleCertificate {
    std::vector<std::vector<int>> groups;  // I_1 first (largest norms)
    Real delta = 0;
    std::vector<Real> groupNorms;  // cached; recomputed by verify_certificate

    int s() const { return static_cast<int>(groups.size()); }
};

// Checks the certificate against v. Malformed certificates (group overlap,
// index out of range, empty group) throw std::invalid_argument; a well-formed
// certificate that fails the norm chain returns false.
bool verify_certificate(const std::vector<Real>& v, const ScaleCertificate& cert);

// Greedy certificate: coordinates sorted by |v| descending, groups built from
// the small end; each group is the shortest block reaching its target norm
// (delta for the last group, 100x the following group's actual norm above).
ScaleCertificate greedy_scales(const std::vector<Real>& v, Real delta);

// Exact maximum number of scales of size delta over arbitrary disjoint groups,
// via subset DP. len <= 12 only.
int brute_max_scales(const std::vector<Real>& v, Real delta);

// Drops trailing groups so the remaining chain certifies scales of size
// deltaPrime >= delta. Throws if not enough groups remain.
ScaleCertificate truncate_certificate(const ScaleCertificate& cert, Real deltaPrime);

// v_i = 10 * delta * 100^(s-i), i = 1..s: s singleton scales of size 10*delta.
std::vector<Real> geometric_scale_vector(int s, Real delta);

}  // namespace hslice::scales
