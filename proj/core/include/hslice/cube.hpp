#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hslice/hyperplane.hpp"

namespace hslice {

// Edge of {-1,+1}^n in canonical form: `base` holds the endpoint whose
// coordinate `flip` is -1 (bit clear); the other endpoint is base | (1<<flip).
struct EdgeId {
    uint32_t base = 0;
    uint8_t flip = 0;

    uint32_t other() const { return base | (1u << flip); }
    bool operator==(const EdgeId& o) const { return base == o.base && flip == o.flip; }
};

inline bool edge_is_canonical(EdgeId e, int n) {
    return e.flip < n && (e.base >> e.flip & 1u) == 0 && (e.base >> n) == 0;
}

inline uint64_t edge_count(int n) { return static_cast<uint64_t>(n) << (n - 1); }

struct SliceOutcome {
    enum class Kind { Sliced, NotSliced, Degenerate };
    Kind kind = Kind::NotSliced;
    // populated for Degenerate: which endpoint(s) lie on the hyperplane
    bool baseOnPlane = false;
    bool otherOnPlane = false;
};

// A hyperplane slices an edge iff its affine form is nonzero with opposite
// signs at the two endpoints. An endpoint on the hyperplane (exactly, or
// within the scale-aware tolerance in float mode) makes the incidence
// Degenerate — never Sliced.
SliceOutcome slices_edge(const ExactHyperplane& h, EdgeId e, int n);
SliceOutcome slices_edge(const FloatHyperplane& h, EdgeId e, int n, double epsFactor = 1e-12);

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CoverOptions {
    int cap = 24;                    // max dimension for full enumeration
    double epsZeroFactor = 1e-12;    // float-mode degeneracy tolerance factor
    uint64_t unslicedKeep = 1u << 20;  // cap on the retained unsliced-edge list
    int workers = 1;
};

struct CoverReport {
    int n = 0;
    uint64_t totalEdges = 0;
    uint64_t slicedEdges = 0;    // edges sliced by at least one hyperplane
    uint64_t unslicedCount = 0;  // full count; `unsliced` may be truncated
    // retained unsliced edges, ascending (base, flip); capped at unslicedKeep
    uint64_t degenerateIncidences = 0;  // (edge, hyperplane) pairs
    std::vector<uint64_t> perHyperplaneSliceCounts;
    std::vector<EdgeId> unsliced;
    bool fullyCovered() const { return unslicedCount == 0; }
};

// Exhaustive edge-by-edge verification. Exact mode is sign-exact (hyperplanes
// are rescaled to integer form internally); float mode uses compensated
// running sums plus the tolerance. Deterministic for any worker count.
CoverReport verify_cover(const AnyCollection& collection, const CoverOptions& opts = {});

// Streams every canonical edge of {-1,+1}^n to fn(EdgeId).
template <typename Fn>
void for_each_edge(int n, Fn&& fn) {
    uint32_t vertices = 1u << n;
    for (uint32_t v = 0; v < vertices; ++v)
        for (int h = 0; h < n; ++h)
            if (!(v >> h & 1u)) fn(EdgeId{v, static_cast<uint8_t>(h)});
}

std::string edge_to_string(EdgeId e);

// Outcome kind for every canonical edge (for_each_edge order), one hyperplane.
// 0 = NotSliced, 1 = Sliced, 2 = Degenerate. Sign-exact.
std::vector<uint8_t> edge_outcome_codes(const ExactHyperplane& h, int n);

}  // namespace hslice
