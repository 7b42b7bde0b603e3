#pragma once

#include <cstdint>
#include <stdexcept>

#include "hslice/hyperplane.hpp"

namespace hslice {

struct WiggleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WiggleOptions {
    Rational magnitude = Rational(1, 1024);
    bool certify = true;  // exact per-hyperplane sliced-set preservation check
    int cap = 24;
    int maxAttempts = 8;
};

struct WiggleResult {
    ExactCollection collection;
    uint64_t perturbedCoefficients = 0;
    uint64_t degenerateBefore = 0;   // (edge, hyperplane) incidences
    uint64_t degenerateAfter = 0;
    uint64_t resolvedDegenerate = 0;  // Degenerate -> NotSliced transitions
    int attemptsUsed = 0;
    bool changed = false;
};

// Perturbs zero coefficients and repeated |coefficient| values by distinct
// dyadic multiples of the magnitude until every coefficient is nonzero and all
// |coefficients| across the collection are distinct. Offsets b stay fixed.
// With certify on, each hyperplane's sliced-edge set is then checked to be
// unchanged by exhaustive exact enumeration (Degenerate incidences may resolve
// to NotSliced; anything else retries with a smaller magnitude and different
// perturbation signs, and eventually throws WiggleError).
WiggleResult wiggle(const ExactCollection& collection, const WiggleOptions& opts = {});

// true iff every coefficient is nonzero and all |coefficients| are distinct
bool is_generic(const ExactCollection& collection);

}  // namespace hslice
