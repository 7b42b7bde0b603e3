#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hslice/matrix.hpp"
#include "hslice/scales.hpp"

namespace hslice {

struct DecompError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DecompConstants {
    int S = 1;
    double W = 1.0;
    double tau = 1.0 / 10001.0;  // sqrt((1 - tau)/tau) = 100
    bool paperDefaults = true;

    static DecompConstants paper(int k, int n);
    // fills unset fields from the paper formulas; any override clears paperDefaults
    static DecompConstants with_overrides(int k, int n, std::optional<int> S,
                                          std::optional<double> W, std::optional<double> tau);
    void validate() const;
};

struct DecompositionResult {
    int k = 0, n = 0;
    DecompConstants constants;
    std::vector<int> K1, K2;  // row split (ascending)
    std::vector<int> N1, N2;  // column split (ascending)
    Matrix rescaled;          // A' = diag(rowScale) * A
    std::vector<double> rowScale;
    // per retired row: the S renormalization groups, oldest first (these are
    // the scale groups I_h = N1(h-1) \ N1(h))
    std::map<int, scales::ScaleCertificate> certificates;
    std::map<int, std::vector<std::vector<int>>> history;  // every renormalized row
    uint64_t renormalizations = 0;
    uint64_t loopIterations = 0;
    double finalPotential = 0.0;
    bool potentialBoundHeld = true;  // potential <= k + #renorms throughout
};

// Iterative column-peeling decomposition. Deterministic: the smallest
// qualifying column moves first, qualifying rows renormalize in increasing
// row order. Entries must be finite and no row may be identically zero.
DecompositionResult decompose(const Matrix& A, const DecompConstants& constants);

struct DecompCheckItem {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct DecompCheck {
    bool ok = true;
    std::vector<DecompCheckItem> items;
};

// Independent recheck of the decomposition postconditions: partitions, the
// |N2| <= n/2 budget, row rescaling consistency, unit row norms on N1, the
// column-norm bound W on (K1, N1), certified K2 scales (delta = 100, >= S
// groups inside N2), and the derived bound |N2| * tau * W^2 <= k (S + 1).
DecompCheck verify_decomposition(const Matrix& A, const DecompositionResult& r,
                                 double tol = 1e-9);

}  // namespace hslice
