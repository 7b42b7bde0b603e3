#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hslice/rational.hpp"

namespace hslice {

// A hyperplane <a, x> = b over {-1,+1}^n. One numeric representation per
// collection: exact rationals where sign decisions must be certified, doubles
// for large sampled instances.
template <typename T>
struct Hyperplane {
    std::vector<T> a;
    T b{};
};

template <typename T>
struct Collection {
    int n = 0;
    std::vector<Hyperplane<T>> hyperplanes;
};

using ExactHyperplane = Hyperplane<Rational>;
using FloatHyperplane = Hyperplane<double>;
using ExactCollection = Collection<Rational>;
using FloatCollection = Collection<double>;

enum class NumericMode { Float, Exact };

using AnyCollection = std::variant<FloatCollection, ExactCollection>;

inline NumericMode mode_of(const AnyCollection& c) {
    return std::holds_alternative<ExactCollection>(c) ? NumericMode::Exact : NumericMode::Float;
}

inline int dim_of(const AnyCollection& c) {
    return std::visit([](const auto& col) { return col.n; }, c);
}

inline size_t size_of(const AnyCollection& c) {
    return std::visit([](const auto& col) { return col.hyperplanes.size(); }, c);
}

// vertex coordinate j of the bit pattern: set bit -> +1, clear bit -> -1
inline int vertex_coord(uint32_t bits, int j) { return (bits >> j) & 1u ? 1 : -1; }

template <typename T>
T evaluate(const Hyperplane<T>& h, uint32_t vertex_bits, int n) {
    if (static_cast<int>(h.a.size()) != n)
        throw std::invalid_argument("hyperplane dimension mismatch");
    T acc = -h.b;
    for (int j = 0; j < n; ++j) {
        if (vertex_coord(vertex_bits, j) > 0)
            acc += h.a[j];
        else
            acc -= h.a[j];
    }
    return acc;
}

// scale-aware degeneracy tolerance for float mode
double zero_tolerance(const FloatHyperplane& h, double factor = 1e-12);

// exact -> float (rounded) and float -> exact (exact lift; doubles are rationals)
FloatCollection to_float(const ExactCollection& c);
ExactCollection to_exact(const FloatCollection& c);
ExactCollection exact_view(const AnyCollection& c);

void validate_collection(const AnyCollection& c);  // ragged rows, n < 1

}  // namespace hslice
