#include "hslice/hyperplane.hpp"

#include <cmath>

namespace hslice {

double zero_tolerance(const FloatHyperplane& h, double factor) {
    double scale = 1.0 + std::fabs(h.b);
    for (double aj : h.a) scale += std::fabs(aj);
    return factor * scale;
}

FloatCollection to_float(const ExactCollection& c) {
    FloatCollection out;
    out.n = c.n;
    out.hyperplanes.reserve(c.hyperplanes.size());
    for (const auto& h : c.hyperplanes) {
        FloatHyperplane f;
        f.b = h.b.get_d();
        f.a.reserve(h.a.size());
        for (const auto& q : h.a) f.a.push_back(q.get_d());
        out.hyperplanes.push_back(std::move(f));
    }
    return out;
}

ExactCollection to_exact(const FloatCollection& c) {
    ExactCollection out;
    out.n = c.n;
    out.hyperplanes.reserve(c.hyperplanes.size());
    for (const auto& h : c.hyperplanes) {
        ExactHyperplane e;
        e.b = rational_from_double(h.b);
        e.a.reserve(h.a.size());
        for (double aj : h.a) e.a.push_back(rational_from_double(aj));
        out.hyperplanes.push_back(std::move(e));
    }
    return out;
}

ExactCollection exact_view(const AnyCollection& c) {
    if (const auto* ex = std::get_if<ExactCollection>(&c)) return *ex;
    return to_exact(std::get<FloatCollection>(c));
}

void validate_collection(const AnyCollection& c) {
    int n = dim_of(c);
    if (n < 1) throw std::invalid_argument("collection dimension must be >= 1");
    std::visit(
        [n](const auto& col) {
            for (const auto& h : col.hyperplanes)
                if (static_cast<int>(h.a.size()) != n)
                    throw std::invalid_argument("hyperplane dimension mismatch in collection");
        },
        c);
}

}  // namespace hslice
