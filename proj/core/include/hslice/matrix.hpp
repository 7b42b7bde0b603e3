#pragma once

#include <cassert>
#include <vector>

namespace hslice {

// dense row-major double matrix; just enough for the decomposition and sampler
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> d;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), d(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return d[static_cast<size_t>(r) * cols + c];
    }
    double at(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return d[static_cast<size_t>(r) * cols + c];
    }
    const double* row(int r) const { return d.data() + static_cast<size_t>(r) * cols; }
    double* row(int r) { return d.data() + static_cast<size_t>(r) * cols; }
};

inline double dot(const double* a, const double* b, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace hslice
