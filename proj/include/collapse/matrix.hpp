#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace collapse {

using cplx = std::complex<double>;

struct RealMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    RealMatrix() = default;
    RealMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

struct ComplexMatrix {
    std::size_t n = 0; // square
    std::vector<cplx> a;

    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim) : n(dim), a(dim * dim, cplx{0.0, 0.0}) {}

    cplx& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    cplx trace() const {
        cplx t{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& v : a) m = std::max(m, std::abs(v));
        return m;
    }

    double max_abs_diff(const ComplexMatrix& o) const {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - o.a[i]));
        return m;
    }
};

} // namespace collapse
