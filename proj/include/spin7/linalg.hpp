#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace spin7 {

using Vec8 = std::array<double, 8>;

/// Dense 8x8 matrix in row-major order.  Small enough that hand-rolled
/// elimination beats pulling in a linear-algebra dependency.
struct Mat8 {
    std::array<double, 64> a{};

    double& operator()(std::size_t r, std::size_t c) { return a[8 * r + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[8 * r + c]; }

    Vec8 mul(const Vec8& v) const {
        Vec8 out{};
        for (std::size_t r = 0; r < 8; ++r) {
            double s = 0;
            for (std::size_t c = 0; c < 8; ++c) s += (*this)(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }
};

/// Solve an n x n system in place by Gaussian elimination with partial
/// pivoting.  `m` is row-major with leading dimension n.
template <std::size_t N>
inline std::array<double, N> solve_dense(std::array<double, N * N> m, std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(m[r * N + col]) > std::abs(m[piv * N + col])) piv = r;
        if (std::abs(m[piv * N + col]) < 1e-300)
            throw std::runtime_error("solve_dense: singular matrix");
        if (piv != col) {
            for (std::size_t c = 0; c < N; ++c) std::swap(m[piv * N + c], m[col * N + c]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = m[r * N + col] / m[col * N + col];
            if (f == 0) continue;
            for (std::size_t c = col; c < N; ++c) m[r * N + c] -= f * m[col * N + c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t ri = N; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < N; ++c) s -= m[ri * N + c] * x[c];
        x[ri] = s / m[ri * N + ri];
    }
    return x;
}

/// Least-squares slope/intercept of y against x.  Returns {slope, intercept,
/// rms_residual}.
struct LineFit {
    double slope = 0;
    double intercept = 0;
    double rms_residual = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need at least two matched points");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    LineFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

}  // namespace spin7
