#pragma once

#include <array>
#include <cmath>

#include "mitopt/errors.hpp"

// Small fixed-size vectors and matrices. Determinants and inverses of the
// 3x3 information matrices are computed by explicit cofactor expansion;
// nothing here warrants a general linear algebra dependency.

namespace mitopt {

struct Vec3 {
    std::array<double, 3> v{0.0, 0.0, 0.0};

    double& operator[](int i) { return v[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<size_t>(i)]; }

    double norm_inf() const {
        return std::max({std::fabs(v[0]), std::fabs(v[1]), std::fabs(v[2])});
    }
};

struct Mat3 {
    // row-major
    std::array<std::array<double, 3>, 3> m{};

    double& operator()(int r, int c) { return m[static_cast<size_t>(r)][static_cast<size_t>(c)]; }
    double operator()(int r, int c) const { return m[static_cast<size_t>(r)][static_cast<size_t>(c)]; }

    static Mat3 zero() { return Mat3{}; }

    double det() const {
        const auto& a = m;
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
             - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
             + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    }

    Mat3 transpose() const {
        Mat3 t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
        return t;
    }

    Mat3 inverse() const {
        const double d = det();
        if (d == 0.0 || !std::isfinite(d))
            throw SingularInformationError("3x3 matrix is singular");
        const auto& a = m;
        Mat3 inv;
        inv(0, 0) =  (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / d;
        inv(0, 1) = -(a[0][1] * a[2][2] - a[0][2] * a[2][1]) / d;
        inv(0, 2) =  (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / d;
        inv(1, 0) = -(a[1][0] * a[2][2] - a[1][2] * a[2][0]) / d;
        inv(1, 1) =  (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / d;
        inv(1, 2) = -(a[0][0] * a[1][2] - a[0][2] * a[1][0]) / d;
        inv(2, 0) =  (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / d;
        inv(2, 1) = -(a[0][0] * a[2][1] - a[0][1] * a[2][0]) / d;
        inv(2, 2) =  (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / d;
        return inv;
    }

    Vec3 mul(const Vec3& x) const {
        Vec3 y;
        for (int r = 0; r < 3; ++r)
            y[r] = (*this)(r, 0) * x[0] + (*this)(r, 1) * x[1] + (*this)(r, 2) * x[2];
        return y;
    }

    Mat3 mul(const Mat3& b) const {
        Mat3 c;
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k)
                for (int j = 0; j < 3; ++j) c(r, j) += (*this)(r, k) * b(k, j);
        return c;
    }

    double norm_inf() const {
        double best = 0.0;
        for (const auto& row : m) {
            double s = std::fabs(row[0]) + std::fabs(row[1]) + std::fabs(row[2]);
            best = std::max(best, s);
        }
        return best;
    }

    // max-norm condition estimate, used to flag singular information
    double cond_inf() const { return norm_inf() * inverse().norm_inf(); }
};

inline Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
    return r;
}

}  // namespace mitopt
