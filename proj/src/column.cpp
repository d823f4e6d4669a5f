/**
 * @file column.cpp
 * @brief Vertical grid construction and column operator implementations.
 */
#include "mpe/column.hpp"

#include <stdexcept>
#include <string>

namespace mpe {

VerticalGrid make_vertical_grid(int K) {
    if (K < 2)
        throw std::invalid_argument("make_vertical_grid: K = " + std::to_string(K) +
                                    " but at least 2 levels are required");
    VerticalGrid g;
    g.K = K;
    g.h = 1.0 / K;
    g.xi.resize(K);
    for (int k = 0; k < K; ++k) g.xi[k] = (k + 0.5) * g.h;
    return g;
}

ScalarField2D Field3D::level(int k) const {
    if (k < 0 || k >= K) throw std::invalid_argument("Field3D::level: index out of range");
    ScalarField2D s(n_lat, n_lon);
    const double* src = &v[std::size_t(k) * level_stride()];
    std::copy(src, src + level_stride(), s.v.begin());
    return s;
}

void Field3D::set_level(int k, const ScalarField2D& s) {
    if (k < 0 || k >= K) throw std::invalid_argument("Field3D::set_level: index out of range");
    if (s.n_lat != n_lat || s.n_lon != n_lon)
        throw std::invalid_argument("Field3D::set_level: level shape mismatch");
    std::copy(s.v.begin(), s.v.end(), v.begin() + std::size_t(k) * level_stride());
}

namespace {

void check_levels(const Field3D& f, const char* what) {
    if (f.K < 2) throw std::invalid_argument(std::string(what) + ": needs at least 2 levels");
}

} // namespace

Field3D d1_xi(const Field3D& f, double alpha_surface) {
    check_levels(f, "d1_xi");
    const double h = 1.0 / f.K;
    const double r = robin_ghost_ratio(alpha_surface, h);
    const std::size_t ns = f.level_stride();
    Field3D out(f.K, f.n_lat, f.n_lon);
    for (std::size_t p = 0; p < ns; ++p) {
        // Top ghost mirrors (Neumann), surface ghost is r * last value.
        out.v[p] = (f.v[ns + p] - f.v[p]) / (2.0 * h);
        for (int k = 1; k + 1 < f.K; ++k)
            out.v[std::size_t(k) * ns + p] =
                (f.v[std::size_t(k + 1) * ns + p] - f.v[std::size_t(k - 1) * ns + p]) /
                (2.0 * h);
        const double last = f.v[std::size_t(f.K - 1) * ns + p];
        out.v[std::size_t(f.K - 1) * ns + p] =
            (r * last - f.v[std::size_t(f.K - 2) * ns + p]) / (2.0 * h);
    }
    return out;
}

Field3D d2_xi(const Field3D& f, double alpha_surface) {
    check_levels(f, "d2_xi");
    const double h = 1.0 / f.K;
    const double r = robin_ghost_ratio(alpha_surface, h);
    const std::size_t ns = f.level_stride();
    Field3D out(f.K, f.n_lat, f.n_lon);
    const double ih2 = 1.0 / (h * h);
    for (std::size_t p = 0; p < ns; ++p) {
        out.v[p] = (f.v[ns + p] - f.v[p]) * ih2;
        for (int k = 1; k + 1 < f.K; ++k)
            out.v[std::size_t(k) * ns + p] =
                (f.v[std::size_t(k + 1) * ns + p] - 2.0 * f.v[std::size_t(k) * ns + p] +
                 f.v[std::size_t(k - 1) * ns + p]) *
                ih2;
        const double last = f.v[std::size_t(f.K - 1) * ns + p];
        out.v[std::size_t(f.K - 1) * ns + p] =
            ((r - 2.0) * last + f.v[std::size_t(f.K - 2) * ns + p]) * ih2;
    }
    return out;
}

Field3D upper_integral(const Field3D& f) {
    const double h = 1.0 / f.K;
    const std::size_t ns = f.level_stride();
    Field3D out(f.K, f.n_lat, f.n_lon);
    for (std::size_t p = 0; p < ns; ++p) {
        // Downward sweep: running sum of full cells below level k.
        long double below = 0.0L;
        for (int k = f.K - 1; k >= 0; --k) {
            const long double fk = f.v[std::size_t(k) * ns + p];
            out.v[std::size_t(k) * ns + p] = double(h * (0.5L * fk + below));
            below += fk;
        }
    }
    return out;
}

ScalarField2D vertical_integral(const Field3D& f) {
    const double h = 1.0 / f.K;
    const std::size_t ns = f.level_stride();
    ScalarField2D out(f.n_lat, f.n_lon);
    for (std::size_t p = 0; p < ns; ++p) {
        long double s = 0.0L;
        for (int k = 0; k < f.K; ++k) s += f.v[std::size_t(k) * ns + p];
        out.v[p] = double(h * s);
    }
    return out;
}

Field3D remove_vertical_mean(const Field3D& f) {
    ScalarField2D mean = vertical_integral(f);
    const std::size_t ns = f.level_stride();
    Field3D out = f;
    for (int k = 0; k < f.K; ++k)
        for (std::size_t p = 0; p < ns; ++p) out.v[std::size_t(k) * ns + p] -= mean.v[p];
    return out;
}

void axpy(double a, const Field3D& x, Field3D& y) {
    if (!x.same_shape(y)) throw std::invalid_argument("axpy: field shape mismatch");
    for (std::size_t i = 0; i < x.v.size(); ++i) y.v[i] += a * x.v[i];
}

void axpy(double a, const VField3D& x, VField3D& y) {
    axpy(a, x.vth, y.vth);
    axpy(a, x.vph, y.vph);
}

void scale(Field3D& x, double a) {
    for (double& xi : x.v) xi *= a;
}

void scale(VField3D& x, double a) {
    scale(x.vth, a);
    scale(x.vph, a);
}

Tridiag neg_d2_matrix(int K, double alpha_surface) {
    if (K < 2) throw std::invalid_argument("neg_d2_matrix: needs at least 2 levels");
    const double h = 1.0 / K;
    const double r = robin_ghost_ratio(alpha_surface, h);
    const double ih2 = 1.0 / (h * h);
    Tridiag A;
    A.lower.assign(K - 1, -ih2);
    A.upper.assign(K - 1, -ih2);
    A.diag.assign(K, 2.0 * ih2);
    A.diag.front() = ih2;             // mirror ghost at the top
    A.diag.back() = (2.0 - r) * ih2;  // Robin ghost at the surface
    return A;
}

} // namespace mpe
