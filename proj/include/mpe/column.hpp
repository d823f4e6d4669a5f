/**
 * @file column.hpp
 * @brief Vertical (pressure-coordinate) grid, 3D fields, and column
 *        operators: first/second derivatives with ghost-cell boundary
 *        closures, upper integrals, and tridiagonal solves.
 *
 * The vertical coordinate xi runs over (0, 1): xi = 0 is the top of the
 * shell, xi = 1 the surface. Cells are uniform with centers
 * xi_k = (k + 1/2) h, h = 1/K, k = 0..K-1, so k = 0 is the topmost level.
 *
 * Boundary closures use one ghost cell per end. The top is always
 * homogeneous Neumann (mirror ghost). The surface condition
 * d_xi f = -alpha f is closed with the ghost ratio
 *   f_K = r f_{K-1},  r = (1 - alpha h/2) / (1 + alpha h/2),
 * which keeps the second-derivative operator symmetric and reduces to the
 * mirror ghost when alpha = 0.
 */
#ifndef MPE_COLUMN_HPP
#define MPE_COLUMN_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "mpe/sphere.hpp"

namespace mpe {

/// Uniform cell-centered grid on (0, 1).
struct VerticalGrid {
    int K = 0;              ///< number of levels
    double h = 0.0;         ///< level spacing 1/K
    std::vector<double> xi; ///< cell centers, xi[k] = (k + 1/2) h
};

/// Builds the K-level grid; requires K >= 2 (stencils need two levels).
VerticalGrid make_vertical_grid(int K);

/// Pressure as a function of xi: p = (P - p0) xi + p0.
inline double pressure_of_xi(double xi, double P, double p0) {
    return (P - p0) * xi + p0;
}

/// Ghost ratio r for the surface closure d_xi f = -alpha f.
inline double robin_ghost_ratio(double alpha, double h) {
    return (1.0 - 0.5 * alpha * h) / (1.0 + 0.5 * alpha * h);
}

// ---------------------------------------------------------------------------
// 3D fields
// ---------------------------------------------------------------------------

/// Scalar field on the shell grid, stored level-major:
/// data[k * n_lat * n_lon + j * n_lon + i].
struct Field3D {
    int K = 0, n_lat = 0, n_lon = 0;
    std::vector<double> v;

    Field3D() = default;
    Field3D(int K_, int n_lat_, int n_lon_)
        : K(K_), n_lat(n_lat_), n_lon(n_lon_),
          v(std::size_t(K_) * n_lat_ * n_lon_, 0.0) {}

    std::size_t level_stride() const { return std::size_t(n_lat) * n_lon; }
    double& at(int k, int j, int i) {
        return v[std::size_t(k) * level_stride() + std::size_t(j) * n_lon + i];
    }
    double at(int k, int j, int i) const {
        return v[std::size_t(k) * level_stride() + std::size_t(j) * n_lon + i];
    }

    /// Copy of one horizontal level.
    ScalarField2D level(int k) const;
    void set_level(int k, const ScalarField2D& s);

    bool same_shape(const Field3D& o) const {
        return K == o.K && n_lat == o.n_lat && n_lon == o.n_lon;
    }
};

/// Horizontal vector field on the shell grid.
struct VField3D {
    Field3D vth, vph;

    VField3D() = default;
    VField3D(int K, int n_lat, int n_lon) : vth(K, n_lat, n_lon), vph(K, n_lat, n_lon) {}
    VectorField2D level(int k) const {
        VectorField2D u;
        u.vth = vth.level(k);
        u.vph = vph.level(k);
        return u;
    }
    void set_level(int k, const VectorField2D& u) {
        vth.set_level(k, u.vth);
        vph.set_level(k, u.vph);
    }
};

// ---------------------------------------------------------------------------
// Column operators (applied independently in every column)
// ---------------------------------------------------------------------------

/// Centered first derivative in xi with Neumann top and Robin(alpha) surface
/// ghosts. Second-order accurate for profiles satisfying the closures.
Field3D d1_xi(const Field3D& f, double alpha_surface);

/// Second derivative in xi with the same ghost closures.
Field3D d2_xi(const Field3D& f, double alpha_surface);

/// Upper integral (Sf)(xi_k) ~ int_{xi_k}^1 f dxi', midpoint-compatible rule
///   (Sf)_k = h (f_k / 2 + sum_{k' > k} f_{k'}).
/// Exact on columns constant in xi, and satisfies the summation-by-parts
/// identity  h<a, Sb> + h<b, Sa> = (h sum a)(h sum b)  exactly.
Field3D upper_integral(const Field3D& f);

/// Full vertical integral int_0^1 f dxi = h sum_k f_k (midpoint rule); this
/// also equals the vertical mean because the interval has unit length.
ScalarField2D vertical_integral(const Field3D& f);

/// Subtracts the vertical mean from every column.
Field3D remove_vertical_mean(const Field3D& f);

/// y += a * x (shapes must match).
void axpy(double a, const Field3D& x, Field3D& y);
void axpy(double a, const VField3D& x, VField3D& y);
/// x *= a.
void scale(Field3D& x, double a);
void scale(VField3D& x, double a);

// ---------------------------------------------------------------------------
// Tridiagonal vertical operators
// ---------------------------------------------------------------------------

/// Symmetric tridiagonal matrix (lower/upper of size n-1, diag of size n).
struct Tridiag {
    std::vector<double> lower, diag, upper;
    int n() const { return static_cast<int>(diag.size()); }
};

/// Matrix of -d^2/dxi^2 on the K-level grid with Neumann top and
/// Robin(alpha) surface closures. Symmetric; positive definite for
/// alpha > 0, positive semi-definite (constants in the kernel) for alpha = 0.
Tridiag neg_d2_matrix(int K, double alpha_surface);

/// A x for a tridiagonal A.
template <typename Scalar>
std::vector<Scalar> tridiag_apply(const Tridiag& A, const std::vector<Scalar>& x) {
    const int n = A.n();
    std::vector<Scalar> y(n);
    for (int i = 0; i < n; ++i) {
        Scalar s = A.diag[i] * x[i];
        if (i > 0) s += A.lower[i - 1] * x[i - 1];
        if (i + 1 < n) s += A.upper[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

/// Solves A x = rhs by the Thomas algorithm (no pivoting; intended for the
/// diagonally dominant matrices produced by implicit diffusion).
template <typename Scalar>
std::vector<Scalar> thomas_solve(const Tridiag& A, std::vector<Scalar> rhs) {
    const int n = A.n();
    std::vector<double> c(n > 0 ? n - 1 : 0);
    double piv = A.diag[0];
    rhs[0] /= piv;
    for (int i = 1; i < n; ++i) {
        c[i - 1] = A.upper[i - 1] / piv;
        piv = A.diag[i] - A.lower[i - 1] * c[i - 1];
        rhs[i] = (rhs[i] - A.lower[i - 1] * rhs[i - 1]) / piv;
    }
    for (int i = n - 2; i >= 0; --i) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

} // namespace mpe

#endif
