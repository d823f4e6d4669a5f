/**
 * @file sphere.hpp
 * @brief Spherical-harmonic transform grid on Gaussian latitudes and the
 *        horizontal differential operators built on it.
 *
 * Scalars are expanded in orthonormal spherical harmonics up to degree L.
 * Tangent vector fields are carried on the grid as colatitude/longitude
 * components (v_theta, v_phi) and spectrally as streamfunction / velocity
 * potential pairs (psi, chi) with
 *     v = grad(chi) + n x grad(psi),
 * so divergence and vorticity are diagonal: div v = Lap chi, vort v = Lap psi,
 * and the vector Laplacian acts as -l(l+1) on both potentials. The grid has
 * no pole points; all component arithmetic happens at interior nodes.
 */
#ifndef MPE_SPHERE_HPP
#define MPE_SPHERE_HPP

#include <complex>
#include <memory>
#include <vector>

#include "mpe/legendre.hpp"

namespace mpe {

// ---------------------------------------------------------------------------
// Grid and field containers
// ---------------------------------------------------------------------------

/// Gaussian-latitude transform grid. Latitudes are the Gauss-Legendre nodes
/// in x = cos(theta) (north to south), longitudes are uniform starting at 0.
/// quad_weight(j) * (value at node) summed over all nodes integrates exactly
/// over the sphere for band-limited integrands; the weights sum to 4*pi.
struct SphereGrid {
    int L = 0;
    int n_lat = 0;
    int n_lon = 0;
    std::vector<double> theta;      ///< colatitude of each ring
    std::vector<double> cos_theta;  ///< Gauss nodes x_j, descending
    std::vector<double> sin_theta;
    std::vector<double> gl_weight;  ///< Gauss-Legendre weights, sum = 2
    std::vector<double> phi;        ///< longitudes, phi_i = 2 pi i / n_lon

    double quad_weight(int j) const { return gl_weight[j] * (2.0 * M_PI / n_lon); }
    double lon_spacing() const { return 2.0 * M_PI / n_lon; }
    bool same_shape(const SphereGrid& o) const {
        return L == o.L && n_lat == o.n_lat && n_lon == o.n_lon;
    }
};

/// Validates the transform sizing rules (n_lat >= L+1, n_lon >= 2L+1) and
/// builds the grid. Quadratic-product dealiasing additionally wants
/// n_lon >= 3L+1, n_lat >= ceil((3L+1)/2); callers pick sizes accordingly.
SphereGrid make_grid(int L, int n_lat, int n_lon);

/// Scalar samples on a SphereGrid, row-major (latitude ring major).
struct ScalarField2D {
    int n_lat = 0, n_lon = 0;
    std::vector<double> v;

    ScalarField2D() = default;
    ScalarField2D(int nlat, int nlon) : n_lat(nlat), n_lon(nlon), v(std::size_t(nlat) * nlon, 0.0) {}
    double& at(int j, int i) { return v[std::size_t(j) * n_lon + i]; }
    double at(int j, int i) const { return v[std::size_t(j) * n_lon + i]; }
};

/// Tangent vector samples: colatitude component vth, longitude component vph.
struct VectorField2D {
    ScalarField2D vth, vph;

    VectorField2D() = default;
    VectorField2D(int nlat, int nlon) : vth(nlat, nlon), vph(nlat, nlon) {}
    int n_lat() const { return vth.n_lat; }
    int n_lon() const { return vth.n_lon; }
};

// ---------------------------------------------------------------------------
// Spectral coefficients
// ---------------------------------------------------------------------------

/// Coefficients a_{l,m} for m >= 0; the m < 0 half is implied by conjugate
/// symmetry, so synthesized fields are real by construction.
struct ScalarCoeffs {
    int L = 0;
    std::vector<std::complex<double>> c;

    ScalarCoeffs() = default;
    explicit ScalarCoeffs(int Lmax)
        : L(Lmax), c(std::size_t(Lmax + 1) * (Lmax + 2) / 2, {0.0, 0.0}) {}
    std::size_t idx(int l, int m) const {
        return std::size_t(m) * (L + 1) - std::size_t(m) * (m - 1) / 2 + std::size_t(l - m);
    }
    std::complex<double>& at(int l, int m) { return c[idx(l, m)]; }
    std::complex<double> at(int l, int m) const { return c[idx(l, m)]; }
};

/// Vector potentials per (l, m), l >= 1 (the l = 0 slots stay zero).
struct VectorCoeffs {
    ScalarCoeffs psi; ///< streamfunction (rotational part)
    ScalarCoeffs chi; ///< velocity potential (divergent part)

    VectorCoeffs() = default;
    explicit VectorCoeffs(int Lmax) : psi(Lmax), chi(Lmax) {}
    int L() const { return psi.L; }
};

// ---------------------------------------------------------------------------
// Transform engine
// ---------------------------------------------------------------------------

/**
 * Precomputed Legendre and trigonometric tables for one grid shape.
 * Transforms are exact (to round-off) for fields band-limited to degree L;
 * analysis of grid products performs the truncation that implements
 * dealiasing. All methods are const and safe to call concurrently.
 */
class SphereTransform {
public:
    explicit SphereTransform(const SphereGrid& grid);

    const SphereGrid& grid() const { return grid_; }

    ScalarCoeffs analyze(const ScalarField2D& f) const;
    /// Analysis to a degree other than grid.L (at most L+1); used internally
    /// where intermediates carry one degree more than the state truncation.
    ScalarCoeffs analyze_to(const ScalarField2D& f, int Lout) const;
    ScalarField2D synthesize(const ScalarCoeffs& a) const;

    /// grad a = (d_theta, (1/sin theta) d_phi) of the spectral interpolant.
    VectorField2D synthesize_gradient(const ScalarCoeffs& a) const;

    /// Projects grid velocities onto (psi, chi) via the adjoint relations for
    /// vorticity and divergence; exact for fields from degree-<=L potentials.
    VectorCoeffs analyze_vector(const VectorField2D& u) const;
    VectorField2D synthesize_vector(const VectorCoeffs& u) const;

    ScalarField2D synthesize_divergence(const VectorCoeffs& u) const; ///< Lap chi
    ScalarField2D synthesize_vorticity(const VectorCoeffs& u) const;  ///< Lap psi

private:
    // Partial DFT helpers: rows of Fourier coefficients per ring, m = 0..L,
    // scaled so F_m(j) approximates the integral over phi.
    void fourier_analyze(const ScalarField2D& f,
                         std::vector<std::complex<long double>>& F) const;
    void fourier_synthesize(const std::vector<std::complex<long double>>& F,
                            ScalarField2D& f) const;

    SphereGrid grid_;
    LegendreTable table_;
    std::vector<double> cos_m_phi_; ///< [(m * n_lon) + i]
    std::vector<double> sin_m_phi_;
};

// ---------------------------------------------------------------------------
// Horizontal operators
// ---------------------------------------------------------------------------

/// Quadrature integral of a scalar field over the sphere.
double sphere_integral(const SphereGrid& grid, const ScalarField2D& f);

/// Quadrature inner products.
double sphere_inner(const SphereGrid& grid, const ScalarField2D& a, const ScalarField2D& b);
double sphere_inner(const SphereGrid& grid, const VectorField2D& a, const VectorField2D& b);

VectorField2D grad(const SphereTransform& T, const ScalarField2D& h);
ScalarField2D divergence(const SphereTransform& T, const VectorField2D& v);
ScalarField2D vorticity(const SphereTransform& T, const VectorField2D& v);

/// v . grad h (dealiased product: gradient is spectral, product pointwise).
ScalarField2D advect_scalar(const SphereTransform& T, const VectorField2D& v,
                            const ScalarField2D& h);

/// Covariant advection (grad_v u), including the +-cot(theta) metric terms.
/// Computed by advecting the Cartesian components of u and reading the
/// tangential part back in the local frame, which is pointwise identical to
/// the coordinate formula and stays smooth through the pole caps.
VectorField2D advect_vector(const SphereTransform& T, const VectorField2D& v,
                            const VectorField2D& u);

/// Laplace-Beltrami operator of a scalar (spectral multiplication).
ScalarField2D lap_scalar(const SphereTransform& T, const ScalarField2D& h);

/// Hodge-de Rham vector Laplacian: -l(l+1) on both potentials. Matches the
/// component formula with the -v/sin^2 and cross -2 cos/sin^2 d_phi terms.
VectorField2D lap_vector(const SphereTransform& T, const VectorField2D& v);

/// Solves Lap u = rhs with mean-zero gauge. The rhs mean (relative to its
/// L2 size) must vanish to tolerance; the l = 0 mode is dropped.
ScalarField2D poisson_solve(const SphereTransform& T, const ScalarField2D& rhs,
                            double mean_tol = 1e-10);

/// Pointwise perpendicular: v_perp = (-v_phi, v_theta) = n x v.
VectorField2D perp(const VectorField2D& v);

} // namespace mpe

#endif
