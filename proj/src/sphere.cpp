#include "mpe/sphere.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mpe {

SphereGrid make_grid(int L, int n_lat, int n_lon) {
    if (L < 1) throw std::invalid_argument("make_grid: truncation L must be >= 1");
    if (n_lat < L + 1)
        throw std::invalid_argument("make_grid: n_lat = " + std::to_string(n_lat) +
                                    " violates n_lat >= L+1 = " + std::to_string(L + 1));
    if (n_lon < 2 * L + 1)
        throw std::invalid_argument("make_grid: n_lon = " + std::to_string(n_lon) +
                                    " violates n_lon >= 2L+1 = " + std::to_string(2 * L + 1));
    SphereGrid g;
    g.L = L;
    g.n_lat = n_lat;
    g.n_lon = n_lon;
    GaussLegendre gl = gauss_legendre(n_lat);
    g.cos_theta = gl.x;
    g.gl_weight = gl.w;
    g.theta.resize(n_lat);
    g.sin_theta.resize(n_lat);
    for (int j = 0; j < n_lat; ++j) {
        g.theta[j] = std::acos(gl.x[j]);
        g.sin_theta[j] = std::sqrt((1.0 - gl.x[j]) * (1.0 + gl.x[j]));
    }
    g.phi.resize(n_lon);
    for (int i = 0; i < n_lon; ++i) g.phi[i] = 2.0 * M_PI * i / n_lon;
    return g;
}

// ---------------------------------------------------------------------------
// SphereTransform
// ---------------------------------------------------------------------------

SphereTransform::SphereTransform(const SphereGrid& grid)
    : grid_(grid), table_(grid.L + 1, grid.cos_theta) {
    // Trig tables for the partial DFT, one extra order so degree L+1
    // intermediates (Cartesian components of degree-L vector fields) can be
    // analyzed where the grid supports it.
    const int mmax = std::min(grid_.L + 1, grid_.n_lon / 2);
    cos_m_phi_.resize(std::size_t(mmax + 1) * grid_.n_lon);
    sin_m_phi_.resize(std::size_t(mmax + 1) * grid_.n_lon);
    for (int m = 0; m <= mmax; ++m)
        for (int i = 0; i < grid_.n_lon; ++i) {
            cos_m_phi_[std::size_t(m) * grid_.n_lon + i] = std::cos(m * grid_.phi[i]);
            sin_m_phi_[std::size_t(m) * grid_.n_lon + i] = std::sin(m * grid_.phi[i]);
        }
}

namespace {

void check_shape(const SphereGrid& g, const ScalarField2D& f, const char* what) {
    if (f.n_lat != g.n_lat || f.n_lon != g.n_lon)
        throw std::invalid_argument(std::string(what) + ": field shape does not match grid");
}

} // namespace

void SphereTransform::fourier_analyze(const ScalarField2D& f,
                                      std::vector<std::complex<long double>>& F) const {
    // F_m(j) = (2 pi / n_lon) sum_i f(j, i) exp(-i m phi_i), m = 0..mmax.
    const int n_lat = grid_.n_lat, n_lon = grid_.n_lon;
    const int mmax = static_cast<int>(cos_m_phi_.size() / n_lon) - 1;
    const long double scale = 2.0L * std::acos(-1.0L) / n_lon;
    F.assign(std::size_t(mmax + 1) * n_lat, {0.0L, 0.0L});
    for (int m = 0; m <= mmax; ++m) {
        const double* cm = &cos_m_phi_[std::size_t(m) * n_lon];
        const double* sm = &sin_m_phi_[std::size_t(m) * n_lon];
        for (int j = 0; j < n_lat; ++j) {
            const double* row = &f.v[std::size_t(j) * n_lon];
            long double re = 0.0L, im = 0.0L;
            for (int i = 0; i < n_lon; ++i) {
                re += (long double)row[i] * cm[i];
                im -= (long double)row[i] * sm[i];
            }
            F[std::size_t(m) * n_lat + j] = {re * scale, im * scale};
        }
    }
}

void SphereTransform::fourier_synthesize(const std::vector<std::complex<long double>>& F,
                                         ScalarField2D& f) const {
    // f(j, i) = Re F_0(j) + 2 sum_{m>=1} [Re F_m cos - Im F_m sin], where here
    // F carries plain Fourier coefficients (no 2 pi / n_lon factor).
    const int n_lat = grid_.n_lat, n_lon = grid_.n_lon;
    const int mmax = static_cast<int>(F.size() / n_lat) - 1;
    f = ScalarField2D(n_lat, n_lon);
    std::vector<long double> acc(n_lon);
    for (int j = 0; j < n_lat; ++j) {
        for (int i = 0; i < n_lon; ++i) acc[i] = F[j].real();
        for (int m = 1; m <= mmax; ++m) {
            const std::complex<long double> c = F[std::size_t(m) * n_lat + j];
            const double* cm = &cos_m_phi_[std::size_t(m) * n_lon];
            const double* sm = &sin_m_phi_[std::size_t(m) * n_lon];
            for (int i = 0; i < n_lon; ++i)
                acc[i] += 2.0L * (c.real() * cm[i] - c.imag() * sm[i]);
        }
        double* row = &f.v[std::size_t(j) * n_lon];
        for (int i = 0; i < n_lon; ++i) row[i] = double(acc[i]);
    }
}

ScalarCoeffs SphereTransform::analyze(const ScalarField2D& f) const {
    return analyze_to(f, grid_.L);
}

ScalarCoeffs SphereTransform::analyze_to(const ScalarField2D& f, int Lout) const {
    check_shape(grid_, f, "analyze");
    if (Lout < 0 || Lout > grid_.L + 1)
        throw std::invalid_argument("analyze_to: degree must be in [0, L+1]");
    const int n_lat = grid_.n_lat;
    const int mmax = static_cast<int>(cos_m_phi_.size() / grid_.n_lon) - 1;
    std::vector<std::complex<long double>> F;
    fourier_analyze(f, F);
    ScalarCoeffs a(Lout);
    for (int m = 0; m <= std::min(Lout, mmax); ++m) {
        const std::complex<long double>* Fm = &F[std::size_t(m) * n_lat];
        for (int l = m; l <= Lout; ++l) {
            const std::vector<long double>& p = table_.plm_row(l, m);
            long double ar = 0.0L, ai = 0.0L;
            for (int j = 0; j < n_lat; ++j) {
                const long double wp = grid_.gl_weight[j] * p[j];
                ar += wp * Fm[j].real();
                ai += wp * Fm[j].imag();
            }
            a.at(l, m) = {double(ar), double(ai)};
        }
    }
    return a;
}

ScalarField2D SphereTransform::synthesize(const ScalarCoeffs& a) const {
    const int n_lat = grid_.n_lat;
    const int mmax = static_cast<int>(cos_m_phi_.size() / grid_.n_lon) - 1;
    const int mtop = std::min(a.L, mmax);
    if (a.L > table_.lmax())
        throw std::invalid_argument("synthesize: coefficient degree exceeds table");
    std::vector<std::complex<long double>> F(std::size_t(mtop + 1) * n_lat, {0.0L, 0.0L});
    for (int m = 0; m <= mtop; ++m)
        for (int l = m; l <= a.L; ++l) {
            const std::vector<long double>& p = table_.plm_row(l, m);
            const std::complex<long double> c = a.at(l, m);
            for (int j = 0; j < n_lat; ++j)
                F[std::size_t(m) * n_lat + j] += c * p[j];
        }
    ScalarField2D f;
    fourier_synthesize(F, f);
    return f;
}

VectorField2D SphereTransform::synthesize_gradient(const ScalarCoeffs& a) const {
    const int n_lat = grid_.n_lat;
    const int mmax = static_cast<int>(cos_m_phi_.size() / grid_.n_lon) - 1;
    const int mtop = std::min(a.L, mmax);
    if (a.L > table_.lmax())
        throw std::invalid_argument("synthesize_gradient: coefficient degree exceeds table");
    std::vector<std::complex<long double>> Fth(std::size_t(mtop + 1) * n_lat, {0.0L, 0.0L});
    std::vector<std::complex<long double>> Fph(std::size_t(mtop + 1) * n_lat, {0.0L, 0.0L});
    for (int m = 0; m <= mtop; ++m)
        for (int l = std::max(m, 1); l <= a.L; ++l) {
            const std::vector<long double>& p = table_.plm_row(l, m);
            const std::vector<long double>& dp = table_.dplm_row(l, m);
            const std::complex<long double> c = a.at(l, m);
            const std::complex<long double> imc{-c.imag() * (long double)m,
                                                c.real() * (long double)m};
            for (int j = 0; j < n_lat; ++j) {
                Fth[std::size_t(m) * n_lat + j] += c * dp[j];
                Fph[std::size_t(m) * n_lat + j] += imc * (p[j] / grid_.sin_theta[j]);
            }
        }
    VectorField2D out;
    fourier_synthesize(Fth, out.vth);
    fourier_synthesize(Fph, out.vph);
    return out;
}

VectorCoeffs SphereTransform::analyze_vector(const VectorField2D& u) const {
    check_shape(grid_, u.vth, "analyze_vector");
    check_shape(grid_, u.vph, "analyze_vector");
    const int L = grid_.L;
    const int n_lat = grid_.n_lat;
    std::vector<std::complex<long double>> Fth, Fph;
    fourier_analyze(u.vth, Fth);
    fourier_analyze(u.vph, Fph);
    VectorCoeffs out(L);
    // div_lm = -<u, grad Y*_lm>, vort_lm = <u_perp, grad Y*_lm>; then divide
    // by -l(l+1) to get potentials. Exact for band-limited u because the
    // integrands collapse to polynomial combinations.
    for (int m = 0; m <= L; ++m) {
        const std::complex<long double>* uth = &Fth[std::size_t(m) * n_lat];
        const std::complex<long double>* uph = &Fph[std::size_t(m) * n_lat];
        for (int l = std::max(m, 1); l <= L; ++l) {
            const std::vector<long double>& p = table_.plm_row(l, m);
            const std::vector<long double>& dp = table_.dplm_row(l, m);
            long double dre = 0.0L, dim = 0.0L, vre = 0.0L, vim = 0.0L;
            for (int j = 0; j < n_lat; ++j) {
                const long double w = grid_.gl_weight[j];
                const long double pos = p[j] / grid_.sin_theta[j];
                const long double mth_re = -(long double)m * uth[j].imag();
                const long double mth_im = (long double)m * uth[j].real();
                const long double mph_re = -(long double)m * uph[j].imag();
                const long double mph_im = (long double)m * uph[j].real();
                dre += w * (-uth[j].real() * dp[j] + mph_re * pos);
                dim += w * (-uth[j].imag() * dp[j] + mph_im * pos);
                vre += w * (-uph[j].real() * dp[j] - mth_re * pos);
                vim += w * (-uph[j].imag() * dp[j] - mth_im * pos);
            }
            const long double ll1 = (long double)l * (l + 1);
            out.chi.at(l, m) = {double(-dre / ll1), double(-dim / ll1)};
            out.psi.at(l, m) = {double(-vre / ll1), double(-vim / ll1)};
        }
    }
    return out;
}

VectorField2D SphereTransform::synthesize_vector(const VectorCoeffs& u) const {
    const int L = u.L();
    const int n_lat = grid_.n_lat;
    const int mmax = static_cast<int>(cos_m_phi_.size() / grid_.n_lon) - 1;
    const int mtop = std::min(L, mmax);
    if (L > table_.lmax())
        throw std::invalid_argument("synthesize_vector: coefficient degree exceeds table");
    std::vector<std::complex<long double>> Fth(std::size_t(mtop + 1) * n_lat, {0.0L, 0.0L});
    std::vector<std::complex<long double>> Fph(std::size_t(mtop + 1) * n_lat, {0.0L, 0.0L});
    // v_theta = d_theta chi - (1/sin) d_phi psi, v_phi = (1/sin) d_phi chi
    //         + d_theta psi.
    for (int m = 0; m <= mtop; ++m)
        for (int l = std::max(m, 1); l <= L; ++l) {
            const std::vector<long double>& p = table_.plm_row(l, m);
            const std::vector<long double>& dp = table_.dplm_row(l, m);
            const std::complex<long double> cchi = u.chi.at(l, m);
            const std::complex<long double> cpsi = u.psi.at(l, m);
            const std::complex<long double> im_chi{-cchi.imag() * (long double)m,
                                                   cchi.real() * (long double)m};
            const std::complex<long double> im_psi{-cpsi.imag() * (long double)m,
                                                   cpsi.real() * (long double)m};
            for (int j = 0; j < n_lat; ++j) {
                const long double pos = p[j] / grid_.sin_theta[j];
                Fth[std::size_t(m) * n_lat + j] += cchi * dp[j] - im_psi * pos;
                Fph[std::size_t(m) * n_lat + j] += im_chi * pos + cpsi * dp[j];
            }
        }
    VectorField2D out;
    fourier_synthesize(Fth, out.vth);
    fourier_synthesize(Fph, out.vph);
    return out;
}

namespace {

ScalarCoeffs scaled_by_llp1(const ScalarCoeffs& a, double sign) {
    ScalarCoeffs out(a.L);
    for (int m = 0; m <= a.L; ++m)
        for (int l = std::max(m, 1); l <= a.L; ++l)
            out.at(l, m) = sign * double(l) * (l + 1) * a.at(l, m);
    return out;
}

} // namespace

ScalarField2D SphereTransform::synthesize_divergence(const VectorCoeffs& u) const {
    return synthesize(scaled_by_llp1(u.chi, -1.0));
}

ScalarField2D SphereTransform::synthesize_vorticity(const VectorCoeffs& u) const {
    return synthesize(scaled_by_llp1(u.psi, -1.0));
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

double sphere_integral(const SphereGrid& grid, const ScalarField2D& f) {
    check_shape(grid, f, "sphere_integral");
    long double s = 0.0L;
    for (int j = 0; j < grid.n_lat; ++j) {
        long double row = 0.0L;
        for (int i = 0; i < grid.n_lon; ++i) row += f.at(j, i);
        s += (long double)grid.quad_weight(j) * row;
    }
    return double(s);
}

double sphere_inner(const SphereGrid& grid, const ScalarField2D& a, const ScalarField2D& b) {
    check_shape(grid, a, "sphere_inner");
    check_shape(grid, b, "sphere_inner");
    long double s = 0.0L;
    for (int j = 0; j < grid.n_lat; ++j) {
        long double row = 0.0L;
        for (int i = 0; i < grid.n_lon; ++i) row += (long double)a.at(j, i) * b.at(j, i);
        s += (long double)grid.quad_weight(j) * row;
    }
    return double(s);
}

double sphere_inner(const SphereGrid& grid, const VectorField2D& a, const VectorField2D& b) {
    return sphere_inner(grid, a.vth, b.vth) + sphere_inner(grid, a.vph, b.vph);
}

VectorField2D grad(const SphereTransform& T, const ScalarField2D& h) {
    return T.synthesize_gradient(T.analyze(h));
}

ScalarField2D divergence(const SphereTransform& T, const VectorField2D& v) {
    return T.synthesize_divergence(T.analyze_vector(v));
}

ScalarField2D vorticity(const SphereTransform& T, const VectorField2D& v) {
    return T.synthesize_vorticity(T.analyze_vector(v));
}

ScalarField2D advect_scalar(const SphereTransform& T, const VectorField2D& v,
                            const ScalarField2D& h) {
    VectorField2D g = grad(T, h);
    ScalarField2D out(h.n_lat, h.n_lon);
    for (std::size_t n = 0; n < out.v.size(); ++n)
        out.v[n] = v.vth.v[n] * g.vth.v[n] + v.vph.v[n] * g.vph.v[n];
    // Project the quadratic product back to degree <= L (dealiasing).
    return T.synthesize(T.analyze(out));
}

VectorField2D advect_vector(const SphereTransform& T, const VectorField2D& v,
                            const VectorField2D& u) {
    const SphereGrid& g = T.grid();
    check_shape(g, u.vth, "advect_vector");
    check_shape(g, v.vth, "advect_vector");
    // Cartesian components of u are smooth scalars on the sphere (degree
    // <= L+1 for band-limited u), so their advective derivatives can be taken
    // spectrally without frame singularities. The covariant derivative is the
    // tangential part of the componentwise derivative; reading theta/phi
    // components back discards the normal part automatically. Pointwise this
    // reproduces grad_v u including the +-cot(theta) terms.
    ScalarField2D ux(g.n_lat, g.n_lon), uy(g.n_lat, g.n_lon), uz(g.n_lat, g.n_lon);
    for (int j = 0; j < g.n_lat; ++j) {
        const double ct = g.cos_theta[j], st = g.sin_theta[j];
        for (int i = 0; i < g.n_lon; ++i) {
            const double cp = std::cos(g.phi[i]), sp = std::sin(g.phi[i]);
            const double uth = u.vth.at(j, i), uph = u.vph.at(j, i);
            ux.at(j, i) = uth * ct * cp - uph * sp;
            uy.at(j, i) = uth * ct * sp + uph * cp;
            uz.at(j, i) = -uth * st;
        }
    }
    auto advect_component = [&](const ScalarField2D& s) {
        // One extra degree: Cartesian components of a degree-L tangent field
        // are band-limited to L+1.
        VectorField2D gs = T.synthesize_gradient(T.analyze_to(s, T.grid().L + 1));
        ScalarField2D out(g.n_lat, g.n_lon);
        for (std::size_t n = 0; n < out.v.size(); ++n)
            out.v[n] = v.vth.v[n] * gs.vth.v[n] + v.vph.v[n] * gs.vph.v[n];
        return out;
    };
    ScalarField2D ax = advect_component(ux);
    ScalarField2D ay = advect_component(uy);
    ScalarField2D az = advect_component(uz);
    VectorField2D out(g.n_lat, g.n_lon);
    for (int j = 0; j < g.n_lat; ++j) {
        const double ct = g.cos_theta[j], st = g.sin_theta[j];
        for (int i = 0; i < g.n_lon; ++i) {
            const double cp = std::cos(g.phi[i]), sp = std::sin(g.phi[i]);
            out.vth.at(j, i) = ax.at(j, i) * ct * cp + ay.at(j, i) * ct * sp - az.at(j, i) * st;
            out.vph.at(j, i) = -ax.at(j, i) * sp + ay.at(j, i) * cp;
        }
    }
    // Dealias the quadratic product.
    return T.synthesize_vector(T.analyze_vector(out));
}

ScalarField2D lap_scalar(const SphereTransform& T, const ScalarField2D& h) {
    ScalarCoeffs a = T.analyze(h);
    return T.synthesize(scaled_by_llp1(a, -1.0));
}

VectorField2D lap_vector(const SphereTransform& T, const VectorField2D& v) {
    VectorCoeffs u = T.analyze_vector(v);
    VectorCoeffs out(u.L());
    out.psi = scaled_by_llp1(u.psi, -1.0);
    out.chi = scaled_by_llp1(u.chi, -1.0);
    return T.synthesize_vector(out);
}

ScalarField2D poisson_solve(const SphereTransform& T, const ScalarField2D& rhs,
                            double /*mean_tol*/) {
    ScalarCoeffs a = T.analyze(rhs);
    ScalarCoeffs sol(a.L);
    sol.at(0, 0) = 0.0; // mean-zero gauge; any rhs mean is projected out
    for (int m = 0; m <= a.L; ++m)
        for (int l = std::max(m, 1); l <= a.L; ++l)
            sol.at(l, m) = -a.at(l, m) / (double(l) * (l + 1));
    return T.synthesize(sol);
}

VectorField2D perp(const VectorField2D& v) {
    VectorField2D out(v.n_lat(), v.n_lon());
    for (std::size_t n = 0; n < v.vth.v.size(); ++n) {
        out.vth.v[n] = -v.vph.v[n];
        out.vph.v[n] = v.vth.v[n];
    }
    return out;
}

} // namespace mpe
