/**
 * @file test_tendency.cpp
 * @brief Closed-form flows whose full right-hand side can be written out by
 *        hand, compared pointwise against Model::tendency.
 *
 * Both cases use separable fields profile(xi) * shape(theta, phi) with shapes
 * of spherical-harmonic degree <= 2, so every horizontal operator (advection,
 * divergence, gradient, Laplacian) has an exact closed form and no spectral
 * truncation occurs anywhere in the evaluation. The vertical rules (one-sided
 * top row, centered interior, Robin surface ghost, half-cell upper integral,
 * flat column mean in the projection) are restated locally on the profiles,
 * so the comparison checks the assembly of the full right-hand side: signs,
 * metric terms, coefficient profiles, and the column projection.
 */
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "mpe/column.hpp"
#include "mpe/dynamics.hpp"
#include "mpe/sphere.hpp"

using namespace mpe;

namespace {

constexpr double k_pi = 3.14159265358979323846;

/// Centered first derivative on cell centers: mirror ghost at the top,
/// Robin ghost f_K = r f_{K-1}, r = (1 - alpha h/2)/(1 + alpha h/2), at the
/// surface.
std::vector<double> d1_col(const std::vector<double>& f, double alpha, double h) {
    const int K = int(f.size());
    const double r = (1.0 - 0.5 * alpha * h) / (1.0 + 0.5 * alpha * h);
    std::vector<double> out(f.size());
    out[0] = (f[1] - f[0]) / (2.0 * h);
    for (int k = 1; k < K - 1; ++k) out[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    out[K - 1] = (r * f[K - 1] - f[K - 2]) / (2.0 * h);
    return out;
}

/// Second derivative with the same ghost closures.
std::vector<double> d2_col(const std::vector<double>& f, double alpha, double h) {
    const int K = int(f.size());
    const double r = (1.0 - 0.5 * alpha * h) / (1.0 + 0.5 * alpha * h);
    const double ih2 = 1.0 / (h * h);
    std::vector<double> out(f.size());
    out[0] = (f[1] - f[0]) * ih2;
    for (int k = 1; k < K - 1; ++k) out[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) * ih2;
    out[K - 1] = ((r - 2.0) * f[K - 1] + f[K - 2]) * ih2;
    return out;
}

/// Integral from xi_k to 1 with the half-cell rule:
/// G_k = h (f_k / 2 + sum_{k' > k} f_{k'}).
std::vector<double> upint_col(const std::vector<double>& f, double h) {
    const int K = int(f.size());
    std::vector<double> out(f.size());
    double below = 0.0;
    for (int k = K - 1; k >= 0; --k) {
        out[k] = h * (0.5 * f[k] + below);
        below += f[k];
    }
    return out;
}

/// Subtracts the flat column mean (the discrete constraint projection acts
/// on each gradient-mode coefficient exactly like this).
std::vector<double> minus_mean(std::vector<double> f) {
    double s = 0.0;
    for (double x : f) s += x;
    s /= double(f.size());
    for (double& x : f) x -= s;
    return f;
}

double max_abs3(const Field3D& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_diff3(const Field3D& a, const Field3D& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.v.size(); ++n) m = std::max(m, std::abs(a.v[n] - b.v[n]));
    return m;
}

} // namespace

TEST_CASE("solid-body rotation with a tilted temperature reproduces the hand-written tendency") {
    // v = a(xi) sin(theta) e_phi (rotation about the axis, purely rotational),
    // T = b(xi) sin(theta) cos(theta) cos(phi), q = 0. The flow is
    // divergence-free, so w = 0 and only horizontal transport acts.
    const int L = 4, n_lat = 12, n_lon = 24, K = 10;
    ModelParams prm;
    prm.rossby = 1.7;
    prm.b = 1.2;
    prm.P = 1.5;
    prm.p0 = 0.2;
    prm.alpha_T = 0.9;
    prm.beta_q = 1.4;
    prm.nu_v = 0.7;
    prm.mu_v = 1.3;
    prm.nu_T = 0.9;
    prm.mu_T = 0.6;
    prm.nu_q = 1.1;
    prm.mu_q = 0.8;
    SphereGrid sg = make_grid(L, n_lat, n_lon);
    VerticalGrid vg = make_vertical_grid(K);
    Model model(prm, sg, vg, make_forcing("none", sg, vg, 0.0));
    const double h = vg.h;

    std::vector<double> a(K), b(K), cp(K);
    for (int k = 0; k < K; ++k) {
        a[k] = 1.0 + 0.5 * std::sin(k_pi * vg.xi[k]);
        b[k] = 0.8 + 0.3 * std::cos(k_pi * vg.xi[k]);
        cp[k] = prm.b * prm.P / ((prm.P - prm.p0) * vg.xi[k] + prm.p0);
    }

    State U(K, n_lat, n_lon);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < n_lat; ++j) {
            const double st = sg.sin_theta[j], ct = sg.cos_theta[j];
            for (int i = 0; i < n_lon; ++i) {
                U.v.vph.at(k, j, i) = a[k] * st;
                U.T.at(k, j, i) = b[k] * st * ct * std::cos(sg.phi[i]);
            }
        }

    Tendency rhs = model.tendency(U);

    // Hand-derived pieces, written per vertical profile:
    //  - grad_v v     = -a^2 sin cos e_theta       (rigid-rotation acceleration)
    //  - Coriolis     = +(2 a / R0) sin cos e_theta
    //  - pressure     = -Gamma_k grad[sin cos cos(phi)],
    //                   Gamma = upper integral of (bP/p) b_T
    //  - Laplacian    = -2 v (degree-1 rotational mode)
    // The e_theta pieces are gradient modes, so the projection removes the
    // flat column mean of their profiles; the e_phi pieces are rotational and
    // pass through untouched.
    std::vector<double> cpress(K), grad_profile(K);
    {
        std::vector<double> cb(K);
        for (int k = 0; k < K; ++k) cb[k] = cp[k] * b[k];
        cpress = minus_mean(upint_col(cb, h));
        std::vector<double> ga(K);
        for (int k = 0; k < K; ++k) ga[k] = a[k] * a[k] + 2.0 * a[k] / prm.rossby;
        grad_profile = minus_mean(ga);
    }
    const std::vector<double> d2a = d2_col(a, 0.0, h);
    const std::vector<double> d2b = d2_col(b, prm.alpha_T, h);

    Field3D evth(K, n_lat, n_lon), evph(K, n_lat, n_lon), eT(K, n_lat, n_lon);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < n_lat; ++j) {
            const double st = sg.sin_theta[j], ct = sg.cos_theta[j];
            const double c2 = ct * ct - st * st; // cos(2 theta)
            for (int i = 0; i < n_lon; ++i) {
                const double cphi = std::cos(sg.phi[i]), sphi = std::sin(sg.phi[i]);
                evth.at(k, j, i) = grad_profile[k] * st * ct - cpress[k] * c2 * cphi;
                evph.at(k, j, i) = cpress[k] * ct * sphi +
                                   (-2.0 * prm.nu_v * a[k] + prm.mu_v * d2a[k]) * st;
                eT.at(k, j, i) = a[k] * b[k] * st * ct * sphi +
                                 (-6.0 * prm.nu_T * b[k] + prm.mu_T * d2b[k]) * st * ct * cphi;
            }
        }

    const double sv = std::max(max_abs3(evth), max_abs3(evph));
    CHECK(max_abs_diff3(rhs.dv.vth, evth) <= 1e-12 * sv);
    CHECK(max_abs_diff3(rhs.dv.vph, evph) <= 1e-12 * sv);
    CHECK(max_abs_diff3(rhs.dT, eT) <= 1e-12 * max_abs3(eT));
    CHECK(max_abs3(rhs.dq) == 0.0);
    CHECK(model.constraint_residual(U.v) <= 1e-14);
}

TEST_CASE("an overturning column with moist buoyancy reproduces the hand-written tendency") {
    // v = d(xi) grad cos(theta) (poleward / equatorward overturning),
    // T = b(xi) cos(theta), q = e(xi) cos(theta). The flow is divergent, so
    // the vertical velocity, the vertical transport, the heating, and the
    // moisture coupling in the pressure integral are all active.
    const int L = 4, n_lat = 12, n_lon = 24, K = 12;
    ModelParams prm;
    prm.rossby = 0.8;
    prm.b = 1.1;
    prm.P = 1.4;
    prm.p0 = 0.15;
    prm.a_moist = 0.618;
    prm.alpha_T = 1.2;
    prm.beta_q = 0.7;
    prm.nu_v = 0.6;
    prm.mu_v = 0.9;
    prm.nu_T = 1.2;
    prm.mu_T = 0.5;
    prm.nu_q = 0.4;
    prm.mu_q = 1.1;
    SphereGrid sg = make_grid(L, n_lat, n_lon);
    VerticalGrid vg = make_vertical_grid(K);
    Model model(prm, sg, vg, make_forcing("none", sg, vg, 0.0));
    const double h = vg.h;

    // d is antisymmetric about mid-depth by construction, so the flat column
    // sum vanishes exactly in floating point and the state satisfies the
    // divergence constraint.
    std::vector<double> d(K), b(K), e(K), cp(K);
    for (int k = 0; k < K / 2; ++k) {
        const double t = std::cos(k_pi * vg.xi[k]);
        d[k] = t;
        d[K - 1 - k] = -t;
    }
    for (int k = 0; k < K; ++k) {
        b[k] = 0.7 + 0.4 * std::sin(0.5 * k_pi * vg.xi[k]);
        e[k] = 0.3 + 0.2 * std::cos(0.5 * k_pi * vg.xi[k]);
        cp[k] = prm.b * prm.P / ((prm.P - prm.p0) * vg.xi[k] + prm.p0);
    }

    State U(K, n_lat, n_lon);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < n_lat; ++j) {
            const double st = sg.sin_theta[j], ct = sg.cos_theta[j];
            for (int i = 0; i < n_lon; ++i) {
                U.v.vth.at(k, j, i) = -d[k] * st; // d * grad cos(theta)
                U.T.at(k, j, i) = b[k] * ct;
                U.q.at(k, j, i) = e[k] * ct;
            }
        }
    CHECK(model.constraint_residual(U.v) <= 1e-14);

    Tendency rhs = model.tendency(U);

    // div v = -2 d cos(theta); w = -2 D cos(theta) with D the half-cell upper
    // integral of d. Hand-derived velocity pieces, by horizontal shape:
    //  sin cos e_theta (gradient): -d^2 - 2 D d1(d) + 2 Gamma2
    //  sin     e_theta (gradient): Gamma1 + 2 nu_v d - mu_v d2(d)
    //  sin cos e_phi  (rotational): 2 d / R0
    // with Gamma1 = upint(cp * b) and Gamma2 = upint(cp * a_moist * b * e)
    // from grad[(1 + a q) T] integrated in the vertical.
    const std::vector<double> D = upint_col(d, h);
    const std::vector<double> d1d = d1_col(d, 0.0, h);
    const std::vector<double> d2d = d2_col(d, 0.0, h);
    const std::vector<double> d1b = d1_col(b, prm.alpha_T, h);
    const std::vector<double> d2b = d2_col(b, prm.alpha_T, h);
    const std::vector<double> d1e = d1_col(e, prm.beta_q, h);
    const std::vector<double> d2e = d2_col(e, prm.beta_q, h);
    std::vector<double> g1(K), g2(K);
    for (int k = 0; k < K; ++k) {
        g1[k] = cp[k] * b[k];
        g2[k] = cp[k] * prm.a_moist * b[k] * e[k];
    }
    const std::vector<double> gam1 = upint_col(g1, h);
    const std::vector<double> gam2 = upint_col(g2, h);
    std::vector<double> f2(K), f1(K);
    for (int k = 0; k < K; ++k) {
        f2[k] = -d[k] * d[k] - 2.0 * D[k] * d1d[k] + 2.0 * gam2[k];
        f1[k] = gam1[k] + 2.0 * prm.nu_v * d[k] - prm.mu_v * d2d[k];
    }
    f2 = minus_mean(f2);
    f1 = minus_mean(f1);

    Field3D evth(K, n_lat, n_lon), evph(K, n_lat, n_lon), eT(K, n_lat, n_lon),
        eq(K, n_lat, n_lon);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < n_lat; ++j) {
            const double st = sg.sin_theta[j], ct = sg.cos_theta[j];
            for (int i = 0; i < n_lon; ++i) {
                evth.at(k, j, i) = f2[k] * st * ct + f1[k] * st;
                evph.at(k, j, i) = (2.0 * d[k] / prm.rossby) * st * ct;
                eT.at(k, j, i) = -d[k] * b[k] * st * st + 2.0 * D[k] * d1b[k] * ct * ct -
                                 2.0 * cp[k] * D[k] * (ct + prm.a_moist * e[k] * ct * ct) +
                                 (-2.0 * prm.nu_T * b[k] + prm.mu_T * d2b[k]) * ct;
                eq.at(k, j, i) = -d[k] * e[k] * st * st + 2.0 * D[k] * d1e[k] * ct * ct +
                                 (-2.0 * prm.nu_q * e[k] + prm.mu_q * d2e[k]) * ct;
            }
        }

    const double sv = std::max(max_abs3(evth), max_abs3(evph));
    CHECK(max_abs_diff3(rhs.dv.vth, evth) <= 1e-12 * sv);
    CHECK(max_abs_diff3(rhs.dv.vph, evph) <= 1e-12 * sv);
    CHECK(max_abs_diff3(rhs.dT, eT) <= 1e-12 * max_abs3(eT));
    CHECK(max_abs_diff3(rhs.dq, eq) <= 1e-12 * max_abs3(eq));
}
