/**
 * @file test_dynamics.cpp
 * @brief Tendency and diagnostic-relation checks: term-switch linearity,
 *        exact energy cancellations, the column constraint, manufactured
 *        vertical velocity, and reproducible random states.
 */
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "mpe/dynamics.hpp"

using namespace mpe;

namespace {

Model make_model(ModelParams p, int L = 10, int n_lat = 18, int n_lon = 36, int K = 9,
                 const std::string& forcing = "steady", double famp = 0.5) {
    SphereGrid sg = make_grid(L, n_lat, n_lon);
    VerticalGrid vg = make_vertical_grid(K);
    return Model(p, sg, vg, make_forcing(forcing, sg, vg, famp));
}

// Volume inner products over the shell (uniform vertical weight h).
double vol_inner(const Model& m, const Field3D& a, const Field3D& b) {
    long double s = 0.0L;
    for (int k = 0; k < m.vgrid().K; ++k)
        s += sphere_inner(m.sgrid(), a.level(k), b.level(k));
    return double(s * m.vgrid().h);
}

double vol_inner(const Model& m, const VField3D& a, const VField3D& b) {
    return vol_inner(m, a.vth, b.vth) + vol_inner(m, a.vph, b.vph);
}

double max_abs(const Field3D& f) {
    double r = 0.0;
    for (double x : f.v) r = std::max(r, std::abs(x));
    return r;
}

double max_abs_diff(const Field3D& a, const Field3D& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) r = std::max(r, std::abs(a.v[i] - b.v[i]));
    return r;
}

} // namespace

TEST_CASE("ModelParams::validate flags bad values") {
    ModelParams p;
    p.nu_T = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.p0 = 2.0; // >= P
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("make_forcing: presets, zero mean, band limitation") {
    SphereGrid sg = make_grid(10, 18, 36);
    VerticalGrid vg = make_vertical_grid(5);
    CHECK_THROWS_AS(make_forcing("bogus", sg, vg, 1.0), std::invalid_argument);

    Forcing none = make_forcing("none", sg, vg, 1.0);
    CHECK(max_abs(none.Q1) == 0.0);

    Forcing f = make_forcing("steady", sg, vg, 2.0);
    SphereTransform T(sg);
    for (int k = 0; k < vg.K; ++k) {
        ScalarField2D lvl = f.Q1.level(k);
        // Both angular patterns integrate to zero over the sphere.
        CHECK(std::abs(sphere_integral(sg, lvl)) < 1e-13);
        // Analytic pattern is already band-limited: transform round trip is exact.
        ScalarField2D back = T.synthesize(T.analyze(lvl));
        double d = 0.0;
        for (std::size_t i = 0; i < lvl.v.size(); ++i)
            d = std::max(d, std::abs(lvl.v[i] - back.v[i]));
        CHECK(d < 1e-13);
    }
}

TEST_CASE("project_columns: constraint, idempotence, rotational part untouched") {
    Model m = make_model(ModelParams{});
    State U = m.random_state(2024, 1.0, 8);

    // random_state already projects; verify and then re-project.
    CHECK(m.constraint_residual(U.v) < 1e-12);
    VField3D again = m.project_columns(U.v);
    CHECK(max_abs_diff(again.vth, U.v.vth) < 1e-13);
    CHECK(max_abs_diff(again.vph, U.v.vph) < 1e-13);

    // An unprojected field: add a strong divergent column structure.
    VField3D raw = U.v;
    const SphereTransform& T = m.transform();
    for (int k = 0; k < m.vgrid().K; ++k) {
        ScalarCoeffs pot(m.sgrid().L);
        pot.at(2, 1) = {0.4 * (k + 1), -0.2};
        VectorField2D g = T.synthesize_gradient(pot);
        VectorField2D lvl = raw.level(k);
        for (std::size_t i = 0; i < lvl.vth.v.size(); ++i) {
            lvl.vth.v[i] += g.vth.v[i];
            lvl.vph.v[i] += g.vph.v[i];
        }
        raw.set_level(k, lvl);
    }
    CHECK(m.constraint_residual(raw) > 1e-2);
    ScalarCoeffs multiplier;
    VField3D proj = m.project_columns(raw, &multiplier);
    CHECK(m.constraint_residual(proj) < 1e-12);
    // The multiplier captures the removed column-mean divergent potential.
    CHECK(std::abs(multiplier.at(2, 1) - std::complex<double>(0.4 * 5, -0.2)) < 1e-12);

    // Vorticity per level is untouched by the projection.
    for (int k = 0; k < m.vgrid().K; ++k) {
        ScalarField2D za = vorticity(T, raw.level(k));
        ScalarField2D zb = vorticity(T, proj.level(k));
        double d = 0.0;
        for (std::size_t i = 0; i < za.v.size(); ++i)
            d = std::max(d, std::abs(za.v[i] - zb.v[i]));
        CHECK(d < 1e-11);
    }
}

TEST_CASE("diagnose_w: manufactured divergence, second order in the vertical") {
    ModelParams p;
    auto run = [&](int K) {
        SphereGrid sg = make_grid(6, 8, 14);
        VerticalGrid vg = make_vertical_grid(K);
        Model m(p, sg, vg, make_forcing("none", sg, vg, 0.0));
        // v = grad chi with chi = cos(pi xi) Y_{3,2}-shaped potential:
        // div v = -l(l+1) cos(pi xi) Y, so w = l(l+1) sin(pi xi)/pi Y.
        SphereTransform T(sg);
        ScalarCoeffs pot(sg.L);
        pot.at(3, 2) = {0.8, 0.3};
        VField3D v(vg.K, sg.n_lat, sg.n_lon);
        for (int k = 0; k < vg.K; ++k) {
            ScalarCoeffs scaled = pot;
            scaled.at(3, 2) *= std::cos(M_PI * vg.xi[k]);
            VectorCoeffs u(sg.L);
            u.chi = scaled;
            v.set_level(k, T.synthesize_vector(u));
        }
        Field3D w = m.diagnose_w(v);
        ScalarCoeffs ref = pot;
        double err = 0.0;
        for (int k = 0; k < vg.K; ++k) {
            ScalarCoeffs wk = ref;
            wk.at(3, 2) *= 12.0 * std::sin(M_PI * vg.xi[k]) / M_PI;
            ScalarField2D wex = T.synthesize(wk);
            ScalarField2D got = w.level(k);
            for (std::size_t i = 0; i < wex.v.size(); ++i)
                err = std::max(err, std::abs(wex.v[i] - got.v[i]));
        }
        return err;
    };
    double c = run(16), f = run(32);
    CHECK(std::log2(c / f) > 1.9);
    CHECK(f < 1e-2);

    // A projected column-constant velocity has no divergence at all: w = 0.
    Model m = make_model(ModelParams{});
    State U = m.random_state(7, 1.0, 6);
    VField3D bar(m.vgrid().K, m.sgrid().n_lat, m.sgrid().n_lon);
    for (int k = 0; k < m.vgrid().K; ++k) bar.set_level(k, U.v.level(0));
    bar = m.project_columns(bar);
    CHECK(max_abs(m.diagnose_w(bar)) < 1e-12);
}

TEST_CASE("tendency is linear in the term switches") {
    ModelParams all;
    Model m = make_model(all);
    State U = m.random_state(99, 0.7, 8);
    Tendency t_all = m.tendency(U);

    auto sub = [&](auto flip) {
        ModelParams off = all;
        flip(off, false);
        ModelParams only;
        only.advection = only.coriolis = only.buoyancy = only.diffusion = only.forcing =
            false;
        flip(only, true);
        Model m_off = make_model(off), m_only = make_model(only);
        Tendency a = m_off.tendency(U), b = m_only.tendency(U);
        double scale = std::max({max_abs(t_all.dT), max_abs(t_all.dv.vth), 1.0});
        double err = 0.0;
        for (std::size_t i = 0; i < t_all.dT.v.size(); ++i) {
            err = std::max(err, std::abs(t_all.dv.vth.v[i] - a.dv.vth.v[i] - b.dv.vth.v[i]));
            err = std::max(err, std::abs(t_all.dv.vph.v[i] - a.dv.vph.v[i] - b.dv.vph.v[i]));
            err = std::max(err, std::abs(t_all.dT.v[i] - a.dT.v[i] - b.dT.v[i]));
            err = std::max(err, std::abs(t_all.dq.v[i] - a.dq.v[i] - b.dq.v[i]));
        }
        CHECK(err / scale < 1e-12);
    };
    sub([](ModelParams& p, bool on) { p.advection = on; });
    sub([](ModelParams& p, bool on) { p.coriolis = on; });
    sub([](ModelParams& p, bool on) { p.buoyancy = on; });
    sub([](ModelParams& p, bool on) { p.diffusion = on; });
    sub([](ModelParams& p, bool on) { p.forcing = on; });
}

TEST_CASE("energy cancellations: Coriolis and buoyancy/heating exchange") {
    ModelParams none;
    none.advection = none.coriolis = none.buoyancy = none.diffusion = none.forcing = false;

    Model base = make_model(ModelParams{});
    State U = base.random_state(4242, 0.9, 8);

    // Coriolis does no work: <dv, v> = 0 at quadrature precision.
    {
        ModelParams p = none;
        p.coriolis = true;
        Model m = make_model(p);
        Tendency t = m.tendency(U);
        double e = vol_inner(m, t.dv, U.v);
        double scale = vol_inner(m, U.v, U.v);
        CHECK(std::abs(e) / scale < 1e-13);
    }

    // Pressure-work/heating exchange: <dv_buoyancy, v> + <dT_heating, T> = 0.
    // This couples the vertical integral rule, its summation-by-parts
    // transpose, gradient/divergence adjointness, the column constraint, and
    // dealiasing; any inconsistency among them breaks the cancellation.
    {
        ModelParams p = none;
        p.buoyancy = true;
        Model m = make_model(p);
        Tendency t = m.tendency(U);
        double ev = vol_inner(m, t.dv, U.v);
        double eT = vol_inner(m, t.dT, U.T);
        double scale = std::max(std::abs(ev), std::abs(eT));
        CHECK(scale > 1e-6); // both sides individually nonzero
        CHECK(std::abs(ev + eT) / scale < 1e-12);
    }

    // The surface-geopotential gradient does no work on a projected field:
    // remove it explicitly and check the projection changed nothing of the
    // energy (grad phi_s is L2-orthogonal to constraint-satisfying fields).
    {
        ModelParams p = none;
        p.advection = true;
        Model m = make_model(p);
        Tendency t = m.tendency(U);
        VField3D gphi(m.vgrid().K, m.sgrid().n_lat, m.sgrid().n_lon);
        VectorField2D g = m.transform().synthesize_gradient(t.phi_s);
        for (int k = 0; k < m.vgrid().K; ++k) gphi.set_level(k, g);
        double e = vol_inner(m, gphi, U.v);
        double scale = std::sqrt(vol_inner(m, gphi, gphi) * vol_inner(m, U.v, U.v)) + 1e-30;
        CHECK(std::abs(e) / scale < 1e-12);
    }
}

TEST_CASE("advection energy defect vanishes at second order in the vertical") {
    // Horizontal advection conserves energy exactly; the w d_xi transport
    // closes only up to the vertical truncation error, so the total defect
    // must shrink at O(h^2).
    ModelParams adv;
    adv.coriolis = adv.buoyancy = adv.diffusion = adv.forcing = false;
    auto defect = [&](int K) {
        SphereGrid sg = make_grid(8, 14, 30);
        VerticalGrid vg = make_vertical_grid(K);
        Model m(adv, sg, vg, make_forcing("none", sg, vg, 0.0));
        State U = m.random_state(515, 0.8, 6);
        Tendency t = m.tendency(U);
        double e = vol_inner(m, t.dv, U.v) + vol_inner(m, t.dT, U.T) +
                   vol_inner(m, t.dq, U.q);
        return std::abs(e);
    };
    double c = defect(8), f = defect(16);
    CHECK(std::log2(c / f) > 1.7);
}

TEST_CASE("reconstruct_phi: hydrostatic face identity holds exactly") {
    Model m = make_model(ModelParams{});
    State U = m.random_state(31, 1.1, 8);
    Tendency t = m.tendency(U);
    Field3D phi = m.reconstruct_phi(U, t.phi_s);

    const int K = m.vgrid().K;
    const double h = m.vgrid().h;
    const std::size_t ns = phi.level_stride();
    // (phi_k - phi_{k+1})/h equals the face average of (bP/p)(1+aq)T by
    // construction of the vertical rule.
    double err = 0.0, scale = 0.0;
    for (int k = 0; k + 1 < K; ++k)
        for (std::size_t p = 0; p < ns; ++p) {
            double Fk = m.buoyancy_profile(k) *
                        (1.0 + m.params().a_moist * U.q.v[k * ns + p]) * U.T.v[k * ns + p];
            double Fk1 = m.buoyancy_profile(k + 1) *
                         (1.0 + m.params().a_moist * U.q.v[(k + 1) * ns + p]) *
                         U.T.v[(k + 1) * ns + p];
            double lhs = (phi.v[k * ns + p] - phi.v[(k + 1) * ns + p]) / h;
            err = std::max(err, std::abs(lhs - 0.5 * (Fk + Fk1)));
            scale = std::max(scale, std::abs(Fk));
        }
    CHECK(err / scale < 1e-11);
}

TEST_CASE("random_state: reproducible, band-limited, constraint-satisfying") {
    Model m = make_model(ModelParams{});
    State a = m.random_state(123, 1.0, 8);
    State b = m.random_state(123, 1.0, 8);
    CHECK(max_abs_diff(a.T, b.T) == 0.0);
    CHECK(max_abs_diff(a.v.vth, b.v.vth) == 0.0);

    State c = m.random_state(124, 1.0, 8);
    CHECK(max_abs_diff(a.T, c.T) > 1e-3);

    CHECK(m.constraint_residual(a.v) < 1e-12);
    CHECK(max_abs(a.T) > 1e-2);

    // Band-limited: analysis/synthesis round trip reproduces the grid values.
    const SphereTransform& T = m.transform();
    for (int k = 0; k < m.vgrid().K; ++k) {
        ScalarField2D lvl = a.T.level(k);
        ScalarField2D back = T.synthesize(T.analyze(lvl));
        double d = 0.0;
        for (std::size_t i = 0; i < lvl.v.size(); ++i)
            d = std::max(d, std::abs(lvl.v[i] - back.v[i]));
        CHECK(d < 1e-12);
    }
}

TEST_CASE("tendency rejects non-finite states and bad shapes") {
    Model m = make_model(ModelParams{});
    State U = m.random_state(5, 1.0, 6);
    U.T.v[10] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(m.tendency(U), std::runtime_error);

    State bad(m.vgrid().K + 1, m.sgrid().n_lat, m.sgrid().n_lon);
    CHECK_THROWS_AS(m.tendency(bad), std::invalid_argument);
}
