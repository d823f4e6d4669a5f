/**
 * @file norms.cpp
 * @brief Norms, quadratic forms, and budget diagnostics.
 */
#include "mpe/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace mpe {

namespace {

/// Weight for the implied m < 0 coefficients under conjugate symmetry.
inline double m_weight(int m) { return m == 0 ? 1.0 : 2.0; }

/// Real quadratic form x^H A x of a symmetric tridiagonal on a complex column.
double herm_form(const Tridiag& A, const std::vector<std::complex<double>>& x) {
    const int n = A.n();
    long double s = 0.0L;
    for (int i = 0; i < n; ++i) {
        long double diag = A.diag[i] * std::norm(x[i]);
        long double off = 0.0L;
        if (i + 1 < n)
            off = 2.0L * A.upper[i] *
                  (x[i].real() * x[i + 1].real() + x[i].imag() * x[i + 1].imag());
        s += diag + off;
    }
    return double(s);
}

struct SpectralState {
    std::vector<ScalarCoeffs> psi, chi, T, q;
};

SpectralState analyze_state(const Model& m, const State& U) {
    const int K = m.vgrid().K;
    SpectralState S;
    S.psi.resize(K);
    S.chi.resize(K);
    S.T.resize(K);
    S.q.resize(K);
    for (int k = 0; k < K; ++k) {
        VectorCoeffs vc = m.transform().analyze_vector(U.v.level(k));
        S.psi[k] = std::move(vc.psi);
        S.chi[k] = std::move(vc.chi);
        S.T[k] = m.transform().analyze(U.T.level(k));
        S.q[k] = m.transform().analyze(U.q.level(k));
    }
    return S;
}

using Column = std::vector<std::complex<double>>;

Column gather(const std::vector<ScalarCoeffs>& a, std::size_t idx) {
    Column x(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) x[k] = a[k].c[idx];
    return x;
}

double column_norm_sq(const Column& x) {
    long double s = 0.0L;
    for (const auto& z : x) s += std::norm(z);
    return double(s);
}

} // namespace

double vol_inner(const Model& m, const Field3D& a, const Field3D& b) {
    long double s = 0.0L;
    for (int k = 0; k < m.vgrid().K; ++k)
        s += sphere_inner(m.sgrid(), a.level(k), b.level(k));
    return double(s * m.vgrid().h);
}

double vol_inner(const Model& m, const VField3D& a, const VField3D& b) {
    return vol_inner(m, a.vth, b.vth) + vol_inner(m, a.vph, b.vph);
}

double l2_norm(const Model& m, const Field3D& f) { return std::sqrt(vol_inner(m, f, f)); }

double l2_norm(const Model& m, const VField3D& v) { return std::sqrt(vol_inner(m, v, v)); }

double tendency_l2(const Model& m, const Tendency& t) {
    return std::sqrt(vol_inner(m, t.dv, t.dv) + vol_inner(m, t.dT, t.dT) +
                     vol_inner(m, t.dq, t.dq));
}

double dt_monitor(const Model& m, const State& U) {
    return tendency_l2(m, m.tendency(U));
}

StateNorms state_norms(const Model& m, const State& U) {
    const SpectralState S = analyze_state(m, U);
    const int L = m.sgrid().L;
    const int K = m.vgrid().K;
    const double h = m.vgrid().h;
    const Tridiag A0 = neg_d2_matrix(K, 0.0);

    StateNorms out;
    out.l2_v = l2_norm(m, U.v);
    out.l2_T = l2_norm(m, U.T);
    out.l2_q = l2_norm(m, U.q);

    long double hv = 0.0L, hT = 0.0L, hq = 0.0L;
    for (int l = 0; l <= L; ++l)
        for (int mm = 0; mm <= l; ++mm) {
            const std::size_t idx = S.T[0].idx(l, mm);
            const double w = m_weight(mm);
            const double ll = double(l) * (l + 1);

            if (l >= 1) {
                Column p = gather(S.psi, idx), c = gather(S.chi, idx);
                // The frame-gradient form of a tangent field already contains
                // its L2 mass (the sphere's curvature term), so l(l+1)^2 is
                // the complete horizontal-plus-L2 weight of the velocity norm.
                hv += w * (ll * ll * h * (column_norm_sq(p) + column_norm_sq(c)) +
                           ll * h * (herm_form(A0, p) + herm_form(A0, c)));
            }
            auto scalar_part = [&](const std::vector<ScalarCoeffs>& a, double alpha,
                                   long double& acc) {
                Column x = gather(a, idx);
                std::complex<double> trace =
                    K >= 2 ? 1.5 * x[K - 1] - 0.5 * x[K - 2] : x[K - 1];
                acc += w * (ll * h * column_norm_sq(x) + h * herm_form(A0, x) +
                            alpha * std::norm(trace));
            };
            scalar_part(S.T, m.params().alpha_T, hT);
            scalar_part(S.q, m.params().beta_q, hq);
        }
    out.h1_v = std::sqrt(double(hv));
    out.h1_T = std::sqrt(double(hT));
    out.h1_q = std::sqrt(double(hq));
    return out;
}

DissipationForms dissipation_forms(const Model& m, const State& U) {
    const SpectralState S = analyze_state(m, U);
    const int L = m.sgrid().L;
    const int K = m.vgrid().K;
    const double h = m.vgrid().h;
    const ModelParams& P = m.params();
    const Tridiag A0 = neg_d2_matrix(K, 0.0);
    const Tridiag AT = neg_d2_matrix(K, P.alpha_T);
    const Tridiag Aq = neg_d2_matrix(K, P.beta_q);

    long double dv = 0.0L, dT = 0.0L, dq = 0.0L;
    for (int l = 0; l <= L; ++l)
        for (int mm = 0; mm <= l; ++mm) {
            const std::size_t idx = S.T[0].idx(l, mm);
            const double w = m_weight(mm);
            const double ll = double(l) * (l + 1);
            if (l >= 1) {
                Column p = gather(S.psi, idx), c = gather(S.chi, idx);
                dv += w * (P.nu_v * ll * ll * h *
                               (column_norm_sq(p) + column_norm_sq(c)) +
                           P.mu_v * ll * h * (herm_form(A0, p) + herm_form(A0, c)));
            }
            Column t = gather(S.T, idx), q = gather(S.q, idx);
            dT += w * (P.nu_T * ll * h * column_norm_sq(t) +
                       P.mu_T * h * herm_form(AT, t));
            dq += w * (P.nu_q * ll * h * column_norm_sq(q) +
                       P.mu_q * h * herm_form(Aq, q));
        }
    DissipationForms out;
    out.v = double(dv);
    out.T = double(dT);
    out.q = double(dq);
    return out;
}

double h2_norm_sq(const Model& m, const State& U) {
    const SpectralState S = analyze_state(m, U);
    const int L = m.sgrid().L;
    const int K = m.vgrid().K;
    const double h = m.vgrid().h;
    const ModelParams& P = m.params();
    const Tridiag A0 = neg_d2_matrix(K, 0.0);
    const Tridiag AT = neg_d2_matrix(K, P.alpha_T);
    const Tridiag Aq = neg_d2_matrix(K, P.beta_q);

    auto apply_sq = [&](const Tridiag& A, double nu, double mu, double ll,
                        const Column& x) {
        Column Ax = tridiag_apply(A, x);
        long double s = 0.0L;
        for (std::size_t k = 0; k < x.size(); ++k)
            s += std::norm(nu * ll * x[k] + mu * Ax[k]);
        return double(s);
    };

    long double acc = 0.0L;
    for (int l = 0; l <= L; ++l)
        for (int mm = 0; mm <= l; ++mm) {
            const std::size_t idx = S.T[0].idx(l, mm);
            const double w = m_weight(mm);
            const double ll = double(l) * (l + 1);
            if (l >= 1) {
                // Vector fields carry the extra l(l+1) metric weight.
                acc += w * ll * h *
                       (apply_sq(A0, P.nu_v, P.mu_v, ll, gather(S.psi, idx)) +
                        apply_sq(A0, P.nu_v, P.mu_v, ll, gather(S.chi, idx)));
            }
            acc += w * h * apply_sq(AT, P.nu_T, P.mu_T, ll, gather(S.T, idx));
            acc += w * h * apply_sq(Aq, P.nu_q, P.mu_q, ll, gather(S.q, idx));
        }
    return double(acc);
}

EnergyBudget energy_budget(const Model& m, const State& U) {
    return energy_budget(m, U, m.tendency(U));
}

EnergyBudget energy_budget(const Model& m, const State& U, const Tendency& t) {
    EnergyBudget b;
    const double ev = vol_inner(m, U.v, U.v);
    const double eT = vol_inner(m, U.T, U.T);
    const double eq = vol_inner(m, U.q, U.q);
    b.energy = 0.5 * (ev + eT + eq);
    b.dE_dt = vol_inner(m, t.dv, U.v) + vol_inner(m, t.dT, U.T) + vol_inner(m, t.dq, U.q);
    if (m.params().forcing)
        b.production =
            vol_inner(m, m.forcing().Q1, U.T) + vol_inner(m, m.forcing().Q2, U.q);
    if (m.params().diffusion) b.dissipation = dissipation_forms(m, U).total();
    b.residual = b.dE_dt - b.production + b.dissipation;
    return b;
}

namespace {

/// Floor protecting relative residuals when all terms vanish identically.
constexpr double k_tiny_scale = 1e-300;
/// Relative tolerance for the quadrature-exact horizontal identities.
constexpr double k_horizontal_tol = 1e-10;
/// Column-mean divergence of v, relative to the divergence magnitude, below
/// which the constraint-dependent identities are considered applicable.
constexpr double k_constraint_rel = 1e-8;
/// Calibrated constant for the transport-skew defects: the normalized defect
/// residual / (scale * h_xi^2) measured over random band-limited inputs at
/// several resolutions stays below a quarter of this value.
constexpr double k_skew_cal = 1.0;

double max_abs_of(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

bool IdentityReport::all_pass() const {
    for (const IdentityCheck& c : checks)
        if (!c.pass) return false;
    return true;
}

const IdentityCheck& IdentityReport::check(std::string_view name) const {
    for (const IdentityCheck& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("IdentityReport: no check named '" + std::string(name) + "'");
}

IdentityReport check_identities(const Model& m, const VField3D& v, const VField3D& u,
                                const Field3D& T, const Field3D& q, const ScalarField2D& h) {
    const SphereGrid& g = m.sgrid();
    const VerticalGrid& vg = m.vgrid();
    const SphereTransform& tr = m.transform();
    const int K = vg.K;
    const int n_lat = g.n_lat, n_lon = g.n_lon;
    const std::size_t ns = std::size_t(n_lat) * n_lon;
    const double hxi = vg.h;

    auto bad_shape = [&](int fK, int fn_lat, int fn_lon) {
        return fK != K || fn_lat != n_lat || fn_lon != n_lon;
    };
    if (bad_shape(v.vth.K, v.vth.n_lat, v.vth.n_lon) ||
        bad_shape(u.vth.K, u.vth.n_lat, u.vth.n_lon) ||
        bad_shape(T.K, T.n_lat, T.n_lon) || bad_shape(q.K, q.n_lat, q.n_lon) ||
        h.n_lat != n_lat || h.n_lon != n_lon)
        throw std::invalid_argument("check_identities: field shapes do not match the model grid");

    IdentityReport rep;
    auto add = [&rep](std::string name, double residual, double scale, double tol,
                      bool precondition_ok) {
        IdentityCheck c;
        c.name = std::move(name);
        c.residual = residual;
        c.scale = scale;
        c.relative = residual == 0.0 ? 0.0 : residual / std::max(scale, k_tiny_scale);
        c.tol = tol;
        c.precondition_ok = precondition_ok;
        c.pass = precondition_ok && c.relative <= tol;
        rep.checks.push_back(std::move(c));
    };

    // Divergence of v per level, the diagnosed vertical velocity, and the
    // column constraint that the dependent identities hypothesize.
    Field3D div3(K, n_lat, n_lon);
    for (int k = 0; k < K; ++k)
        div3.set_level(k, tr.synthesize_divergence(tr.analyze_vector(v.level(k))));
    const Field3D w3 = upper_integral(div3);
    const double div_scale = max_abs_of(div3.v);
    const double bt_res = max_abs_of(vertical_integral(div3).v);
    const bool constraint_ok = bt_res <= k_constraint_rel * std::max(div_scale, k_tiny_scale);

    const VectorField2D gh = grad(tr, h);

    {   // int h div u + int grad h . u = 0, level by level.
        double r = 0, s = 0;
        for (int k = 0; k < K; ++k) {
            const VectorField2D uk = u.level(k);
            const ScalarField2D du = tr.synthesize_divergence(tr.analyze_vector(uk));
            ScalarField2D hd(n_lat, n_lon);
            for (std::size_t p = 0; p < ns; ++p) hd.v[p] = h.v[p] * du.v[p];
            const double a = sphere_integral(g, hd);
            const double b = sphere_inner(g, gh, uk);
            r = std::max(r, std::abs(a + b));
            s = std::max(s, std::abs(a) + std::abs(b));
        }
        add("gradient adjoint", r, s, k_horizontal_tol, true);
    }

    {   // int_shell grad h . v = 0 for constraint-satisfying v.
        long double acc = 0.0L, sc = 0.0L;
        for (int k = 0; k < K; ++k) {
            const VectorField2D vk = v.level(k);
            acc += (long double)sphere_inner(g, gh, vk);
            ScalarField2D ad(n_lat, n_lon);
            for (std::size_t p = 0; p < ns; ++p)
                ad.v[p] = std::abs(gh.vth.v[p] * vk.vth.v[p] + gh.vph.v[p] * vk.vph.v[p]);
            sc += (long double)sphere_integral(g, ad);
        }
        add("pressure work", std::abs(double(hxi * acc)), double(hxi * sc),
            k_horizontal_tol, constraint_ok);
    }

    {   // <-Lap u, v> = <u, v> + <Du, Dv>, level by level. The covariant
        // gradient contraction is evaluated in its frame-free form
        //   <Du, Dv> = sum_c grad u_c . grad v_c - u . v
        // over the Cartesian components u_c of the tangent field (the normal
        // part of each componentwise surface gradient contributes exactly
        // u . v on the unit sphere), so every factor is a smooth band-limited
        // field and the quadrature stays exact.
        auto cart_grads = [&](const VectorField2D& f) {
            std::array<ScalarField2D, 3> c{ScalarField2D(n_lat, n_lon),
                                           ScalarField2D(n_lat, n_lon),
                                           ScalarField2D(n_lat, n_lon)};
            for (int j = 0; j < n_lat; ++j) {
                const double ct = g.cos_theta[j], st = g.sin_theta[j];
                for (int i = 0; i < n_lon; ++i) {
                    const double cp = std::cos(g.phi[i]), sp = std::sin(g.phi[i]);
                    const double fth = f.vth.at(j, i), fph = f.vph.at(j, i);
                    c[0].at(j, i) = fth * ct * cp - fph * sp;
                    c[1].at(j, i) = fth * ct * sp + fph * cp;
                    c[2].at(j, i) = -fth * st;
                }
            }
            std::array<VectorField2D, 3> out{VectorField2D(n_lat, n_lon),
                                             VectorField2D(n_lat, n_lon),
                                             VectorField2D(n_lat, n_lon)};
            for (int c3 = 0; c3 < 3; ++c3)
                out[c3] = tr.synthesize_gradient(tr.analyze_to(c[c3], g.L + 1));
            return out;
        };
        double r = 0, s = 0;
        for (int k = 0; k < K; ++k) {
            const VectorField2D uk = u.level(k), vk = v.level(k);
            const VectorField2D lu = lap_vector(tr, uk);
            const std::array<VectorField2D, 3> gu = cart_grads(uk);
            const std::array<VectorField2D, 3> gv = cart_grads(vk);
            ScalarField2D gg(n_lat, n_lon);
            for (std::size_t p = 0; p < ns; ++p) {
                double dot = 0.0;
                for (int c3 = 0; c3 < 3; ++c3)
                    dot += gu[c3].vth.v[p] * gv[c3].vth.v[p] +
                           gu[c3].vph.v[p] * gv[c3].vph.v[p];
                gg.v[p] = dot - (uk.vth.v[p] * vk.vth.v[p] + uk.vph.v[p] * vk.vph.v[p]);
            }
            const double lhs = sphere_inner(g, lu, vk);
            const double mass = sphere_inner(g, uk, vk);
            const double grad_term = sphere_integral(g, gg);
            r = std::max(r, std::abs(lhs + mass + grad_term));
            s = std::max(s, std::abs(lhs) + std::abs(mass) + std::abs(grad_term));
        }
        add("vector laplacian form", r, s, k_horizontal_tol, true);
    }

    {   // int (grad_v h + h div v) dS = 0, level by level.
        double r = 0, s = 0;
        for (int k = 0; k < K; ++k) {
            const ScalarField2D adv = advect_scalar(tr, v.level(k), h);
            ScalarField2D f(n_lat, n_lon), af(n_lat, n_lon);
            for (std::size_t p = 0; p < ns; ++p) {
                const double t1 = adv.v[p];
                const double t2 = h.v[p] * div3.v[k * ns + p];
                f.v[p] = t1 + t2;
                af.v[p] = std::abs(t1) + std::abs(t2);
            }
            r = std::max(r, std::abs(sphere_integral(g, f)));
            s = std::max(s, sphere_integral(g, af));
        }
        add("surface transport closure", r, s, k_horizontal_tol, true);
    }

    const double skew_tol = k_skew_cal * hxi * hxi;

    {   // <grad_v u + w d_xi u, u> over the shell, O(h_xi^2).
        const Field3D du_th = d1_xi(u.vth, 0.0), du_ph = d1_xi(u.vph, 0.0);
        long double acc = 0.0L, sc = 0.0L;
        for (int k = 0; k < K; ++k) {
            const VectorField2D uk = u.level(k);
            const VectorField2D av = advect_vector(tr, v.level(k), uk);
            ScalarField2D f(n_lat, n_lon), af(n_lat, n_lon);
            for (std::size_t p = 0; p < ns; ++p) {
                const std::size_t n3 = k * ns + p;
                const double horiz = av.vth.v[p] * uk.vth.v[p] + av.vph.v[p] * uk.vph.v[p];
                const double vert =
                    w3.v[n3] * (du_th.v[n3] * uk.vth.v[p] + du_ph.v[n3] * uk.vph.v[p]);
                f.v[p] = horiz + vert;
                af.v[p] = std::abs(horiz) + std::abs(vert);
            }
            acc += (long double)sphere_integral(g, f);
            sc += (long double)sphere_integral(g, af);
        }
        add("transport skew velocity", std::abs(double(hxi * acc)), double(hxi * sc),
            skew_tol, constraint_ok);
    }

    auto skew_scalar = [&](const Field3D& x, double alpha_surface, std::string name) {
        const Field3D dx = d1_xi(x, alpha_surface);
        long double acc = 0.0L, sc = 0.0L;
        for (int k = 0; k < K; ++k) {
            const ScalarField2D xk = x.level(k);
            const ScalarField2D adv = advect_scalar(tr, v.level(k), xk);
            ScalarField2D f(n_lat, n_lon), af(n_lat, n_lon);
            for (std::size_t p = 0; p < ns; ++p) {
                const std::size_t n3 = k * ns + p;
                const double horiz = adv.v[p] * xk.v[p];
                const double vert = w3.v[n3] * dx.v[n3] * xk.v[p];
                f.v[p] = horiz + vert;
                af.v[p] = std::abs(horiz) + std::abs(vert);
            }
            acc += (long double)sphere_integral(g, f);
            sc += (long double)sphere_integral(g, af);
        }
        add(std::move(name), std::abs(double(hxi * acc)), double(hxi * sc), skew_tol,
            constraint_ok);
    };
    skew_scalar(T, m.params().alpha_T, "transport skew temperature");
    skew_scalar(q, m.params().beta_q, "transport skew humidity");

    return rep;
}

void H2IntegralMonitor::add_sample(double t, double f) {
    if (!(std::isfinite(t) && std::isfinite(f)))
        throw std::invalid_argument("H2IntegralMonitor: non-finite sample");
    if (have_) {
        if (t < t_prev_)
            throw std::invalid_argument("H2IntegralMonitor: time went backwards");
        acc_ += 0.5L * (long double)(t - t_prev_) * ((long double)f + f_prev_);
    } else if (t < 0.0) {
        throw std::invalid_argument("H2IntegralMonitor: negative start time");
    }
    t_prev_ = t;
    f_prev_ = f;
    have_ = true;
    ++n_;
    if (t > 0.0) c_ = std::max(c_, double(acc_) / (std::sqrt(t) + t));
}

} // namespace mpe
