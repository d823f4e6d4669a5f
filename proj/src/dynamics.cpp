/**
 * @file dynamics.cpp
 * @brief Tendency assembly, diagnostic relations, column projection, and
 *        forcing presets.
 */
#include "mpe/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "mpe/rng.hpp"

namespace mpe {

void ModelParams::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0))
            throw std::invalid_argument(std::string("ModelParams: ") + name +
                                        " must be positive");
    };
    positive(rossby, "rossby");
    positive(b, "b");
    positive(P, "P");
    positive(p0, "p0");
    if (!(p0 < P)) throw std::invalid_argument("ModelParams: requires p0 < P");
    if (a_moist < 0.0) throw std::invalid_argument("ModelParams: a_moist must be >= 0");
    if (alpha_T < 0.0) throw std::invalid_argument("ModelParams: alpha_T must be >= 0");
    if (beta_q < 0.0) throw std::invalid_argument("ModelParams: beta_q must be >= 0");
    positive(nu_v, "nu_v");
    positive(mu_v, "mu_v");
    positive(nu_T, "nu_T");
    positive(mu_T, "mu_T");
    positive(nu_q, "nu_q");
    positive(mu_q, "mu_q");
}

Model::Model(ModelParams params, SphereGrid sgrid, VerticalGrid vgrid, Forcing forcing)
    : params_(params), sgrid_(std::move(sgrid)), vgrid_(std::move(vgrid)),
      transform_(sgrid_), forcing_(std::move(forcing)) {
    params_.validate();
    c_profile_.resize(vgrid_.K);
    for (int k = 0; k < vgrid_.K; ++k)
        c_profile_[k] =
            params_.b * params_.P / pressure_of_xi(vgrid_.xi[k], params_.P, params_.p0);
    coriolis_f_.resize(sgrid_.n_lat);
    for (int j = 0; j < sgrid_.n_lat; ++j)
        coriolis_f_[j] = 2.0 * sgrid_.cos_theta[j] / params_.rossby;
    if (forcing_.Q1.v.empty()) forcing_.Q1 = Field3D(vgrid_.K, sgrid_.n_lat, sgrid_.n_lon);
    if (forcing_.Q2.v.empty()) forcing_.Q2 = Field3D(vgrid_.K, sgrid_.n_lat, sgrid_.n_lon);
    if (forcing_.Q1.K != vgrid_.K || forcing_.Q1.n_lat != sgrid_.n_lat ||
        forcing_.Q1.n_lon != sgrid_.n_lon || !forcing_.Q1.same_shape(forcing_.Q2))
        throw std::invalid_argument("Model: forcing shape does not match the grids");
}

void Model::check_state(const State& U) const {
    const bool ok = U.v.vth.K == vgrid_.K && U.v.vth.n_lat == sgrid_.n_lat &&
                    U.v.vth.n_lon == sgrid_.n_lon && U.v.vth.same_shape(U.v.vph) &&
                    U.v.vth.same_shape(U.T) && U.v.vth.same_shape(U.q);
    if (!ok) throw std::invalid_argument("Model: state shape does not match the grids");
}

namespace {

void ensure_finite(const Field3D& f, const char* name) {
    for (double x : f.v)
        if (!std::isfinite(x))
            throw std::runtime_error(std::string("tendency: non-finite value in ") + name +
                                     " (blow-up or invalid input)");
}

} // namespace

Field3D Model::diagnose_w(const VField3D& v) const {
    Field3D div3(vgrid_.K, sgrid_.n_lat, sgrid_.n_lon);
    for (int k = 0; k < vgrid_.K; ++k) {
        VectorCoeffs vc = transform_.analyze_vector(v.level(k));
        div3.set_level(k, transform_.synthesize_divergence(vc));
    }
    return upper_integral(div3);
}

ScalarField2D Model::constraint_residual_field(const VField3D& v) const {
    Field3D div3(vgrid_.K, sgrid_.n_lat, sgrid_.n_lon);
    for (int k = 0; k < vgrid_.K; ++k) {
        VectorCoeffs vc = transform_.analyze_vector(v.level(k));
        div3.set_level(k, transform_.synthesize_divergence(vc));
    }
    return vertical_integral(div3);
}

double Model::constraint_residual(const VField3D& v) const {
    ScalarField2D r = constraint_residual_field(v);
    double m = 0.0;
    for (double x : r.v) m = std::max(m, std::abs(x));
    return m;
}

VField3D Model::project_columns(const VField3D& v, ScalarCoeffs* phi_out) const {
    const int K = vgrid_.K;
    std::vector<VectorCoeffs> vc;
    vc.reserve(K);
    for (int k = 0; k < K; ++k) vc.push_back(transform_.analyze_vector(v.level(k)));

    ScalarCoeffs mean(sgrid_.L);
    const long double h = vgrid_.h;
    for (std::size_t idx = 0; idx < mean.c.size(); ++idx) {
        long double re = 0.0L, im = 0.0L;
        for (int k = 0; k < K; ++k) {
            re += vc[k].chi.c[idx].real();
            im += vc[k].chi.c[idx].imag();
        }
        mean.c[idx] = {double(h * re), double(h * im)};
        for (int k = 0; k < K; ++k) vc[k].chi.c[idx] -= mean.c[idx];
    }

    VField3D out(K, sgrid_.n_lat, sgrid_.n_lon);
    for (int k = 0; k < K; ++k) out.set_level(k, transform_.synthesize_vector(vc[k]));
    if (phi_out) *phi_out = mean;
    return out;
}

Tendency Model::tendency(const State& U) const {
    check_state(U);
    ensure_finite(U.v.vth, "v_theta");
    ensure_finite(U.v.vph, "v_phi");
    ensure_finite(U.T, "T");
    ensure_finite(U.q, "q");

    const int K = vgrid_.K;
    const int n_lat = sgrid_.n_lat, n_lon = sgrid_.n_lon;
    const std::size_t ns = std::size_t(n_lat) * n_lon;
    const ModelParams& P = params_;

    Tendency out;
    out.dv = VField3D(K, n_lat, n_lon);
    out.dT = Field3D(K, n_lat, n_lon);
    out.dq = Field3D(K, n_lat, n_lon);

    // Per-level spectral view of the velocity, its divergence, and w.
    std::vector<VectorCoeffs> vc;
    vc.reserve(K);
    Field3D div3(K, n_lat, n_lon);
    for (int k = 0; k < K; ++k) {
        vc.push_back(transform_.analyze_vector(U.v.level(k)));
        div3.set_level(k, transform_.synthesize_divergence(vc.back()));
    }
    Field3D w3 = upper_integral(div3);

    if (P.advection) {
        // Horizontal transport, dealiased inside the advection operators.
        for (int k = 0; k < K; ++k) {
            VectorField2D vk = U.v.level(k);
            VectorField2D av = advect_vector(transform_, vk, vk);
            ScalarField2D aT = advect_scalar(transform_, vk, U.T.level(k));
            ScalarField2D aq = advect_scalar(transform_, vk, U.q.level(k));
            for (std::size_t p = 0; p < ns; ++p) {
                out.dv.vth.v[k * ns + p] -= av.vth.v[p];
                out.dv.vph.v[k * ns + p] -= av.vph.v[p];
                out.dT.v[k * ns + p] -= aT.v[p];
                out.dq.v[k * ns + p] -= aq.v[p];
            }
        }
        // Vertical transport w d_xi(.) with the matching surface closures.
        Field3D dvth = d1_xi(U.v.vth, 0.0), dvph = d1_xi(U.v.vph, 0.0);
        Field3D dT1 = d1_xi(U.T, P.alpha_T), dq1 = d1_xi(U.q, P.beta_q);
        for (std::size_t i = 0; i < w3.v.size(); ++i) {
            out.dv.vth.v[i] -= w3.v[i] * dvth.v[i];
            out.dv.vph.v[i] -= w3.v[i] * dvph.v[i];
            out.dT.v[i] -= w3.v[i] * dT1.v[i];
            out.dq.v[i] -= w3.v[i] * dq1.v[i];
        }
    }

    if (P.coriolis) {
        // -(f/R0) v_perp with v_perp = (-v_phi, v_theta).
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < n_lat; ++j) {
                const double f = coriolis_f_[j];
                for (int i = 0; i < n_lon; ++i) {
                    const std::size_t p = k * ns + std::size_t(j) * n_lon + i;
                    out.dv.vth.v[p] += f * U.v.vph.v[p];
                    out.dv.vph.v[p] -= f * U.v.vth.v[p];
                }
            }
    }

    if (P.buoyancy) {
        // g = truncation of (1+aq)T; the gradient integral is assembled on
        // spectral coefficients so grad commutes with the vertical rule and
        // the energy exchange with the heating term cancels exactly.
        std::vector<ScalarCoeffs> gc;
        gc.reserve(K);
        for (int k = 0; k < K; ++k) {
            ScalarField2D g(n_lat, n_lon);
            for (std::size_t p = 0; p < ns; ++p)
                g.v[p] = (1.0 + P.a_moist * U.q.v[k * ns + p]) * U.T.v[k * ns + p];
            gc.push_back(transform_.analyze(g));
        }
        // Upper integral of c_k * g_k per coefficient.
        const long double h = vgrid_.h;
        std::vector<ScalarCoeffs> G(K, ScalarCoeffs(sgrid_.L));
        for (std::size_t idx = 0; idx < gc[0].c.size(); ++idx) {
            long double bre = 0.0L, bim = 0.0L;
            for (int k = K - 1; k >= 0; --k) {
                const long double cre = c_profile_[k] * gc[k].c[idx].real();
                const long double cim = c_profile_[k] * gc[k].c[idx].imag();
                G[k].c[idx] = {double(h * (0.5L * cre + bre)), double(h * (0.5L * cim + bim))};
                bre += cre;
                bim += cim;
            }
        }
        for (int k = 0; k < K; ++k) {
            VectorField2D B = transform_.synthesize_gradient(G[k]);
            for (std::size_t p = 0; p < ns; ++p) {
                out.dv.vth.v[k * ns + p] -= B.vth.v[p];
                out.dv.vph.v[k * ns + p] -= B.vph.v[p];
            }
        }
        // Heating (bP/p)(1+aq) w in the T equation.
        for (int k = 0; k < K; ++k) {
            const double c = c_profile_[k];
            for (std::size_t p = 0; p < ns; ++p)
                out.dT.v[k * ns + p] +=
                    c * (1.0 + P.a_moist * U.q.v[k * ns + p]) * w3.v[k * ns + p];
        }
    }

    if (P.diffusion) {
        for (int k = 0; k < K; ++k) {
            VectorField2D lv = lap_vector(transform_, U.v.level(k));
            ScalarField2D lT = lap_scalar(transform_, U.T.level(k));
            ScalarField2D lq = lap_scalar(transform_, U.q.level(k));
            for (std::size_t p = 0; p < ns; ++p) {
                out.dv.vth.v[k * ns + p] += P.nu_v * lv.vth.v[p];
                out.dv.vph.v[k * ns + p] += P.nu_v * lv.vph.v[p];
                out.dT.v[k * ns + p] += P.nu_T * lT.v[p];
                out.dq.v[k * ns + p] += P.nu_q * lq.v[p];
            }
        }
        axpy(P.mu_v, d2_xi(U.v.vth, 0.0), out.dv.vth);
        axpy(P.mu_v, d2_xi(U.v.vph, 0.0), out.dv.vph);
        axpy(P.mu_T, d2_xi(U.T, P.alpha_T), out.dT);
        axpy(P.mu_q, d2_xi(U.q, P.beta_q), out.dq);
    }

    if (P.forcing) {
        axpy(1.0, forcing_.Q1, out.dT);
        axpy(1.0, forcing_.Q2, out.dq);
    }

    // Truncate products back to the resolved band and apply the column
    // projection to dv; its multiplier is the surface geopotential.
    out.dv = project_columns(out.dv, &out.phi_s);
    for (int k = 0; k < K; ++k) {
        out.dT.set_level(k, transform_.synthesize(transform_.analyze(out.dT.level(k))));
        out.dq.set_level(k, transform_.synthesize(transform_.analyze(out.dq.level(k))));
    }
    return out;
}

Field3D Model::reconstruct_phi(const State& U, const ScalarCoeffs& phi_s) const {
    check_state(U);
    const int K = vgrid_.K;
    const std::size_t ns = std::size_t(sgrid_.n_lat) * sgrid_.n_lon;
    Field3D integrand(K, sgrid_.n_lat, sgrid_.n_lon);
    for (int k = 0; k < K; ++k)
        for (std::size_t p = 0; p < ns; ++p)
            integrand.v[k * ns + p] =
                c_profile_[k] * (1.0 + params_.a_moist * U.q.v[k * ns + p]) *
                U.T.v[k * ns + p];
    Field3D phi = upper_integral(integrand);
    ScalarField2D surf = transform_.synthesize(phi_s);
    for (int k = 0; k < K; ++k)
        for (std::size_t p = 0; p < ns; ++p) phi.v[k * ns + p] += surf.v[p];
    return phi;
}

State Model::random_state(std::uint64_t seed, double amplitude, int lmax_cut) const {
    const int K = vgrid_.K;
    const int L = sgrid_.L;
    const int lcut = std::min(lmax_cut, L);
    const int n_vert = 3; // cosine modes cos(n pi xi), n = 0..2

    auto draw_modes = [&](const char* name, bool vector_valued) {
        std::mt19937_64 g = named_stream(seed, name);
        std::normal_distribution<double> dist;
        // modes[n] holds the horizontal coefficients of vertical mode n.
        std::vector<ScalarCoeffs> modes(n_vert, ScalarCoeffs(L));
        for (int n = 0; n < n_vert; ++n) {
            const double vert_amp = 1.0 / ((1 + n) * (1 + n));
            for (int m = 0; m <= lcut; ++m)
                for (int l = std::max(m, vector_valued ? 1 : 0); l <= lcut; ++l) {
                    const double s = amplitude * vert_amp * std::exp(-0.7 * l);
                    double re = dist(g), im = (m == 0) ? 0.0 : dist(g);
                    modes[n].at(l, m) = {s * re, s * im};
                }
        }
        return modes;
    };

    auto build_scalar = [&](const std::vector<ScalarCoeffs>& modes) {
        Field3D f(K, sgrid_.n_lat, sgrid_.n_lon);
        for (int k = 0; k < K; ++k) {
            ScalarCoeffs a(L);
            for (int n = 0; n < n_vert; ++n) {
                const double c = std::cos(n * M_PI * vgrid_.xi[k]);
                for (std::size_t idx = 0; idx < a.c.size(); ++idx)
                    a.c[idx] += c * modes[n].c[idx];
            }
            f.set_level(k, transform_.synthesize(a));
        }
        return f;
    };

    std::vector<ScalarCoeffs> psi = draw_modes("init/psi", true);
    std::vector<ScalarCoeffs> chi = draw_modes("init/chi", true);

    State U(K, sgrid_.n_lat, sgrid_.n_lon);
    for (int k = 0; k < K; ++k) {
        VectorCoeffs u(L);
        for (int n = 0; n < n_vert; ++n) {
            const double c = std::cos(n * M_PI * vgrid_.xi[k]);
            for (std::size_t idx = 0; idx < u.psi.c.size(); ++idx) {
                u.psi.c[idx] += c * psi[n].c[idx];
                u.chi.c[idx] += c * chi[n].c[idx];
            }
        }
        U.v.set_level(k, transform_.synthesize_vector(u));
    }
    U.v = project_columns(U.v);
    U.T = build_scalar(draw_modes("init/T", false));
    U.q = build_scalar(draw_modes("init/q", false));
    U.time = 0.0;
    return U;
}

Forcing make_forcing(const std::string& preset, const SphereGrid& sgrid,
                     const VerticalGrid& vgrid, double amplitude) {
    Forcing f;
    f.Q1 = Field3D(vgrid.K, sgrid.n_lat, sgrid.n_lon);
    f.Q2 = Field3D(vgrid.K, sgrid.n_lat, sgrid.n_lon);
    if (preset == "none") return f;
    if (preset != "steady")
        throw std::invalid_argument("make_forcing: unknown preset '" + preset +
                                    "' (expected 'none' or 'steady')");
    // Band-limited (degree 2) heating: a zonal part plus a wavenumber-one
    // wave, modulated by a smooth vertical profile.
    for (int k = 0; k < vgrid.K; ++k) {
        const double vert = 1.0 + 0.5 * std::cos(M_PI * vgrid.xi[k]);
        for (int j = 0; j < sgrid.n_lat; ++j) {
            const double ct = sgrid.cos_theta[j], st = sgrid.sin_theta[j];
            const double zonal = ct * ct - 1.0 / 3.0;
            const double wave = st * ct;
            for (int i = 0; i < sgrid.n_lon; ++i) {
                const double ph = sgrid.phi[i];
                f.Q1.at(k, j, i) =
                    amplitude * vert * (zonal + 0.8 * wave * std::cos(ph));
                f.Q2.at(k, j, i) =
                    0.3 * amplitude * vert * (0.5 * zonal + wave * std::sin(ph));
            }
        }
    }
    return f;
}

} // namespace mpe
