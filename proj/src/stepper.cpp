/**
 * @file stepper.cpp
 * @brief IMEX time integration with per-mode tridiagonal diffusion solves.
 */
#include "mpe/stepper.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace mpe {

namespace {

using Column = std::vector<std::complex<double>>;

double max_abs(const Column& x) {
    double r = 0.0;
    for (const auto& z : x) r = std::max(r, std::abs(z));
    return r;
}

/// Thomas solve with iterative refinement. Returns sweeps used; throws if the
/// residual does not reach tol * |rhs| within max_iters sweeps.
int solve_refined(const Tridiag& M, const Column& rhs, Column& x, double tol,
                  int max_iters) {
    x = thomas_solve(M, rhs);
    const double scale = max_abs(rhs) + 1e-300;
    int it = 0;
    while (true) {
        Column Mx = tridiag_apply(M, x);
        Column res(rhs.size());
        for (std::size_t i = 0; i < rhs.size(); ++i) res[i] = rhs[i] - Mx[i];
        if (max_abs(res) <= tol * scale) return it;
        if (it >= max_iters)
            throw std::runtime_error(
                "implicit diffusion solve failed to converge (residual " +
                std::to_string(max_abs(res) / scale) + " after " +
                std::to_string(it) + " refinement sweeps)");
        Column dx = thomas_solve(M, res);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
        ++it;
    }
}

/// (I + c (nu l(l+1) I + mu A)) for one degree l.
Tridiag mode_matrix(const Tridiag& A, double c, double nu, double mu, int l) {
    Tridiag M = A;
    const double shift = 1.0 + c * nu * double(l) * (l + 1);
    for (double& d : M.diag) d = shift + c * mu * d;
    for (double& o : M.lower) o *= c * mu;
    for (double& o : M.upper) o *= c * mu;
    return M;
}

} // namespace

void StepperConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be positive");
    if (scheme != "euler" && scheme != "bdf2")
        throw std::invalid_argument("StepperConfig: scheme must be 'euler' or 'bdf2'");
    if (!(implicit_tol > 0.0))
        throw std::invalid_argument("StepperConfig: implicit_tol must be positive");
    if (max_implicit_iters < 1)
        throw std::invalid_argument("StepperConfig: max_implicit_iters must be >= 1");
    if (!(cfl_safety > 0.0))
        throw std::invalid_argument("StepperConfig: cfl_safety must be positive");
    if (!(dt_max > 0.0)) throw std::invalid_argument("StepperConfig: dt_max must be positive");
}

Stepper::Stepper(const Model& model, StepperConfig cfg) : model_(model), cfg_(std::move(cfg)) {
    cfg_.validate();
    if (model_.params().diffusion) {
        ModelParams p = model_.params();
        p.diffusion = false; // handled implicitly by this class
        explicit_model_.emplace(p, model_.sgrid(), model_.vgrid(), model_.forcing());
    }
}

void Stepper::project_state(State& U) const { U.v = model_.project_columns(U.v); }

void Stepper::solve_implicit(double c, State& U) {
    const SphereTransform& T = model_.transform();
    const VerticalGrid& vg = model_.vgrid();
    const ModelParams& P = model_.params();
    const int K = vg.K;
    const int L = model_.sgrid().L;
    last_implicit_iters_ = 0;

    // Solves all (l, m) columns of one coefficient stack in place.
    auto solve_stack = [&](std::vector<ScalarCoeffs>& a, double nu, double mu,
                           double alpha, bool remove_column_mean, int lmin) {
        const Tridiag A = neg_d2_matrix(K, alpha);
        Column x(K), rhs(K);
        for (int l = lmin; l <= L; ++l) {
            const Tridiag M = mode_matrix(A, c, nu, mu, l);
            for (int m = 0; m <= l; ++m) {
                const std::size_t idx = a[0].idx(l, m);
                for (int k = 0; k < K; ++k) rhs[k] = a[k].c[idx];
                int it = solve_refined(M, rhs, x, cfg_.implicit_tol,
                                       cfg_.max_implicit_iters);
                last_implicit_iters_ = std::max(last_implicit_iters_, it);
                if (remove_column_mean) {
                    std::complex<long double> s = 0.0L;
                    for (int k = 0; k < K; ++k) s += x[k];
                    const std::complex<double> mean(double(s.real() / K),
                                                    double(s.imag() / K));
                    for (int k = 0; k < K; ++k) x[k] -= mean;
                }
                for (int k = 0; k < K; ++k) a[k].c[idx] = x[k];
            }
        }
    };

    // Velocity: both potentials diffuse with (nu_v, mu_v) and the free-slip
    // closure; the velocity-potential columns also get the constraint
    // projection, which the solve preserves and rounding would otherwise erode.
    std::vector<ScalarCoeffs> psi(K), chi(K);
    for (int k = 0; k < K; ++k) {
        VectorCoeffs vc = T.analyze_vector(U.v.level(k));
        psi[k] = std::move(vc.psi);
        chi[k] = std::move(vc.chi);
    }
    solve_stack(psi, P.nu_v, P.mu_v, 0.0, false, 1);
    solve_stack(chi, P.nu_v, P.mu_v, 0.0, true, 1);
    for (int k = 0; k < K; ++k) {
        VectorCoeffs vc(model_.sgrid().L);
        vc.psi = std::move(psi[k]);
        vc.chi = std::move(chi[k]);
        U.v.set_level(k, T.synthesize_vector(vc));
    }

    auto solve_scalar = [&](Field3D& f, double nu, double mu, double alpha) {
        std::vector<ScalarCoeffs> a(K);
        for (int k = 0; k < K; ++k) a[k] = T.analyze(f.level(k));
        solve_stack(a, nu, mu, alpha, false, 0);
        for (int k = 0; k < K; ++k) f.set_level(k, T.synthesize(a[k]));
    };
    solve_scalar(U.T, P.nu_T, P.mu_T, P.alpha_T);
    solve_scalar(U.q, P.nu_q, P.mu_q, P.beta_q);
}

void Stepper::step(State& U) {
    const Model& emodel = explicit_model_ ? *explicit_model_ : model_;
    const double dt = cfg_.dt;
    const bool implicit = model_.params().diffusion;

    Tendency E = emodel.tendency(U);
    last_phi_s_ = E.phi_s;

    State next = U;
    if (cfg_.scheme == "bdf2" && have_history_) {
        // (3 U1 - 4 U + Uprev) / (2 dt) = 2 E(U) - E(Uprev) + implicit(U1)
        scale(next.v, 4.0 / 3.0);
        scale(next.T, 4.0 / 3.0);
        scale(next.q, 4.0 / 3.0);
        axpy(-1.0 / 3.0, prev_U_.v, next.v);
        axpy(-1.0 / 3.0, prev_U_.T, next.T);
        axpy(-1.0 / 3.0, prev_U_.q, next.q);
        const double w = 2.0 * dt / 3.0;
        axpy(2.0 * w, E.dv, next.v);
        axpy(2.0 * w, E.dT, next.T);
        axpy(2.0 * w, E.dq, next.q);
        axpy(-w, prev_E_.dv, next.v);
        axpy(-w, prev_E_.dT, next.T);
        axpy(-w, prev_E_.dq, next.q);
        if (implicit)
            solve_implicit(w, next);
        else
            project_state(next);
    } else {
        axpy(dt, E.dv, next.v);
        axpy(dt, E.dT, next.T);
        axpy(dt, E.dq, next.q);
        if (implicit)
            solve_implicit(dt, next);
        else
            project_state(next);
    }

    if (cfg_.scheme == "bdf2") {
        prev_U_ = U;
        prev_E_ = std::move(E);
        have_history_ = true;
    }
    next.time = U.time + dt;
    U = std::move(next);
}

void Stepper::run(State& U, int n_steps,
                  const std::function<void(const State&, int)>& observer) {
    if (n_steps < 0) throw std::invalid_argument("Stepper::run: n_steps must be >= 0");
    const double t0 = U.time;
    for (int n = 1; n <= n_steps; ++n) {
        step(U);
        U.time = t0 + n * cfg_.dt; // avoid accumulated round-off in long runs
        if (observer) observer(U, n);
    }
}

double cfl_dt(const Model& model, const State& U, const StepperConfig& cfg) {
    const SphereGrid& g = model.sgrid();
    const VerticalGrid& vg = model.vgrid();
    Field3D w = model.diagnose_w(U.v);

    // Per-ring colatitude spacing (to the nearer neighbour).
    std::vector<double> dth(g.n_lat);
    for (int j = 0; j < g.n_lat; ++j) {
        double d = M_PI;
        if (j > 0) d = std::min(d, std::abs(g.theta[j] - g.theta[j - 1]));
        if (j + 1 < g.n_lat) d = std::min(d, std::abs(g.theta[j + 1] - g.theta[j]));
        dth[j] = d;
    }
    const double dph = g.lon_spacing();

    double rate = 0.0;
    const std::size_t ns = std::size_t(g.n_lat) * g.n_lon;
    for (int k = 0; k < vg.K; ++k)
        for (int j = 0; j < g.n_lat; ++j)
            for (int i = 0; i < g.n_lon; ++i) {
                const std::size_t p = k * ns + std::size_t(j) * g.n_lon + i;
                const double r = std::abs(U.v.vth.v[p]) / dth[j] +
                                 std::abs(U.v.vph.v[p]) / (g.sin_theta[j] * dph) +
                                 std::abs(w.v[p]) / vg.h;
                rate = std::max(rate, r);
            }
    if (rate <= 0.0) return cfg.dt_max;
    return std::min(cfg.dt_max, cfg.cfl_safety / rate);
}

} // namespace mpe
