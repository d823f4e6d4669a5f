/**
 * @file dynamics.hpp
 * @brief Model state, parameters, diagnostic relations, and the explicit
 *        tendency (right-hand side) of the viscous moist primitive equations
 *        on the spherical shell in pressure coordinate.
 *
 * Prognostic unknowns: horizontal velocity v = (v_theta, v_phi), temperature
 * T, and water-vapor mixing ratio q on S^2 x (0, 1). The vertical velocity
 * w and the geopotential are diagnostic:
 *   w(xi)   = int_xi^1 div v dxi',
 *   Phi(xi) = Phi_s + int_xi^1 (bP/p)(1 + a q) T dxi',
 * with the constraint int_0^1 div v dxi = 0 enforced by a column projection
 * whose multiplier is the surface geopotential Phi_s.
 *
 * Equations solved (RHS convention: d/dt U = tendency):
 *   dv/dt = -grad_v v - w d_xi v - (f/R0) v_perp - grad Phi_s
 *           - int_xi^1 (bP/p) grad[(1+aq)T] dxi' + nu_v Lap v + mu_v d_xixi v
 *   dT/dt = -grad_v T - w d_xi T + (bP/p)(1+aq) w
 *           + nu_T Lap T + mu_T d_xixi T + Q1
 *   dq/dt = -grad_v q - w d_xi q + nu_q Lap q + mu_q d_xixi q + Q2
 * with f = 2 cos(theta), v_perp = (-v_phi, v_theta), p = (P - p0) xi + p0.
 * Boundary conditions: d_xi v = 0 at both ends; d_xi T = -alpha_T T and
 * d_xi q = -beta_q q at the surface xi = 1, Neumann at the top.
 */
#ifndef MPE_DYNAMICS_HPP
#define MPE_DYNAMICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mpe/column.hpp"
#include "mpe/sphere.hpp"

namespace mpe {

/// Physical constants and term switches.
struct ModelParams {
    double rossby = 1.0;  ///< R0 in the Coriolis term f/R0
    double b = 1.0;       ///< buoyancy prefactor in bP/p
    double P = 1.0;       ///< surface pressure
    double p0 = 0.1;      ///< top pressure, 0 < p0 < P
    double a_moist = 0.618; ///< moisture-buoyancy coupling in (1 + a q)
    double alpha_T = 1.0; ///< surface Robin coefficient for T
    double beta_q = 1.0;  ///< surface Robin coefficient for q
    double nu_v = 1.0, mu_v = 1.0; ///< horizontal / vertical viscosity
    double nu_T = 1.0, mu_T = 1.0; ///< horizontal / vertical heat diffusivity
    double nu_q = 1.0, mu_q = 1.0; ///< horizontal / vertical vapor diffusivity

    // Term switches; production runs keep all of them on. Tests flip subsets
    // to isolate single terms (the tendency is linear in the switches).
    bool advection = true; ///< grad_v and w d_xi transport in all equations
    bool coriolis = true;  ///< (f/R0) v_perp
    bool buoyancy = true;  ///< grad-temperature integral in v and heating in T
    bool diffusion = true; ///< nu Lap + mu d_xixi in all equations
    bool forcing = true;   ///< Q1, Q2 sources

    bool operator==(const ModelParams&) const = default;

    /// Throws std::invalid_argument describing the first violated bound.
    void validate() const;
};

/// Prognostic fields on the shell grid plus model time.
struct State {
    VField3D v;
    Field3D T, q;
    double time = 0.0;

    State() = default;
    State(int K, int n_lat, int n_lon)
        : v(K, n_lat, n_lon), T(K, n_lat, n_lon), q(K, n_lat, n_lon) {}
};

/// Steady sources for the T and q equations.
struct Forcing {
    Field3D Q1, Q2;
};

/// Right-hand side d/dt (v, T, q) plus the diagnosed surface geopotential
/// (spectral coefficients; degree >= 1, mean-zero gauge).
struct Tendency {
    VField3D dv;
    Field3D dT, dq;
    ScalarCoeffs phi_s;
};

/**
 * Couples the horizontal transform, the vertical grid, the parameters, and
 * the forcing; owns all precomputed node values (Coriolis parameter, bP/p
 * profile). All methods are const and deterministic.
 */
class Model {
public:
    Model(ModelParams params, SphereGrid sgrid, VerticalGrid vgrid, Forcing forcing);

    const ModelParams& params() const { return params_; }
    const SphereGrid& sgrid() const { return sgrid_; }
    const VerticalGrid& vgrid() const { return vgrid_; }
    const SphereTransform& transform() const { return transform_; }
    const Forcing& forcing() const { return forcing_; }

    /// bP/p at level k.
    double buoyancy_profile(int k) const { return c_profile_[k]; }

    /// Throws std::invalid_argument if the state shapes do not match the grids.
    void check_state(const State& U) const;

    /// Diagnostic vertical velocity w = int_xi^1 div v dxi'.
    Field3D diagnose_w(const VField3D& v) const;

    /// Pointwise residual of int_0^1 div v dxi = 0.
    ScalarField2D constraint_residual_field(const VField3D& v) const;
    /// Max-norm of the constraint residual.
    double constraint_residual(const VField3D& v) const;

    /**
     * Removes the vertical mean of the divergent part of every column, the
     * discrete form of the incompressibility constraint. If phi_out is
     * non-null it receives the multiplier potential (for the tendency this
     * is the surface geopotential Phi_s).
     */
    VField3D project_columns(const VField3D& v, ScalarCoeffs* phi_out = nullptr) const;

    /// Full explicit right-hand side at the state's own time.
    Tendency tendency(const State& U) const;

    /// Geopotential Phi = Phi_s + int_xi^1 (bP/p)(1+aq) T dxi'.
    Field3D reconstruct_phi(const State& U, const ScalarCoeffs& phi_s) const;

    /**
     * Smooth random state: spectra decay exponentially in degree (cut at
     * lmax_cut), vertical structure is a random low-order cosine series, and
     * the velocity is column-projected. Deterministic in (seed, shapes).
     */
    State random_state(std::uint64_t seed, double amplitude, int lmax_cut) const;

private:
    ModelParams params_;
    SphereGrid sgrid_;
    VerticalGrid vgrid_;
    SphereTransform transform_;
    Forcing forcing_;
    std::vector<double> c_profile_;  ///< bP/p at cell centers
    std::vector<double> coriolis_f_; ///< f/R0 = 2 cos(theta_j)/R0 per ring
};

/**
 * Forcing presets:
 *  - "none": zero sources.
 *  - "steady": analytic band-limited heating with zonal and wavenumber-one
 *    structure and a smooth vertical profile, scaled by amplitude; the vapor
 *    source is a weaker copy with shifted phase.
 * Unknown names throw std::invalid_argument.
 */
Forcing make_forcing(const std::string& preset, const SphereGrid& sgrid,
                     const VerticalGrid& vgrid, double amplitude);

} // namespace mpe

#endif
