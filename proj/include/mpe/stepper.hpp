/**
 * @file stepper.hpp
 * @brief IMEX time integration: explicit transport/rotation/pressure terms,
 *        implicit horizontal + vertical diffusion.
 *
 * The implicit part acts diagonally per spherical-harmonic mode, so each
 * (l, m) coefficient column solves a K x K tridiagonal system
 *     (I + c (nu l(l+1) I + mu A_alpha)) x = r,
 * where A_alpha is the negative second-difference matrix with the field's
 * surface closure. Systems are solved by the Thomas algorithm with iterative
 * refinement; failure to reach the requested residual raises an error rather
 * than silently continuing. The divergence column constraint is re-imposed
 * exactly during the velocity solve (removing the column mean of the velocity
 * potential per mode), so it cannot drift over long runs.
 *
 * Schemes: "euler" (first order) and "bdf2" (second-order backward
 * differentiation with extrapolated explicit terms, Euler bootstrap).
 */
#ifndef MPE_STEPPER_HPP
#define MPE_STEPPER_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "mpe/dynamics.hpp"

namespace mpe {

struct StepperConfig {
    double dt = 1e-3;
    std::string scheme = "bdf2"; ///< "euler" or "bdf2"
    double implicit_tol = 1e-12; ///< relative residual target per mode column
    int max_implicit_iters = 8;  ///< refinement sweeps before giving up
    double cfl_safety = 0.5;     ///< multiplier used by cfl_dt
    double dt_max = 0.05;        ///< cap applied by cfl_dt

    bool operator==(const StepperConfig&) const = default;

    void validate() const;
};

class Stepper {
public:
    /// The model reference must outlive the stepper.
    Stepper(const Model& model, StepperConfig cfg);

    const StepperConfig& config() const { return cfg_; }

    /// Advances U by one step of cfg.dt (U.time += dt). The first step of a
    /// bdf2 run uses an Euler bootstrap; call reset_history() when U is
    /// replaced wholesale so the bootstrap happens again.
    void step(State& U);

    /// Advances n_steps steps; the observer (if any) runs after each one with
    /// the completed step index (1-based within this call).
    void run(State& U, int n_steps,
             const std::function<void(const State&, int)>& observer = {});

    void reset_history() { have_history_ = false; }

    /// Surface-geopotential multiplier from the most recent explicit tendency.
    const ScalarCoeffs& last_phi_s() const { return last_phi_s_; }

    /// Worst refinement sweep count over the mode solves of the last step.
    int last_implicit_iters() const { return last_implicit_iters_; }

private:
    /// Solves (I + c * diffusion) in place on all prognostic fields.
    void solve_implicit(double c, State& U);
    void project_state(State& U) const;

    const Model& model_;
    StepperConfig cfg_;
    /// Tendency provider with diffusion switched off (diffusion is implicit);
    /// unset when the model itself runs without diffusion.
    std::optional<Model> explicit_model_;

    bool have_history_ = false;
    State prev_U_;
    Tendency prev_E_;
    ScalarCoeffs last_phi_s_;
    int last_implicit_iters_ = 0;
};

/// Advective time-step bound: cfg.cfl_safety / max over nodes of
/// |v_th|/dtheta + |v_ph|/(sin(theta) dphi) + |w|/h, capped at cfg.dt_max.
double cfl_dt(const Model& model, const State& U, const StepperConfig& cfg);

} // namespace mpe

#endif
