/**
 * @file norms.hpp
 * @brief Volume norms, dissipation quadratic forms, and energy-budget
 *        diagnostics for solver states.
 *
 * Conventions:
 *  - L2 norms integrate over the shell with the Gauss quadrature weights
 *    horizontally and uniform cell weights h vertically.
 *  - The first-order norms are the natural energy forms of each field:
 *        |v|_1^2 = int |D v|^2 + |d_xi v|^2 + |v|^2,
 *        |T|_1^2 = int |grad T|^2 + |d_xi T|^2 + alpha_s int_{xi=1} T^2,
 *    and likewise for q with beta_s. D is the covariant frame derivative;
 *    its square plus the L2 mass equals the vector-Laplacian quadratic form,
 *    so the velocity norm weight per harmonic degree is (l(l+1))^2 exactly.
 *    The scalar surface value is taken by second-order extrapolation from the
 *    last two cell centers, so a constant field evaluates exactly.
 *  - dissipation_forms returns the quadratic forms exactly matching the
 *    discrete energy identity of the assembled diffusion terms (surface
 *    closure included); <diffusion(U), U> + forms = 0 to round-off.
 *  - h2_norm_sq is |A U|^2 for the per-field elliptic operators
 *    A = -nu Lap - mu d_xi^2 with the field's surface closure, the quantity
 *    whose time integral the a priori bounds control.
 */
#ifndef MPE_NORMS_HPP
#define MPE_NORMS_HPP

#include <string>
#include <string_view>
#include <vector>

#include "mpe/dynamics.hpp"

namespace mpe {

/// Volume L2 norms (grid quadrature).
double l2_norm(const Model& m, const Field3D& f);
double l2_norm(const Model& m, const VField3D& v);

/// Volume inner products.
double vol_inner(const Model& m, const Field3D& a, const Field3D& b);
double vol_inner(const Model& m, const VField3D& a, const VField3D& b);

/// Size of a tendency, sqrt(|dv|^2 + |dT|^2 + |dq|^2); the stationarity
/// monitor |d_t U|_2.
double tendency_l2(const Model& m, const Tendency& t);

/// |d_t U|_2 evaluated from a fresh tendency of U.
double dt_monitor(const Model& m, const State& U);

struct StateNorms {
    double l2_v = 0, l2_T = 0, l2_q = 0;
    double h1_v = 0, h1_T = 0, h1_q = 0;
};
StateNorms state_norms(const Model& m, const State& U);

/// Exact discrete dissipation forms per field (already multiplied by the
/// respective nu/mu coefficients).
struct DissipationForms {
    double v = 0, T = 0, q = 0;
    double total() const { return v + T + q; }
};
DissipationForms dissipation_forms(const Model& m, const State& U);

/// |A U|^2 with A the per-field dissipation operator (see file comment).
double h2_norm_sq(const Model& m, const State& U);

struct EnergyBudget {
    double energy = 0;      ///< (|v|^2 + |T|^2 + |q|^2) / 2
    double dE_dt = 0;       ///< <tendency, U>
    double production = 0;  ///< <Q1, T> + <Q2, q> (0 when forcing is off)
    double dissipation = 0; ///< dissipation_forms total (0 when diffusion off)
    /// dE_dt - production + dissipation; the rotation and pressure terms
    /// cancel exactly, so this measures the vertical-transport defect, which
    /// is O(h^2) for smooth states.
    double residual = 0;
};
EnergyBudget energy_budget(const Model& m, const State& U);
/// Same but reusing an already computed tendency of U.
EnergyBudget energy_budget(const Model& m, const State& U, const Tendency& t);

/// One verified cancellation of the spatial discretization.
struct IdentityCheck {
    std::string name;
    double residual = 0;  ///< absolute value of the quantity that should vanish
    double scale = 0;     ///< combined size of the terms that cancel
    double relative = 0;  ///< residual / scale (0 when both are exactly 0)
    double tol = 0;       ///< relative tolerance applied to this check
    bool precondition_ok = true;  ///< inputs satisfy the identity's hypothesis
    bool pass = false;            ///< precondition_ok && relative <= tol
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    bool all_pass() const;
    /// Lookup by name; throws std::out_of_range if absent.
    const IdentityCheck& check(std::string_view name) const;
};

/**
 * Verifies, on arbitrary sampled fields, the integral cancellations that the
 * energy estimates rest on:
 *
 *  - "gradient adjoint":        int h div u + int grad h . u = 0 per level.
 *  - "pressure work":           int_shell grad h . v = 0; requires the
 *                               column-mean divergence of v to vanish.
 *  - "vector laplacian form":   <-Lap u, v> = <u, v> + <Du, Dv> per level,
 *                               D the covariant gradient; <Du, Dv> is
 *                               evaluated in its frame-free form
 *                               sum_c grad u_c . grad v_c - u . v over the
 *                               Cartesian components, so the integrand is
 *                               smooth and the quadrature exact.
 *  - "surface transport closure": int (grad_v h + h div v) dS = 0 per level.
 *  - "transport skew velocity" / "temperature" / "humidity":
 *                               <grad_v x + w d_xi x, x> over the shell is
 *                               O(h_xi^2); w is diagnosed from v and d_xi uses
 *                               the field's own surface closure. Requires the
 *                               constraint on v.
 *
 * Horizontal identities are exact in quadrature for band-limited inputs with
 * margin (checked at 1e-10 relative); the transport-skew defects are checked
 * against a calibrated constant times h_xi^2. Inputs whose column-mean
 * divergence does not vanish get precondition_ok = false on the dependent
 * checks instead of a spurious failure.
 */
IdentityReport check_identities(const Model& m, const VField3D& v, const VField3D& u,
                                const Field3D& T, const Field3D& q, const ScalarField2D& h);

/**
 * Running check of the integrated smoothness bound: accumulates
 * I(t) = int_0^t f(s) ds by the trapezoid rule from observed samples
 * (f is typically h2_norm_sq of the trajectory) and tracks
 *     c(tau) = max over sampled s <= tau of I(s) / (sqrt(s) + s),
 * which the a priori estimates require to stay bounded as tau grows.
 * Sample times must be non-decreasing; s = 0 is excluded from the max.
 */
class H2IntegralMonitor {
public:
    /// t is measured from the start of the monitored window.
    void add_sample(double t, double f);
    double integral() const { return double(acc_); }
    double c_of_tau() const { return c_; }
    int samples() const { return n_; }

private:
    bool have_ = false;
    double t_prev_ = 0, f_prev_ = 0;
    long double acc_ = 0;
    double c_ = 0;
    int n_ = 0;
};

} // namespace mpe

#endif
