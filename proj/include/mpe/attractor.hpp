/**
 * @file attractor.hpp
 * @brief Eigenbasis of the dissipation operators, spectral projectors,
 *        two-trajectory squeezing/Lipschitz experiments, and the explicit
 *        attractor dimension bound.
 *
 * The linear dissipation operators of the model,
 *   A1 = -Lap - d_xixi            on velocities (Neumann in xi, and the
 *                                  column constraint on the divergent part),
 *   A2 = -Lap - d_xixi            on T (Neumann top, Robin(alpha_T) surface),
 *   A3 = -Lap - d_xixi            on q (Neumann top, Robin(beta_q) surface),
 * diagonalize over tensor products of spherical harmonics and discrete
 * vertical modes: the eigenvalues are l(l+1) + nu_j, where nu_j is an
 * eigenvalue of the K x K second-difference matrix with the matching
 * closures. For A1 the quadratic form <A1 v, v> equals the squared
 * first-order velocity norm (the frame-gradient form of a tangent field
 * already contains its L2 mass), so no extra shift appears and the smallest
 * velocity eigenvalue is l(l+1)|_{l=1} = 2. Vertical-constant divergent
 * modes are excluded: the column constraint forces the divergent part of
 * every column to have zero vertical mean, so the admissible state space
 * only contains the K - 1 mean-zero vertical shapes for that block.
 *
 * SpectralBasis enumerates every real eigenmode of each component (velocity,
 * temperature, humidity), sorted by eigenvalue with a deterministic
 * tie-break. decompose/reconstruct map states to coordinates in which the
 * L2, first-order, and second-order forms are the diagonal sums
 * sum c^2, sum lambda c^2, and sum lambda^2 c^2.
 *
 * The projected first-order forms are evaluated through per-component
 * suffix sums of the nonnegative terms lambda c^2, accumulated from the
 * highest mode down. Because IEEE rounding is monotone and each added term
 * is nonnegative, this makes the projector inequalities exact in floating
 * point: h1_form_high is non-increasing in the cut index n, never exceeds
 * the total h1_form, and the squeezing ratio delta_hat(n) built from these
 * numbers is exactly non-increasing in n.
 *
 * The experiments evolve pairs of full nonlinear trajectories with a shared
 * stepper configuration and diagnose their difference; no separately
 * discretized difference system is involved, so "difference of solutions"
 * is exact by construction.
 */
#ifndef MPE_ATTRACTOR_HPP
#define MPE_ATTRACTOR_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mpe/dynamics.hpp"
#include "mpe/stepper.hpp"

namespace mpe {

/// Which block of the state a basis mode lives in.
enum class ModeKind { toroidal, divergent, temperature, humidity };

/// Velocity / temperature / humidity component index of a mode kind
/// (toroidal and divergent modes both belong to the velocity component 0).
int component_of(ModeKind kind);

/**
 * One real eigenmode. Zonal modes (m = 0) have part = 0; for m > 0 the
 * cosine (part = 0) and sine (part = 1) azimuthal dependencies are distinct
 * real modes with equal eigenvalue lambda = l(l+1) + nu_j.
 */
struct BasisMode {
    ModeKind kind = ModeKind::toroidal;
    int l = 0;    ///< harmonic degree (>= 1 for velocity kinds)
    int m = 0;    ///< harmonic order, 0 <= m <= l
    int j = 0;    ///< vertical mode index into vertical(kind)
    int part = 0; ///< 0 = cosine/real azimuthal part, 1 = sine/imag
    double lambda = 0.0;
};

/// Vertical eigenpairs of one discrete second-difference matrix.
struct VerticalModes {
    std::vector<double> eigenvalue;         ///< nondecreasing
    std::vector<std::vector<double>> shape; ///< shape[j][k], orthonormal
                                            ///< under the level weight h
};

/**
 * Sorted real eigenmodes of the three dissipation operators on one grid
 * shape. Construction solves three dense symmetric K x K eigenproblems
 * (Neumann, Robin(alpha_T), Robin(beta_q)); eigenvector signs are fixed by
 * making the largest-magnitude entry positive, so the basis is deterministic.
 */
class SpectralBasis {
public:
    static constexpr int n_components = 3;

    /// Builds the basis matching the model's grids and surface coefficients.
    explicit SpectralBasis(const Model& model);

    int degree_max() const { return L_; }
    int levels() const { return K_; }

    /// Modes of one component, sorted by (lambda, kind, l, m, j, part).
    const std::vector<BasisMode>& modes(int component) const;
    /// Number of real modes in one component.
    int count(int component) const;
    /// Largest component mode count (the admissible range for cuts).
    int max_count() const { return max_count_; }
    /// k-th smallest eigenvalue of one component (0-based).
    double eigenvalue(int component, int k) const;
    /**
     * Shared cut eigenvalue for ordinal n: the smallest of the three
     * components' n-th eigenvalues, i.e. the smallest eigenvalue that
     * survives the cut. Components with fewer than n + 1 modes do not
     * contribute. Requires 0 <= n < max_count().
     */
    double cut_eigenvalue(int n) const;
    /// Vertical eigenpairs used by modes of the given kind (toroidal and
    /// divergent share the Neumann set; divergent modes start at j = 1).
    const VerticalModes& vertical(ModeKind kind) const;

    /// Flat coordinate slot of a mode, or -1 if the mode does not exist.
    int slot(ModeKind kind, int l, int m, int j, int part) const;

private:
    int L_ = 0, K_ = 0;
    double h_ = 0.0;
    int max_count_ = 0;
    VerticalModes neumann_, robin_T_, robin_q_;
    std::array<std::vector<BasisMode>, n_components> modes_;
    // slot_[kind][(idx(l,m) * K + j) * 2 + part] -> position in modes_
    std::array<std::vector<int>, 4> slot_;
    std::size_t sh_idx(int l, int m) const;
};

/// Free-function factory; identical to constructing SpectralBasis directly.
SpectralBasis build_basis(const Model& model);

/// Real coordinates of a state in the eigenbasis, one vector per component,
/// aligned with SpectralBasis::modes(component).
struct BasisCoords {
    std::array<std::vector<double>, SpectralBasis::n_components> comp;
};

/**
 * Projects a state onto the eigenbasis. The coordinates satisfy, up to
 * transform round-off,
 *   sum c^2          = |v|_2^2 + |T|_2^2 + |q|_2^2,
 *   sum lambda c^2   = <A1 v, v> + <A2 T, T> + <A3 q, q>,
 * where the scalar forms carry the Robin surface term through the matrix
 * closure (second-order consistent with the trace form reported by
 * state_norms). Throws std::invalid_argument on shape mismatch.
 */
BasisCoords decompose(const Model& model, const SpectralBasis& basis, const State& U);

/// Inverse of decompose (exact up to round-off for band-limited states).
/// The divergent block is rebuilt from mean-zero vertical shapes, so the
/// result satisfies the column constraint.
State reconstruct(const Model& model, const SpectralBasis& basis,
                  const BasisCoords& coords, double time = 0.0);

/// Total first-order form sum lambda c^2 over every component.
double h1_form(const SpectralBasis& basis, const BasisCoords& coords);

/**
 * First-order form of the high modes only: per component, the modes with
 * sorted position >= n (components with fewer modes contribute nothing once
 * exhausted). Exactly non-increasing in n and bounded by h1_form; equal to
 * it at n = 0; exactly zero at n = max_count(). Requires
 * 0 <= n <= max_count().
 */
double h1_form_high(const SpectralBasis& basis, const BasisCoords& coords, int n);

/// Second-order form sum lambda^2 c^2 (the squared operator image norm).
double h2_form(const SpectralBasis& basis, const BasisCoords& coords);

/// (projected, total) first-order forms of a difference state: the pair
/// (h1_form_high(n), h1_form) evaluated on shared suffix sums.
std::pair<double, double> phi_psi(const SpectralBasis& basis,
                                  const BasisCoords& coords, int n);

/// Keeps the modes with sorted position >= n in every component.
/// Requires 0 <= n <= max_count(); throws std::out_of_range otherwise.
State project_high(const Model& model, const SpectralBasis& basis,
                   const State& U, int n);

/// Keeps the modes with sorted position < n (complement of project_high).
State project_low(const Model& model, const SpectralBasis& basis,
                  const State& U, int n);

/**
 * Sampled difference of two co-evolved nonlinear trajectories: basis
 * coordinates of (state1 - state2) at the sample times, plus the
 * first-order form psi of every sample.
 */
struct DiffTrajectory {
    std::vector<double> time;
    std::vector<BasisCoords> diff;
    std::vector<double> psi;
};

/**
 * Evolves two states with identical stepper settings for
 * round(t_horizon / dt) steps, sampling the difference at t = 0, every
 * sample_stride-th step, and the final step. Throws on stepper failure in
 * either run.
 */
DiffTrajectory evolve_pair(const Model& model, const SpectralBasis& basis,
                           const State& a, const State& b,
                           const StepperConfig& scfg, double t_horizon,
                           int sample_stride = 1);

/// Parameters of the paired-trajectory ensemble.
struct EnsembleConfig {
    int n_pairs = 8;             ///< number of (base, perturbed) pairs
    double spin_up_time = 5.0;   ///< settle time before the first base state
    double pair_spacing = 0.5;   ///< orbit time between consecutive bases
    double eps = 1e-5;           ///< perturbation size relative to the state norm
    int perturb_lmax = 5;        ///< harmonic degree cap of the perturbation
    std::uint64_t seed = 1u;     ///< stream seed; runs reproduce bit-for-bit

    /// Throws std::invalid_argument on non-positive sizes or negative times.
    void validate() const;
};

/**
 * Draws an ensemble of state pairs near the numerical attractor: a seeded
 * random state is spun up for spin_up_time, the orbit is then sampled every
 * pair_spacing, and each sampled base state is paired with a perturbed copy.
 * Perturbations are seeded random fields limited to degrees <= perturb_lmax
 * and scaled so their combined L2 norm is eps times the base state's
 * (absolute eps if the base state is zero).
 */
std::vector<std::array<State, 2>> make_ensemble(const Model& model,
                                                const StepperConfig& scfg,
                                                const EnsembleConfig& ecfg);

/// Basis coordinates of one pair's difference at t = 0 and t = t_horizon.
struct PairEndpoints {
    BasisCoords d0, dT;
};

/// Evolves every pair and keeps only the difference endpoints.
std::vector<PairEndpoints> evolve_ensemble(
    const Model& model, const SpectralBasis& basis,
    const std::vector<std::array<State, 2>>& pairs, const StepperConfig& scfg,
    double t_horizon);

/**
 * Squeezing diagnosis at one cut index n. delta_hat is the largest ratio
 * (projected final form) / (initial form) over the admissible pairs; pairs
 * whose initial form falls below psi_floor are flagged excluded and do not
 * contribute. delta_hat is empty when no pair is admissible.
 */
struct SqueezeReport {
    int n = 0;
    double t_horizon = 0.0;
    double lambda_n = 0.0; ///< cut eigenvalue; NaN when n == max_count()
    double psi_floor = 0.0;
    std::vector<double> psi0;   ///< initial form, per pair
    std::vector<double> phi_T;  ///< projected final form, per pair
    std::vector<bool> excluded; ///< initial form below psi_floor
    std::optional<double> delta_hat;

    int n_included() const;
};

/// Builds the report from precomputed endpoints (cheap; usable for many n).
SqueezeReport squeeze_report(const SpectralBasis& basis,
                             const std::vector<PairEndpoints>& endpoints,
                             int n, double t_horizon, double psi_floor = 1e-24);

/// evolve_ensemble followed by squeeze_report.
SqueezeReport squeeze_experiment(const Model& model, const SpectralBasis& basis,
                                 const std::vector<std::array<State, 2>>& pairs,
                                 const StepperConfig& scfg, double t_horizon,
                                 int n, double psi_floor = 1e-24);

/**
 * Growth envelope of pair differences: at each sample time,
 *   ratio(t) = [psi(t) + int_0^t (second-order form) dt'] / psi(0)
 * per admissible pair (trapezoidal integral over the sample grid), maximized
 * over pairs and then monotonized by a running maximum. gamma starts at
 * exactly 1 and is non-decreasing by construction.
 */
struct GammaTable {
    std::vector<double> time;
    std::vector<double> gamma;
    std::vector<bool> excluded; ///< per pair, initial form below psi_floor
    int n_included() const;
};

GammaTable estimate_gamma(const Model& model, const SpectralBasis& basis,
                          const std::vector<std::array<State, 2>>& pairs,
                          const StepperConfig& scfg, double t_horizon,
                          int sample_stride = 1, double psi_floor = 1e-24);

/**
 * Explicit fractal (box-counting) dimension bound of an invariant set from
 * the squeezing property: for an n-mode cut with Lipschitz constant c and
 * squeezing factor delta in (0, 1),
 *   bound = n_modes * ln(8 G^2 c^2 / (1 - delta^2)) / ln(2 / (1 + delta^2)),
 * where G = 0.8346268 is Gauss's constant (the reciprocal arithmetic-
 * geometric mean of 1 and sqrt(2)). Exactly linear in n_modes. Throws
 * std::invalid_argument unless n_modes >= 1, c > 0 and 0 < delta < 1.
 */
double dimension_bound(int n_modes, double c, double delta);

} // namespace mpe

#endif
