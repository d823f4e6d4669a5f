/**
 * @file attractor.cpp
 * @brief Eigenbasis construction, coordinate maps, spectral projectors, and
 *        the paired-trajectory squeezing/growth experiments.
 */
#include "mpe/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include <Eigen/Dense>

#include "mpe/norms.hpp"
#include "mpe/rng.hpp"

namespace mpe {
namespace {

constexpr double k_nan = std::numeric_limits<double>::quiet_NaN();
const double k_sqrt2 = std::sqrt(2.0);

int kind_rank(ModeKind kind) { return static_cast<int>(kind); }

/**
 * Dense symmetric eigensolve of a tridiagonal vertical matrix. Shapes are
 * returned orthonormal under the level weight h, with the sign fixed so the
 * largest-magnitude entry (first such on ties) is positive.
 */
VerticalModes solve_vertical(const Tridiag& A, double h) {
    const int n = A.n();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        M(i, i) = A.diag[i];
        if (i + 1 < n) {
            M(i, i + 1) = A.upper[i];
            M(i + 1, i) = A.lower[i];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("vertical eigensolve did not converge");

    VerticalModes out;
    out.eigenvalue.resize(n);
    out.shape.assign(n, std::vector<double>(n, 0.0));
    const double unit = 1.0 / std::sqrt(h);
    for (int j = 0; j < n; ++j) {
        out.eigenvalue[j] = es.eigenvalues()(j);
        int peak = 0;
        for (int k = 1; k < n; ++k)
            if (std::abs(es.eigenvectors()(k, j)) > std::abs(es.eigenvectors()(peak, j)))
                peak = k;
        const double sign = es.eigenvectors()(peak, j) < 0.0 ? -1.0 : 1.0;
        for (int k = 0; k < n; ++k)
            out.shape[j][k] = sign * unit * es.eigenvectors()(k, j);
    }
    return out;
}

int lmin_of(ModeKind kind) {
    return kind == ModeKind::temperature || kind == ModeKind::humidity ? 0 : 1;
}

/// First admissible vertical index: the divergent block skips the constant
/// shape, which the column constraint excludes from the state space.
int jmin_of(ModeKind kind) { return kind == ModeKind::divergent ? 1 : 0; }

constexpr std::array<ModeKind, 4> k_all_kinds = {
    ModeKind::toroidal, ModeKind::divergent, ModeKind::temperature,
    ModeKind::humidity};

void check_pairing(const Model& model, const SpectralBasis& basis) {
    if (basis.degree_max() != model.sgrid().L || basis.levels() != model.vgrid().K)
        throw std::invalid_argument("basis grid shape does not match the model");
}

void check_coords(const SpectralBasis& basis, const BasisCoords& coords) {
    for (int comp = 0; comp < SpectralBasis::n_components; ++comp)
        if (static_cast<int>(coords.comp[comp].size()) != basis.count(comp))
            throw std::invalid_argument("coordinate vector length does not match the basis");
}

/// Spectral stacks of a state, one coefficient set per level.
struct SpectralStacks {
    std::vector<VectorCoeffs> vel;
    std::vector<ScalarCoeffs> T, q;
};

SpectralStacks analyze_state(const Model& model, const State& U) {
    const auto& tr = model.transform();
    const int K = model.vgrid().K;
    SpectralStacks s;
    s.vel.reserve(K);
    s.T.reserve(K);
    s.q.reserve(K);
    for (int k = 0; k < K; ++k) {
        s.vel.push_back(tr.analyze_vector(U.v.level(k)));
        s.T.push_back(tr.analyze(U.T.level(k)));
        s.q.push_back(tr.analyze(U.q.level(k)));
    }
    return s;
}

const ScalarCoeffs& stack_of(const SpectralStacks& s, ModeKind kind, int k) {
    switch (kind) {
        case ModeKind::toroidal: return s.vel[k].psi;
        case ModeKind::divergent: return s.vel[k].chi;
        case ModeKind::temperature: return s.T[k];
        case ModeKind::humidity: return s.q[k];
    }
    throw std::logic_error("unreachable mode kind");
}

ScalarCoeffs& stack_of(SpectralStacks& s, ModeKind kind, int k) {
    return const_cast<ScalarCoeffs&>(stack_of(std::as_const(s), kind, k));
}

/**
 * Per-component suffix sums S[k] = sum_{t >= k} lambda_t c_t^2, accumulated
 * from the highest mode down. Every term is nonnegative and IEEE rounding is
 * monotone, so S[k] >= S[k+1] holds exactly; the projected forms built from
 * these sums inherit exact monotonicity in the cut index.
 */
std::array<std::vector<long double>, 3> h1_suffix(const SpectralBasis& basis,
                                                  const BasisCoords& coords) {
    check_coords(basis, coords);
    std::array<std::vector<long double>, 3> S;
    for (int comp = 0; comp < SpectralBasis::n_components; ++comp) {
        const auto& modes = basis.modes(comp);
        const auto& x = coords.comp[comp];
        auto& s = S[comp];
        s.assign(x.size() + 1, 0.0L);
        for (int k = static_cast<int>(x.size()) - 1; k >= 0; --k)
            s[k] = s[k + 1] +
                   static_cast<long double>(modes[k].lambda) * x[k] * x[k];
    }
    return S;
}

double high_form_from_suffix(const std::array<std::vector<long double>, 3>& S, int n) {
    long double total = 0.0L;
    for (const auto& s : S) {
        const std::size_t cut = std::min<std::size_t>(n, s.size() - 1);
        total += s[cut];
    }
    return static_cast<double>(total);
}

int steps_for(double duration, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("stepper dt must be positive");
    if (!(duration >= 0.0))
        throw std::invalid_argument("duration must be nonnegative");
    return static_cast<int>(std::llround(duration / dt));
}

State state_difference(const State& a, const State& b) {
    State d = a;
    axpy(-1.0, b.v, d.v);
    axpy(-1.0, b.T, d.T);
    axpy(-1.0, b.q, d.q);
    return d;
}

} // namespace

int component_of(ModeKind kind) {
    switch (kind) {
        case ModeKind::toroidal:
        case ModeKind::divergent: return 0;
        case ModeKind::temperature: return 1;
        case ModeKind::humidity: return 2;
    }
    throw std::logic_error("unreachable mode kind");
}

SpectralBasis::SpectralBasis(const Model& model)
    : L_(model.sgrid().L), K_(model.vgrid().K), h_(model.vgrid().h) {
    const ModelParams& p = model.params();
    neumann_ = solve_vertical(neg_d2_matrix(K_, 0.0), h_);
    robin_T_ = solve_vertical(neg_d2_matrix(K_, p.alpha_T), h_);
    robin_q_ = solve_vertical(neg_d2_matrix(K_, p.beta_q), h_);

    for (ModeKind kind : k_all_kinds) {
        const VerticalModes& vm = vertical(kind);
        auto& dst = modes_[component_of(kind)];
        for (int m = 0; m <= L_; ++m)
            for (int l = std::max(lmin_of(kind), m); l <= L_; ++l)
                for (int j = jmin_of(kind); j < K_; ++j) {
                    const double lambda =
                        static_cast<double>(l) * (l + 1) + vm.eigenvalue[j];
                    dst.push_back({kind, l, m, j, 0, lambda});
                    if (m > 0) dst.push_back({kind, l, m, j, 1, lambda});
                }
    }
    for (auto& vec : modes_)
        std::sort(vec.begin(), vec.end(),
                  [](const BasisMode& a, const BasisMode& b) {
                      return std::tuple(a.lambda, kind_rank(a.kind), a.l, a.m,
                                        a.j, a.part) <
                             std::tuple(b.lambda, kind_rank(b.kind), b.l, b.m,
                                        b.j, b.part);
                  });

    const std::size_t n_sh = std::size_t(L_ + 1) * (L_ + 2) / 2;
    for (auto& table : slot_) table.assign(n_sh * K_ * 2, -1);
    for (const auto& vec : modes_)
        for (std::size_t t = 0; t < vec.size(); ++t) {
            const BasisMode& md = vec[t];
            slot_[kind_rank(md.kind)][(sh_idx(md.l, md.m) * K_ + md.j) * 2 +
                                      md.part] = static_cast<int>(t);
        }
    max_count_ = 0;
    for (const auto& vec : modes_)
        max_count_ = std::max(max_count_, static_cast<int>(vec.size()));
}

std::size_t SpectralBasis::sh_idx(int l, int m) const {
    return std::size_t(m) * (L_ + 1) - std::size_t(m) * (m - 1) / 2 +
           std::size_t(l - m);
}

const std::vector<BasisMode>& SpectralBasis::modes(int component) const {
    if (component < 0 || component >= n_components)
        throw std::out_of_range("component index must be 0, 1 or 2");
    return modes_[component];
}

int SpectralBasis::count(int component) const {
    return static_cast<int>(modes(component).size());
}

double SpectralBasis::eigenvalue(int component, int k) const {
    const auto& vec = modes(component);
    if (k < 0 || k >= static_cast<int>(vec.size()))
        throw std::out_of_range("eigenvalue index out of range");
    return vec[k].lambda;
}

double SpectralBasis::cut_eigenvalue(int n) const {
    if (n < 0 || n >= max_count_)
        throw std::out_of_range("cut index out of range");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& vec : modes_)
        if (n < static_cast<int>(vec.size()))
            best = std::min(best, vec[n].lambda);
    return best;
}

const VerticalModes& SpectralBasis::vertical(ModeKind kind) const {
    switch (kind) {
        case ModeKind::toroidal:
        case ModeKind::divergent: return neumann_;
        case ModeKind::temperature: return robin_T_;
        case ModeKind::humidity: return robin_q_;
    }
    throw std::logic_error("unreachable mode kind");
}

int SpectralBasis::slot(ModeKind kind, int l, int m, int j, int part) const {
    if (l < 0 || l > L_ || m < 0 || m > l || j < 0 || j >= K_ || part < 0 ||
        part > 1)
        return -1;
    return slot_[kind_rank(kind)][(sh_idx(l, m) * K_ + j) * 2 + part];
}

SpectralBasis build_basis(const Model& model) { return SpectralBasis(model); }

BasisCoords decompose(const Model& model, const SpectralBasis& basis,
                      const State& U) {
    check_pairing(model, basis);
    model.check_state(U);
    const int L = basis.degree_max();
    const int K = basis.levels();
    const double h = model.vgrid().h;
    const SpectralStacks stacks = analyze_state(model, U);

    BasisCoords out;
    for (int comp = 0; comp < SpectralBasis::n_components; ++comp)
        out.comp[comp].assign(basis.count(comp), 0.0);

    std::vector<std::complex<double>> column(K);
    for (ModeKind kind : k_all_kinds) {
        const VerticalModes& vm = basis.vertical(kind);
        auto& dst = out.comp[component_of(kind)];
        const bool velocity = component_of(kind) == 0;
        for (int m = 0; m <= L; ++m)
            for (int l = std::max(lmin_of(kind), m); l <= L; ++l) {
                for (int k = 0; k < K; ++k)
                    column[k] = stack_of(stacks, kind, k).at(l, m);
                const double wfac =
                    velocity ? std::sqrt(static_cast<double>(l) * (l + 1)) : 1.0;
                for (int j = jmin_of(kind); j < K; ++j) {
                    long double re = 0.0L, im = 0.0L;
                    for (int k = 0; k < K; ++k) {
                        re += vm.shape[j][k] * column[k].real();
                        im += vm.shape[j][k] * column[k].imag();
                    }
                    const double cre = static_cast<double>(wfac * h * re);
                    const double cim = static_cast<double>(wfac * h * im);
                    if (m == 0) {
                        dst[basis.slot(kind, l, m, j, 0)] = cre;
                    } else {
                        dst[basis.slot(kind, l, m, j, 0)] = k_sqrt2 * cre;
                        dst[basis.slot(kind, l, m, j, 1)] = k_sqrt2 * cim;
                    }
                }
            }
    }
    return out;
}

State reconstruct(const Model& model, const SpectralBasis& basis,
                  const BasisCoords& coords, double time) {
    check_pairing(model, basis);
    check_coords(basis, coords);
    const int L = basis.degree_max();
    const int K = basis.levels();
    const auto& sg = model.sgrid();

    SpectralStacks stacks;
    stacks.vel.assign(K, VectorCoeffs(L));
    stacks.T.assign(K, ScalarCoeffs(L));
    stacks.q.assign(K, ScalarCoeffs(L));

    for (ModeKind kind : k_all_kinds) {
        const VerticalModes& vm = basis.vertical(kind);
        const auto& src = coords.comp[component_of(kind)];
        const bool velocity = component_of(kind) == 0;
        for (int m = 0; m <= L; ++m)
            for (int l = std::max(lmin_of(kind), m); l <= L; ++l) {
                const double wfac =
                    velocity ? std::sqrt(static_cast<double>(l) * (l + 1)) : 1.0;
                for (int j = jmin_of(kind); j < K; ++j) {
                    double cre = src[basis.slot(kind, l, m, j, 0)];
                    double cim = 0.0;
                    if (m > 0) {
                        cre /= k_sqrt2;
                        cim = src[basis.slot(kind, l, m, j, 1)] / k_sqrt2;
                    }
                    const std::complex<double> amp(cre / wfac, cim / wfac);
                    for (int k = 0; k < K; ++k)
                        stack_of(stacks, kind, k).at(l, m) +=
                            amp * vm.shape[j][k];
                }
            }
    }

    State out(K, sg.n_lat, sg.n_lon);
    out.time = time;
    const auto& tr = model.transform();
    for (int k = 0; k < K; ++k) {
        out.v.set_level(k, tr.synthesize_vector(stacks.vel[k]));
        out.T.set_level(k, tr.synthesize(stacks.T[k]));
        out.q.set_level(k, tr.synthesize(stacks.q[k]));
    }
    return out;
}

double h1_form(const SpectralBasis& basis, const BasisCoords& coords) {
    return high_form_from_suffix(h1_suffix(basis, coords), 0);
}

double h1_form_high(const SpectralBasis& basis, const BasisCoords& coords,
                    int n) {
    if (n < 0 || n > basis.max_count())
        throw std::out_of_range("cut index out of range");
    return high_form_from_suffix(h1_suffix(basis, coords), n);
}

double h2_form(const SpectralBasis& basis, const BasisCoords& coords) {
    check_coords(basis, coords);
    long double total = 0.0L;
    for (int comp = 0; comp < SpectralBasis::n_components; ++comp) {
        const auto& modes = basis.modes(comp);
        const auto& x = coords.comp[comp];
        for (std::size_t k = 0; k < x.size(); ++k) {
            const long double lam = modes[k].lambda;
            total += lam * lam * x[k] * x[k];
        }
    }
    return static_cast<double>(total);
}

std::pair<double, double> phi_psi(const SpectralBasis& basis,
                                  const BasisCoords& coords, int n) {
    if (n < 0 || n > basis.max_count())
        throw std::out_of_range("cut index out of range");
    const auto S = h1_suffix(basis, coords);
    return {high_form_from_suffix(S, n), high_form_from_suffix(S, 0)};
}

State project_high(const Model& model, const SpectralBasis& basis,
                   const State& U, int n) {
    if (n < 0 || n > basis.max_count())
        throw std::out_of_range("cut index out of range");
    BasisCoords coords = decompose(model, basis, U);
    for (auto& comp : coords.comp) {
        const auto cut = std::min<std::size_t>(n, comp.size());
        std::fill(comp.begin(), comp.begin() + cut, 0.0);
    }
    return reconstruct(model, basis, coords, U.time);
}

State project_low(const Model& model, const SpectralBasis& basis,
                  const State& U, int n) {
    if (n < 0 || n > basis.max_count())
        throw std::out_of_range("cut index out of range");
    BasisCoords coords = decompose(model, basis, U);
    for (auto& comp : coords.comp) {
        const auto cut = std::min<std::size_t>(n, comp.size());
        std::fill(comp.begin() + cut, comp.end(), 0.0);
    }
    return reconstruct(model, basis, coords, U.time);
}

DiffTrajectory evolve_pair(const Model& model, const SpectralBasis& basis,
                           const State& a, const State& b,
                           const StepperConfig& scfg, double t_horizon,
                           int sample_stride) {
    check_pairing(model, basis);
    if (sample_stride < 1)
        throw std::invalid_argument("sample_stride must be >= 1");
    const int n_steps = steps_for(t_horizon, scfg.dt);

    Stepper stepper_a(model, scfg), stepper_b(model, scfg);
    State ua = a, ub = b;
    ua.time = 0.0; // the difference timeline starts at zero
    ub.time = 0.0;

    DiffTrajectory out;
    auto record = [&](int step) {
        BasisCoords coords =
            decompose(model, basis, state_difference(ua, ub));
        out.time.push_back(step * scfg.dt);
        out.psi.push_back(h1_form(basis, coords));
        out.diff.push_back(std::move(coords));
    };
    record(0);
    for (int s = 1; s <= n_steps; ++s) {
        stepper_a.step(ua);
        stepper_b.step(ub);
        if (s % sample_stride == 0 || s == n_steps) record(s);
    }
    return out;
}

void EnsembleConfig::validate() const {
    if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
    if (!(spin_up_time >= 0.0))
        throw std::invalid_argument("spin_up_time must be nonnegative");
    if (!(pair_spacing >= 0.0))
        throw std::invalid_argument("pair_spacing must be nonnegative");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (perturb_lmax < 1)
        throw std::invalid_argument("perturb_lmax must be >= 1");
}

std::vector<std::array<State, 2>> make_ensemble(const Model& model,
                                                const StepperConfig& scfg,
                                                const EnsembleConfig& ecfg) {
    ecfg.validate();
    scfg.validate();
    auto perturb_seeds = named_stream(ecfg.seed, "ensemble-perturbation");
    auto init_seeds = named_stream(ecfg.seed, "ensemble-initial");

    State base = model.random_state(init_seeds(), 0.1, model.sgrid().L);
    Stepper stepper(model, scfg);
    stepper.run(base, steps_for(ecfg.spin_up_time, scfg.dt));
    const int gap_steps = steps_for(ecfg.pair_spacing, scfg.dt);
    const int lmax = std::min(ecfg.perturb_lmax, model.sgrid().L);

    auto combined_l2 = [&](const State& U) {
        const StateNorms n = state_norms(model, U);
        return std::sqrt(n.l2_v * n.l2_v + n.l2_T * n.l2_T + n.l2_q * n.l2_q);
    };

    std::vector<std::array<State, 2>> pairs;
    pairs.reserve(ecfg.n_pairs);
    for (int i = 0; i < ecfg.n_pairs; ++i) {
        if (i > 0) stepper.run(base, gap_steps);
        const State noise = model.random_state(perturb_seeds(), 1.0, lmax);
        const double noise_l2 = combined_l2(noise);
        if (!(noise_l2 > 0.0))
            throw std::runtime_error("degenerate ensemble perturbation");
        const double base_l2 = combined_l2(base);
        const double target = ecfg.eps * (base_l2 > 0.0 ? base_l2 : 1.0);
        State perturbed = base;
        const double s = target / noise_l2;
        axpy(s, noise.v, perturbed.v);
        axpy(s, noise.T, perturbed.T);
        axpy(s, noise.q, perturbed.q);
        pairs.push_back({base, std::move(perturbed)});
    }
    return pairs;
}

std::vector<PairEndpoints> evolve_ensemble(
    const Model& model, const SpectralBasis& basis,
    const std::vector<std::array<State, 2>>& pairs, const StepperConfig& scfg,
    double t_horizon) {
    const int n_steps = steps_for(t_horizon, scfg.dt);
    std::vector<PairEndpoints> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        DiffTrajectory tr = evolve_pair(model, basis, pair[0], pair[1], scfg,
                                        t_horizon, std::max(1, n_steps));
        PairEndpoints pe;
        pe.d0 = tr.diff.front(); // copy: front and back coincide at horizon 0
        pe.dT = std::move(tr.diff.back());
        out.push_back(std::move(pe));
    }
    return out;
}

int SqueezeReport::n_included() const {
    int n = 0;
    for (bool e : excluded)
        if (!e) ++n;
    return n;
}

SqueezeReport squeeze_report(const SpectralBasis& basis,
                             const std::vector<PairEndpoints>& endpoints,
                             int n, double t_horizon, double psi_floor) {
    if (n < 0 || n > basis.max_count())
        throw std::out_of_range("cut index out of range");
    SqueezeReport rep;
    rep.n = n;
    rep.t_horizon = t_horizon;
    rep.psi_floor = psi_floor;
    rep.lambda_n = n < basis.max_count() ? basis.cut_eigenvalue(n) : k_nan;

    std::optional<double> best;
    for (const auto& pe : endpoints) {
        const double psi0 = h1_form(basis, pe.d0);
        const double phi_T = h1_form_high(basis, pe.dT, n);
        const bool excluded = !(psi0 >= psi_floor);
        rep.psi0.push_back(psi0);
        rep.phi_T.push_back(phi_T);
        rep.excluded.push_back(excluded);
        if (!excluded) {
            const double ratio = phi_T / psi0;
            if (!best || ratio > *best) best = ratio;
        }
    }
    rep.delta_hat = best;
    return rep;
}

SqueezeReport squeeze_experiment(const Model& model, const SpectralBasis& basis,
                                 const std::vector<std::array<State, 2>>& pairs,
                                 const StepperConfig& scfg, double t_horizon,
                                 int n, double psi_floor) {
    return squeeze_report(basis, evolve_ensemble(model, basis, pairs, scfg, t_horizon),
                          n, t_horizon, psi_floor);
}

int GammaTable::n_included() const {
    int n = 0;
    for (bool e : excluded)
        if (!e) ++n;
    return n;
}

GammaTable estimate_gamma(const Model& model, const SpectralBasis& basis,
                          const std::vector<std::array<State, 2>>& pairs,
                          const StepperConfig& scfg, double t_horizon,
                          int sample_stride, double psi_floor) {
    if (pairs.empty())
        throw std::invalid_argument("estimate_gamma needs at least one pair");

    std::vector<DiffTrajectory> trajectories;
    trajectories.reserve(pairs.size());
    for (const auto& pair : pairs)
        trajectories.push_back(evolve_pair(model, basis, pair[0], pair[1],
                                           scfg, t_horizon, sample_stride));

    const std::vector<double>& grid = trajectories.front().time;
    const int n_t = static_cast<int>(grid.size());

    GammaTable out;
    std::vector<long double> envelope(n_t,
                                      -std::numeric_limits<long double>::infinity());
    int used = 0;
    for (const auto& tr : trajectories) {
        const double psi0 = tr.psi.front();
        const bool excluded = !(psi0 >= psi_floor);
        out.excluded.push_back(excluded);
        if (excluded) continue;
        ++used;
        long double integral = 0.0L;
        long double prev = h2_form(basis, tr.diff.front());
        for (int k = 0; k < n_t; ++k) {
            if (k > 0) {
                const long double cur = h2_form(basis, tr.diff[k]);
                integral += 0.5L * (tr.time[k] - tr.time[k - 1]) * (prev + cur);
                prev = cur;
            }
            const long double ratio =
                (static_cast<long double>(tr.psi[k]) + integral) / psi0;
            envelope[k] = std::max(envelope[k], ratio);
        }
    }
    if (used == 0) return out; // all pairs degenerate; only the flags are set

    out.time = grid;
    out.gamma.resize(n_t);
    long double running = envelope[0];
    for (int k = 0; k < n_t; ++k) {
        running = std::max(running, envelope[k]);
        out.gamma[k] = static_cast<double>(running);
    }
    return out;
}

double dimension_bound(int n_modes, double c, double delta) {
    if (n_modes < 1)
        throw std::invalid_argument("dimension_bound: n_modes must be >= 1");
    if (!(c > 0.0))
        throw std::invalid_argument("dimension_bound: c must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("dimension_bound: delta must lie in (0, 1)");
    // Gauss's constant, the reciprocal arithmetic-geometric mean of 1 and
    // sqrt(2).
    constexpr double k_gauss = 0.8346268;
    const double num = std::log(8.0 * k_gauss * k_gauss * c * c /
                                (1.0 - delta * delta));
    const double den = std::log(2.0 / (1.0 + delta * delta));
    // Multiplying by n_modes last keeps the bound exactly linear in n_modes.
    return static_cast<double>(n_modes) * (num / den);
}

} // namespace mpe
