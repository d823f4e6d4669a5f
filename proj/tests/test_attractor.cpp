/**
 * @file test_attractor.cpp
 * @brief Eigenbasis structure, coordinate maps, projector invariants, the
 *        paired-trajectory experiments, and the dimension bound formula.
 */
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mpe/attractor.hpp"
#include "mpe/column.hpp"
#include "mpe/dynamics.hpp"
#include "mpe/norms.hpp"
#include "mpe/sphere.hpp"
#include "mpe/stepper.hpp"

namespace {

// Lowest eigenvalue of the continuous Robin problem -x'' = nu x on (0, 1)
// with x'(0) = 0, x'(1) = -x(1): nu = m^2 with m the root of m tan m = 1.
constexpr double k_robin_nu0 = 0.74017388439496704;

mpe::Model make_model(const mpe::ModelParams& params, int L = 10, int n_lat = 18,
                      int n_lon = 36, int K = 9,
                      const std::string& forcing = "none",
                      double famp = 0.0) {
    mpe::SphereGrid sg = mpe::make_grid(L, n_lat, n_lon);
    mpe::VerticalGrid vg = mpe::make_vertical_grid(K);
    return mpe::Model(params, sg, vg, mpe::make_forcing(forcing, sg, vg, famp));
}

// Small forced configuration for the evolution-based cases.
mpe::Model make_small_forced() {
    mpe::ModelParams p;
    return make_model(p, 6, 10, 16, 5, "steady", 0.3);
}

double max_abs_diff(const mpe::Field3D& a, const mpe::Field3D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

double max_abs_diff(const mpe::State& a, const mpe::State& b) {
    return std::max({max_abs_diff(a.v.vth, b.v.vth),
                     max_abs_diff(a.v.vph, b.v.vph), max_abs_diff(a.T, b.T),
                     max_abs_diff(a.q, b.q)});
}

double max_abs(const mpe::State& U) {
    mpe::State zero(U.T.K, U.T.n_lat, U.T.n_lon);
    return max_abs_diff(U, zero);
}

double combined_l2(const mpe::Model& m, const mpe::State& U) {
    const mpe::StateNorms n = mpe::state_norms(m, U);
    return std::sqrt(n.l2_v * n.l2_v + n.l2_T * n.l2_T + n.l2_q * n.l2_q);
}

// Direct quadratic form of the scalar elliptic operator (horizontal
// Laplacian eigenvalues plus the tridiagonal vertical matrix), bypassing the
// eigendecomposition entirely.
double scalar_operator_form(const mpe::Model& m, const mpe::Field3D& f,
                            double alpha) {
    const auto& tr = m.transform();
    const int K = m.vgrid().K;
    const int L = m.sgrid().L;
    const double h = m.vgrid().h;
    const mpe::Tridiag A = mpe::neg_d2_matrix(K, alpha);
    std::vector<mpe::ScalarCoeffs> stack;
    for (int k = 0; k < K; ++k) stack.push_back(tr.analyze(f.level(k)));
    long double total = 0.0L;
    for (int mm = 0; mm <= L; ++mm)
        for (int l = mm; l <= L; ++l) {
            std::vector<std::complex<double>> col(K);
            for (int k = 0; k < K; ++k) col[k] = stack[k].at(l, mm);
            const auto Acol = mpe::tridiag_apply(A, col);
            long double l2 = 0.0L, quad = 0.0L;
            for (int k = 0; k < K; ++k) {
                l2 += std::norm(col[k]);
                quad += (std::conj(col[k]) * Acol[k]).real();
            }
            const double w = mm == 0 ? 1.0 : 2.0;
            total += w * h * (double(l) * (l + 1) * l2 + quad);
        }
    return static_cast<double>(total);
}

} // namespace

TEST_CASE("basis enumerates sorted orthonormal eigenmodes with the expected counts") {
    mpe::ModelParams p;
    const mpe::Model model = make_model(p);
    const mpe::SpectralBasis basis = mpe::build_basis(model);
    const int K = 9;
    const double h = 1.0 / K;

    // (L+1)^2 - 1 = 120 real harmonics of degree >= 1 per vertical shape;
    // the divergent block loses its vertical-constant shape.
    CHECK(basis.count(0) == 120 * K + 120 * (K - 1));
    CHECK(basis.count(1) == 121 * K);
    CHECK(basis.count(2) == 121 * K);
    CHECK(basis.max_count() == basis.count(0));

    for (int comp = 0; comp < 3; ++comp) {
        const auto& modes = basis.modes(comp);
        for (std::size_t k = 1; k < modes.size(); ++k)
            REQUIRE(modes[k - 1].lambda <= modes[k].lambda);
    }

    // Vertical shapes orthonormal under the level weight h.
    for (mpe::ModeKind kind :
         {mpe::ModeKind::toroidal, mpe::ModeKind::temperature,
          mpe::ModeKind::humidity}) {
        const auto& vm = basis.vertical(kind);
        const int n = static_cast<int>(vm.eigenvalue.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                long double dot = 0.0L;
                for (int k = 0; k < K; ++k)
                    dot += vm.shape[i][k] * vm.shape[j][k];
                const double expected = i == j ? 1.0 : 0.0;
                REQUIRE(std::abs(h * double(dot) - expected) < 1e-12);
            }
    }

    // The Neumann vertical eigenvalues have the exact discrete-cosine form.
    const auto& neu = basis.vertical(mpe::ModeKind::toroidal);
    for (int j = 0; j < K; ++j) {
        const double exact =
            std::pow(2.0 / h * std::sin(0.5 * j * M_PI * h), 2);
        CHECK(neu.eigenvalue[j] == doctest::Approx(exact).epsilon(1e-10));
    }

    // Smallest eigenvalues: velocity l(l+1)|_{l=1} with the vertical-constant
    // shape; scalars the Robin ground eigenvalue (second-order accurate).
    CHECK(basis.eigenvalue(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(basis.eigenvalue(1, 0) == doctest::Approx(k_robin_nu0).epsilon(2e-3));
    CHECK(basis.cut_eigenvalue(0) == basis.eigenvalue(1, 0));

    // cut_eigenvalue is nondecreasing and rejects out-of-range cuts.
    double prev = basis.cut_eigenvalue(0);
    for (int n : {1, 5, 50, 500, basis.max_count() - 1}) {
        const double cur = basis.cut_eigenvalue(n);
        CHECK(cur >= prev);
        prev = cur;
    }
    CHECK_THROWS_AS((void)basis.cut_eigenvalue(-1), std::out_of_range);
    CHECK_THROWS_AS((void)basis.cut_eigenvalue(basis.max_count()),
                    std::out_of_range);

    // Refining the grid extends the spectrum upward in every component.
    const mpe::Model fine = make_model(p, 12, 20, 40, 12);
    const mpe::SpectralBasis fine_basis = mpe::build_basis(fine);
    for (int comp = 0; comp < 3; ++comp)
        CHECK(fine_basis.eigenvalue(comp, fine_basis.count(comp) - 1) >
              basis.eigenvalue(comp, basis.count(comp) - 1));
}

TEST_CASE("Robin ground eigenvalue converges at second order to the transcendental root") {
    mpe::ModelParams p;
    double err[2];
    int idx = 0;
    for (int K : {32, 64}) {
        const mpe::Model model = make_model(p, 4, 6, 9, K);
        const mpe::SpectralBasis basis = mpe::build_basis(model);
        err[idx++] =
            std::abs(basis.vertical(mpe::ModeKind::temperature).eigenvalue[0] -
                     k_robin_nu0);
    }
    CHECK(err[1] < 1e-3);
    const double eoc = std::log2(err[0] / err[1]);
    CHECK(eoc > 1.9);
}

TEST_CASE("mode descriptors, slots and eigenvalues are mutually consistent") {
    mpe::ModelParams p;
    p.alpha_T = 0.7; // distinct Robin closures for the two scalars
    p.beta_q = 1.6;
    const mpe::Model model = make_model(p, 6, 10, 16, 5);
    const mpe::SpectralBasis basis = mpe::build_basis(model);

    for (int comp = 0; comp < 3; ++comp) {
        const auto& modes = basis.modes(comp);
        for (std::size_t t = 0; t < modes.size(); ++t) {
            const mpe::BasisMode& md = modes[t];
            CHECK(mpe::component_of(md.kind) == comp);
            CHECK(basis.slot(md.kind, md.l, md.m, md.j, md.part) ==
                  static_cast<int>(t));
            const double lambda =
                double(md.l) * (md.l + 1) +
                basis.vertical(md.kind).eigenvalue[md.j];
            CHECK(md.lambda == lambda);
            if (md.m == 0) CHECK(md.part == 0);
        }
    }
    // Modes outside the enumeration do not get slots: divergent shapes are
    // never vertical-constant, velocities start at degree 1, and orders
    // cannot exceed degrees.
    CHECK(basis.slot(mpe::ModeKind::divergent, 2, 1, 0, 0) == -1);
    CHECK(basis.slot(mpe::ModeKind::toroidal, 0, 0, 1, 0) == -1);
    CHECK(basis.slot(mpe::ModeKind::temperature, 2, 3, 0, 0) == -1);
    CHECK(basis.slot(mpe::ModeKind::temperature, 2, 1, 99, 0) == -1);
}

TEST_CASE("coordinates reproduce the quadratic forms and invert exactly") {
    mpe::ModelParams p;
    p.alpha_T = 0.8;
    p.beta_q = 1.3;
    const mpe::Model model = make_model(p);
    const mpe::SpectralBasis basis = mpe::build_basis(model);
    const mpe::State U = model.random_state(2024u, 1.0, model.sgrid().L);

    const mpe::BasisCoords coords = mpe::decompose(model, basis, U);
    const mpe::StateNorms nn = mpe::state_norms(model, U);

    // Sum of squared coordinates per component = squared L2 norm.
    const double l2_sq[3] = {nn.l2_v * nn.l2_v, nn.l2_T * nn.l2_T,
                             nn.l2_q * nn.l2_q};
    for (int comp = 0; comp < 3; ++comp) {
        long double sum = 0.0L;
        for (double c : coords.comp[comp]) sum += (long double)c * c;
        CHECK(double(sum) ==
              doctest::Approx(l2_sq[comp]).epsilon(1e-11));
    }

    // First-order form: the velocity block matches the reported norm (the
    // two are the same quadratic form); the scalar blocks match the direct
    // matrix form with the Robin closure.
    long double h1_v = 0.0L;
    const auto& vmodes = basis.modes(0);
    for (std::size_t k = 0; k < vmodes.size(); ++k)
        h1_v += (long double)vmodes[k].lambda * coords.comp[0][k] *
                coords.comp[0][k];
    CHECK(double(h1_v) == doctest::Approx(nn.h1_v * nn.h1_v).epsilon(1e-11));

    const double formT = scalar_operator_form(model, U.T, p.alpha_T);
    const double formq = scalar_operator_form(model, U.q, p.beta_q);
    long double h1_T = 0.0L, h1_q = 0.0L;
    for (std::size_t k = 0; k < coords.comp[1].size(); ++k)
        h1_T += (long double)basis.modes(1)[k].lambda * coords.comp[1][k] *
                coords.comp[1][k];
    for (std::size_t k = 0; k < coords.comp[2].size(); ++k)
        h1_q += (long double)basis.modes(2)[k].lambda * coords.comp[2][k] *
                coords.comp[2][k];
    CHECK(double(h1_T) == doctest::Approx(formT).epsilon(1e-11));
    CHECK(double(h1_q) == doctest::Approx(formq).epsilon(1e-11));

    // Second-order form against the assembled operator image norm (the
    // model's unit diffusivities make the two coincide).
    CHECK(mpe::h2_form(basis, coords) ==
          doctest::Approx(mpe::h2_norm_sq(model, U)).epsilon(1e-10));

    // Round trip back to fields.
    const mpe::State back = mpe::reconstruct(model, basis, coords, U.time);
    CHECK(max_abs_diff(back, U) < 1e-11 * std::max(1.0, max_abs(U)));
    CHECK(model.constraint_residual(back.v) < 1e-11);
    CHECK(back.time == U.time);
}

TEST_CASE("a single basis coordinate reconstructs a pure eigenmode") {
    mpe::ModelParams p;
    const mpe::Model model = make_model(p, 6, 10, 16, 5);
    const mpe::SpectralBasis basis = mpe::build_basis(model);

    const int t = basis.slot(mpe::ModeKind::toroidal, 2, 1, 0, 0);
    REQUIRE(t >= 0);
    const double y = 0.7;
    mpe::BasisCoords coords;
    for (int comp = 0; comp < 3; ++comp)
        coords.comp[comp].assign(basis.count(comp), 0.0);
    coords.comp[0][t] = y;

    const mpe::State U = mpe::reconstruct(model, basis, coords, 0.0);
    // Norms follow the eigenvalue: |v|^2 = y^2, <A1 v, v> = lambda y^2.
    const double lambda = basis.modes(0)[t].lambda;
    const mpe::StateNorms nn = mpe::state_norms(model, U);
    CHECK(nn.l2_v * nn.l2_v == doctest::Approx(y * y).epsilon(1e-11));
    CHECK(nn.h1_v * nn.h1_v ==
          doctest::Approx(lambda * y * y).epsilon(1e-11));
    CHECK(nn.l2_T == 0.0);
    CHECK(nn.l2_q == 0.0);
    CHECK(mpe::h1_form(basis, coords) ==
          doctest::Approx(lambda * y * y).epsilon(1e-13));
    CHECK(mpe::h2_form(basis, coords) ==
          doctest::Approx(lambda * lambda * y * y).epsilon(1e-13));

    // Vertical-constant toroidal flow: no divergence anywhere, and the
    // levels are identical.
    CHECK(model.constraint_residual(U.v) < 1e-12);
    for (int k = 1; k < 5; ++k) {
        mpe::VectorField2D a = U.v.level(k), b = U.v.level(0);
        for (int j = 0; j < a.n_lat(); ++j)
            for (int i = 0; i < a.vth.n_lon; ++i) {
                CHECK(std::abs(a.vth.at(j, i) - b.vth.at(j, i)) < 1e-13);
                CHECK(std::abs(a.vph.at(j, i) - b.vph.at(j, i)) < 1e-13);
            }
    }

    const mpe::BasisCoords again = mpe::decompose(model, basis, U);
    CHECK(again.comp[0][t] == doctest::Approx(y).epsilon(1e-12));
    long double rest = 0.0L;
    for (int comp = 0; comp < 3; ++comp)
        for (std::size_t k = 0; k < again.comp[comp].size(); ++k)
            if (!(comp == 0 && static_cast<int>(k) == t))
                rest += std::abs((long double)again.comp[comp][k]);
    CHECK(double(rest) < 1e-10);
}

TEST_CASE("projectors satisfy the exact algebra and the field-level identities") {
    mpe::ModelParams p;
    const mpe::Model model = make_model(p, 6, 10, 16, 5);
    const mpe::SpectralBasis basis = mpe::build_basis(model);
    const mpe::State U = model.random_state(77u, 1.0, 6);
    const double scale = std::max(1.0, max_abs(U));
    const int full = basis.max_count();

    // Identity and annihilation at the ends of the cut range.
    CHECK(max_abs_diff(mpe::project_high(model, basis, U, 0), U) <
          1e-11 * scale);
    CHECK(max_abs(mpe::project_high(model, basis, U, full)) == 0.0);
    CHECK(max_abs_diff(mpe::project_low(model, basis, U, full), U) <
          1e-11 * scale);

    // Complementarity and idempotence at an interior cut.
    const int n = full / 3;
    const mpe::State hi = mpe::project_high(model, basis, U, n);
    const mpe::State lo = mpe::project_low(model, basis, U, n);
    mpe::State sum = hi;
    mpe::axpy(1.0, lo.v, sum.v);
    mpe::axpy(1.0, lo.T, sum.T);
    mpe::axpy(1.0, lo.q, sum.q);
    CHECK(max_abs_diff(sum, U) < 1e-11 * scale);
    CHECK(max_abs_diff(mpe::project_high(model, basis, hi, n), hi) <
          1e-11 * scale);

    CHECK_THROWS_AS((void)mpe::project_high(model, basis, U, -1),
                    std::out_of_range);
    CHECK_THROWS_AS((void)mpe::project_high(model, basis, U, full + 1),
                    std::out_of_range);

    // Exact coordinate-space inequalities: the projected form never grows
    // with the cut, matches the total at n = 0, and dies at the full cut.
    const mpe::BasisCoords coords = mpe::decompose(model, basis, U);
    const double total = mpe::h1_form(basis, coords);
    double prev = mpe::h1_form_high(basis, coords, 0);
    CHECK(prev == total);
    for (int cut = 1; cut <= full; ++cut) {
        const double cur = mpe::h1_form_high(basis, coords, cut);
        REQUIRE(cur <= prev);
        prev = cur;
    }
    CHECK(mpe::h1_form_high(basis, coords, full) == 0.0);
    for (int cut : {0, 7, 133, full}) {
        const auto [phi, psi] = mpe::phi_psi(basis, coords, cut);
        CHECK(phi <= psi);
        CHECK(psi == total);
    }
    CHECK_THROWS_AS((void)mpe::h1_form_high(basis, coords, -1),
                    std::out_of_range);
}

TEST_CASE("identical initial states produce an identically zero difference") {
    const mpe::Model model = make_small_forced();
    const mpe::SpectralBasis basis = mpe::build_basis(model);
    const mpe::State U = model.random_state(5u, 0.5, 6);
    mpe::StepperConfig scfg;
    scfg.dt = 2e-3;

    const mpe::DiffTrajectory tr =
        mpe::evolve_pair(model, basis, U, U, scfg, 0.02, 5);
    REQUIRE(tr.time.size() == 3); // samples at steps 0, 5, 10
    CHECK(tr.time.back() == doctest::Approx(0.02).epsilon(1e-14));
    for (const double psi : tr.psi) CHECK(psi == 0.0);
    for (const auto& coords : tr.diff)
        for (const auto& comp : coords.comp)
            for (double c : comp) CHECK(c == 0.0);
}

TEST_CASE("difference growth is linear in the perturbation size") {
    const mpe::Model model = make_small_forced();
    const mpe::SpectralBasis basis = mpe::build_basis(model);
    mpe::StepperConfig scfg;
    scfg.dt = 2e-3;

    // A settled base state and one fixed perturbation direction.
    mpe::State base = model.random_state(11u, 0.1, 6);
    mpe::Stepper spin(model, scfg);
    spin.run(base, 50);
    const mpe::State dir = model.random_state(12u, 1.0, 5);
    const double dir_l2 = combined_l2(model, dir);

    auto perturbed = [&](double eps) {
        mpe::State out = base;
        const double s = eps / dir_l2;
        mpe::axpy(s, dir.v, out.v);
        mpe::axpy(s, dir.T, out.T);
        mpe::axpy(s, dir.q, out.q);
        return out;
    };
    const double horizon = 0.1;
    const mpe::DiffTrajectory big = mpe::evolve_pair(
        model, basis, base, perturbed(1e-5), scfg, horizon, 50);
    const mpe::DiffTrajectory half = mpe::evolve_pair(
        model, basis, base, perturbed(5e-6), scfg, horizon, 50);
    const double ratio = std::sqrt(big.psi.back() / half.psi.back());
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("ensembles are reproducible, sized and band-limited as configured") {
    const mpe::Model model = make_small_forced();
    mpe::StepperConfig scfg;
    scfg.dt = 2e-3;
    mpe::EnsembleConfig ecfg;
    ecfg.n_pairs = 3;
    ecfg.spin_up_time = 0.05;
    ecfg.pair_spacing = 0.02;
    ecfg.eps = 1e-5;
    ecfg.perturb_lmax = 4;
    ecfg.seed = 99u;

    const auto pairs = mpe::make_ensemble(model, scfg, ecfg);
    const auto pairs_again = mpe::make_ensemble(model, scfg, ecfg);
    REQUIRE(pairs.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(max_abs_diff(pairs[i][0], pairs_again[i][0]) == 0.0);
        CHECK(max_abs_diff(pairs[i][1], pairs_again[i][1]) == 0.0);
    }
    ecfg.seed = 100u;
    const auto other = mpe::make_ensemble(model, scfg, ecfg);
    CHECK(max_abs_diff(pairs[0][1], other[0][1]) > 0.0);

    const auto& tr = model.transform();
    for (const auto& pair : pairs) {
        // Perturbation size is eps relative to the base state.
        mpe::State diff = pair[1];
        mpe::axpy(-1.0, pair[0].v, diff.v);
        mpe::axpy(-1.0, pair[0].T, diff.T);
        mpe::axpy(-1.0, pair[0].q, diff.q);
        const double rel =
            combined_l2(model, diff) / combined_l2(model, pair[0]);
        CHECK(rel == doctest::Approx(1e-5).epsilon(1e-9));

        // Band limit: nothing beyond degree perturb_lmax, and both members
        // satisfy the column constraint.
        double high = 0.0;
        for (int k = 0; k < model.vgrid().K; ++k) {
            const mpe::ScalarCoeffs cT = tr.analyze(diff.T.level(k));
            for (int mm = 0; mm <= 6; ++mm)
                for (int l = std::max(mm, 5); l <= 6; ++l)
                    high = std::max(high, std::abs(cT.at(l, mm)));
        }
        CHECK(high < 1e-16);
        CHECK(model.constraint_residual(pair[0].v) < 1e-11);
        CHECK(model.constraint_residual(pair[1].v) < 1e-11);
    }

    mpe::EnsembleConfig bad = ecfg;
    bad.eps = 0.0;
    CHECK_THROWS_AS((void)mpe::make_ensemble(model, scfg, bad),
                    std::invalid_argument);
    bad = ecfg;
    bad.n_pairs = 0;
    CHECK_THROWS_AS((void)mpe::make_ensemble(model, scfg, bad),
                    std::invalid_argument);
}

TEST_CASE("squeezing reports contract exactly in the cut index") {
    const mpe::Model model = make_small_forced();
    const mpe::SpectralBasis basis = mpe::build_basis(model);
    mpe::StepperConfig scfg;
    scfg.dt = 2e-3;
    mpe::EnsembleConfig ecfg;
    ecfg.n_pairs = 2;
    ecfg.spin_up_time = 0.04;
    ecfg.pair_spacing = 0.02;
    ecfg.seed = 7u;

    const auto pairs = mpe::make_ensemble(model, scfg, ecfg);
    const double horizon = 0.05;
    const auto endpoints =
        mpe::evolve_ensemble(model, basis, pairs, scfg, horizon);
    REQUIRE(endpoints.size() == 2);

    const mpe::SqueezeReport rep0 =
        mpe::squeeze_experiment(model, basis, pairs, scfg, horizon, 0);
    CHECK(rep0.n_included() == 2);
    REQUIRE(rep0.delta_hat.has_value());
    CHECK(rep0.lambda_n == basis.cut_eigenvalue(0));
    for (int i = 0; i < 2; ++i) {
        CHECK(rep0.psi0[i] > 0.0);
        CHECK(rep0.phi_T[i] >= 0.0);
        CHECK_FALSE(rep0.excluded[i]);
    }

    double prev = *rep0.delta_hat;
    for (int n : {1, 10, 100, 400, basis.max_count()}) {
        const mpe::SqueezeReport rep =
            mpe::squeeze_report(basis, endpoints, n, horizon);
        REQUIRE(rep.delta_hat.has_value());
        CHECK(*rep.delta_hat <= prev);
        prev = *rep.delta_hat;
    }
    const mpe::SqueezeReport full =
        mpe::squeeze_report(basis, endpoints, basis.max_count(), horizon);
    CHECK(*full.delta_hat == 0.0);
    CHECK(std::isnan(full.lambda_n));

    // Degenerate ensemble: identical pairs are excluded and leave no ratio.
    const mpe::State U = pairs[0][0];
    const std::vector<std::array<mpe::State, 2>> same = {{U, U}};
    const mpe::SqueezeReport degenerate =
        mpe::squeeze_experiment(model, basis, same, scfg, 0.01, 0);
    CHECK(degenerate.n_included() == 0);
    CHECK(degenerate.excluded[0]);
    CHECK_FALSE(degenerate.delta_hat.has_value());
    CHECK(degenerate.psi0[0] == 0.0);
}

TEST_CASE("growth envelope starts at one, never decreases and dominates the pairs") {
    const mpe::Model model = make_small_forced();
    const mpe::SpectralBasis basis = mpe::build_basis(model);
    mpe::StepperConfig scfg;
    scfg.dt = 2e-3;
    mpe::EnsembleConfig ecfg;
    ecfg.n_pairs = 2;
    ecfg.spin_up_time = 0.04;
    ecfg.pair_spacing = 0.02;
    ecfg.seed = 21u;

    const auto pairs = mpe::make_ensemble(model, scfg, ecfg);
    const double horizon = 0.05; // 25 steps
    const int stride = 10;
    const mpe::GammaTable table =
        mpe::estimate_gamma(model, basis, pairs, scfg, horizon, stride);

    REQUIRE(table.time.size() == 4); // steps 0, 10, 20, 25
    CHECK(table.n_included() == 2);
    CHECK(table.gamma.front() == 1.0);
    for (std::size_t k = 1; k < table.gamma.size(); ++k) {
        CHECK(table.time[k] > table.time[k - 1]);
        CHECK(table.gamma[k] >= table.gamma[k - 1]);
    }

    // The envelope dominates every sampled pair ratio.
    for (const auto& pair : pairs) {
        const mpe::DiffTrajectory tr =
            mpe::evolve_pair(model, basis, pair[0], pair[1], scfg, horizon,
                             stride);
        for (std::size_t k = 0; k < tr.psi.size(); ++k)
            CHECK(tr.psi[k] <=
                  table.gamma[k] * tr.psi.front() * (1.0 + 1e-12));
    }

    // All-degenerate ensembles yield only exclusion flags.
    const std::vector<std::array<mpe::State, 2>> same = {
        {pairs[0][0], pairs[0][0]}};
    const mpe::GammaTable empty =
        mpe::estimate_gamma(model, basis, same, scfg, 0.01, 1);
    CHECK(empty.time.empty());
    CHECK(empty.gamma.empty());
    CHECK(empty.n_included() == 0);
    CHECK_THROWS_AS((void)mpe::estimate_gamma(model, basis, {}, scfg, 0.01, 1),
                    std::invalid_argument);
}

TEST_CASE("dimension bound evaluates, orders and scales as the formula demands") {
    // Frozen against an independent high-precision evaluation.
    CHECK(mpe::dimension_bound(1, 1.0, 1e-6) ==
          doctest::Approx(2.4784063032573336).epsilon(1e-12));

    // Exactly linear in the mode count.
    for (int k : {2, 3, 7})
        CHECK(mpe::dimension_bound(k, 1.7, 0.4) ==
              double(k) * mpe::dimension_bound(1, 1.7, 0.4));

    // Strictly increasing in the squeezing factor and the Lipschitz bound.
    double prev = mpe::dimension_bound(3, 1.0, 0.05);
    for (double d : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        const double cur = mpe::dimension_bound(3, 1.0, d);
        CHECK(cur > prev);
        prev = cur;
    }
    prev = mpe::dimension_bound(3, 0.5, 0.5);
    for (double c : {1.0, 2.0, 4.0, 16.0}) {
        const double cur = mpe::dimension_bound(3, c, 0.5);
        CHECK(cur > prev);
        prev = cur;
    }

    CHECK_THROWS_AS((void)mpe::dimension_bound(0, 1.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)mpe::dimension_bound(1, 0.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)mpe::dimension_bound(1, -2.0, 0.5),
                    std::invalid_argument);
    for (double d : {0.0, 1.0, -0.3, 1.5})
        CHECK_THROWS_AS((void)mpe::dimension_bound(1, 1.0, d),
                        std::invalid_argument);
}
