/**
 * @file main.cpp
 * @brief Command-line driver: forced runs with diagnostics, identity
 *        verification, basis dumps, the two-trajectory squeezing experiment,
 *        the growth-envelope estimate, and the dimension-bound formula.
 *
 * All randomness derives from the single configured seed through named
 * streams, so every subcommand is bit-reproducible: identical configurations
 * produce byte-identical CSV and snapshot files.
 */
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mpe/attractor.hpp"
#include "mpe/config.hpp"
#include "mpe/norms.hpp"
#include "mpe/snapshot.hpp"
#include "mpe/stepper.hpp"
#include "mpe/timeseries.hpp"

namespace {

using namespace mpe;

int steps_for(double duration, double dt) {
    if (!(dt > 0.0) || !(duration >= 0.0))
        throw std::invalid_argument("durations must be >= 0 and dt > 0");
    return int(std::llround(duration / dt));
}

Config load_config(const std::string& path) {
    Config c = path.empty() ? Config{} : parse_config_file(path);
    c.validate();
    return c;
}

std::filesystem::path ensure_output_dir(const Config& c) {
    std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_effective_config(const Config& c, const std::filesystem::path& dir) {
    std::ofstream out(dir / "config.ini", std::ios::binary | std::ios::trunc);
    out << echo_config(c);
    if (!out.good()) throw std::runtime_error("cannot write effective config");
}

/// Largest degree whose quadratic products the configured grid integrates
/// exactly (margin for one Cartesian-factor degree raise on each side).
int exact_product_degree(const Config& c) {
    const int by_lat = (2 * c.n_lat - 5) / 2;
    const int by_lon = (c.n_lon - 5) / 2;
    return std::min({c.L, by_lat, by_lon});
}

EnsembleConfig ensemble_config(const Config& c) {
    EnsembleConfig e;
    e.n_pairs = c.pairs;
    e.spin_up_time = c.spin_up;
    e.eps = c.perturbation;
    e.seed = c.seed;
    return e;
}

const char* kind_name(ModeKind k) {
    switch (k) {
        case ModeKind::toroidal: return "toroidal";
        case ModeKind::divergent: return "divergent";
        case ModeKind::temperature: return "temperature";
        case ModeKind::humidity: return "humidity";
    }
    return "?";
}

int cmd_run(const Config& cfg) {
    Model m = build_model(cfg);
    const auto dir = ensure_output_dir(cfg);
    write_effective_config(cfg, dir);

    State U = m.random_state(cfg.seed, 0.1, cfg.L);
    Stepper st(m, cfg.stepper);
    const int spin_steps = steps_for(cfg.spin_up, cfg.stepper.dt);
    const int meas_steps = steps_for(cfg.measure, cfg.stepper.dt);

    st.run(U, spin_steps);
    std::vector<TimeseriesRow> rows;
    rows.push_back(measure_row(m, U));
    st.run(U, meas_steps, [&](const State& s, int i) {
        if (i % cfg.sample_every == 0) rows.push_back(measure_row(m, s));
    });

    write_timeseries((dir / "timeseries.csv").string(), rows);
    write_snapshot((dir / "final_state.bin").string(), U);

    const TimeseriesRow& last = rows.back();
    std::printf("run: %d spin-up + %d measured steps, %zu samples\n", spin_steps, meas_steps,
                rows.size());
    std::printf("final t = %s  |v|_2 = %s  |T|_2 = %s  |q|_2 = %s\n", format_double(last.t).c_str(),
                format_double(last.l2_v).c_str(), format_double(last.l2_T).c_str(),
                format_double(last.l2_q).c_str());
    std::printf("constraint residual = %s, |d_t U|_2 = %s\n",
                format_double(last.constraint_residual).c_str(),
                format_double(last.dt_l2).c_str());
    std::printf("wrote %s, %s, %s\n", (dir / "timeseries.csv").c_str(),
                (dir / "final_state.bin").c_str(), (dir / "config.ini").c_str());
    return 0;
}

int cmd_verify(const Config& cfg, int n_sets) {
    Model m = build_model(cfg);
    const int lmax = exact_product_degree(cfg);
    if (lmax < 1)
        throw std::runtime_error("grid too coarse to band-limit verification fields");
    std::printf("verify: %d random field sets, band-limited to degree %d\n", n_sets, lmax);

    bool all_ok = true;
    for (int s = 0; s < n_sets; ++s) {
        const std::uint64_t base = cfg.seed + 1000ull * std::uint64_t(s);
        State A = m.random_state(base + 1, 1.0, lmax);
        State B = m.random_state(base + 2, 0.7, lmax);
        ScalarField2D h = m.random_state(base + 3, 1.2, lmax).T.level(0);
        IdentityReport rep = check_identities(m, A.v, B.v, A.T, B.q, h);
        for (const IdentityCheck& c : rep.checks) {
            std::printf("  set %d  %-28s rel %.3e  tol %.3e  %s%s\n", s, c.name.c_str(),
                        c.relative, c.tol, c.pass ? "ok" : "FAIL",
                        c.precondition_ok ? "" : " (precondition violated)");
            all_ok = all_ok && c.pass;
        }
    }
    std::printf("verify: %s\n", all_ok ? "all identities hold" : "FAILURES above");
    return all_ok ? 0 : 1;
}

int cmd_spectrum(const Config& cfg, const std::string& out_path) {
    Model m = build_model(cfg);
    SpectralBasis basis = build_basis(m);
    std::string out = "component,index,kind,l,m,j,part,lambda\n";
    for (int comp = 0; comp < SpectralBasis::n_components; ++comp) {
        const auto& modes = basis.modes(comp);
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const BasisMode& md = modes[i];
            out += std::to_string(comp) + "," + std::to_string(i) + "," + kind_name(md.kind) +
                   "," + std::to_string(md.l) + "," + std::to_string(md.m) + "," +
                   std::to_string(md.j) + "," + std::to_string(md.part) + "," +
                   format_double(md.lambda) + "\n";
        }
    }
    if (out_path.empty()) {
        std::fputs(out.c_str(), stdout);
    } else {
        std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
        f << out;
        if (!f.good()) throw std::runtime_error("cannot write '" + out_path + "'");
        std::printf("wrote %s (%d + %d + %d modes)\n", out_path.c_str(), basis.count(0),
                    basis.count(1), basis.count(2));
    }
    return 0;
}

std::vector<int> default_cuts(int max_count) {
    std::vector<int> cuts;
    for (int n = 1; n < max_count; n *= 2) cuts.push_back(n);
    cuts.push_back(max_count);
    return cuts;
}

int cmd_squeeze(const Config& cfg, double horizon, std::vector<int> cuts) {
    Model m = build_model(cfg);
    SpectralBasis basis = build_basis(m);
    const auto dir = ensure_output_dir(cfg);

    auto pairs = make_ensemble(m, cfg.stepper, ensemble_config(cfg));
    auto endpoints = evolve_ensemble(m, basis, pairs, cfg.stepper, horizon);

    if (cuts.empty()) cuts = default_cuts(basis.max_count());
    std::vector<SqueezeReport> reports;
    reports.reserve(cuts.size());
    for (int n : cuts) reports.push_back(squeeze_report(basis, endpoints, n, horizon));
    write_squeeze((dir / "squeeze.csv").string(), reports);

    const SqueezeReport* first_contracting = nullptr;
    for (const SqueezeReport& r : reports)
        if (r.n < basis.max_count() && r.delta_hat && *r.delta_hat < 1.0) {
            first_contracting = &r;
            break;
        }
    write_squeeze_pairs((dir / "squeeze_pairs.csv").string(),
                        first_contracting ? *first_contracting : reports.back());

    std::printf("squeeze: %zu pairs, horizon %s, %zu cuts -> %s\n", pairs.size(),
                format_double(horizon).c_str(), cuts.size(), (dir / "squeeze.csv").c_str());
    if (first_contracting)
        std::printf("first contracting cut: n = %d (lambda_n = %s), delta_hat = %s\n",
                    first_contracting->n, format_double(first_contracting->lambda_n).c_str(),
                    format_double(*first_contracting->delta_hat).c_str());
    else
        std::printf("no contracting cut below the full mode count at this horizon\n");
    return 0;
}

int cmd_gamma(const Config& cfg, double horizon) {
    Model m = build_model(cfg);
    SpectralBasis basis = build_basis(m);
    const auto dir = ensure_output_dir(cfg);

    auto pairs = make_ensemble(m, cfg.stepper, ensemble_config(cfg));
    GammaTable table =
        estimate_gamma(m, basis, pairs, cfg.stepper, horizon, cfg.sample_every);
    write_gamma((dir / "gamma.csv").string(), table);

    std::printf("gamma: %d of %zu pairs admissible, %zu samples -> %s\n", table.n_included(),
                pairs.size(), table.time.size(), (dir / "gamma.csv").c_str());
    if (!table.gamma.empty())
        std::printf("gamma envelope at t = %s: %s\n", format_double(table.time.back()).c_str(),
                    format_double(table.gamma.back()).c_str());
    return 0;
}

int cmd_dimbound(int n_modes, double c, double delta) {
    std::printf("%s\n", format_double(dimension_bound(n_modes, c, delta)).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Viscous moist primitive equations on the spherical shell: "
                 "solver runs and attractor diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path, "configuration file (key = value sections)")
        ->check(CLI::ExistingFile);

    CLI::App* run = app.add_subcommand("run", "spin up, integrate, and record diagnostics");

    CLI::App* verify = app.add_subcommand("verify", "check the discrete integral identities");
    int n_sets = 5;
    verify->add_option("--sets", n_sets, "number of random field sets")
        ->check(CLI::PositiveNumber);

    CLI::App* spectrum = app.add_subcommand("spectrum", "dump the diagnostic eigenmode basis");
    std::string spectrum_out;
    spectrum->add_option("-o,--out", spectrum_out, "CSV file (default: stdout)");

    CLI::App* squeeze =
        app.add_subcommand("squeeze", "two-trajectory squeezing experiment over cut indices");
    double squeeze_horizon = 1.0;
    std::vector<int> cuts;
    squeeze->add_option("--horizon", squeeze_horizon, "difference evolution time")
        ->check(CLI::PositiveNumber);
    squeeze->add_option("--cuts", cuts, "cut indices (default: powers of two)");

    CLI::App* gamma = app.add_subcommand("gamma", "difference growth envelope");
    double gamma_horizon = 1.0;
    gamma->add_option("--horizon", gamma_horizon, "difference evolution time")
        ->check(CLI::PositiveNumber);

    CLI::App* dimbound =
        app.add_subcommand("dimbound", "attractor dimension bound for (modes, c, delta)");
    int db_modes = 1;
    double db_c = 1.0, db_delta = 1e-6;
    dimbound->add_option("--modes", db_modes, "number of squeezed modes")
        ->check(CLI::PositiveNumber);
    dimbound->add_option("--growth", db_c, "growth envelope constant c >= 1");
    dimbound->add_option("--delta", db_delta, "contraction factor in (0, 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(load_config(config_path));
        if (*verify) return cmd_verify(load_config(config_path), n_sets);
        if (*spectrum) return cmd_spectrum(load_config(config_path), spectrum_out);
        if (*squeeze) return cmd_squeeze(load_config(config_path), squeeze_horizon, cuts);
        if (*gamma) return cmd_gamma(load_config(config_path), gamma_horizon);
        if (*dimbound) return cmd_dimbound(db_modes, db_c, db_delta);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    }
    return 0;
}
