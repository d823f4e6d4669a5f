/**
 * @file timeseries.cpp
 * @brief CSV formatting and file output for run and experiment tables.
 */
#include "mpe/timeseries.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mpe {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    const std::size_t n = std::fwrite(text.data(), 1, text.size(), f);
    const bool ok = n == text.size() && std::fflush(f) == 0;
    std::fclose(f);
    if (!ok) throw std::runtime_error("short write to '" + path + "'");
}

} // namespace

TimeseriesRow measure_row(const Model& m, const State& U) {
    TimeseriesRow r;
    r.t = U.time;
    const StateNorms ns = state_norms(m, U);
    r.l2_v = ns.l2_v;
    r.l2_T = ns.l2_T;
    r.l2_q = ns.l2_q;
    r.h1_v = ns.h1_v;
    r.h1_T = ns.h1_T;
    r.h1_q = ns.h1_q;
    const Tendency t = m.tendency(U);
    r.dt_l2 = tendency_l2(m, t);
    r.budget_residual = energy_budget(m, U, t).residual;
    r.constraint_residual = m.constraint_residual(U.v);
    return r;
}

std::string format_timeseries(const std::vector<TimeseriesRow>& rows) {
    std::string out =
        "t,l2_v,l2_T,l2_q,h1_v,h1_T,h1_q,dt_l2,budget_residual,constraint_residual\n";
    for (const TimeseriesRow& r : rows) {
        out += num(r.t) + "," + num(r.l2_v) + "," + num(r.l2_T) + "," + num(r.l2_q) + "," +
               num(r.h1_v) + "," + num(r.h1_T) + "," + num(r.h1_q) + "," + num(r.dt_l2) + "," +
               num(r.budget_residual) + "," + num(r.constraint_residual) + "\n";
    }
    return out;
}

void write_timeseries(const std::string& path, const std::vector<TimeseriesRow>& rows) {
    write_text(path, format_timeseries(rows));
}

std::string format_squeeze(const std::vector<SqueezeReport>& reports) {
    std::string out = "n,lambda_n,t_horizon,pairs,included,delta_hat\n";
    for (const SqueezeReport& r : reports) {
        const double dh = r.delta_hat ? *r.delta_hat : std::nan("");
        out += std::to_string(r.n) + "," + num(r.lambda_n) + "," + num(r.t_horizon) + "," +
               std::to_string(int(r.psi0.size())) + "," + std::to_string(r.n_included()) + "," +
               num(dh) + "\n";
    }
    return out;
}

void write_squeeze(const std::string& path, const std::vector<SqueezeReport>& reports) {
    write_text(path, format_squeeze(reports));
}

std::string format_squeeze_pairs(const SqueezeReport& rep) {
    std::string out = "pair,psi0,phi_T,ratio,excluded\n";
    for (std::size_t i = 0; i < rep.psi0.size(); ++i) {
        const bool ex = rep.excluded[i];
        const double ratio = ex ? std::nan("") : rep.phi_T[i] / rep.psi0[i];
        out += std::to_string(i) + "," + num(rep.psi0[i]) + "," + num(rep.phi_T[i]) + "," +
               num(ratio) + "," + (ex ? "1" : "0") + "\n";
    }
    return out;
}

void write_squeeze_pairs(const std::string& path, const SqueezeReport& rep) {
    write_text(path, format_squeeze_pairs(rep));
}

std::string format_gamma(const GammaTable& table) {
    std::string out = "t,gamma\n";
    for (std::size_t i = 0; i < table.time.size(); ++i)
        out += num(table.time[i]) + "," + num(table.gamma[i]) + "\n";
    return out;
}

void write_gamma(const std::string& path, const GammaTable& table) {
    write_text(path, format_gamma(table));
}

} // namespace mpe
