/**
 * @file timeseries.hpp
 * @brief CSV output: run diagnostics time series and the squeezing /
 *        growth-envelope tables.
 *
 * All numbers are printed with 17 significant digits ("%.17g"), which
 * round-trips IEEE-754 binary64 exactly, and rows end in a single '\n', so
 * identical runs produce byte-identical files. An empty series still writes
 * the header line.
 */
#ifndef MPE_TIMESERIES_HPP
#define MPE_TIMESERIES_HPP

#include <string>
#include <vector>

#include "mpe/attractor.hpp"
#include "mpe/norms.hpp"

namespace mpe {

/// One sampled diagnostics row of a model run.
struct TimeseriesRow {
    double t = 0;
    double l2_v = 0, l2_T = 0, l2_q = 0;  ///< volume L2 norms
    double h1_v = 0, h1_T = 0, h1_q = 0;  ///< first-order energy norms
    double dt_l2 = 0;                     ///< |d_t U|_2 of the instantaneous tendency
    double budget_residual = 0;           ///< energy budget closure defect
    double constraint_residual = 0;       ///< max column-mean divergence
};

/// Evaluates every column of a row from the current state (one tendency).
TimeseriesRow measure_row(const Model& m, const State& U);

std::string format_timeseries(const std::vector<TimeseriesRow>& rows);
void write_timeseries(const std::string& path, const std::vector<TimeseriesRow>& rows);

/// One row per cut index: n, cut eigenvalue, horizon, pair counts, and the
/// contraction factor (nan when no pair is admissible).
std::string format_squeeze(const std::vector<SqueezeReport>& reports);
void write_squeeze(const std::string& path, const std::vector<SqueezeReport>& reports);

/// Per-pair detail of one report: initial form, projected final form, ratio.
std::string format_squeeze_pairs(const SqueezeReport& rep);
void write_squeeze_pairs(const std::string& path, const SqueezeReport& rep);

/// t, gamma rows of the growth envelope.
std::string format_gamma(const GammaTable& table);
void write_gamma(const std::string& path, const GammaTable& table);

} // namespace mpe

#endif
