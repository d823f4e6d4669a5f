/**
 * @file config.hpp
 * @brief Plain-text run configuration: parsing, validation, the canonical
 *        effective-config echo, and model construction.
 *
 * Format: INI-style sections of key = value lines. Blank lines and lines
 * whose first non-space character is '#' or ';' are skipped. Unknown sections
 * or keys are rejected with the offending name and line number rather than
 * ignored, so a typo cannot silently fall back to a default. Repeating a key
 * overwrites the earlier value (last one wins).
 *
 * Every field has a default; echo_config prints the complete effective
 * configuration (defaults filled in) and round-trips exactly:
 * parse_config(echo_config(c)) == c, with doubles printed to shortest
 * round-trip precision.
 */
#ifndef MPE_CONFIG_HPP
#define MPE_CONFIG_HPP

#include <cstdint>
#include <string>

#include "mpe/dynamics.hpp"
#include "mpe/stepper.hpp"

namespace mpe {

struct Config {
    // [resolution]
    int L = 10;      ///< spherical-harmonic truncation degree
    int n_lat = 18;  ///< Gauss latitudes
    int n_lon = 36;  ///< uniform longitudes
    int K = 9;       ///< vertical levels

    // [model]
    ModelParams model;

    // [stepper]
    StepperConfig stepper;

    // [forcing]
    std::string forcing_preset = "steady";
    double forcing_amplitude = 0.3;

    // [run]
    double spin_up = 20.0;   ///< discarded transient, time units
    double measure = 100.0;  ///< measured window, time units
    std::uint64_t seed = 1;  ///< master seed; all streams derive from it

    // [ensemble]
    int pairs = 8;                 ///< trajectory pairs in the experiments
    double perturbation = 1e-5;    ///< relative initial separation

    // [output]
    std::string output_dir = "out";
    int sample_every = 1;  ///< steps between time-series samples

    bool operator==(const Config&) const = default;

    /// Throws std::invalid_argument on the first violated bound.
    void validate() const;
};

/// Parses configuration text. Throws std::runtime_error with the line number
/// for unknown sections/keys, malformed lines, and unparsable values.
Config parse_config(const std::string& text);

/// Reads and parses a file; throws std::runtime_error if it cannot be read.
Config parse_config_file(const std::string& path);

/// Canonical complete echo; see file comment for the round-trip guarantee.
std::string echo_config(const Config& c);

/// Builds the model a configuration describes (grids, forcing, parameters).
Model build_model(const Config& c);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double x);

} // namespace mpe

#endif
