/**
 * @file config.cpp
 * @brief Configuration parsing, echo, and model construction.
 */
#include "mpe/config.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

namespace mpe {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

int parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty value");
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
        throw std::invalid_argument("not an integer: '" + s + "'");
    if (v < INT_MIN || v > INT_MAX) throw std::invalid_argument("integer out of range: '" + s + "'");
    return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s[0] == '-')
        throw std::invalid_argument("not a non-negative integer: '" + s + "'");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
        throw std::invalid_argument("not a non-negative integer: '" + s + "'");
    return v;
}

double parse_dbl(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty value");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::invalid_argument("expected true or false, got '" + s + "'");
}

struct Entry {
    std::string section, key;
    std::function<void(Config&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = [] {
        std::vector<Entry> e;
        auto add_int = [&e](const char* sec, const char* key, auto acc) {
            e.push_back({sec, key, [acc](Config& c, const std::string& v) { acc(c) = parse_int(v); },
                         [acc](const Config& c) { return std::to_string(acc(c)); }});
        };
        auto add_dbl = [&e](const char* sec, const char* key, auto acc) {
            e.push_back({sec, key, [acc](Config& c, const std::string& v) { acc(c) = parse_dbl(v); },
                         [acc](const Config& c) { return format_double(acc(c)); }});
        };
        auto add_bool = [&e](const char* sec, const char* key, auto acc) {
            e.push_back({sec, key, [acc](Config& c, const std::string& v) { acc(c) = parse_bool(v); },
                         [acc](const Config& c) { return acc(c) ? "true" : "false"; }});
        };
        auto add_str = [&e](const char* sec, const char* key, auto acc) {
            e.push_back({sec, key, [acc](Config& c, const std::string& v) { acc(c) = v; },
                         [acc](const Config& c) -> std::string { return acc(c); }});
        };
        auto add_u64 = [&e](const char* sec, const char* key, auto acc) {
            e.push_back({sec, key, [acc](Config& c, const std::string& v) { acc(c) = parse_u64(v); },
                         [acc](const Config& c) { return std::to_string(acc(c)); }});
        };

        add_int("resolution", "L", [](auto& c) -> auto& { return c.L; });
        add_int("resolution", "n_lat", [](auto& c) -> auto& { return c.n_lat; });
        add_int("resolution", "n_lon", [](auto& c) -> auto& { return c.n_lon; });
        add_int("resolution", "K", [](auto& c) -> auto& { return c.K; });

        add_dbl("model", "rossby", [](auto& c) -> auto& { return c.model.rossby; });
        add_dbl("model", "b", [](auto& c) -> auto& { return c.model.b; });
        add_dbl("model", "P", [](auto& c) -> auto& { return c.model.P; });
        add_dbl("model", "p0", [](auto& c) -> auto& { return c.model.p0; });
        add_dbl("model", "a_moist", [](auto& c) -> auto& { return c.model.a_moist; });
        add_dbl("model", "alpha_T", [](auto& c) -> auto& { return c.model.alpha_T; });
        add_dbl("model", "beta_q", [](auto& c) -> auto& { return c.model.beta_q; });
        add_dbl("model", "nu_v", [](auto& c) -> auto& { return c.model.nu_v; });
        add_dbl("model", "mu_v", [](auto& c) -> auto& { return c.model.mu_v; });
        add_dbl("model", "nu_T", [](auto& c) -> auto& { return c.model.nu_T; });
        add_dbl("model", "mu_T", [](auto& c) -> auto& { return c.model.mu_T; });
        add_dbl("model", "nu_q", [](auto& c) -> auto& { return c.model.nu_q; });
        add_dbl("model", "mu_q", [](auto& c) -> auto& { return c.model.mu_q; });
        add_bool("model", "advection", [](auto& c) -> auto& { return c.model.advection; });
        add_bool("model", "coriolis", [](auto& c) -> auto& { return c.model.coriolis; });
        add_bool("model", "buoyancy", [](auto& c) -> auto& { return c.model.buoyancy; });
        add_bool("model", "diffusion", [](auto& c) -> auto& { return c.model.diffusion; });
        add_bool("model", "forcing", [](auto& c) -> auto& { return c.model.forcing; });

        add_dbl("stepper", "dt", [](auto& c) -> auto& { return c.stepper.dt; });
        add_str("stepper", "scheme", [](auto& c) -> auto& { return c.stepper.scheme; });
        add_dbl("stepper", "implicit_tol", [](auto& c) -> auto& { return c.stepper.implicit_tol; });
        add_int("stepper", "max_implicit_iters",
                [](auto& c) -> auto& { return c.stepper.max_implicit_iters; });
        add_dbl("stepper", "cfl_safety", [](auto& c) -> auto& { return c.stepper.cfl_safety; });
        add_dbl("stepper", "dt_max", [](auto& c) -> auto& { return c.stepper.dt_max; });

        add_str("forcing", "preset", [](auto& c) -> auto& { return c.forcing_preset; });
        add_dbl("forcing", "amplitude", [](auto& c) -> auto& { return c.forcing_amplitude; });

        add_dbl("run", "spin_up", [](auto& c) -> auto& { return c.spin_up; });
        add_dbl("run", "measure", [](auto& c) -> auto& { return c.measure; });
        add_u64("run", "seed", [](auto& c) -> auto& { return c.seed; });

        add_int("ensemble", "pairs", [](auto& c) -> auto& { return c.pairs; });
        add_dbl("ensemble", "perturbation", [](auto& c) -> auto& { return c.perturbation; });

        add_str("output", "dir", [](auto& c) -> auto& { return c.output_dir; });
        add_int("output", "sample_every", [](auto& c) -> auto& { return c.sample_every; });
        return e;
    }();
    return table;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    // Exactly representable integers print without an exponent.
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", x);
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Config parse_config(const std::string& text) {
    Config c;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const Entry& en : entries()) known = known || en.section == section;
            if (!known) fail(line_no, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "missing key before '='");
        if (section.empty()) fail(line_no, "key '" + key + "' before any [section]");

        const Entry* hit = nullptr;
        for (const Entry& en : entries())
            if (en.section == section && en.key == key) {
                hit = &en;
                break;
            }
        if (!hit) fail(line_no, "unknown key '" + key + "' in section [" + section + "]");
        try {
            hit->set(c, value);
        } catch (const std::exception& ex) {
            fail(line_no, "bad value for '" + key + "': " + ex.what());
        }
    }
    return c;
}

Config parse_config_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot read config file '" + path + "'");
    std::string text;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    return parse_config(text);
}

std::string echo_config(const Config& c) {
    std::string out;
    std::string section;
    for (const Entry& en : entries()) {
        if (en.section != section) {
            if (!section.empty()) out += "\n";
            section = en.section;
            out += "[" + section + "]\n";
        }
        out += en.key + " = " + en.get(c) + "\n";
    }
    return out;
}

void Config::validate() const {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (L < 1) bad("L must be >= 1");
    if (n_lat < L + 1) bad("n_lat must be >= L + 1");
    if (n_lon < 2 * L + 1) bad("n_lon must be >= 2L + 1");
    if (K < 2) bad("K must be >= 2");
    model.validate();
    stepper.validate();
    if (!(forcing_amplitude >= 0.0)) bad("forcing amplitude must be >= 0");
    if (!(spin_up >= 0.0)) bad("spin_up must be >= 0");
    if (!(measure >= 0.0)) bad("measure must be >= 0");
    if (pairs < 0) bad("ensemble pairs must be >= 0");
    if (!(perturbation > 0.0)) bad("perturbation must be > 0");
    if (output_dir.empty()) bad("output dir must be non-empty");
    if (sample_every < 1) bad("sample_every must be >= 1");
}

Model build_model(const Config& c) {
    c.validate();
    SphereGrid sg = make_grid(c.L, c.n_lat, c.n_lon);
    VerticalGrid vg = make_vertical_grid(c.K);
    return Model(c.model, sg, vg,
                 make_forcing(c.forcing_preset, sg, vg, c.forcing_amplitude));
}

} // namespace mpe
