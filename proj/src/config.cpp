#include "slc/config.hpp"
#include "slc/errors.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace slc {

std::string to_string(Scheme s) { return s == Scheme::em ? "em" : "picard"; }

Scheme parse_scheme(const std::string& name)
{
    if (name == "em")
        return Scheme::em;
    if (name == "picard")
        return Scheme::picard;
    throw ConfigError("unknown scheme '" + name + "' (expected em or picard)");
}

bool SimConfig::operator==(const SimConfig& o) const { return serialize_config(*this) == serialize_config(o); }

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;)
        out.push_back(w);
    return out;
}

double to_double(const std::string& s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("'" + s + "' is not a number");
    return v;
}

long long to_integer(const std::string& s)
{
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("'" + s + "' is not an integer");
    return v;
}

std::uint64_t to_u64(const std::string& s)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("'" + s + "' is not an unsigned 64-bit integer");
    return v;
}

bool to_bool(const std::string& s)
{
    if (s == "true" || s == "on" || s == "yes" || s == "1")
        return true;
    if (s == "false" || s == "off" || s == "no" || s == "0")
        return false;
    throw ConfigError("'" + s + "' is not a boolean");
}

std::string fmt_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

struct Key {
    std::function<void(SimConfig&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
    std::string help;
};

using KeyTable = std::vector<std::pair<std::string, Key>>; // "section.key" in serialization order

template <class T>
Key number_key(T SimConfig::*field, std::string help)
{
    return {[field](SimConfig& c, const std::string& v) {
                if constexpr (std::is_same_v<T, int>)
                    c.*field = static_cast<int>(to_integer(v));
                else
                    c.*field = to_double(v);
            },
            [field](const SimConfig& c) {
                if constexpr (std::is_same_v<T, int>)
                    return std::to_string(c.*field);
                else
                    return fmt_double(c.*field);
            },
            std::move(help)};
}

Key bool_key(bool SimConfig::*field, std::string help)
{
    return {[field](SimConfig& c, const std::string& v) { c.*field = to_bool(v); },
            [field](const SimConfig& c) { return fmt_bool(c.*field); }, std::move(help)};
}

Key string_key(std::string SimConfig::*field, std::string help)
{
    return {[field](SimConfig& c, const std::string& v) { c.*field = v; },
            [field](const SimConfig& c) { return c.*field; }, std::move(help)};
}

const KeyTable& keys()
{
    static const KeyTable table = [] {
        KeyTable t;
        t.push_back({"grid.n_dim", number_key(&SimConfig::n_dim, "spatial dimension, 2 or 3")});
        t.push_back({"grid.cells",
                     {[](SimConfig& c, const std::string& v) {
                          auto w = split_words(v);
                          if (w.empty() || w.size() > 3)
                              throw ConfigError("grid.cells needs 2 or 3 counts");
                          for (std::size_t i = 0; i < w.size(); ++i)
                              c.cells[i] = static_cast<int>(to_integer(w[i]));
                      },
                      [](const SimConfig& c) {
                          std::string s;
                          for (int i = 0; i < c.n_dim; ++i)
                              s += (i ? " " : "") + std::to_string(c.cells[i]);
                          return s;
                      },
                      "cells per axis, powers of two >= 4"}});
        t.push_back({"grid.lengths",
                     {[](SimConfig& c, const std::string& v) {
                          auto w = split_words(v);
                          if (w.empty() || w.size() > 3)
                              throw ConfigError("grid.lengths needs 2 or 3 values");
                          for (std::size_t i = 0; i < w.size(); ++i)
                              c.lengths[i] = to_double(w[i]);
                      },
                      [](const SimConfig& c) {
                          std::string s;
                          for (int i = 0; i < c.n_dim; ++i)
                              s += (i ? " " : "") + fmt_double(c.lengths[i]);
                          return s;
                      },
                      "domain extents"}});
        t.push_back({"physics.eps", number_key(&SimConfig::eps, "Ginzburg-Landau penalization length")});
        t.push_back({"physics.nonlinearity", bool_key(&SimConfig::nonlinearity, "keep B1, B2 and M in the drift")});
        t.push_back({"physics.penalty", bool_key(&SimConfig::penalty, "keep the penalty f(d)/eps^2")});
        t.push_back({"physics.velocity",
                     {[](SimConfig& c, const std::string& v) {
                          if (v == "evolve")
                              c.evolve_velocity = true;
                          else if (v == "frozen")
                              c.evolve_velocity = false;
                          else
                              throw ConfigError("physics.velocity must be evolve or frozen");
                      },
                      [](const SimConfig& c) { return std::string(c.evolve_velocity ? "evolve" : "frozen"); },
                      "evolve or frozen"}});
        t.push_back({"physics.director_diffusion",
                     bool_key(&SimConfig::director_diffusion, "apply exp(-t A_hat) to the director")});
        t.push_back({"noise.kind",
                     {[](SimConfig& c, const std::string& v) { c.noise.kind = parse_noise_kind(v); },
                      [](const SimConfig& c) { return to_string(c.noise.kind); },
                      "additive_trace_class or linear_multiplicative"}});
        t.push_back({"noise.mode_count",
                     {[](SimConfig& c, const std::string& v) { c.noise.mode_count = static_cast<int>(to_integer(v)); },
                      [](const SimConfig& c) { return std::to_string(c.noise.mode_count); },
                      "retained K1 directions"}});
        t.push_back({"noise.decay_exponent",
                     {[](SimConfig& c, const std::string& v) { c.noise.decay_exponent = to_double(v); },
                      [](const SimConfig& c) { return fmt_double(c.noise.decay_exponent); },
                      "s in sigma (1 + mu_j)^{-s}, must exceed 1"}});
        t.push_back({"noise.amplitude",
                     {[](SimConfig& c, const std::string& v) { c.noise.amplitude = to_double(v); },
                      [](const SimConfig& c) { return fmt_double(c.noise.amplitude); }, "sigma >= 0"}});
        t.push_back({"noise.gain_clip",
                     {[](SimConfig& c, const std::string& v) { c.noise.gain_clip = to_double(v); },
                      [](const SimConfig& c) { return fmt_double(c.noise.gain_clip); },
                      "saturation of the multiplicative gain"}});
        t.push_back({"magnetic.profile",
                     {[](SimConfig& c, const std::string& v) { c.magnetic.profile = v; },
                      [](const SimConfig& c) { return c.magnetic.profile; }, "sine_bump"}});
        t.push_back({"magnetic.amplitude",
                     {[](SimConfig& c, const std::string& v) { c.magnetic.amplitude = to_double(v); },
                      [](const SimConfig& c) { return fmt_double(c.magnetic.amplitude); }, "H0"}});
        t.push_back({"initial.velocity", string_key(&SimConfig::velocity_profile, "zero or mode")});
        t.push_back({"initial.velocity_amplitude",
                     number_key(&SimConfig::velocity_amplitude, "L2 norm of the initial velocity mode")});
        t.push_back({"initial.director", string_key(&SimConfig::director_profile, "tilt or uniform")});
        t.push_back({"initial.director_magnitude", number_key(&SimConfig::director_magnitude, "|d0|, at most 1")});
        t.push_back({"initial.tilt_amplitude", number_key(&SimConfig::tilt_amplitude, "tilt angle amplitude (rad)")});
        t.push_back({"time.scheme",
                     {[](SimConfig& c, const std::string& v) { c.scheme = parse_scheme(v); },
                      [](const SimConfig& c) { return to_string(c.scheme); }, "em or picard"}});
        t.push_back({"time.dt", number_key(&SimConfig::dt, "time step")});
        t.push_back({"time.horizon", number_key(&SimConfig::horizon, "final time, a multiple of dt")});
        t.push_back({"picard.n_trunc",
                     {[](SimConfig& c, const std::string& v) { c.picard.n_trunc = to_double(v); },
                      [](const SimConfig& c) { return fmt_double(c.picard.n_trunc); }, "cutoff level n"}});
        t.push_back({"picard.window",
                     {[](SimConfig& c, const std::string& v) { c.picard.window = to_double(v); },
                      [](const SimConfig& c) { return fmt_double(c.picard.window); },
                      "window length, a multiple of dt"}});
        t.push_back({"picard.tol",
                     {[](SimConfig& c, const std::string& v) { c.picard.tol = to_double(v); },
                      [](const SimConfig& c) { return fmt_double(c.picard.tol); }, "fixed-point tolerance"}});
        t.push_back({"picard.max_iters",
                     {[](SimConfig& c, const std::string& v) { c.picard.max_iters = static_cast<int>(to_integer(v)); },
                      [](const SimConfig& c) { return std::to_string(c.picard.max_iters); }, "iteration cap"}});
        t.push_back({"stopping.thresholds",
                     {[](SimConfig& c, const std::string& v) {
                          c.thresholds.clear();
                          for (const auto& w : split_words(v))
                              c.thresholds.push_back(to_double(w));
                      },
                      [](const SimConfig& c) {
                          std::string s;
                          for (std::size_t i = 0; i < c.thresholds.size(); ++i)
                              s += (i ? " " : "") + fmt_double(c.thresholds[i]);
                          return s;
                      },
                      "ascending levels k; the largest one ends the run as blown_up"}});
        t.push_back({"diagnostics.q", number_key(&SimConfig::q, "energy exponent, >= 2")});
        t.push_back({"diagnostics.c_phi", number_key(&SimConfig::c_phi, "constant in the weight exponent phi")});
        t.push_back({"diagnostics.record_every", number_key(&SimConfig::record_every, "steps between records")});
        t.push_back(
            {"diagnostics.snapshot_every", number_key(&SimConfig::snapshot_every, "steps between snapshots, 0 = off")});
        t.push_back({"diagnostics.fit_start",
                     number_key(&SimConfig::fit_start, "horizon fraction where the growth fit starts")});
        t.push_back({"run.seed",
                     {[](SimConfig& c, const std::string& v) { c.seed = to_u64(v); },
                      [](const SimConfig& c) { return std::to_string(c.seed); }, "base seed"}});
        t.push_back({"run.trajectories", number_key(&SimConfig::trajectories, "ensemble size")});
        t.push_back({"run.output_dir", string_key(&SimConfig::output_dir, "output directory")});
        return t;
    }();
    return table;
}

const Key* find_key(const std::string& name)
{
    for (const auto& [k, v] : keys())
        if (k == name)
            return &v;
    return nullptr;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

std::vector<std::string> config_violations(const SimConfig& c)
{
    std::vector<std::string> e;
    if (c.n_dim != 2 && c.n_dim != 3)
        e.push_back("grid.n_dim must be 2 or 3");
    for (int a = 0; a < std::min(std::max(c.n_dim, 2), 3); ++a) {
        if (c.cells[a] < 4 || !is_power_of_two(c.cells[a]))
            e.push_back("grid.cells: axis " + std::to_string(a) + " count must be a power of two >= 4");
        if (!(c.lengths[a] > 0.0))
            e.push_back("grid.lengths: axis " + std::to_string(a) + " must be positive");
    }
    if (!(c.eps > 0.0))
        e.push_back("physics.eps must be positive");
    try {
        validate(c.noise);
    } catch (const ConfigError& err) {
        for (const auto& v : err.violations())
            e.push_back(v);
    }
    if (c.magnetic.profile != "sine_bump")
        e.push_back("magnetic.profile must be sine_bump");
    if (!(c.magnetic.amplitude >= 0.0))
        e.push_back("magnetic.amplitude must be nonnegative");
    if (c.velocity_profile != "zero" && c.velocity_profile != "mode")
        e.push_back("initial.velocity must be zero or mode");
    if (c.director_profile != "tilt" && c.director_profile != "uniform")
        e.push_back("initial.director must be tilt or uniform");
    if (!(c.director_magnitude >= 0.0 && c.director_magnitude <= 1.0))
        e.push_back("initial.director_magnitude must lie in [0, 1]");
    if (!(c.dt > 0.0))
        e.push_back("time.dt must be positive");
    if (!(c.horizon >= 0.0))
        e.push_back("time.horizon must be nonnegative");
    else if (c.dt > 0.0) {
        double r = c.horizon / c.dt;
        if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
            e.push_back("time.horizon must be an integer multiple of time.dt");
    }
    if (!(c.picard.n_trunc >= 1.0))
        e.push_back("picard.n_trunc must be >= 1");
    if (!(c.picard.window > 0.0))
        e.push_back("picard.window must be positive");
    else if (c.dt > 0.0) {
        double r = c.picard.window / c.dt;
        if (r < 0.5 || std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
            e.push_back("picard.window must be a positive integer multiple of time.dt");
    }
    if (!(c.picard.tol > 0.0))
        e.push_back("picard.tol must be positive");
    if (c.picard.max_iters < 1)
        e.push_back("picard.max_iters must be >= 1");
    if (c.thresholds.empty())
        e.push_back("stopping.thresholds must list at least one level");
    for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
        if (!(c.thresholds[i] > 0.0))
            e.push_back("stopping.thresholds must be positive");
        if (i > 0 && !(c.thresholds[i] > c.thresholds[i - 1]))
            e.push_back("stopping.thresholds must be strictly ascending");
    }
    if (!(c.q >= 2.0))
        e.push_back("diagnostics.q must be >= 2");
    if (!(c.c_phi >= 0.0))
        e.push_back("diagnostics.c_phi must be nonnegative");
    if (c.record_every < 1)
        e.push_back("diagnostics.record_every must be >= 1");
    if (c.snapshot_every < 0)
        e.push_back("diagnostics.snapshot_every must be >= 0");
    if (!(c.fit_start >= 0.0 && c.fit_start < 1.0))
        e.push_back("diagnostics.fit_start must lie in [0, 1)");
    if (c.trajectories < 1)
        e.push_back("run.trajectories must be >= 1");
    if (c.output_dir.empty())
        e.push_back("run.output_dir must not be empty");
    const std::pair<const char*, double> reals[] = {
        {"physics.eps", c.eps},
        {"noise.amplitude", c.noise.amplitude},
        {"noise.decay_exponent", c.noise.decay_exponent},
        {"noise.gain_clip", c.noise.gain_clip},
        {"magnetic.amplitude", c.magnetic.amplitude},
        {"initial.velocity_amplitude", c.velocity_amplitude},
        {"initial.tilt_amplitude", c.tilt_amplitude},
        {"time.dt", c.dt},
        {"time.horizon", c.horizon},
        {"picard.n_trunc", c.picard.n_trunc},
        {"picard.window", c.picard.window},
        {"diagnostics.c_phi", c.c_phi},
    };
    for (const auto& [name, value] : reals)
        if (!std::isfinite(value))
            e.push_back(std::string(name) + " must be finite");
    return e;
}

SimConfig parse_config(const std::string& text)
{
    SimConfig c;
    std::vector<std::string> errors;
    std::vector<std::pair<std::string, std::string>> entries;
    std::string section;
    std::istringstream in(text);
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::string full = section.empty() ? key : section + "." + key;
        entries.emplace_back(full, value);
    }
    // n_dim first so that list-valued keys can be checked against it.
    for (const auto& [k, v] : entries) {
        const Key* key = find_key(k);
        if (!key) {
            errors.push_back("unknown key '" + k + "'");
            continue;
        }
        try {
            key->set(c, v);
        } catch (const ConfigError& err) {
            errors.push_back(k + ": " + err.what());
        }
    }
    for (const auto& [k, v] : entries) {
        if (k == "grid.cells" && static_cast<int>(split_words(v).size()) != c.n_dim)
            errors.push_back("grid.cells must list n_dim counts");
        if (k == "grid.lengths" && static_cast<int>(split_words(v).size()) != c.n_dim)
            errors.push_back("grid.lengths must list n_dim values");
    }
    for (auto& v : config_violations(c))
        errors.push_back(std::move(v));
    if (!errors.empty())
        throw ConfigError(errors);
    return c;
}

std::string serialize_config(const SimConfig& c)
{
    std::string out;
    std::string current;
    for (const auto& [name, key] : keys()) {
        auto dot = name.find('.');
        std::string section = name.substr(0, dot);
        if (section != current) {
            if (!current.empty())
                out += "\n";
            out += "[" + section + "]\n";
            current = section;
        }
        out += name.substr(dot + 1) + " = " + key.get(c) + "\n";
    }
    return out;
}

std::string describe_config()
{
    SimConfig defaults;
    std::string out;
    for (const auto& [name, key] : keys())
        out += name + " = " + key.get(defaults) + "    # " + key.help + "\n";
    return out;
}

Grid build_config_grid(const SimConfig& c) { return build_grid(c.n_dim, c.cells, c.lengths); }

} // namespace slc
