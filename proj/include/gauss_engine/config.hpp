#pragma once

// Line-oriented `key = value` configuration for the command-line runner.
//
//   # comment
//   T_h = 1.7
//   sweep_T_h = 1.7:8:10        (linspace: first:last:count)
//   sweep_lambda_b = 0.01, 0.02 (explicit list)

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gauss_engine/engine_model.hpp"
#include "gauss_engine/error.hpp"

namespace gauss_engine {

enum class RunMode { Run, Sweep, Validate, BoundSurface };

constexpr std::string_view to_string(RunMode m) noexcept {
    switch (m) {
    case RunMode::Run: return "run";
    case RunMode::Sweep: return "sweep";
    case RunMode::Validate: return "validate";
    case RunMode::BoundSurface: return "bound-surface";
    }
    return "unknown";
}

inline RunMode parse_run_mode(std::string_view s) {
    for (RunMode m : {RunMode::Run, RunMode::Sweep, RunMode::Validate, RunMode::BoundSurface}) {
        if (s == to_string(m)) return m;
    }
    throw Error(ErrorKind::ParseError, "unknown mode '" + std::string(s) + "'");
}

/// Evenly spaced values from first to last inclusive.
inline std::vector<double> linspace(double first, double last, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {first};
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        v[i] = first + (last - first) * double(i) / double(count - 1);
    }
    v.back() = last;
    return v;
}

struct RunConfig {
    EngineConfig engine;
    RunMode mode = RunMode::Run;
    std::vector<double> sweep_T_h = linspace(1.7, 8.0, 10);
    std::vector<double> sweep_lambda_b = linspace(0.08 / 15.0, 0.08 / 2.0, 10);
    std::vector<double> bound_gamma = linspace(0.05, 1.0, 20);
    std::vector<double> bound_eta_th = linspace(0.05, 1.0, 20);
    std::string output;
    std::size_t workers = 1;

    void validate() const {
        engine.validate();
        if (workers < 1) throw Error(ErrorKind::InvariantViolation, "workers must be at least 1");
        if (mode == RunMode::Sweep && (sweep_T_h.empty() || sweep_lambda_b.empty())) {
            throw Error(ErrorKind::InvariantViolation, "sweep ranges must be nonempty");
        }
        if (mode == RunMode::BoundSurface && (bound_gamma.empty() || bound_eta_th.empty())) {
            throw Error(ErrorKind::InvariantViolation, "bound-surface grids must be nonempty");
        }
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::ParseError, "expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

inline std::size_t parse_count(std::string_view s) {
    s = trim(s);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::ParseError, "expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
}

/// "a, b, c" or "first:last:count".
inline std::vector<double> parse_list(std::string_view s) {
    s = trim(s);
    if (s.find(':') != std::string_view::npos) {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        for (std::size_t pos; (pos = s.find(':', start)) != std::string_view::npos; start = pos + 1) {
            parts.push_back(s.substr(start, pos - start));
        }
        parts.push_back(s.substr(start));
        if (parts.size() != 3) throw Error(ErrorKind::ParseError, "range must be first:last:count");
        return linspace(parse_double(parts[0]), parse_double(parts[1]), parse_count(parts[2]));
    }
    std::vector<double> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(',', start);
        out.push_back(parse_double(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace detail

/// Keys not present keep their defaults. Throws UnknownKey, ParseError (with
/// the offending line number) or InvariantViolation.
inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    auto& e = cfg.engine;
    using Setter = std::function<void(std::string_view)>;
    auto real = [](double& field) -> Setter { return [&field](std::string_view v) { field = detail::parse_double(v); }; };
    auto count = [](std::size_t& field) -> Setter { return [&field](std::string_view v) { field = detail::parse_count(v); }; };
    auto list = [](std::vector<double>& field) -> Setter { return [&field](std::string_view v) { field = detail::parse_list(v); }; };

    const std::map<std::string, Setter, std::less<>> setters{
        {"omega_c", real(e.omega_c)},
        {"omega_h", real(e.omega_h)},
        {"lambda", real(e.lambda)},
        {"lambda_c", real(e.lambda_c)},
        {"lambda_h", real(e.lambda_h)},
        {"T_c", real(e.T_c)},
        {"T_h", real(e.T_h)},
        {"n_bath", count(e.n_bath)},
        {"n_cycles", count(e.n_cycles)},
        {"n_steps_on", count(e.n_steps_on)},
        {"delta_frac", real(e.delta_frac)},
        {"mode", [&cfg](std::string_view v) { cfg.mode = parse_run_mode(detail::trim(v)); }},
        {"output", [&cfg](std::string_view v) { cfg.output = std::string(detail::trim(v)); }},
        {"workers", count(cfg.workers)},
        {"sweep_T_h", list(cfg.sweep_T_h)},
        {"sweep_lambda_b", list(cfg.sweep_lambda_b)},
        {"bound_gamma", list(cfg.bound_gamma)},
        {"bound_eta_th", list(cfg.bound_eta_th)},
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::ParseError, where + "expected 'key = value'");
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto it = setters.find(key);
        if (it == setters.end()) throw Error(ErrorKind::UnknownKey, where + "unknown key '" + std::string(key) + "'");
        try {
            it->second(line.substr(eq + 1));
        } catch (const Error& err) {
            throw Error(err.kind(), where + err.message());
        }
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

} // namespace gauss_engine
