#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "gauss_engine/error.hpp"

namespace gauss_engine {

/// Periodic on/off switching of the working-oscillator coupling.
///
/// Over one period [0, t_on + t_off] the profile ramps 0 -> 1 during
/// [0, delta], holds 1 until t_on - delta, ramps 1 -> 0 until t_on and
/// stays 0 for t_off. Ramps are (1 -+ tanh(cot(pi t / delta)))/2, which are
/// smooth with every derivative vanishing at the joins.
struct DriveProtocol {
    double t_on = 0.0;
    double t_off = 0.0;
    double delta = 0.0;
    double lambda = 0.0;

    DriveProtocol() = default;
    DriveProtocol(double on, double off, double switching, double amplitude)
        : t_on(on), t_off(off), delta(switching), lambda(amplitude) {
        if (!(delta > 0.0) || !(2.0 * delta <= t_on) || !(t_off >= 0.0) || !std::isfinite(lambda)) {
            throw Error(ErrorKind::InvariantViolation,
                        "drive protocol needs 0 < 2 delta <= t_on and t_off >= 0 (t_on=" + std::to_string(t_on) +
                            ", t_off=" + std::to_string(t_off) + ", delta=" + std::to_string(delta) + ")");
        }
    }

    [[nodiscard]] double period() const noexcept { return t_on + t_off; }
};

namespace detail {

/// sech^2(c) without overflow for large |c|.
inline double sech2(double c) {
    const double e = std::exp(-2.0 * std::abs(c));
    return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

inline double phase_in_period(const DriveProtocol& p, double t) {
    const double tau = p.period();
    if (t < tau) return t;
    return std::fmod(t, tau);
}

} // namespace detail

inline double bump_value(const DriveProtocol& p, double t) {
    t = detail::phase_in_period(p, t);
    const double d = p.delta;
    if (t <= 0.0) return 0.0;
    if (t <= d) {
        if (t == d) return 1.0;
        return 0.5 * (1.0 - std::tanh(1.0 / std::tan(std::numbers::pi * t / d)));
    }
    if (t < p.t_on - d) return 1.0;
    if (t <= p.t_on) {
        if (t == p.t_on) return 0.0;
        if (t == p.t_on - d) return 1.0;
        return 0.5 * (1.0 + std::tanh(1.0 / std::tan(std::numbers::pi * (t - p.t_on) / d)));
    }
    return 0.0;
}

/// df/dt, evaluated from the closed-form branches.
inline double bump_rate(const DriveProtocol& p, double t) {
    t = detail::phase_in_period(p, t);
    const double d = p.delta;
    const double k = std::numbers::pi / d;
    auto ramp = [k](double arg) {
        // d/dt tanh(cot(k t)) = -k sech^2(cot) csc^2
        const double s = std::sin(arg);
        if (s == 0.0) return 0.0;
        const double c = std::cos(arg) / s;
        return k * detail::sech2(c) / (s * s);
    };
    if (t <= 0.0 || t >= p.t_on) return 0.0;
    if (t < d) return 0.5 * ramp(k * t);
    if (t <= p.t_on - d) return 0.0;
    return -0.5 * ramp(k * (t - p.t_on));
}

} // namespace gauss_engine
