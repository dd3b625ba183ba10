#pragma once

// Two-oscillator engine: working oscillators x_c, x_h, each coupled through
// its first site to a ring chain of n_bath bath oscillators.
//
// Mode order: x_c, x_h, q_c[1..N], q_h[1..N].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "gauss_engine/drive.hpp"
#include "gauss_engine/gaussian.hpp"

namespace gauss_engine {

struct EngineConfig {
    double omega_c = 1.0;
    double omega_h = 2.0;
    double lambda = 0.08;
    double lambda_c = 0.04;
    double lambda_h = 0.04;
    double T_c = 0.8;
    double T_h = 8.0;
    std::size_t n_bath = 300;
    std::size_t n_cycles = 50;
    std::size_t n_steps_on = 2000;
    double delta_frac = 0.45;

    /// Throws InvariantViolation naming the first offending field.
    void validate() const {
        auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvariantViolation, msg); };
        if (!(omega_c > 0.0) || !(omega_h > 0.0)) fail("frequencies must be positive");
        if (omega_c == omega_h) fail("omega_c and omega_h must differ (t_on depends on their gap)");
        if (!(T_c > 0.0) || !(T_h > 0.0)) fail("temperatures must be positive");
        if (!std::isfinite(lambda) || !std::isfinite(lambda_c) || !std::isfinite(lambda_h)) {
            fail("couplings must be finite");
        }
        if (n_bath < 3) fail("n_bath must be at least 3 for a ring chain");
        if (n_cycles < 1) fail("n_cycles must be at least 1");
        if (n_steps_on < 2 || n_steps_on % 2 != 0) fail("n_steps_on must be even and >= 2");
        if (!(delta_frac > 0.0) || !(delta_frac <= 0.5)) fail("delta_frac must lie in (0, 1/2]");
    }
};

/// Eigenfrequencies of a ring with on-site omega^2 and nearest-neighbour
/// coupling g: omega_k^2 = omega^2 + 2 g cos(2 pi k / N), ascending.
inline std::vector<double> ring_frequencies(std::size_t n, double omega, double coupling) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w2 = omega * omega + 2.0 * coupling * std::cos(2.0 * std::numbers::pi * double(k) / double(n));
        if (!(w2 > 0.0)) {
            throw Error(ErrorKind::NotPositiveDefinite, "ring chain has a non-positive normal mode");
        }
        w[k] = std::sqrt(w2);
    }
    std::sort(w.begin(), w.end());
    return w;
}

/// Ring potential: omega^2 on the diagonal, `coupling` between neighbours
/// with q_{N+1} = q_1.
inline Matrix ring_potential(std::size_t n, double omega, double coupling) {
    const auto k = static_cast<Eigen::Index>(n);
    Matrix v = omega * omega * Matrix::Identity(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const Eigen::Index b = (a + 1) % k;
        v(a, b) += coupling;
        v(b, a) += coupling;
    }
    return v;
}

/// One side of the engine: a working oscillator, its bath and their coupling.
struct EngineSide {
    std::size_t oscillator = 0;   // global mode index of x_i
    ModeSet bath;                 // global mode indices of the chain
    double temperature = 0.0;
    QuadraticForm system;         // (p^2 + omega^2 x^2)/2
    QuadraticForm reservoir;      // chain Hamiltonian
    QuadraticForm interaction;    // lambda_i x_i q_{i,1}
    std::vector<double> bath_frequencies; // closed-form ring spectrum
    double system_frequency = 0.0;
    ModeSet side_modes;                   // oscillator followed by its chain
    Matrix side_potential;                // oscillator + chain + coupling, thermalised initially

    [[nodiscard]] QuadraticHamiltonian side_hamiltonian(const ModeLayout& layout) const {
        return QuadraticHamiltonian(layout.subset(side_modes), side_potential);
    }
};

struct EngineModel {
    EngineConfig config;
    ModeLayout layout;
    Matrix v_base;                           // potential with the drive switched off
    std::array<std::size_t, 2> drive_pair{}; // (x_c, x_h)
    DriveProtocol protocol;
    std::array<EngineSide, 2> sides;         // cold, hot

    [[nodiscard]] std::size_t n_modes() const noexcept { return layout.size(); }
    [[nodiscard]] const EngineSide& cold() const noexcept { return sides[0]; }
    [[nodiscard]] const EngineSide& hot() const noexcept { return sides[1]; }
    [[nodiscard]] std::array<double, 2> bath_temperatures() const noexcept { return {config.T_c, config.T_h}; }
    [[nodiscard]] double t_min() const noexcept { return std::min(config.T_c, config.T_h); }

    /// H_tot at a cycle boundary, where the drive vanishes.
    [[nodiscard]] QuadraticForm boundary_hamiltonian() const {
        ModeSet all(n_modes());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        const auto n = static_cast<Eigen::Index>(n_modes());
        return {std::move(all), v_base, Matrix::Identity(n, n)};
    }
};

/// Drive-off potential plus lambda f(t) on the (x_c, x_h) pair.
inline Matrix potential_at(const EngineModel& model, double t) {
    Matrix v = model.v_base;
    const double g = model.protocol.lambda * bump_value(model.protocol, t);
    const auto [c, h] = model.drive_pair;
    v(Eigen::Index(c), Eigen::Index(h)) += g;
    v(Eigen::Index(h), Eigen::Index(c)) += g;
    return v;
}

/// t_on = 41 [2 pi / (omega_h - omega_c) + 1] / 40
inline double default_t_on(double omega_c, double omega_h) {
    return 41.0 * (2.0 * std::numbers::pi / std::abs(omega_h - omega_c) + 1.0) / 40.0;
}

/// t_off = 5 [2 pi / (omega_h - omega_c) + 1]
inline double default_t_off(double omega_c, double omega_h) {
    return 5.0 * (2.0 * std::numbers::pi / std::abs(omega_h - omega_c) + 1.0);
}

inline EngineModel build_engine(const EngineConfig& cfg) {
    cfg.validate();
    const std::size_t nb = cfg.n_bath;
    const std::size_t n = 2 + 2 * nb;

    std::vector<std::string> labels{"x_c", "x_h"};
    labels.reserve(n);
    for (std::size_t a = 0; a < nb; ++a) labels.push_back("q_c[" + std::to_string(a + 1) + "]");
    for (std::size_t a = 0; a < nb; ++a) labels.push_back("q_h[" + std::to_string(a + 1) + "]");

    EngineModel model;
    model.config = cfg;
    model.layout = ModeLayout(std::move(labels));
    model.drive_pair = {0, 1};

    const double t_on = default_t_on(cfg.omega_c, cfg.omega_h);
    model.protocol = DriveProtocol(t_on, default_t_off(cfg.omega_c, cfg.omega_h), cfg.delta_frac * t_on, cfg.lambda);

    const auto ni = static_cast<Eigen::Index>(n);
    const auto nbi = static_cast<Eigen::Index>(nb);
    model.v_base = Matrix::Zero(ni, ni);

    const std::array<double, 2> omega{cfg.omega_c, cfg.omega_h};
    const std::array<double, 2> coupling{cfg.lambda_c, cfg.lambda_h};
    const std::array<double, 2> temperature{cfg.T_c, cfg.T_h};
    const std::array<std::string, 2> side_name{"cold", "hot"};

    for (std::size_t s = 0; s < 2; ++s) {
        EngineSide& side = model.sides[s];
        side.oscillator = s;
        side.temperature = temperature[s];
        side.system_frequency = omega[s];
        const std::size_t first = 2 + s * nb;
        side.bath.resize(nb);
        for (std::size_t a = 0; a < nb; ++a) side.bath[a] = first + a;

        const Matrix chain = ring_potential(nb, omega[s], coupling[s]);
        const auto f = static_cast<Eigen::Index>(first);
        const auto o = static_cast<Eigen::Index>(s);
        model.v_base(o, o) = omega[s] * omega[s];
        model.v_base.block(f, f, nbi, nbi) = chain;
        model.v_base(o, f) = model.v_base(f, o) = coupling[s];

        side.system = {{side.oscillator}, Matrix::Constant(1, 1, omega[s] * omega[s]), Matrix::Identity(1, 1)};
        side.reservoir = {side.bath, chain, Matrix::Identity(nbi, nbi)};
        side.interaction = QuadraticForm::coupling(side.oscillator, first, coupling[s]);
        side.bath_frequencies = ring_frequencies(nb, omega[s], coupling[s]);

        Matrix block = Matrix::Zero(nbi + 1, nbi + 1);
        block(0, 0) = omega[s] * omega[s];
        block.bottomRightCorner(nbi, nbi) = chain;
        block(0, 1) = block(1, 0) = coupling[s];
        side.side_modes = {side.oscillator};
        side.side_modes.insert(side.side_modes.end(), side.bath.begin(), side.bath.end());
        side.side_potential = block;

        Eigen::LLT<Matrix> llt(block);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorKind::NotPositiveDefinite, "the " + side_name[s] + " side Hamiltonian is not positive definite");
        }
    }

    for (double g : {0.0, cfg.lambda}) {
        Matrix v = model.v_base;
        v(0, 1) = v(1, 0) = g;
        Eigen::LLT<Matrix> llt(v);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorKind::NotPositiveDefinite,
                        g == 0.0 ? "drive-off potential is not positive definite"
                                 : "drive-on potential is not positive definite");
        }
    }

    return model;
}

/// rho_c (x) rho_h, each factor thermal over oscillator + chain + coupling.
inline GaussianState initial_state(const EngineModel& model) {
    const auto n = static_cast<Eigen::Index>(model.n_modes());
    Matrix cov = Matrix::Zero(2 * n, 2 * n);
    for (const auto& side : model.sides) {
        const GaussianState local = thermal_state(side.side_hamiltonian(model.layout), side.temperature);
        const auto idx = detail::phase_indices(side.side_modes, model.n_modes());
        cov(idx, idx) = local.cov();
    }
    return GaussianState(model.layout, Vector::Zero(2 * n), cov);
}

/// <H_j>_{s0} - <H_j>_{thermal(H_j, T_j)} for the cold and hot chains.
inline std::array<double, 2> bath_temperature_diagnostic(const GaussianState& s0, const EngineModel& model) {
    std::array<double, 2> out{};
    for (std::size_t s = 0; s < 2; ++s) {
        const auto& side = model.sides[s];
        out[s] = mean_energy(s0, side.reservoir) - thermal_energy(side.bath_frequencies, side.temperature);
    }
    return out;
}

} // namespace gauss_engine
