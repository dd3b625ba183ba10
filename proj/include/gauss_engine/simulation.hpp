#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "gauss_engine/dynamics.hpp"
#include "gauss_engine/engine_model.hpp"
#include "gauss_engine/thermo.hpp"

namespace gauss_engine {

/// Everything evaluated at the end of cycle n (t = n tau) against the
/// previous boundary.
struct CycleRecord {
    std::size_t cycle = 0;
    double t = 0.0;
    CycleLedger ledger;
    double W_cum = 0.0;
    double W_integral = 0.0; // Simpson-integrated <dH_tot/dt>
    EntropyReport entropy;
    EfficiencyReport efficiency;
    double sigma_start = 0.0;
    std::optional<EfficiencyBound> bound;

    double first_law_residual = 0.0;
    double second_law_residual = 0.0;
    double conservation_residual = 0.0;
    double work_decomposition_residual = 0.0;
    std::optional<double> regime_identity_residual;
    double work_crosscheck_residual = 0.0;
    double entropy_drift = 0.0;
};

struct Trajectory {
    EngineModel model;
    double propagator_defect = 0.0;
    double initial_energy = 0.0;
    EntropyReport initial;
    std::array<double, 2> bath_diagnostic{};
    std::vector<CycleRecord> cycles;
};

/// Work per cycle below this fraction of the total energy is treated as zero.
inline constexpr double kWorkResolution = 1e-8;

inline bool work_resolved(double w, double total_energy) {
    return std::abs(w) > kWorkResolution * std::abs(total_energy);
}

/// Relative mismatch between the energy-difference work and the integrated
/// power, floored at the work resolution.
inline double work_crosscheck(double w_energy, double w_integral, double total_energy) {
    const double scale = std::max(std::abs(w_energy), kWorkResolution * std::abs(total_energy));
    if (scale == 0.0) return std::abs(w_integral);
    return std::abs(w_energy - w_integral) / scale;
}

/// Runs cfg.n_cycles drive periods from the correlated thermal initial
/// state. `on_cycle`, when set, sees each record as soon as it is complete.
inline Trajectory simulate(const EngineConfig& cfg,
                           const std::function<void(const CycleRecord&)>& on_cycle = {}) {
    Trajectory traj;
    traj.model = build_engine(cfg);
    const EngineModel& model = traj.model;
    const CycleIntegration ci = integrate_cycle(model, cfg.n_steps_on);
    traj.propagator_defect = ci.defect;

    const auto temps = model.bath_temperatures();
    const double tau = model.protocol.period();
    const double eta_otto = 1.0 - std::min(cfg.omega_c, cfg.omega_h) / std::max(cfg.omega_c, cfg.omega_h);
    const QuadraticForm h_tot = model.boundary_hamiltonian();

    GaussianState state = initial_state(model);
    traj.initial = entropy_report(state, model, 0.0);
    traj.bath_diagnostic = bath_temperature_diagnostic(state, model);
    traj.initial_energy = mean_energy(state, h_tot);

    EntropyReport previous = traj.initial;
    double w_cum = 0.0;
    traj.cycles.reserve(cfg.n_cycles);
    for (std::size_t n = 1; n <= cfg.n_cycles; ++n) {
        CycleRecord rec;
        rec.cycle = n;
        rec.t = double(n) * tau;
        rec.W_integral = work_integral(ci, state);

        GaussianState next = evolve(state, ci.cycle);
        rec.ledger = cycle_ledger(state, next, model, n);
        w_cum += rec.ledger.W_tot;
        rec.W_cum = w_cum;
        rec.entropy = entropy_report(next, model, rec.t);
        rec.sigma_start = previous.sigma;

        const double d_sigma = rec.entropy.sigma - previous.sigma;
        rec.efficiency = efficiency_report(rec.ledger, d_sigma, temps, eta_otto);
        const double energy = mean_energy(next, h_tot);
        if (!work_resolved(rec.ledger.W_tot, energy)) {
            rec.efficiency.eta.reset();
            rec.efficiency.ratio.reset();
            rec.efficiency.regime = Regime::NotEngine;
        }
        if (rec.efficiency.Q_in > 0.0 && rec.efficiency.eta_th) {
            rec.bound = efficiency_bound(rec.efficiency, previous.sigma);
        }

        rec.first_law_residual = first_law_residual(rec.ledger, kWorkResolution * std::abs(energy));
        rec.second_law_residual = second_law_residual(previous, rec.entropy, rec.ledger, temps);
        rec.conservation_residual = conservation_identity_residual(previous, rec.entropy);
        rec.work_decomposition_residual = work_decomposition_residual(rec.ledger, previous, rec.entropy, temps);
        rec.regime_identity_residual = regime_identity_residual(rec.ledger, rec.efficiency);
        rec.work_crosscheck_residual =
            work_crosscheck(rec.ledger.W_tot, rec.W_integral, energy);
        rec.entropy_drift = std::abs(rec.entropy.S_total - traj.initial.S_total);

        if (on_cycle) on_cycle(rec);
        traj.cycles.push_back(std::move(rec));
        previous = traj.cycles.back().entropy;
        state = std::move(next);
    }
    return traj;
}

} // namespace gauss_engine
