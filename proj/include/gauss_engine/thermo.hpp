#pragma once

// Energetic and entropic bookkeeping of a correlated engine between two
// cycle boundaries: heats, internal and interaction energy changes, the
// entropy production Sigma, the resource sigma, the generalised efficiency
// and the thermal/athermal regime split.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gauss_engine/engine_model.hpp"
#include "gauss_engine/gaussian.hpp"

namespace gauss_engine {

inline constexpr double kNonnegativeFloor = -1e-9;

struct CycleLedger {
    std::size_t cycle_index = 0;
    std::vector<double> Q;      // heat absorbed by each bath
    std::vector<double> dU_S;   // per working oscillator
    std::vector<double> dU_int; // per system-bath coupling
    double W_tot = 0.0;

    [[nodiscard]] double heat_sum() const { return std::accumulate(Q.begin(), Q.end(), 0.0); }
    [[nodiscard]] double internal_sum() const { return std::accumulate(dU_S.begin(), dU_S.end(), 0.0); }
    [[nodiscard]] double interaction_sum() const { return std::accumulate(dU_int.begin(), dU_int.end(), 0.0); }
};

/// Energy differences between two boundary states (where the drive is off).
inline CycleLedger cycle_ledger(const GaussianState& start, const GaussianState& end, const EngineModel& model,
                                std::size_t cycle_index = 0) {
    if (start.layout() != model.layout || end.layout() != model.layout) {
        throw Error(ErrorKind::LayoutMismatch, "ledger states are not on the engine layout");
    }
    CycleLedger ledger;
    ledger.cycle_index = cycle_index;
    auto diff = [&](const QuadraticForm& f) { return mean_energy(end, f) - mean_energy(start, f); };
    for (const auto& side : model.sides) {
        ledger.Q.push_back(diff(side.reservoir));
        ledger.dU_S.push_back(diff(side.system));
        ledger.dU_int.push_back(diff(side.interaction));
    }
    ledger.W_tot = diff(model.boundary_hamiltonian());
    return ledger;
}

/// |W - sum Q - dU_S - dU_int| relative to the size of the terms, or to
/// `floor` when the terms are smaller.
inline double first_law_residual(const CycleLedger& l, double floor = 0.0) {
    double scale = std::abs(l.W_tot);
    for (double q : l.Q) scale += std::abs(q);
    for (double u : l.dU_S) scale += std::abs(u);
    for (double u : l.dU_int) scale += std::abs(u);
    const double r = l.W_tot - l.heat_sum() - l.internal_sum() - l.interaction_sum();
    scale = std::max(scale, floor);
    return scale > 0.0 ? std::abs(r) / scale : 0.0;
}

struct EntropyReport {
    double t = 0.0;
    std::vector<double> S_i; // working oscillators
    std::vector<double> S_j; // baths
    double S_sys = 0.0;
    double S_res = 0.0;
    double S_total = 0.0;
    double I_SR = 0.0;
    double C_S = 0.0;
    double C_R = 0.0;
    std::vector<double> D_j;
    std::vector<double> D_i;
    double Sigma = 0.0;
    double sigma = 0.0;

    [[nodiscard]] bool nonnegative(double floor = kNonnegativeFloor) const {
        auto ok = [floor](double v) { return v >= floor; };
        return ok(Sigma) && ok(I_SR) && ok(C_S) && ok(C_R) && std::all_of(D_j.begin(), D_j.end(), ok) &&
               std::all_of(D_i.begin(), D_i.end(), ok);
    }
};

/// Baths are referenced to their configured temperatures T_j; the working
/// oscillators to T_min = min_j T_j.
inline EntropyReport entropy_report(const GaussianState& s, const EngineModel& model, double t = 0.0) {
    if (s.layout() != model.layout) {
        throw Error(ErrorKind::LayoutMismatch, "state is not on the engine layout");
    }
    const double t_min = model.t_min();
    EntropyReport r;
    r.t = t;

    ModeSet system;
    ModeSet reservoirs;
    for (const auto& side : model.sides) {
        system.push_back(side.oscillator);
        reservoirs.insert(reservoirs.end(), side.bath.begin(), side.bath.end());

        const double s_i = entropy_of(s, {side.oscillator});
        const double s_j = entropy_of(s, side.bath);
        r.S_i.push_back(s_i);
        r.S_j.push_back(s_j);

        const double w = side.system_frequency;
        r.D_i.push_back(-s_i + mean_energy(s, side.system) / t_min + log_partition(std::span(&w, 1), t_min));
        r.D_j.push_back(-s_j + mean_energy(s, side.reservoir) / side.temperature +
                        log_partition(side.bath_frequencies, side.temperature));
    }
    r.S_sys = entropy_of(s, system);
    r.S_res = entropy_of(s, reservoirs);
    r.S_total = von_neumann_entropy(s);

    r.I_SR = r.S_sys + r.S_res - r.S_total;
    r.C_S = std::accumulate(r.S_i.begin(), r.S_i.end(), 0.0) - r.S_sys;
    r.C_R = std::accumulate(r.S_j.begin(), r.S_j.end(), 0.0) - r.S_res;
    r.Sigma = r.I_SR + r.C_S + r.C_R + std::accumulate(r.D_j.begin(), r.D_j.end(), 0.0);
    r.sigma = r.Sigma + std::accumulate(r.D_i.begin(), r.D_i.end(), 0.0);
    return r;
}

namespace detail {

inline double delta_sum(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d += b.at(k) - a[k];
    return d;
}

} // namespace detail

/// |sum_i dS_i + sum_j dS_j - (dI + dC_S + dC_R)|; vanishes when the global
/// entropy is conserved.
inline double conservation_identity_residual(const EntropyReport& start, const EntropyReport& end) {
    const double lhs = detail::delta_sum(start.S_i, end.S_i) + detail::delta_sum(start.S_j, end.S_j);
    const double rhs = (end.I_SR - start.I_SR) + (end.C_S - start.C_S) + (end.C_R - start.C_R);
    return std::abs(lhs - rhs);
}

/// |sum_i dS_i + sum_j Q_j / T_j - dSigma|
inline double second_law_residual(const EntropyReport& start, const EntropyReport& end, const CycleLedger& ledger,
                                  std::span<const double> bath_temperatures) {
    double lhs = detail::delta_sum(start.S_i, end.S_i);
    for (std::size_t j = 0; j < ledger.Q.size(); ++j) lhs += ledger.Q[j] / bath_temperatures[j];
    return std::abs(lhs - (end.Sigma - start.Sigma));
}

inline std::vector<double> local_carnot(std::span<const double> bath_temperatures) {
    const double t_min = *std::min_element(bath_temperatures.begin(), bath_temperatures.end());
    std::vector<double> eta;
    for (double t : bath_temperatures) eta.push_back(1.0 - t_min / t);
    return eta;
}

/// |W - sum_j eta_j Q_j - dU_int - T_min dsigma|
inline double work_decomposition_residual(const CycleLedger& ledger, const EntropyReport& start,
                                          const EntropyReport& end, std::span<const double> bath_temperatures) {
    const double t_min = *std::min_element(bath_temperatures.begin(), bath_temperatures.end());
    const auto eta = local_carnot(bath_temperatures);
    double thermal = 0.0;
    for (std::size_t j = 0; j < ledger.Q.size(); ++j) thermal += eta[j] * ledger.Q[j];
    const double d_sigma = end.sigma - start.sigma;
    return std::abs(ledger.W_tot - thermal - ledger.interaction_sum() - t_min * d_sigma);
}

enum class Regime { Thermal, Athermal, NotEngine };

constexpr std::string_view to_string(Regime r) noexcept {
    switch (r) {
    case Regime::Thermal: return "thermal";
    case Regime::Athermal: return "athermal";
    case Regime::NotEngine: return "not_engine";
    }
    return "unknown";
}

/// Ratio eta / (gamma eta_th) at or below this is classified thermal.
inline constexpr double kRegimeBoundary = 2.0;

struct EfficiencyReport {
    double Q_in = 0.0;
    double dU_S_in = 0.0;
    double dU_int_in = 0.0;
    std::optional<double> eta;
    double gamma = 0.0;
    std::optional<double> eta_th;
    std::vector<double> eta_j;
    double eta_C = 0.0;
    double eta_O = 0.0;
    double T_min = 0.0;
    double d_sigma = 0.0;
    std::optional<double> ratio;
    Regime regime = Regime::NotEngine;
};

inline Regime classify(double w_tot, std::optional<double> ratio) {
    if (w_tot >= 0.0) return Regime::NotEngine;
    // Work without any heat conversion to compare against.
    if (!ratio) return Regime::Athermal;
    return *ratio <= kRegimeBoundary ? Regime::Thermal : Regime::Athermal;
}

inline EfficiencyReport efficiency_report(const CycleLedger& ledger, double d_sigma,
                                          std::span<const double> bath_temperatures, double eta_otto) {
    auto incoming = [](const std::vector<double>& v) {
        double in = 0.0;
        for (double x : v) in += (std::abs(x) - x) / 2.0;
        return in;
    };
    EfficiencyReport r;
    r.Q_in = incoming(ledger.Q);
    r.dU_S_in = incoming(ledger.dU_S);
    r.dU_int_in = incoming(ledger.dU_int);
    r.T_min = *std::min_element(bath_temperatures.begin(), bath_temperatures.end());
    const double t_max = *std::max_element(bath_temperatures.begin(), bath_temperatures.end());
    r.eta_j = local_carnot(bath_temperatures);
    r.eta_C = 1.0 - r.T_min / t_max;
    r.eta_O = eta_otto;
    r.d_sigma = d_sigma;

    const double supplied = r.Q_in + r.dU_S_in + r.dU_int_in;
    if (supplied > 0.0) r.eta = -ledger.W_tot / supplied;
    if (r.Q_in > 0.0) {
        r.gamma = 1.0 / (1.0 + (r.dU_S_in + r.dU_int_in) / r.Q_in);
        double th = 0.0;
        for (std::size_t j = 0; j < ledger.Q.size(); ++j) th -= r.eta_j[j] * ledger.Q[j];
        r.eta_th = th / r.Q_in;
        if (r.eta && *r.eta_th != 0.0) r.ratio = *r.eta / (r.gamma * *r.eta_th);
    }
    r.regime = classify(ledger.W_tot, r.ratio);
    return r;
}

/// |(T_min dsigma + dU_int) / sum_j eta_j Q_j - (ratio - 1)| relative to
/// max(1, |ratio|), when both sides exist.
inline std::optional<double> regime_identity_residual(const CycleLedger& ledger, const EfficiencyReport& report) {
    double thermal = 0.0;
    for (std::size_t j = 0; j < ledger.Q.size(); ++j) thermal += report.eta_j[j] * ledger.Q[j];
    if (!report.ratio || thermal == 0.0) return std::nullopt;
    const double lhs = (report.T_min * report.d_sigma + ledger.interaction_sum()) / thermal;
    return std::abs(lhs - (*report.ratio - 1.0)) / std::max(1.0, std::abs(*report.ratio));
}

struct EfficiencyBound {
    double thermal;  // eta_th + T_min sigma / Q_in
    double carnot;   // eta_C + T_min sigma / Q_in
};

/// Upper bounds on eta given the resource sigma present at the start of the cycle.
inline EfficiencyBound efficiency_bound(const EfficiencyReport& report, double sigma_start) {
    if (!(report.Q_in > 0.0) || !report.eta_th) {
        throw Error(ErrorKind::NoHeatInput, "efficiency bound needs a positive heat input");
    }
    const double resource = report.T_min * sigma_start / report.Q_in;
    return {*report.eta_th + resource, report.eta_C + resource};
}

struct BoundSurface {
    std::vector<double> gamma;
    std::vector<double> eta_th;
    Matrix value; // 1 / (gamma eta_th) - 1, rows over gamma
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> guaranteed_thermal;
};

/// Device-independent upper bound 1/(gamma eta_th) - 1 on eta/(gamma eta_th) - 1,
/// with the region gamma eta_th > 1/2 where thermal operation is guaranteed.
inline BoundSurface bound_surface(std::span<const double> gamma_grid, std::span<const double> eta_th_grid) {
    auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!std::all_of(gamma_grid.begin(), gamma_grid.end(), in_unit) ||
        !std::all_of(eta_th_grid.begin(), eta_th_grid.end(), in_unit)) {
        throw Error(ErrorKind::InvariantViolation, "bound surface grids must lie in (0, 1]");
    }
    BoundSurface out;
    out.gamma.assign(gamma_grid.begin(), gamma_grid.end());
    out.eta_th.assign(eta_th_grid.begin(), eta_th_grid.end());
    const auto ng = static_cast<Eigen::Index>(gamma_grid.size());
    const auto ne = static_cast<Eigen::Index>(eta_th_grid.size());
    out.value.resize(ng, ne);
    out.guaranteed_thermal.resize(ng, ne);
    for (Eigen::Index a = 0; a < ng; ++a) {
        for (Eigen::Index b = 0; b < ne; ++b) {
            const double product = gamma_grid[std::size_t(a)] * eta_th_grid[std::size_t(b)];
            out.value(a, b) = 1.0 / product - 1.0;
            out.guaranteed_thermal(a, b) = product > 0.5;
        }
    }
    return out;
}

} // namespace gauss_engine
