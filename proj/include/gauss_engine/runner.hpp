#pragma once

// Drivers behind the command-line modes: per-cycle time series, parameter
// sweeps over (T_h, lambda_c = lambda_h), the validation suite and the
// bound surface. Each writes CSV with a header row.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gauss_engine/config.hpp"
#include "gauss_engine/csv.hpp"
#include "gauss_engine/simulation.hpp"

namespace gauss_engine {

inline const std::vector<std::string>& timeseries_columns() {
    static const std::vector<std::string> cols{
        "cycle",   "t",        "W_cycle",  "W_cum",    "Q_c",      "Q_h",          "dU_Sc",  "dU_Sh",
        "dU_int_c", "dU_int_h", "S_Sc",     "S_Sh",     "S_Rc",     "S_Rh",         "I_SR",   "C_S",
        "C_R",     "D_Rc",     "D_Rh",     "D_Sc",     "D_Sh",     "Sigma",        "sigma",  "d_sigma",
        "Tmin_d_sigma", "eta", "gamma",    "eta_th",   "eta_C",    "eta_O",        "ratio",  "regime",
        "secondlaw_residual", "firstlaw_residual", "entropy_drift"};
    return cols;
}

inline std::vector<std::string> timeseries_row(const CycleRecord& r) {
    const auto& l = r.ledger;
    const auto& e = r.entropy;
    const auto& f = r.efficiency;
    auto d = [](double v) { return format_double(v); };
    return {std::to_string(r.cycle),
            d(r.t),
            d(l.W_tot),
            d(r.W_cum),
            d(l.Q[0]),
            d(l.Q[1]),
            d(l.dU_S[0]),
            d(l.dU_S[1]),
            d(l.dU_int[0]),
            d(l.dU_int[1]),
            d(e.S_i[0]),
            d(e.S_i[1]),
            d(e.S_j[0]),
            d(e.S_j[1]),
            d(e.I_SR),
            d(e.C_S),
            d(e.C_R),
            d(e.D_j[0]),
            d(e.D_j[1]),
            d(e.D_i[0]),
            d(e.D_i[1]),
            d(e.Sigma),
            d(e.sigma),
            d(f.d_sigma),
            d(f.T_min * f.d_sigma),
            format_double(f.eta),
            d(f.gamma),
            format_double(f.eta_th),
            d(f.eta_C),
            d(f.eta_O),
            format_double(f.ratio),
            std::string(to_string(f.regime)),
            d(r.second_law_residual),
            d(r.first_law_residual),
            d(r.entropy_drift)};
}

/// Streams one row per cycle as the simulation advances.
inline Trajectory run_timeseries(const RunConfig& cfg, std::ostream& out) {
    CsvWriter csv(out);
    csv.row(timeseries_columns());
    return simulate(cfg.engine, [&](const CycleRecord& r) {
        csv.row(timeseries_row(r));
        csv.flush();
    });
}

struct SweepPoint {
    double T_h = 0.0;
    double lambda_b = 0.0;
    std::optional<CycleRecord> first_cycle;
    std::string error;

    /// 1/(gamma eta_th) - 1 when both factors are positive.
    [[nodiscard]] std::optional<double> bound() const {
        if (!first_cycle) return std::nullopt;
        const auto& e = first_cycle->efficiency;
        if (!(e.gamma > 0.0) || !e.eta_th || !(*e.eta_th > 0.0)) return std::nullopt;
        return 1.0 / (e.gamma * *e.eta_th) - 1.0;
    }
};

/// Runs `task(i)` for i in [0, count) on up to `workers` threads.
template <class Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) task(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Engine configuration for one grid point: the given hot temperature and a
/// common system-bath coupling, one cycle.
inline EngineConfig sweep_point_config(const EngineConfig& base, double T_h, double lambda_b) {
    EngineConfig c = base;
    c.T_h = T_h;
    c.lambda_c = c.lambda_h = lambda_b;
    c.n_cycles = 1;
    return c;
}

inline SweepPoint evaluate_sweep_point(const EngineConfig& base, double T_h, double lambda_b) {
    SweepPoint p;
    p.T_h = T_h;
    p.lambda_b = lambda_b;
    try {
        auto traj = simulate(sweep_point_config(base, T_h, lambda_b));
        p.first_cycle = std::move(traj.cycles.front());
    } catch (const std::exception& e) {
        p.error = e.what();
    }
    return p;
}

/// Grid over sweep_T_h (outer) x sweep_lambda_b (inner). Failures are kept
/// per point; results come back in grid order whatever the worker count.
inline std::vector<SweepPoint> sweep(const RunConfig& cfg) {
    const auto& ts = cfg.sweep_T_h;
    const auto& ls = cfg.sweep_lambda_b;
    std::vector<SweepPoint> points(ts.size() * ls.size());
    parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
        points[i] = evaluate_sweep_point(cfg.engine, ts[i / ls.size()], ls[i % ls.size()]);
    });
    return points;
}

inline const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{"T_h", "lambda_b", "W_tot", "gamma", "eta_th", "eta",
                                               "ratio", "regime", "bound", "error"};
    return cols;
}

inline void write_sweep(const std::vector<SweepPoint>& points, std::ostream& out) {
    CsvWriter csv(out);
    csv.row(sweep_columns());
    for (const auto& p : points) {
        std::vector<std::string> row{format_double(p.T_h), format_double(p.lambda_b)};
        if (p.first_cycle) {
            const auto& e = p.first_cycle->efficiency;
            row.insert(row.end(), {format_double(p.first_cycle->ledger.W_tot), format_double(e.gamma),
                                   format_double(e.eta_th), format_double(e.eta), format_double(e.ratio),
                                   std::string(to_string(e.regime)), format_double(p.bound()), ""});
        } else {
            row.insert(row.end(), {"", "", "", "", "", "", "", p.error});
        }
        csv.row(row);
    }
}

inline std::vector<SweepPoint> run_sweep(const RunConfig& cfg, std::ostream& out) {
    auto points = sweep(cfg);
    write_sweep(points, out);
    return points;
}

inline void run_bound_surface(const RunConfig& cfg, std::ostream& out) {
    const BoundSurface s = bound_surface(cfg.bound_gamma, cfg.bound_eta_th);
    CsvWriter csv(out);
    csv.row({"gamma", "eta_th", "bound", "guaranteed_thermal"});
    for (Eigen::Index a = 0; a < s.value.rows(); ++a) {
        for (Eigen::Index b = 0; b < s.value.cols(); ++b) {
            csv.row({format_double(s.gamma[std::size_t(a)]), format_double(s.eta_th[std::size_t(b)]),
                     format_double(s.value(a, b)), s.guaranteed_thermal(a, b) ? "1" : "0"});
        }
    }
}

struct ValidationCheck {
    std::string name;
    std::optional<double> value;
    std::string threshold;
    bool passed = false;
    std::string detail;
};

/// Bath size used by the validation suite.
inline constexpr std::size_t kValidationBath = 60;

/// Oracle and invariant checks on the configured engine scaled to a 60-mode
/// bath. A failing propagator build is reported as a failed check, not thrown.
inline std::vector<ValidationCheck> run_validate(const RunConfig& cfg) {
    std::vector<ValidationCheck> checks;
    auto add = [&](std::string name, std::optional<double> value, double limit, std::string detail = {}) {
        const bool ok = value && std::isfinite(*value) && *value <= limit;
        checks.push_back({std::move(name), value, format_double(limit), ok, std::move(detail)});
    };

    // Single-mode thermal values against closed forms.
    {
        const double w = 1.0, T = 0.8;
        const double x = w / (2.0 * T);
        const double nu_ref = 0.5 * std::cosh(x) / std::sinh(x);
        const double nbar = 1.0 / std::expm1(w / T);
        const double s_ref = (nbar + 1.0) * std::log(nbar + 1.0) - nbar * std::log(nbar);
        const double lnz_ref = -std::log(2.0 * std::sinh(x));
        const auto h = build_hamiltonian(ModeLayout::numbered(1), Matrix::Constant(1, 1, w * w));
        const auto th = thermal_state(h, T);
        add("thermal_symplectic_eigenvalue", std::abs(symplectic_eigenvalues(th.cov())(0) - nu_ref), 1e-10);
        add("thermal_entropy", std::abs(von_neumann_entropy(th) - s_ref), 1e-10);
        add("thermal_log_partition", std::abs(log_partition(h, T) - lnz_ref), 1e-10);
    }

    EngineConfig ec = cfg.engine;
    ec.n_bath = kValidationBath;

    std::optional<EngineModel> model;
    try {
        model = build_engine(ec);
    } catch (const std::exception& e) {
        checks.push_back({"build_engine", std::nullopt, "", false, e.what()});
        return checks;
    }

    {
        double worst = 0.0;
        for (const auto& side : model->sides) {
            const auto chain = build_hamiltonian(ModeLayout::numbered(ec.n_bath), side.reservoir.position);
            const Vector eig = normal_modes(chain).frequencies;
            for (Eigen::Index k = 0; k < eig.size(); ++k) {
                worst = std::max(worst, std::abs(eig(k) - side.bath_frequencies[std::size_t(k)]));
            }
        }
        add("circulant_spectrum", worst, 1e-10);
    }

    {
        const auto& p = model->protocol;
        const double tau = p.period();
        double worst = std::max(std::abs(bump_value(p, 0.0)), std::abs(bump_value(p, tau)));
        for (int k = 0; k <= 400; ++k) {
            const double t = tau * double(k) / 400.0;
            worst = std::max(worst, std::abs(bump_value(p, t) - bump_value(p, t + tau)));
            worst = std::max(worst, std::abs(bump_value(p, t) - bump_value(p, t + 3.0 * tau)));
        }
        add("drive_periodicity", worst, 1e-12);
    }

    std::optional<Trajectory> traj;
    try {
        traj = simulate(ec);
    } catch (const Error& e) {
        const bool symplectic = e.kind() == ErrorKind::SymplecticityLost;
        checks.push_back({"symplecticity", std::nullopt, format_double(kSymplecticTolerance), false, e.what()});
        if (!symplectic) checks.push_back({"simulation", std::nullopt, "", false, e.what()});
    }

    if (traj) {
        add("symplecticity", traj->propagator_defect, kSymplecticTolerance);
        double first = 0, second = 0, conservation = 0, identity = 0, crosscheck = 0, drift = 0;
        double decomposition = 0;
        double negative = traj->initial.nonnegative() ? 0.0 : 1.0;
        for (const auto& r : traj->cycles) {
            first = std::max(first, r.first_law_residual);
            second = std::max(second, r.second_law_residual / std::max(1.0, std::abs(r.entropy.Sigma - r.sigma_start)));
            conservation = std::max(conservation, r.conservation_residual);
            if (r.regime_identity_residual) identity = std::max(identity, *r.regime_identity_residual);
            crosscheck = std::max(crosscheck, r.work_crosscheck_residual);
            drift = std::max(drift, r.entropy_drift);
            decomposition =
                std::max(decomposition, r.work_decomposition_residual / (1e-6 * std::abs(r.ledger.W_tot) + 1e-9));
            if (!r.entropy.nonnegative()) negative = 1.0;
        }
        add("first_law", first, 1e-6);
        add("second_law", second, 1e-6);
        add("conservation_identity", conservation, 1e-7);
        add("regime_identity", identity, 1e-6);
        add("work_decomposition", decomposition, 1.0, "residual / (1e-6 |W| + 1e-9)");
        add("work_crosscheck", crosscheck, 1e-6);
        add("entropy_drift", drift, 1e-6);
        add("entropy_production_nonnegative", negative, 0.0, "1 when any of Sigma, I, C, D drops below -1e-9");
    }

    // Without the drive, block-thermal initial data must not move.
    try {
        EngineConfig still = ec;
        still.lambda = 0.0;
        still.n_cycles = 3;
        const auto m = build_engine(still);
        const auto ci = integrate_cycle(m, still.n_steps_on);
        const auto s0 = initial_state(m);
        auto s = s0;
        double worst = 0.0;
        for (std::size_t n = 0; n < still.n_cycles; ++n) {
            s = evolve(s, ci.cycle);
            worst = std::max(worst, (s.cov() - s0.cov()).cwiseAbs().maxCoeff());
            worst = std::max(worst, std::abs(cycle_ledger(s0, s, m).W_tot));
        }
        add("stationarity_without_drive", worst, 1e-8);
    } catch (const std::exception& e) {
        checks.push_back({"stationarity_without_drive", std::nullopt, format_double(1e-8), false, e.what()});
    }
    return checks;
}

inline bool write_validation(const std::vector<ValidationCheck>& checks, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"check", "value", "threshold", "status", "detail"});
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.passed;
        csv.row({c.name, format_double(c.value), c.threshold, c.passed ? "pass" : "fail", c.detail});
    }
    return all;
}

} // namespace gauss_engine
