#pragma once

// Propagation of Gaussian moments under z' = Omega M(t) z, i.e.
// x' = p, p' = -V(t) x.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gauss_engine/engine_model.hpp"
#include "gauss_engine/gaussian.hpp"

namespace gauss_engine {

inline constexpr double kSymplecticTolerance = 1e-8;
inline constexpr std::size_t kDefaultStepsOn = 2000;

/// Symplectic matrix mapping moments at t_start to moments at t_end.
struct Propagator {
    Matrix matrix;
    double t_start = 0.0;
    double t_end = 0.0;

    static Propagator identity(std::size_t n_modes, double t = 0.0) {
        const auto d = static_cast<Eigen::Index>(2 * n_modes);
        return {Matrix::Identity(d, d), t, t};
    }
};

/// ||S^T Omega S - Omega||_F / ||Omega||_F
inline double symplecticity_defect(const Propagator& p) {
    const Matrix& s = p.matrix;
    const Eigen::Index n = s.rows() / 2;
    // Omega S = [S_p; -S_x]
    Matrix omega_s(s.rows(), s.cols());
    omega_s.topRows(n) = s.bottomRows(n);
    omega_s.bottomRows(n) = -s.topRows(n);
    Matrix diff = s.transpose() * omega_s;
    diff.topRightCorner(n, n).diagonal().array() -= 1.0;
    diff.bottomLeftCorner(n, n).diagonal().array() += 1.0;
    return diff.norm() / std::sqrt(double(s.rows()));
}

/// Exact evolution for a constant potential V = O diag(w^2) O^T.
inline Propagator constant_propagator(const NormalModes& modes, double dt, double t_start = 0.0) {
    const auto n = modes.frequencies.size();
    Matrix s(2 * n, 2 * n);
    s.topLeftCorner(n, n) = modes.spectral([dt](double w) { return std::cos(w * dt); });
    s.topRightCorner(n, n) = modes.spectral([dt](double w) { return std::sin(w * dt) / w; });
    s.bottomLeftCorner(n, n) = modes.spectral([dt](double w) { return -w * std::sin(w * dt); });
    s.bottomRightCorner(n, n) = s.topLeftCorner(n, n);
    return {std::move(s), t_start, t_start + dt};
}

inline Propagator constant_propagator(const QuadraticHamiltonian& h, double dt, double t_start = 0.0) {
    return constant_propagator(normal_modes(h), dt, t_start);
}

/// `later` after `earlier`.
inline Propagator compose(const Propagator& later, const Propagator& earlier) {
    if (later.matrix.rows() != earlier.matrix.rows()) {
        throw Error(ErrorKind::LayoutMismatch, "cannot compose propagators of different sizes");
    }
    return {later.matrix * earlier.matrix, earlier.t_start, later.t_end};
}

inline GaussianState evolve(const GaussianState& s, const Propagator& p) {
    if (p.matrix.rows() != static_cast<Eigen::Index>(s.layout().phase_dim()) || p.matrix.rows() != p.matrix.cols()) {
        throw Error(ErrorKind::LayoutMismatch, "propagator size does not match the state");
    }
    Matrix tmp;
    tmp.noalias() = p.matrix * s.cov();
    Matrix cov;
    cov.noalias() = tmp * p.matrix.transpose();
    return GaussianState(s.layout(), p.matrix * s.mean(), cov);
}

/// One drive period, resolved on the RK4 grid of the on phase.
///
/// Besides the propagators this keeps the x_c and x_h rows of S(t_k) at
/// every grid point, which is what the work integral needs: the drive
/// couples only those two coordinates.
struct CycleIntegration {
    Propagator on_phase;
    Propagator off_phase;
    Propagator cycle;
    std::vector<double> times;
    Matrix rows_c;        // (n_steps + 1) x 2N
    Matrix rows_h;        // (n_steps + 1) x 2N
    Vector power_weights; // Simpson weight times lambda f'(t_k)
    double defect = 0.0;
};

namespace detail {

/// Drive-off evolution seen in normal-mode coordinates (Q, Pi), where it is
/// a 2x2 rotation per mode.
struct FreeFrame {
    const NormalModes& modes;
    Vector o_c; // row x_c of O
    Vector o_h; // row x_h of O

    /// Row x_i of U0(t): maps normal coordinates at 0 to x_i(t).
    [[nodiscard]] Eigen::RowVectorXd position_row(const Vector& o_i, double t) const {
        const auto n = modes.frequencies.size();
        Eigen::RowVectorXd r(2 * n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double w = modes.frequencies(k);
            r(k) = o_i(k) * std::cos(w * t);
            r(n + k) = o_i(k) * std::sin(w * t) / w;
        }
        return r;
    }

    /// Column p_i of U0(-t).
    [[nodiscard]] Vector momentum_column_back(const Vector& o_i, double t) const {
        const auto n = modes.frequencies.size();
        Vector c(2 * n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double w = modes.frequencies(k);
            c(k) = -o_i(k) * std::sin(w * t) / w;
            c(n + k) = o_i(k) * std::cos(w * t);
        }
        return c;
    }

    /// m <- U0(t) m, for m given in normal coordinates.
    void advance_rows(Matrix& m, double t) const {
        const auto n = modes.frequencies.size();
        for (Eigen::Index k = 0; k < n; ++k) {
            const double w = modes.frequencies(k);
            const double cs = std::cos(w * t);
            const double sn = std::sin(w * t);
            const Eigen::RowVectorXd q = m.row(k);
            const Eigen::RowVectorXd p = m.row(n + k);
            m.row(k) = cs * q + (sn / w) * p;
            m.row(n + k) = (-w * sn) * q + cs * p;
        }
    }

    /// R m R^T with R = blockdiag(O, O): normal coordinates back to (x, p).
    [[nodiscard]] Matrix to_physical(const Matrix& m) const {
        const auto n = modes.frequencies.size();
        const Matrix& o = modes.rotation;
        Matrix out(2 * n, 2 * n);
        Matrix tmp(n, n);
        for (Eigen::Index a = 0; a < 2; ++a) {
            for (Eigen::Index b = 0; b < 2; ++b) {
                tmp.noalias() = o * m.block(a * n, b * n, n, n);
                out.block(a * n, b * n, n, n).noalias() = tmp * o.transpose();
            }
        }
        return out;
    }

    /// rows R^T: row vectors over normal coordinates mapped onto (x, p).
    [[nodiscard]] Matrix rows_to_physical(const Matrix& rows) const {
        const auto n = modes.frequencies.size();
        Matrix out(rows.rows(), 2 * n);
        out.leftCols(n).noalias() = rows.leftCols(n) * modes.rotation.transpose();
        out.rightCols(n).noalias() = rows.rightCols(n) * modes.rotation.transpose();
        return out;
    }
};

} // namespace detail

/// Integrates the on phase with classical RK4 at fixed step t_on / n_steps_on
/// and closes the period with the exact drive-off propagator.
///
/// RK4 runs in the interaction picture of the drive-off Hamiltonian, where
/// S(t) = U0(t) Y(t) and Y' = U0(-t) dA(t) U0(t) Y. The generator is rank two
/// (the drive only couples x_c and x_h), so each step is one 6 x 2N product
/// with Y and one rank-6 update, and the bath's free motion stays exact.
/// Throws SymplecticityLost when the cycle propagator's defect exceeds 1e-8,
/// unless `enforce_symplectic` is false (convergence studies).
inline CycleIntegration integrate_cycle(const EngineModel& model, std::size_t n_steps_on = kDefaultStepsOn,
                                        bool enforce_symplectic = true) {
    if (n_steps_on < 2 || n_steps_on % 2 != 0) {
        throw Error(ErrorKind::InvariantViolation, "n_steps_on must be even and >= 2 for Simpson quadrature");
    }
    const auto& proto = model.protocol;
    const auto n = static_cast<Eigen::Index>(model.n_modes());
    const auto steps = static_cast<Eigen::Index>(n_steps_on);
    const double h = proto.t_on / double(n_steps_on);

    const NormalModes modes = normal_modes(QuadraticHamiltonian(model.layout, model.v_base));
    const detail::FreeFrame frame{modes, modes.rotation.row(Eigen::Index(model.drive_pair[0])).transpose(),
                                  modes.rotation.row(Eigen::Index(model.drive_pair[1])).transpose()};

    CycleIntegration out;
    out.times.resize(n_steps_on + 1);
    out.power_weights.resize(steps + 1);
    Matrix rows_c(steps + 1, 2 * n);
    Matrix rows_h(steps + 1, 2 * n);

    auto time_of = [&](Eigen::Index k) { return k == steps ? proto.t_on : double(k) * h; };
    auto coupling = [&](double t) { return proto.lambda * bump_value(proto, t); };

    for (Eigen::Index k = 0; k <= steps; ++k) {
        const double t = time_of(k);
        out.times[std::size_t(k)] = t;
        const double simpson = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        out.power_weights(k) = simpson * h / 3.0 * proto.lambda * bump_rate(proto, t);
    }

    Matrix y = Matrix::Identity(2 * n, 2 * n);
    Matrix probe(6, 2 * n);   // rows b_c, b_h at t, t + h/2, t + h
    Matrix columns(2 * n, 6); // columns a_h, a_c at the same times
    Matrix probed(6, 2 * n);  // probe * Y
    Matrix update_rows(6, 2 * n);

    for (Eigen::Index k = 0; k < steps; ++k) {
        const std::array<double, 3> ts{time_of(k), time_of(k) + 0.5 * h, time_of(k + 1)};
        const std::array<double, 3> g{coupling(ts[0]), coupling(ts[1]), coupling(ts[2])};
        for (Eigen::Index s = 0; s < 3; ++s) {
            const double t = ts[std::size_t(s)];
            probe.row(2 * s) = frame.position_row(frame.o_c, t);
            probe.row(2 * s + 1) = frame.position_row(frame.o_h, t);
            columns.col(2 * s) = frame.momentum_column_back(frame.o_h, t);
            columns.col(2 * s + 1) = frame.momentum_column_back(frame.o_c, t);
        }
        probed.noalias() = probe * y;
        rows_c.row(k) = probed.row(0);
        rows_h.row(k) = probed.row(1);
        if (g[0] == 0.0 && g[1] == 0.0 && g[2] == 0.0) continue;

        // Stage increments are K = -g (a_h u_c + a_c u_h) with u = b Y_stage.
        // Probing the next stage only needs b . a, so Y_stage is never formed.
        auto next_stage = [&](Eigen::Index slot, Eigen::Index from, double step, double gs,
                              const Eigen::RowVectorXd& uc, const Eigen::RowVectorXd& uh, Eigen::RowVectorXd& vc,
                              Eigen::RowVectorXd& vh) {
            const double cc = probe.row(2 * slot).dot(columns.col(2 * from));
            const double ch = probe.row(2 * slot).dot(columns.col(2 * from + 1));
            const double hc = probe.row(2 * slot + 1).dot(columns.col(2 * from));
            const double hh = probe.row(2 * slot + 1).dot(columns.col(2 * from + 1));
            vc = probed.row(2 * slot) - (step * gs) * (cc * uc + ch * uh);
            vh = probed.row(2 * slot + 1) - (step * gs) * (hc * uc + hh * uh);
        };

        const Eigen::RowVectorXd u1c = probed.row(0);
        const Eigen::RowVectorXd u1h = probed.row(1);
        Eigen::RowVectorXd u2c, u2h, u3c, u3h, u4c, u4h;
        next_stage(1, 0, 0.5 * h, g[0], u1c, u1h, u2c, u2h);
        next_stage(1, 1, 0.5 * h, g[1], u2c, u2h, u3c, u3h);
        next_stage(2, 1, h, g[1], u3c, u3h, u4c, u4h);

        update_rows.row(0) = g[0] * u1c;
        update_rows.row(1) = g[0] * u1h;
        update_rows.row(2) = 2.0 * g[1] * (u2c + u3c);
        update_rows.row(3) = 2.0 * g[1] * (u2h + u3h);
        update_rows.row(4) = g[2] * u4c;
        update_rows.row(5) = g[2] * u4h;
        y.noalias() -= (h / 6.0) * (columns * update_rows);
    }
    rows_c.row(steps) = frame.position_row(frame.o_c, proto.t_on) * y;
    rows_h.row(steps) = frame.position_row(frame.o_h, proto.t_on) * y;
    out.rows_c = frame.rows_to_physical(rows_c);
    out.rows_h = frame.rows_to_physical(rows_h);

    frame.advance_rows(y, proto.t_on);
    out.on_phase = {frame.to_physical(y), 0.0, proto.t_on};
    frame.advance_rows(y, proto.t_off);
    out.cycle = {frame.to_physical(y), 0.0, proto.period()};
    out.off_phase = constant_propagator(modes, proto.t_off, proto.t_on);

    out.defect = symplecticity_defect(out.cycle);
    if (enforce_symplectic && !(out.defect <= kSymplecticTolerance)) {
        throw Error(ErrorKind::SymplecticityLost,
                    "cycle propagator symplecticity defect " + std::to_string(out.defect) + " exceeds 1e-8 with " +
                        std::to_string(n_steps_on) + " on-phase steps; raise n_steps_on");
    }
    return out;
}

inline Propagator cycle_propagator(const EngineModel& model, std::size_t n_steps_on = kDefaultStepsOn) {
    return integrate_cycle(model, n_steps_on).cycle;
}

/// W = int_0^{t_on} lambda f'(t) <x_c x_h>(t) dt (Simpson on the RK4 grid),
/// starting from `boundary` at the beginning of a period.
inline double work_integral(const CycleIntegration& ci, const GaussianState& boundary) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index k = 0; k < ci.power_weights.size(); ++k) {
        if (ci.power_weights(k) != 0.0) active.push_back(k);
    }
    if (active.empty()) return 0.0;
    const Matrix rc = ci.rows_c(active, Eigen::all);
    const Matrix rh = ci.rows_h(active, Eigen::all);
    Matrix y;
    y.noalias() = rh * boundary.cov();
    const Vector cross = rc.cwiseProduct(y).rowwise().sum();
    const Vector mean_c = rc * boundary.mean();
    const Vector mean_h = rh * boundary.mean();
    double w = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
        const auto k = Eigen::Index(i);
        w += ci.power_weights(active[i]) * (cross(k) + mean_c(k) * mean_h(k));
    }
    return w;
}

} // namespace gauss_engine
