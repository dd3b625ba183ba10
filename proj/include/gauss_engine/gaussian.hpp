#pragma once

// Gaussian states of quadratic bosonic Hamiltonians.
//
// Conventions: hbar = k_B = 1, unit masses, phase-space vector
// z = (x_1..x_n, p_1..p_n), covariance sigma_ab = <{dz_a, dz_b}>/2, so the
// vacuum has covariance I/2 and every symplectic eigenvalue is >= 1/2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "gauss_engine/error.hpp"

namespace gauss_engine {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Mode indices into a layout.
using ModeSet = std::vector<std::size_t>;

/// Symplectic eigenvalues this far below 1/2 are treated as roundoff and clamped.
inline constexpr double kPhysicalSlack = 1e-8;
inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPairingTolerance = 1e-8;

class ModeLayout {
public:
    ModeLayout() = default;

    explicit ModeLayout(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) {
            throw Error(ErrorKind::InvariantViolation, "a mode layout needs at least one mode");
        }
        std::unordered_set<std::string_view> seen;
        for (const auto& l : labels_) {
            if (!seen.insert(l).second) {
                throw Error(ErrorKind::InvariantViolation, "duplicate mode label '" + l + "'");
            }
        }
    }

    static ModeLayout numbered(std::size_t n, std::string_view prefix = "m") {
        std::vector<std::string> labels;
        labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(std::string(prefix) + "[" + std::to_string(i + 1) + "]");
        }
        return ModeLayout(std::move(labels));
    }

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t phase_dim() const noexcept { return 2 * labels_.size(); }
    [[nodiscard]] const std::string& label(std::size_t i) const { return labels_.at(i); }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - labels_.begin());
    }

    [[nodiscard]] ModeLayout subset(const ModeSet& modes) const {
        std::vector<std::string> labels;
        labels.reserve(modes.size());
        for (auto m : modes) labels.push_back(label(m));
        return ModeLayout(std::move(labels));
    }

    bool operator==(const ModeLayout&) const = default;

private:
    std::vector<std::string> labels_;
};

/// Omega = [[0, I], [-I, 0]] for n modes.
inline Matrix symplectic_form(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    Matrix omega = Matrix::Zero(2 * k, 2 * k);
    omega.topRightCorner(k, k).setIdentity();
    omega.bottomLeftCorner(k, k) = -Matrix::Identity(k, k);
    return omega;
}

namespace detail {

inline double symmetry_defect(const Matrix& m) {
    const double scale = std::max(m.norm(), 1e-300);
    return (m - m.transpose()).norm() / scale;
}

inline Matrix symmetrized(const Matrix& m, std::string_view what) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::LayoutMismatch, std::string(what) + " is not square");
    }
    if (symmetry_defect(m) >= kSymmetryTolerance) {
        throw Error(ErrorKind::NonSymmetric, std::string(what) + " is not symmetric");
    }
    return 0.5 * (m + m.transpose());
}

/// Phase-space row/column indices (x block then p block) for a mode subset.
inline std::vector<Eigen::Index> phase_indices(const ModeSet& modes, std::size_t n_modes) {
    std::vector<Eigen::Index> idx;
    idx.reserve(2 * modes.size());
    for (auto m : modes) idx.push_back(static_cast<Eigen::Index>(m));
    for (auto m : modes) idx.push_back(static_cast<Eigen::Index>(m + n_modes));
    return idx;
}

inline void check_modes(const ModeSet& modes, std::size_t n_modes) {
    if (modes.empty()) throw Error(ErrorKind::EmptySubset, "mode subset is empty");
    std::vector<bool> used(n_modes, false);
    for (auto m : modes) {
        if (m >= n_modes) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "mode " + std::to_string(m) + " outside a layout of " + std::to_string(n_modes));
        }
        if (used[m]) {
            throw Error(ErrorKind::InvariantViolation, "mode " + std::to_string(m) + " listed twice");
        }
        used[m] = true;
    }
}

} // namespace detail

/// H = (p.p + x^T V x) / 2 over the modes of `layout`.
class QuadraticHamiltonian {
public:
    QuadraticHamiltonian(ModeLayout layout, const Matrix& potential)
        : layout_(std::move(layout)), potential_(detail::symmetrized(potential, "potential matrix")) {
        if (static_cast<std::size_t>(potential_.rows()) != layout_.size()) {
            throw Error(ErrorKind::LayoutMismatch, "potential matrix size " + std::to_string(potential_.rows()) +
                                                       " does not match " + std::to_string(layout_.size()) +
                                                       " modes");
        }
    }

    [[nodiscard]] const ModeLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const Matrix& potential() const noexcept { return potential_; }
    [[nodiscard]] std::size_t size() const noexcept { return layout_.size(); }

    /// M = blockdiag(V, I) with H = z^T M z / 2.
    [[nodiscard]] Matrix phase_space_matrix() const {
        const auto n = static_cast<Eigen::Index>(size());
        Matrix m = Matrix::Zero(2 * n, 2 * n);
        m.topLeftCorner(n, n) = potential_;
        m.bottomRightCorner(n, n).setIdentity();
        return m;
    }

private:
    ModeLayout layout_;
    Matrix potential_;
};

inline QuadraticHamiltonian build_hamiltonian(ModeLayout layout, const Matrix& potential) {
    return QuadraticHamiltonian(std::move(layout), potential);
}

/// A quadratic observable (x^T A x + p^T B p)/2 acting on `modes` of some
/// state. Cross terms such as lambda x_i x_j are expressed through an
/// off-diagonal `position` block with a zero `momentum` block.
struct QuadraticForm {
    ModeSet modes;
    Matrix position;
    Matrix momentum;

    static QuadraticForm of(const QuadraticHamiltonian& h, ModeSet modes) {
        if (modes.size() != h.size()) {
            throw Error(ErrorKind::LayoutMismatch, "mode list does not match the Hamiltonian size");
        }
        const auto n = static_cast<Eigen::Index>(h.size());
        return {std::move(modes), h.potential(), Matrix::Identity(n, n)};
    }

    /// strength * x_i x_j for i != j.
    static QuadraticForm coupling(std::size_t i, std::size_t j, double strength) {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 1) = a(1, 0) = strength;
        return {{i, j}, a, Matrix::Zero(2, 2)};
    }
};

class GaussianState {
public:
    GaussianState(ModeLayout layout, Vector mean, const Matrix& cov)
        : layout_(std::move(layout)), mean_(std::move(mean)), cov_(0.5 * (cov + cov.transpose())) {
        const auto dim = static_cast<Eigen::Index>(layout_.phase_dim());
        if (mean_.size() != dim || cov.rows() != dim || cov.cols() != dim) {
            throw Error(ErrorKind::LayoutMismatch, "moment sizes do not match a layout of " +
                                                       std::to_string(layout_.size()) + " modes");
        }
    }

    static GaussianState vacuum(ModeLayout layout) {
        const auto dim = static_cast<Eigen::Index>(layout.phase_dim());
        return GaussianState(std::move(layout), Vector::Zero(dim), 0.5 * Matrix::Identity(dim, dim));
    }

    [[nodiscard]] const ModeLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
    [[nodiscard]] const Matrix& cov() const noexcept { return cov_; }
    [[nodiscard]] std::size_t n_modes() const noexcept { return layout_.size(); }

private:
    ModeLayout layout_;
    Vector mean_;
    Matrix cov_;
};

struct NormalModes {
    Matrix rotation;    // O, orthogonal
    Vector frequencies; // ascending, strictly positive

    /// O diag(f(omega_k)) O^T
    template <class F>
    [[nodiscard]] Matrix spectral(F&& f) const {
        Vector d = frequencies.unaryExpr(std::forward<F>(f));
        return rotation * d.asDiagonal() * rotation.transpose();
    }
};

inline NormalModes normal_modes(const QuadraticHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.potential());
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::NotPositiveDefinite, "eigensolver failed on the potential matrix");
    }
    const Vector& w2 = es.eigenvalues();
    if (w2.minCoeff() <= 0.0) {
        throw Error(ErrorKind::NotPositiveDefinite,
                    "potential has a non-positive eigenvalue " + std::to_string(w2.minCoeff()));
    }
    return {es.eigenvectors(), w2.cwiseSqrt()};
}

/// Bose occupation 1/(e^{omega/T} - 1); zero at T = 0.
inline double thermal_occupation(double omega, double temperature) {
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

/// coth(omega / 2T), with the T = 0 limit taken as 1.
inline double coth_half(double omega, double temperature) {
    return 1.0 + 2.0 * thermal_occupation(omega, temperature);
}

inline void check_temperature(double temperature) {
    if (!(temperature >= 0.0)) {
        throw Error(ErrorKind::NegativeTemperature, "temperature " + std::to_string(temperature));
    }
}

inline GaussianState thermal_state(const ModeLayout& layout, const NormalModes& modes, double temperature) {
    check_temperature(temperature);
    const auto n = static_cast<Eigen::Index>(layout.size());
    Matrix cov = Matrix::Zero(2 * n, 2 * n);
    cov.topLeftCorner(n, n) = modes.spectral([temperature](double w) { return coth_half(w, temperature) / (2.0 * w); });
    cov.bottomRightCorner(n, n) = modes.spectral([temperature](double w) { return w * coth_half(w, temperature) / 2.0; });
    return GaussianState(layout, Vector::Zero(2 * n), cov);
}

inline GaussianState thermal_state(const QuadraticHamiltonian& h, double temperature) {
    check_temperature(temperature);
    return thermal_state(h.layout(), normal_modes(h), temperature);
}

/// ln Z = -sum_k ln(2 sinh(omega_k / 2T)).
inline double log_partition(std::span<const double> frequencies, double temperature) {
    if (!(temperature > 0.0)) {
        throw Error(ErrorKind::NegativeTemperature, "log partition needs T > 0, got " + std::to_string(temperature));
    }
    double ln_z = 0.0;
    for (double w : frequencies) {
        if (!(w > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "non-positive mode frequency");
        // 2 sinh(a) = e^a (1 - e^{-2a})
        ln_z -= w / (2.0 * temperature) + std::log1p(-std::exp(-w / temperature));
    }
    return ln_z;
}

inline double log_partition(const QuadraticHamiltonian& h, double temperature) {
    const auto modes = normal_modes(h);
    return log_partition(std::span<const double>(modes.frequencies.data(), modes.frequencies.size()), temperature);
}

/// <H> in the thermal state: sum_k (omega_k/2) coth(omega_k/2T).
inline double thermal_energy(std::span<const double> frequencies, double temperature) {
    check_temperature(temperature);
    double e = 0.0;
    for (double w : frequencies) e += 0.5 * w * coth_half(w, temperature);
    return e;
}

inline double mean_energy(const GaussianState& s, const QuadraticForm& form) {
    const std::size_t n = s.n_modes();
    if (form.position.rows() != static_cast<Eigen::Index>(form.modes.size()) ||
        form.momentum.rows() != static_cast<Eigen::Index>(form.modes.size())) {
        throw Error(ErrorKind::LayoutMismatch, "quadratic form blocks do not match its mode list");
    }
    std::vector<Eigen::Index> xi;
    std::vector<Eigen::Index> pi;
    xi.reserve(form.modes.size());
    pi.reserve(form.modes.size());
    for (auto m : form.modes) {
        if (m >= n) throw Error(ErrorKind::LayoutMismatch, "form acts on a mode outside the state");
        xi.push_back(static_cast<Eigen::Index>(m));
        pi.push_back(static_cast<Eigen::Index>(m + n));
    }
    const Matrix sxx = s.cov()(xi, xi);
    const Matrix spp = s.cov()(pi, pi);
    const Vector rx = s.mean()(xi);
    const Vector rp = s.mean()(pi);
    return 0.5 * (form.position.cwiseProduct(sxx).sum() + form.momentum.cwiseProduct(spp).sum() +
                  rx.dot(form.position * rx) + rp.dot(form.momentum * rp));
}

/// <H> for a Hamiltonian whose mode labels all appear in the state's layout.
inline double mean_energy(const GaussianState& s, const QuadraticHamiltonian& h) {
    ModeSet modes;
    modes.reserve(h.size());
    for (const auto& l : h.layout().labels()) {
        auto idx = s.layout().index_of(l);
        if (!idx) throw Error(ErrorKind::LayoutMismatch, "mode '" + l + "' is not part of the state");
        modes.push_back(*idx);
    }
    return mean_energy(s, QuadraticForm::of(h, std::move(modes)));
}

inline GaussianState reduce(const GaussianState& s, const ModeSet& modes) {
    detail::check_modes(modes, s.n_modes());
    const auto idx = detail::phase_indices(modes, s.n_modes());
    return GaussianState(s.layout().subset(modes), s.mean()(idx), s.cov()(idx, idx));
}

/// Symplectic spectrum nu_1 >= ... >= nu_n of a 2n x 2n covariance matrix.
///
/// With cov = L L^T, the antisymmetric K = L^T Omega L is similar to
/// Omega cov, so K^T K = -K^2 is symmetric positive semidefinite with every
/// nu_k^2 appearing twice.
inline Vector symplectic_eigenvalues(const Matrix& cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0) {
        throw Error(ErrorKind::LayoutMismatch, "covariance must be square with even dimension");
    }
    const Eigen::Index n = cov.rows() / 2;
    Eigen::LLT<Matrix> llt(0.5 * (cov + cov.transpose()));
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::UnphysicalState, "covariance is not positive definite");
    }
    const Matrix l = llt.matrixL();
    Matrix omega_l(2 * n, 2 * n);
    omega_l.topRows(n) = l.bottomRows(n);
    omega_l.bottomRows(n) = -l.topRows(n);
    const Matrix k = l.transpose() * omega_l;
    Matrix gram = Matrix::Zero(2 * n, 2 * n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(k.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::UnphysicalState, "symplectic eigensolve failed");
    }
    const Vector& w = es.eigenvalues();
    Vector nu(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = w(2 * i);
        const double b = w(2 * i + 1);
        if (std::abs(b - a) > kPairingTolerance * std::max(std::abs(b), 1.0)) {
            throw Error(ErrorKind::UnphysicalState, "symplectic eigenvalues failed to pair (" + std::to_string(a) +
                                                        " vs " + std::to_string(b) + ")");
        }
        double v = std::sqrt(std::max(0.5 * (a + b), 0.0));
        if (v < 0.5 - kPhysicalSlack) {
            throw Error(ErrorKind::UnphysicalState,
                        "symplectic eigenvalue " + std::to_string(v) + " violates the uncertainty bound");
        }
        nu(n - 1 - i) = std::max(v, 0.5);
    }
    return nu;
}

/// Entropy of one mode with symplectic eigenvalue nu (>= 1/2).
inline double mode_entropy(double nu) {
    const double up = nu + 0.5;
    const double down = nu - 0.5;
    double s = up * std::log(up);
    if (down > 0.0) s -= down * std::log(down);
    return s;
}

inline double entropy_of_cov(const Matrix& cov) {
    const Vector nu = symplectic_eigenvalues(cov);
    double s = 0.0;
    for (Eigen::Index i = 0; i < nu.size(); ++i) s += mode_entropy(nu(i));
    return s;
}

inline double von_neumann_entropy(const GaussianState& s) { return entropy_of_cov(s.cov()); }

inline double entropy_of(const GaussianState& s, const ModeSet& modes) {
    detail::check_modes(modes, s.n_modes());
    const auto idx = detail::phase_indices(modes, s.n_modes());
    return entropy_of_cov(s.cov()(idx, idx));
}

/// D(rho || e^{-H/T}/Z) = -S(rho) + <H>/T + ln Z.
inline double relative_entropy_thermal(const GaussianState& s, const QuadraticHamiltonian& h_ref, double t_ref) {
    if (s.layout() != h_ref.layout()) {
        throw Error(ErrorKind::LayoutMismatch, "reference Hamiltonian acts on different modes");
    }
    return -von_neumann_entropy(s) + mean_energy(s, h_ref) / t_ref + log_partition(h_ref, t_ref);
}

namespace detail {

inline void check_partition(const std::vector<ModeSet>& parts, std::size_t n_modes) {
    std::vector<bool> used(n_modes, false);
    std::size_t covered = 0;
    for (const auto& part : parts) {
        if (part.empty()) throw Error(ErrorKind::BadPartition, "partition has an empty part");
        for (auto m : part) {
            if (m >= n_modes) throw Error(ErrorKind::BadPartition, "partition names a mode outside the state");
            if (used[m]) throw Error(ErrorKind::BadPartition, "partition parts overlap");
            used[m] = true;
            ++covered;
        }
    }
    if (covered != n_modes) throw Error(ErrorKind::BadPartition, "partition does not cover every mode");
}

} // namespace detail

/// C = sum_i S(rho_i) - S(rho); parts must partition the modes of s.
inline double total_correlation(const GaussianState& s, const std::vector<ModeSet>& parts) {
    detail::check_partition(parts, s.n_modes());
    double c = -von_neumann_entropy(s);
    for (const auto& part : parts) c += entropy_of(s, part);
    return c;
}

inline double mutual_information(const GaussianState& s, const ModeSet& a, const ModeSet& b) {
    return total_correlation(s, {a, b});
}

} // namespace gauss_engine
