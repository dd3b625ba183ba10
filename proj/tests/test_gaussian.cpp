#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gauss_engine/engine_model.hpp"
#include "gauss_engine/gaussian.hpp"
#include "oracles.hpp"

using namespace gauss_engine;

namespace {

QuadraticHamiltonian single(double w) { return build_hamiltonian(ModeLayout::numbered(1), Matrix::Constant(1, 1, w * w)); }

Matrix two_mode_squeezed(double r) {
    const double c = std::cosh(2 * r) / 2, s = std::sinh(2 * r) / 2;
    Matrix cov(4, 4);
    cov << c, s, 0, 0,
           s, c, 0, 0,
           0, 0, c, -s,
           0, 0, -s, c;
    return cov;
}

Matrix random_spd(Eigen::Index n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(rng);
    return a * a.transpose() + Matrix::Identity(n, n);
}

} // namespace

TEST(ModeLayout, RejectsDuplicateLabels) {
    EXPECT_THROW(ModeLayout({"a", "b", "a"}), Error);
    ModeLayout l({"x", "y"});
    EXPECT_EQ(l.size(), 2u);
    EXPECT_EQ(l.phase_dim(), 4u);
    EXPECT_EQ(*l.index_of("y"), 1u);
    EXPECT_FALSE(l.index_of("z"));
}

TEST(ModeLayout, SymplecticFormBlocks) {
    const Matrix o = symplectic_form(3);
    EXPECT_TRUE(o.isApprox(oracle::omega_form(3)));
    EXPECT_TRUE((o * o).isApprox(-Matrix::Identity(6, 6)));
}

TEST(BuildHamiltonian, SingleOscillatorAndDriveBlock) {
    EXPECT_NO_THROW(single(1.0));
    Matrix v(2, 2);
    v << 1, 0.08, 0.08, 4;
    const auto h = build_hamiltonian(ModeLayout::numbered(2), v);
    EXPECT_EQ(h.size(), 2u);
    const Matrix m = h.phase_space_matrix();
    EXPECT_TRUE(m.topLeftCorner(2, 2).isApprox(v));
    EXPECT_TRUE(m.bottomRightCorner(2, 2).isIdentity());
}

TEST(BuildHamiltonian, SymmetrizesSmallDefectRejectsLarge) {
    Matrix v(2, 2);
    v << 1, 0.5, 0.5 + 1e-14, 2;
    const auto h = build_hamiltonian(ModeLayout::numbered(2), v);
    EXPECT_EQ(h.potential()(0, 1), h.potential()(1, 0));
    v(1, 0) = 0.6;
    try {
        build_hamiltonian(ModeLayout::numbered(2), v);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonSymmetric);
    }
}

TEST(BuildHamiltonian, IndefiniteRejectedOnThermalUse) {
    Matrix v(2, 2);
    v << 1, 2, 2, 1;
    const auto h = build_hamiltonian(ModeLayout::numbered(2), v);
    try {
        thermal_state(h, 0.8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
    }
}

TEST(NormalModes, ClosedFormTwoByTwo) {
    EXPECT_NEAR(normal_modes(single(1.0)).frequencies(0), 1.0, 1e-15);
    Matrix v(2, 2);
    v << 1, 0.08, 0.08, 4;
    const auto m = normal_modes(build_hamiltonian(ModeLayout::numbered(2), v));
    const double disc = std::sqrt(9 + 4 * 0.08 * 0.08);
    EXPECT_NEAR(m.frequencies(0) * m.frequencies(0), (5 - disc) / 2, 1e-12);
    EXPECT_NEAR(m.frequencies(1) * m.frequencies(1), (5 + disc) / 2, 1e-12);
}

TEST(NormalModes, CirculantRingOracle) {
    const auto h = build_hamiltonian(ModeLayout::numbered(3), ring_potential(3, 1.0, 0.04));
    const auto m = normal_modes(h);
    const auto ref = oracle::circulant_frequencies(3, 1.0, 0.04);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(m.frequencies(k), ref[std::size_t(k)], 1e-10);
    EXPECT_NEAR(m.frequencies(0), 0.979796, 5e-7);
    EXPECT_NEAR(m.frequencies(1), 0.979796, 5e-7);
    EXPECT_NEAR(m.frequencies(2), 1.039230, 5e-7);

    const Matrix& o = m.rotation;
    EXPECT_LT((o.transpose() * o - Matrix::Identity(3, 3)).norm(), 1e-10);
    const Matrix rebuilt = m.spectral([](double w) { return w * w; });
    EXPECT_LT((rebuilt - h.potential()).norm() / h.potential().norm(), 1e-10);
}

TEST(ThermalState, VacuumAtZeroTemperature) {
    const auto s = thermal_state(single(1.0), 0.0);
    EXPECT_TRUE(s.cov().isApprox(0.5 * Matrix::Identity(2, 2)));
}

TEST(ThermalState, SingleModeValue) {
    const auto s = thermal_state(single(1.0), 0.8);
    EXPECT_NEAR(s.cov()(0, 0), oracle::thermal_nu(1.0, 0.8), 1e-12);
    EXPECT_NEAR(s.cov()(1, 1), oracle::kNu, 1e-12);
    EXPECT_NEAR(oracle::occupation(1.0, 0.8), oracle::kOccupation, 1e-12);
    EXPECT_EQ(s.cov()(0, 1), 0.0);
}

TEST(ThermalState, RingMatchesMatrixFunctionOracle) {
    const Matrix v = ring_potential(5, 1.0, 0.04);
    const auto s = thermal_state(build_hamiltonian(ModeLayout::numbered(5), v), 0.8);
    EXPECT_LT((s.cov() - oracle::thermal_cov(v, 0.8)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ThermalState, NegativeTemperatureRejected) {
    try {
        thermal_state(single(1.0), -0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NegativeTemperature);
    }
}

TEST(LogPartition, ScalarValueAndAsymptote) {
    EXPECT_NEAR(log_partition(single(1.0), 0.8), oracle::log_partition(1.0, 0.8), 1e-10);
    EXPECT_NEAR(log_partition(single(1.0), 0.8), oracle::kLogZ, 1e-12);
    EXPECT_LT(std::abs(log_partition(single(1.0), 0.01) + 50.0), 1e-10);
}

TEST(LogPartition, AdditiveOverUncoupledModes) {
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = 1.0;
    v(1, 1) = 2.25;
    const auto h = build_hamiltonian(ModeLayout::numbered(2), v);
    EXPECT_NEAR(log_partition(h, 0.8), oracle::log_partition(1.0, 0.8) + oracle::log_partition(1.5, 0.8), 1e-12);
}

TEST(MeanEnergy, VacuumThermalAndCrossTerm) {
    EXPECT_NEAR(mean_energy(GaussianState::vacuum(ModeLayout::numbered(1)), single(1.0)), 0.5, 1e-15);
    EXPECT_NEAR(mean_energy(thermal_state(single(1.0), 0.8), single(1.0)), oracle::kNu, 1e-12);
    const auto product = GaussianState(ModeLayout::numbered(2), Vector::Zero(4), Matrix::Identity(4, 4));
    EXPECT_EQ(mean_energy(product, QuadraticForm::coupling(0, 1, 0.04)), 0.0);
}

TEST(MeanEnergy, IncludesDisplacement) {
    Vector mean(2);
    mean << 2.0, 1.0;
    const GaussianState s(ModeLayout::numbered(1), mean, 0.5 * Matrix::Identity(2, 2));
    EXPECT_NEAR(mean_energy(s, single(1.0)), 0.5 + 0.5 * (4.0 + 1.0), 1e-14);
}

TEST(MeanEnergy, LayoutMismatch) {
    const auto s = GaussianState::vacuum(ModeLayout::numbered(1));
    const auto h = build_hamiltonian(ModeLayout({"other"}), Matrix::Constant(1, 1, 1.0));
    try {
        mean_energy(s, h);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LayoutMismatch);
    }
}

TEST(Reduce, IdentityProductAndIndexBookkeeping) {
    const auto s = GaussianState(ModeLayout::numbered(2), Vector::Zero(4), two_mode_squeezed(0.5));
    const auto all = reduce(s, {0, 1});
    EXPECT_TRUE(all.cov().isApprox(s.cov()));

    Matrix cov = Matrix::Zero(4, 4);
    const auto a = thermal_state(single(1.0), 0.8);
    const auto b = thermal_state(single(2.0), 8.0);
    cov(0, 0) = a.cov()(0, 0);
    cov(2, 2) = a.cov()(1, 1);
    cov(1, 1) = b.cov()(0, 0);
    cov(3, 3) = b.cov()(1, 1);
    const auto first = reduce(GaussianState(ModeLayout::numbered(2), Vector::Zero(4), cov), {0});
    EXPECT_TRUE(first.cov().isApprox(a.cov()));

    // Brute-force: mode 1 of an (x1, x2, p1, p2) matrix lives at rows 1 and 3.
    const auto second = reduce(s, {1});
    EXPECT_EQ(second.cov()(0, 0), s.cov()(1, 1));
    EXPECT_EQ(second.cov()(0, 1), s.cov()(1, 3));
    EXPECT_EQ(second.cov()(1, 1), s.cov()(3, 3));
    EXPECT_EQ(second.layout().label(0), "m[2]");
}

TEST(Reduce, Errors) {
    const auto s = GaussianState::vacuum(ModeLayout::numbered(2));
    try {
        reduce(s, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptySubset);
    }
    try {
        reduce(s, {2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
    }
}

TEST(SymplecticEigenvalues, KnownCases) {
    const Vector vac = symplectic_eigenvalues(0.5 * Matrix::Identity(8, 8));
    for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(vac(k), 0.5, 1e-15);
    EXPECT_NEAR(symplectic_eigenvalues(thermal_state(single(1.0), 0.8).cov())(0), oracle::kNu, 1e-12);
    for (double a : {1e-3, 0.2, 7.0, 1e3}) {
        Matrix c = Matrix::Zero(2, 2);
        c(0, 0) = a;
        c(1, 1) = 1 / (4 * a);
        EXPECT_NEAR(symplectic_eigenvalues(c)(0), 0.5, 1e-12);
    }
}

TEST(SymplecticEigenvalues, AgreesWithNonsymmetricOracle) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix v = random_spd(6, rng);
        const Matrix s = oracle::random_symplectic(6, rng, 0.2);
        const Matrix cov = s * oracle::thermal_cov(v, 1.3) * s.transpose();
        const Vector nu = symplectic_eigenvalues(cov);
        const auto ref = oracle::symplectic_spectrum(cov);
        for (Eigen::Index k = 0; k < nu.size(); ++k) EXPECT_NEAR(nu(k), ref[std::size_t(k)], 1e-9);
        for (Eigen::Index k = 1; k < nu.size(); ++k) EXPECT_GE(nu(k - 1), nu(k));
    }
}

TEST(SymplecticEigenvalues, ClampsRoundoffRejectsUnphysical) {
    EXPECT_EQ(symplectic_eigenvalues((0.5 - 1e-10) * Matrix::Identity(2, 2))(0), 0.5);
    try {
        symplectic_eigenvalues(0.4 * Matrix::Identity(2, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnphysicalState);
    }
}

TEST(Entropy, VacuumThermalProduct) {
    EXPECT_NEAR(von_neumann_entropy(GaussianState::vacuum(ModeLayout::numbered(3))), 0.0, 1e-12);
    const auto th = thermal_state(single(1.0), 0.8);
    const double s = von_neumann_entropy(th);
    EXPECT_NEAR(s, oracle::thermal_entropy(1.0, 0.8), 1e-10);
    EXPECT_NEAR(s, oracle::kEntropy, 1e-12);
    // Free-energy route: S = (E - F) / T with F = -T ln Z.
    EXPECT_NEAR(s, (mean_energy(th, single(1.0)) + 0.8 * oracle::log_partition(1.0, 0.8)) / 0.8, 1e-12);
}

TEST(Entropy, AdditiveOnBlockDiagonal) {
    std::mt19937 rng(3);
    const Matrix va = random_spd(2, rng), vb = random_spd(3, rng);
    const Matrix ca = oracle::thermal_cov(va, 0.7), cb = oracle::thermal_cov(vb, 2.0);
    Matrix cov = Matrix::Zero(10, 10);
    const std::vector<Eigen::Index> ia{0, 1, 5, 6}, ib{2, 3, 4, 7, 8, 9};
    cov(ia, ia) = ca;
    cov(ib, ib) = cb;
    EXPECT_NEAR(entropy_of_cov(cov), entropy_of_cov(ca) + entropy_of_cov(cb), 1e-10);
}

TEST(Entropy, PureStatesHaveZeroEntropy) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix s = oracle::random_symplectic(5, rng, 0.3);
        const Matrix cov = s * (0.5 * Matrix::Identity(10, 10)) * s.transpose();
        const Vector nu = symplectic_eigenvalues(cov);
        for (Eigen::Index k = 0; k < nu.size(); ++k) EXPECT_NEAR(nu(k), 0.5, 1e-8);
        EXPECT_NEAR(entropy_of_cov(cov), 0.0, 1e-8);
    }
}

TEST(Williamson, ThermalSpectraMatchNormalModes) {
    std::mt19937 rng(5);
    for (double T : {0.3, 0.8, 4.0}) {
        const auto h = build_hamiltonian(ModeLayout::numbered(6), random_spd(6, rng));
        const Vector nu = symplectic_eigenvalues(thermal_state(h, T).cov());
        const Vector w = normal_modes(h).frequencies;
        std::vector<double> ref;
        for (Eigen::Index k = 0; k < w.size(); ++k) ref.push_back(oracle::thermal_nu(w(k), T));
        std::sort(ref.begin(), ref.end(), std::greater<>());
        for (Eigen::Index k = 0; k < nu.size(); ++k) EXPECT_NEAR(nu(k), ref[std::size_t(k)], 1e-10);
    }
}

TEST(RelativeEntropy, SelfVacuumAndMismatch) {
    const auto h = single(1.0);
    EXPECT_NEAR(relative_entropy_thermal(thermal_state(h, 0.8), h, 0.8), 0.0, 1e-9);
    const double d_vac = relative_entropy_thermal(GaussianState::vacuum(ModeLayout::numbered(1)), h, 0.8);
    EXPECT_NEAR(d_vac, 0.5 / 0.8 + oracle::log_partition(1.0, 0.8), 1e-12);
    EXPECT_NEAR(d_vac, oracle::kVacuumRelativeEntropy, 1e-12);
    EXPECT_GT(relative_entropy_thermal(thermal_state(h, 1.6), h, 0.8), 0.0);
}

TEST(RelativeEntropy, ComposedFromConstituents) {
    std::mt19937 rng(17);
    const auto h = build_hamiltonian(ModeLayout::numbered(4), random_spd(4, rng));
    const Matrix s = oracle::random_symplectic(4, rng, 0.2);
    const GaussianState st(ModeLayout::numbered(4), Vector::Zero(8), s * thermal_state(h, 1.1).cov() * s.transpose());
    const double d = relative_entropy_thermal(st, h, 0.9);
    EXPECT_NEAR(d, -von_neumann_entropy(st) + mean_energy(st, h) / 0.9 + log_partition(h, 0.9), 1e-14);
    EXPECT_GE(d, -1e-9);
}

TEST(MutualInformation, ProductSqueezedSymmetric) {
    const auto prod = GaussianState(ModeLayout::numbered(2), Vector::Zero(4), Matrix::Identity(4, 4));
    EXPECT_NEAR(mutual_information(prod, {0}, {1}), 0.0, 1e-12);

    const auto tms = GaussianState(ModeLayout::numbered(2), Vector::Zero(4), two_mode_squeezed(0.5));
    const double i_ab = mutual_information(tms, {0}, {1});
    const double expected = 2.0 * oracle::entropy_from_spectrum({std::cosh(1.0) / 2});
    EXPECT_NEAR(i_ab, expected, 1e-8);
    EXPECT_NEAR(mutual_information(tms, {1}, {0}), i_ab, 1e-14);
}

TEST(MutualInformation, BadPartition) {
    const auto s = GaussianState::vacuum(ModeLayout::numbered(3));
    for (auto [a, b] : std::vector<std::pair<ModeSet, ModeSet>>{{{0}, {1}}, {{0, 1}, {1, 2}}, {{0}, {1, 2, 3}}}) {
        try {
            mutual_information(s, a, b);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::BadPartition);
        }
    }
}

TEST(TotalCorrelation, ProductTwoPartAndThreePart) {
    EXPECT_NEAR(total_correlation(GaussianState::vacuum(ModeLayout::numbered(3)), {{0}, {1}, {2}}), 0.0, 1e-12);

    const auto tms = GaussianState(ModeLayout::numbered(2), Vector::Zero(4), two_mode_squeezed(0.3));
    EXPECT_NEAR(total_correlation(tms, {{0}, {1}}), mutual_information(tms, {0}, {1}), 1e-14);

    Matrix cov = Matrix::Zero(6, 6);
    const Matrix pair = two_mode_squeezed(0.3);
    const std::vector<Eigen::Index> ip{0, 1, 3, 4};
    cov(ip, ip) = pair;
    cov(2, 2) = 1.3;
    cov(5, 5) = 0.7;
    const auto three = GaussianState(ModeLayout::numbered(3), Vector::Zero(6), cov);
    EXPECT_NEAR(total_correlation(three, {{0}, {1}, {2}}), mutual_information(tms, {0}, {1}), 1e-10);
}

TEST(Nonnegativity, RandomPhysicalStates) {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto h = build_hamiltonian(ModeLayout::numbered(4), random_spd(4, rng));
        const Matrix s = oracle::random_symplectic(4, rng, 0.4);
        const GaussianState st(ModeLayout::numbered(4), Vector::Zero(8), s * thermal_state(h, 0.5).cov() * s.transpose());
        EXPECT_GE(von_neumann_entropy(st), -1e-9);
        EXPECT_GE(mutual_information(st, {0, 2}, {1, 3}), -1e-9);
        EXPECT_GE(total_correlation(st, {{0}, {1}, {2, 3}}), -1e-9);
        EXPECT_GE(relative_entropy_thermal(st, h, 1.0), -1e-9);
    }
}
