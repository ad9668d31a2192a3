#include <doctest.h>

#include <trimode/entanglement.hpp>
#include <trimode/lyapunov.hpp>
#include <trimode/model.hpp>
#include <trimode/params.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

using namespace trimode;

namespace {

SystemParams base() { return SystemParams{}; }

// Frozen stationary covariance at the default operating point, computed
// independently at double precision.  Only the upper triangle is stored;
// entries absent below are zero to ~1e-16 (exact decouplings).
Eigen::MatrixXd frozen_default_covariance() {
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(6, 6);
    V(0, 0) = 0.53143594626715651;
    V(0, 1) = 0.039267748337444883;
    V(0, 2) = 0.15049388652917342;
    V(0, 3) = 2.8196432884536287e-05;
    V(0, 4) = -0.15049389398975868;
    V(1, 1) = 0.54904921924408734;
    V(1, 2) = 0.18797311910253295;
    V(1, 3) = -0.066830959976133059;
    V(1, 4) = -0.18798722663825523;
    V(1, 5) = 0.066866177873786375;
    V(2, 2) = 1.0328950800113508;
    V(2, 4) = -0.53289452134839443;
    V(2, 5) = 0.00011970364714967498;
    V(3, 3) = 0.95240689836494219;
    V(3, 4) = -0.00011970364714996554;
    V(3, 5) = -0.45240633970198479;
    V(4, 4) = 1.0330268558371747;
    V(5, 5) = 0.95253867020064265;
    return Eigen::MatrixXd(V.selfadjointView<Eigen::Upper>());
}

} // namespace

TEST_CASE("scalar stationary variance") {
    Eigen::MatrixXd K(1, 1), D(1, 1);
    K(0, 0) = -3.0;
    D(0, 0) = 5.0;
    const auto V = solve_lyapunov(K, D);
    // K V + V K' = -D  =>  V = D / (2|K|).
    CHECK(V(0, 0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("stationary covariance at the default operating point") {
    const auto p = base();
    const Matrix6 K = drift_matrix(p);
    const Matrix6 D = diffusion_matrix(p);
    const Matrix6 V = solve_lyapunov(K, D);

    // Residual certificate.
    const double res = lyapunov_residual(K, D, V);
    CHECK(res <= 1e-10 * std::max(1.0, D.norm()));

    // Exact symmetry after the final symmetrization step.
    CHECK((V - V.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Agreement with the frozen reference solution.
    const Eigen::MatrixXd ref = frozen_default_covariance();
    CHECK((V - ref).norm() <= 1e-8);

    // Exact structural zeros of this operating point survive in V at the
    // solver's accuracy level, and the two position-momentum cross blocks
    // mirror each other.
    CHECK(std::abs(V(0, 5)) <= 1e-12);
    CHECK(std::abs(V(2, 3)) <= 1e-12);
    CHECK(std::abs(V(4, 5)) <= 1e-12);
    CHECK(V(3, 4) == doctest::Approx(-V(2, 5)).epsilon(1e-9));

    // The state is physical: all symplectic eigenvalues above vacuum.
    const auto nu = symplectic_eigenvalues(V);
    for (double v : nu) CHECK(v >= 0.5 - 1e-9);
    CHECK(nu[0] == doctest::Approx(0.50001799730844521).epsilon(1e-9));
    CHECK(nu[1] == doctest::Approx(0.5000664296040751).epsilon(1e-9));
    CHECK(nu[2] == doctest::Approx(1.4831758068181511).epsilon(1e-9));
}

TEST_CASE("solver refuses systems without a stationary state") {
    auto p = base();
    p.chi = 0.0;
    p.zeta = 0.0; // undamped atom mode: marginal spectrum
    const Matrix6 K = drift_matrix(p);
    const Matrix6 D = diffusion_matrix(p);
    CHECK_THROWS_AS(solve_lyapunov(K, D), std::domain_error);
    CHECK_THROWS_WITH(solve_lyapunov(K, D),
                      "no stationary state: drift matrix is not strictly "
                      "Hurwitz");

    // Genuinely unstable point.
    auto q = base();
    q.detuning = -2.0 * q.omega_m;
    q.chi = 300.0;
    q.zeta = 300.0;
    CHECK_THROWS_AS(solve_lyapunov(drift_matrix(q), diffusion_matrix(q)),
                    std::domain_error);
}

TEST_CASE("uncoupled system with a weakly damped atom mode") {
    // With the couplings off the three modes decouple.  Adding a tiny
    // artificial damping (and matching noise) to the atom mode makes the
    // spectrum strictly Hurwitz; each block then relaxes to its own thermal
    // state: vacuum for cavity and atom, (n_bar + 1/2) I for the mirror.
    auto p = base();
    p.chi = 0.0;
    p.zeta = 0.0;
    const auto r = derive_rates(p);

    Matrix6 K = drift_matrix(p);
    Matrix6 D = diffusion_matrix(p);
    const double gamma_a = 1e-6 * r.kappa;
    K(5, 5) -= gamma_a;
    D(5, 5) += gamma_a;

    const Matrix6 V = solve_lyapunov(K, D);

    Matrix6 expected = Matrix6::Zero();
    expected(0, 0) = expected(1, 1) = 0.5;
    expected(2, 2) = expected(3, 3) = r.n_bar + 0.5;
    expected(4, 4) = expected(5, 5) = 0.5;

    CHECK((V - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("solution scales linearly with the noise") {
    const auto p = base();
    const Matrix6 K = drift_matrix(p);
    const Matrix6 D = diffusion_matrix(p);
    const double s = 3.7;

    const Matrix6 V1 = solve_lyapunov(K, D);
    const Matrix6 Vs = solve_lyapunov(K, Matrix6(s * D));
    CHECK((Vs - s * V1).norm() <= 1e-10 * s * V1.norm());
}

TEST_CASE("random stable systems solve to certified accuracy") {
    std::mt19937_64 gen(404);
    std::normal_distribution<double> nd(0.0, 1.0);

    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 7); // 2..8
        Eigen::MatrixXd A(n, n), G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                A(i, j) = nd(gen);
                G(i, j) = nd(gen);
            }
        // Shift far enough left to guarantee a Hurwitz spectrum.
        Eigen::MatrixXd K = A - (A.norm() + 1.0) * Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd D = G * G.transpose();

        const auto V = solve_lyapunov(K, D);
        const double res = (K * V + V * K.transpose() + D).norm();
        CHECK(res <= 1e-10 * std::max(1.0, D.norm()));
        CHECK((V - V.transpose()).norm() == 0.0);
        // Stationary covariance of a noise-driven stable system is PSD.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, V.norm()));
    }
}

TEST_CASE("matrix text serialization round trip") {
    const auto p = base();
    const Matrix6 V = solve_lyapunov(drift_matrix(p), diffusion_matrix(p));

    const std::string text = matrix_to_text(V);
    const Eigen::MatrixXd back = matrix_from_text(text);

    REQUIRE(back.rows() == 6);
    REQUIRE(back.cols() == 6);
    // 17 significant digits round-trip doubles exactly.
    CHECK((back - V).cwiseAbs().maxCoeff() == 0.0);

    // Non-square matrices survive too.
    Eigen::MatrixXd M(2, 3);
    M << 1.0, -2.5e-300, 3e300, 0.0, std::acos(-1.0), -1.0 / 3.0;
    const Eigen::MatrixXd M2 = matrix_from_text(matrix_to_text(M));
    REQUIRE(M2.rows() == 2);
    REQUIRE(M2.cols() == 3);
    CHECK((M2 - M).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(matrix_from_text("2 2\n1 2 3"), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_text("garbage"), std::invalid_argument);
}

TEST_CASE("stable points along a temperature scan solve to physical states") {
    // Property test: the residual certificate and physicality hold at every
    // stable point of a 25-point logarithmic temperature scan (the same
    // range the temperature survey preset covers).
    const auto p0 = base();
    int checked = 0;
    for (int j = 0; j < 25; ++j) {
        auto p = p0;
        const double t = static_cast<double>(j) / 24.0;
        p.temperature = std::pow(10.0, -6.0 + 3.0 * t);
        const Matrix6 K = drift_matrix(p);
        const Matrix6 D = diffusion_matrix(p);
        if (!stability(K).stable) continue;
        const Matrix6 V = solve_lyapunov(K, D);
        CHECK(lyapunov_residual(K, D, V) <= 1e-10 * std::max(1.0, D.norm()));
        const auto nu = symplectic_eigenvalues(V);
        CHECK(nu[0] >= 0.5 - 1e-9);
        ++checked;
    }
    CHECK(checked == 25);
}
