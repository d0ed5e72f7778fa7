#include "catch_amalgamated.hpp"

#include "magkerr/errors.hpp"
#include "magkerr/steadystate.hpp"
#include "support.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace magkerr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DriftModel baseline_model() {
    const Config c = test::fig3_config();
    const auto r = solve_meanfield(c.system).front();
    return build_drift(effective_couplings(r, c.system, Magnon::First), effective_couplings(r, c.system, Magnon::Second),
                       c.system);
}

// Random stable drift with a positive semidefinite diffusion.
DriftModel random_model(std::mt19937& rng) {
    std::normal_distribution<double> gauss;
    const Mat6 m = Mat6::NullaryExpr([&] { return gauss(rng); });
    const Mat6 skew = m - m.transpose();
    const Mat6 b = Mat6::NullaryExpr([&] { return gauss(rng); });
    const Mat6 A = skew - (0.1 * Mat6::Identity() + 0.05 * b.transpose() * b);
    const Mat6 n = Mat6::NullaryExpr([&] { return gauss(rng); });
    return make_drift_model(A, n * n.transpose());
}

double max_abs(const Mat6& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("isotropic damping balances the noise") {
    const double gamma = 2.5e6;
    const double nbar = 0.7;
    const DriftModel m = make_drift_model(-gamma * Mat6::Identity(), gamma * (2 * nbar + 1) * Mat6::Identity());
    const CovarianceMatrix c = solve_lyapunov(m);
    CHECK(max_abs(c.matrix() - (nbar + 0.5) * Mat6::Identity()) < 1e-14);
}

TEST_CASE("no Kerr coupling leaves the vacuum") {
    const SystemParams p = test::simple_params();
    const DriftModel m = build_drift(direct_couplings(0, 0, p.delta_m1), direct_couplings(0, 0, p.delta_m2), p);
    const CovarianceMatrix c = solve_lyapunov(m);
    CHECK(max_abs(c.matrix() - 0.5 * Mat6::Identity()) < 1e-12);
}

TEST_CASE("random stable models") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const DriftModel m = random_model(rng);
        REQUIRE(m.stable);
        const CovarianceMatrix c = solve_lyapunov(m);
        CHECK(lyapunov_residual(m.A, c.matrix(), m.D) < 1e-10 * max_abs(m.D));
        CHECK(c.matrix() == c.matrix().transpose());
        Eigen::SelfAdjointEigenSolver<Mat6> eig(c.matrix());
        CHECK(eig.eigenvalues().minCoeff() > -1e-12 * max_abs(c.matrix()));

        // linear in the diffusion
        const DriftModel twice = make_drift_model(m.A, 3.0 * m.D);
        CHECK(max_abs(solve_lyapunov(twice).matrix() - 3.0 * c.matrix()) < 1e-10 * max_abs(c.matrix()));
    }
}

TEST_CASE("Lyapunov solve rejects an unstable drift") {
    const DriftModel m = make_drift_model(Mat6::Identity(), Mat6::Identity());
    CHECK_THROWS_AS(solve_lyapunov(m), UnstableModel);
    CHECK_THROWS_AS(two_time_cm(m, CovarianceMatrix::vacuum(), 1.0), UnstableModel);
}

TEST_CASE("covariance matrix is symmetrized") {
    Mat6 m = Mat6::Identity();
    m(0, 1) = 1.0;
    const CovarianceMatrix c(m);
    CHECK(c(0, 1) == 0.5);
    CHECK(c(1, 0) == 0.5);
    CHECK(CovarianceMatrix::vacuum() == CovarianceMatrix());
}

TEST_CASE("time integration") {
    const DriftModel m = baseline_model();
    REQUIRE(m.stable);
    const CovarianceMatrix ss = solve_lyapunov(m);
    const double dt = default_time_step(m);

    SECTION("zero duration returns the initial state") {
        CHECK(integrate_cm(m, CovarianceMatrix::vacuum(), 0.0, dt) == CovarianceMatrix::vacuum());
    }
    SECTION("the stationary state is a fixed point") {
        const CovarianceMatrix c = integrate_cm(m, ss, 20.0 / std::abs(m.max_real_part), dt);
        CHECK(max_abs(c.matrix() - ss.matrix()) < 1e-8);
    }
    SECTION("the vacuum relaxes to the stationary state") {
        const CovarianceMatrix c = integrate_cm(m, CovarianceMatrix::vacuum(), 50.0 / std::abs(m.max_real_part), dt);
        CHECK(max_abs(c.matrix() - ss.matrix()) < 1e-8);
    }
    SECTION("short step agrees with the exact propagator") {
        // no diffusion: C(t) = e^{At} C0 e^{A^T t}
        const DriftModel free = make_drift_model(m.A, Mat6::Zero());
        const double t = 3e-9;
        const Mat6 e = (m.A * t).exp();
        const Mat6 exact = e * ss.matrix() * e.transpose();
        CHECK(max_abs(integrate_cm(free, ss, t, dt).matrix() - exact) < 1e-10 * max_abs(exact));
    }
    SECTION("bad arguments") {
        CHECK_THROWS_AS(integrate_cm(m, ss, -1.0, dt), InvalidInput);
        CHECK_THROWS_AS(integrate_cm(m, ss, 1.0, 0.0), InvalidInput);
        CHECK_THROWS_AS(integrate_cm(m, ss, 1.0, std::nan("")), InvalidInput);
    }
}

TEST_CASE("integration of an unstable model diverges") {
    const DriftModel m = make_drift_model(1e3 * Mat6::Identity(), Mat6::Identity());
    CHECK_THROWS_AS(integrate_cm(m, CovarianceMatrix::vacuum(), 1.0, 1e-3), DivergenceError);
}

TEST_CASE("default time step") {
    const DriftModel m = make_drift_model(-4.0 * Mat6::Identity(), Mat6::Identity());
    CHECK_THAT(default_time_step(m), WithinRel(0.0025, 1e-14));
    CHECK_THROWS_AS(default_time_step(make_drift_model(Mat6::Zero(), Mat6::Zero())), InvalidInput);
}

TEST_CASE("stationary two-time correlations") {
    const DriftModel m = baseline_model();
    const CovarianceMatrix ss = solve_lyapunov(m);

    CHECK(max_abs(two_time_cm(m, ss, 0.0) - ss.matrix()) < 1e-14);

    const double slow = 1.0 / std::abs(m.max_real_part);
    CHECK(max_abs(two_time_cm(m, ss, 60.0 * slow)) < 1e-20);

    // d/dtau at 0 is A C_ss
    const double h = 1e-6 * slow;
    const Mat6 fd = (two_time_cm(m, ss, h) - two_time_cm(m, ss, 0.0)) / h;
    const Mat6 expected = m.A * ss.matrix();
    CHECK(max_abs(fd - expected) < 1e-4 * max_abs(expected));

    CHECK_THROWS_AS(two_time_cm(m, ss, -1.0), InvalidInput);
}
