#include "magkerr/dynamics.hpp"

#include "magkerr/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace magkerr {

std::array<Complex, 6> drift_eigenvalues(const Mat6& A) {
    if (!A.allFinite()) {
        throw NumericalError("drift matrix has non-finite entries");
    }
    Eigen::EigenSolver<Mat6> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigenvalue computation of the drift matrix failed");
    }
    std::array<Complex, 6> out{};
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

namespace {

StabilityVerdict verdict_from(const std::array<Complex, 6>& eigenvalues, const Mat6& A) {
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues) max_re = std::max(max_re, l.real());
    const double margin = -1e-12 * A.norm();
    return {max_re < margin, max_re};
}

}  // namespace

StabilityVerdict is_stable(const Mat6& A) {
    return verdict_from(drift_eigenvalues(A), A);
}

DriftModel make_drift_model(const Mat6& A, const Mat6& D) {
    DriftModel model;
    model.A = A;
    model.D = D;
    model.eigenvalues = drift_eigenvalues(A);
    const auto v = verdict_from(model.eigenvalues, A);
    model.stable = v.stable;
    model.max_real_part = v.max_real_part;
    return model;
}

DriftModel build_drift(const EffectiveCouplings& c1, const EffectiveCouplings& c2, const SystemParams& p,
                       const PhysicalConstants& constants) {
    Mat6 A = Mat6::Zero();
    // first magnon block
    A(0, 0) = c1.F - p.gamma_m1;
    A(0, 1) = c1.delta_tilde - c1.G;
    A(1, 0) = -c1.delta_tilde - c1.G;
    A(1, 1) = -c1.F - p.gamma_m1;
    // second magnon block
    A(2, 2) = c2.F - p.gamma_m2;
    A(2, 3) = c2.delta_tilde - c2.G;
    A(3, 2) = -c2.delta_tilde - c2.G;
    A(3, 3) = -c2.F - p.gamma_m2;
    // beam-splitter couplings to the cavity
    A(0, 5) = p.g1;
    A(1, 4) = -p.g1;
    A(2, 5) = p.g2;
    A(3, 4) = -p.g2;
    A(4, 1) = p.g1;
    A(4, 3) = p.g2;
    A(5, 0) = -p.g1;
    A(5, 2) = -p.g2;
    // cavity block
    A(4, 4) = -p.gamma_c;
    A(4, 5) = p.delta_c;
    A(5, 4) = -p.delta_c;
    A(5, 5) = -p.gamma_c;

    const double n1 = thermal_occupation(p.omega_m1, p.temperature, constants);
    const double n2 = thermal_occupation(p.omega_m2, p.temperature, constants);
    Vec6 diag;
    diag << p.gamma_m1 * (2.0 * n1 + 1.0), p.gamma_m1 * (2.0 * n1 + 1.0), p.gamma_m2 * (2.0 * n2 + 1.0),
        p.gamma_m2 * (2.0 * n2 + 1.0), p.gamma_c, p.gamma_c;
    return make_drift_model(A, diag.asDiagonal());
}

BogoliubovDiagnostics bogoliubov(const EffectiveCouplings& c) {
    BogoliubovDiagnostics out;
    out.alpha = std::atan2(c.F, c.G);
    out.epsilon_squared = c.delta_tilde * c.delta_tilde - 4.0 * std::norm(c.Delta_tilde);
    if (!(out.epsilon_squared > 0.0)) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.real_epsilon = false;
        out.epsilon = out.u = out.v = nan;
        return out;
    }
    out.real_epsilon = true;
    // Signed so that delta_tilde / epsilon >= 1 and u, v stay real for either sign of delta_tilde.
    out.epsilon = std::copysign(std::sqrt(out.epsilon_squared), c.delta_tilde);
    const double ratio = c.delta_tilde / out.epsilon;
    out.u = std::sqrt(0.5 * (ratio + 1.0));
    out.v = std::sqrt(std::max(0.0, 0.5 * (ratio - 1.0)));
    return out;
}

std::optional<double> optimality_gap(const EffectiveCouplings& c, double delta_c) {
    const auto b = bogoliubov(c);
    if (!b.real_epsilon) return std::nullopt;
    return b.epsilon + delta_c;
}

}  // namespace magkerr
