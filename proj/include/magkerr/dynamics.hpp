#pragma once

// Linearized quadrature dynamics d(sigma)/dt = A sigma + f with
// sigma = (dX1, dY1, dX2, dY2, dX, dY), X = (d + d^dag)/sqrt(2),
// Y = (d - d^dag)/(i sqrt(2)), plus Bogoliubov diagnostics.

#include "magkerr/linalg.hpp"
#include "magkerr/meanfield.hpp"
#include "magkerr/params.hpp"

#include <array>
#include <optional>

namespace magkerr {

struct DriftModel {
    Mat6 A = Mat6::Zero();
    Mat6 D = Mat6::Zero();
    std::array<Complex, 6> eigenvalues{};
    bool stable = false;
    double max_real_part = 0.0;
};

struct StabilityVerdict {
    bool stable;
    double max_real_part;
};

/// Hurwitz test with a scaled margin: stable iff every eigenvalue has
/// Re < -1e-12 * ||A||_F. Throws NumericalError if the eigensolver fails.
[[nodiscard]] StabilityVerdict is_stable(const Mat6& A);

[[nodiscard]] std::array<Complex, 6> drift_eigenvalues(const Mat6& A);

/// Wraps an arbitrary (A, D) pair, filling eigenvalues and the stability flag.
[[nodiscard]] DriftModel make_drift_model(const Mat6& A, const Mat6& D);

/// Drift and diffusion matrices of the two-magnon / cavity system.
[[nodiscard]] DriftModel build_drift(const EffectiveCouplings& c1, const EffectiveCouplings& c2,
                                     const SystemParams& params, const PhysicalConstants& constants = {});

struct BogoliubovDiagnostics {
    bool real_epsilon = false;  // false: delta_tilde^2 <= 4 |Delta_tilde|^2, u/v/epsilon are NaN
    double epsilon_squared = 0.0;
    double epsilon = 0.0;  // signed like delta_tilde
    double u = 0.0;
    double v = 0.0;
    double alpha = 0.0;    // atan2(F, G)
};

[[nodiscard]] BogoliubovDiagnostics bogoliubov(const EffectiveCouplings& c);

/// epsilon + delta_c; empty in the complex-epsilon regime.
[[nodiscard]] std::optional<double> optimality_gap(const EffectiveCouplings& c, double delta_c);

}  // namespace magkerr
