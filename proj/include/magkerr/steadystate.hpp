#pragma once

// Stationary and time-dependent covariance of the quadrature vector,
// C_ij = <sigma_i sigma_j + sigma_j sigma_i> / 2, normalized so the vacuum is I/2.

#include "magkerr/dynamics.hpp"
#include "magkerr/linalg.hpp"

namespace magkerr {

class CovarianceMatrix {
public:
    CovarianceMatrix() = default;

    /// Symmetrizes the input.
    explicit CovarianceMatrix(const Mat6& m) : m_(0.5 * (m + m.transpose())) {}

    [[nodiscard]] const Mat6& matrix() const noexcept { return m_; }
    [[nodiscard]] double operator()(int i, int j) const { return m_(i, j); }

    [[nodiscard]] static CovarianceMatrix vacuum() { return CovarianceMatrix(0.5 * Mat6::Identity()); }

    bool operator==(const CovarianceMatrix& other) const { return m_ == other.m_; }

private:
    Mat6 m_ = 0.5 * Mat6::Identity();
};

/// max_ij |A C + C A^T + D|.
[[nodiscard]] double lyapunov_residual(const Mat6& A, const Mat6& C, const Mat6& D);

/// Solves A C + C A^T = -D through the 36x36 Kronecker-sum system.
/// Throws UnstableModel for an unstable drift, SingularityError if the
/// Kronecker sum is singular, NumericalError if the residual bound
/// ||AC + CA^T + D||_max < 1e-10 ||D||_max cannot be met.
[[nodiscard]] CovarianceMatrix solve_lyapunov(const DriftModel& model);

/// 0.01 / max |eigenvalue of A|.
[[nodiscard]] double default_time_step(const DriftModel& model);

/// Integrates dC/dt = A C + C A^T + D with classical fourth-order Runge-Kutta
/// (uniform step h = duration / ceil(duration / dt), so it lands on `duration`).
/// Throws DivergenceError on non-finite intermediate values.
[[nodiscard]] CovarianceMatrix integrate_cm(const DriftModel& model, const CovarianceMatrix& initial,
                                            double duration, double dt);

/// Stationary two-time correlation C(t + tau, t) = exp(A tau) C_ss.
[[nodiscard]] Mat6 two_time_cm(const DriftModel& model, const CovarianceMatrix& stationary, double tau);

}  // namespace magkerr
