#include "magkerr/steadystate.hpp"

#include "magkerr/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace magkerr {

namespace {

using Mat36 = Eigen::Matrix<double, 36, 36>;
using Vec36 = Eigen::Matrix<double, 36, 1>;

constexpr int idx(int row, int col) { return row + 6 * col; }  // column-major vec

Mat36 kronecker_sum(const Mat6& A) {
    Mat36 K = Mat36::Zero();
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            for (int k = 0; k < 6; ++k) {
                K(idx(i, j), idx(k, j)) += A(i, k);  // A C
                K(idx(i, j), idx(i, k)) += A(j, k);  // C A^T
            }
        }
    }
    return K;
}

Vec36 vec(const Mat6& M) { return Eigen::Map<const Vec36>(M.data()); }

Mat6 unvec(const Vec36& v) { return Eigen::Map<const Mat6>(v.data()); }

Mat6 lyapunov_rhs(const Mat6& A, const Mat6& C, const Mat6& D) { return A * C + C * A.transpose() + D; }

}  // namespace

double lyapunov_residual(const Mat6& A, const Mat6& C, const Mat6& D) {
    return lyapunov_rhs(A, C, D).cwiseAbs().maxCoeff();
}

CovarianceMatrix solve_lyapunov(const DriftModel& model) {
    if (!model.stable) {
        throw UnstableModel("Lyapunov solve requires a stable drift matrix (max Re lambda = " +
                            std::to_string(model.max_real_part) + ")");
    }
    const Mat6& A = model.A;
    const Mat6& D = model.D;

    Eigen::FullPivLU<Mat36> lu(kronecker_sum(A));
    if (!lu.isInvertible()) {
        throw SingularityError("Kronecker sum of the drift matrix is singular");
    }
    Mat6 C = unvec(lu.solve(-vec(D)));
    C = (0.5 * (C + C.transpose())).eval();

    const double bound = 1e-10 * D.cwiseAbs().maxCoeff();
    for (int refine = 0; refine < 2 && lyapunov_residual(A, C, D) > bound; ++refine) {
        C -= unvec(lu.solve(vec(lyapunov_rhs(A, C, D))));
        C = (0.5 * (C + C.transpose())).eval();
    }
    if (!C.allFinite() || lyapunov_residual(A, C, D) > bound) {
        throw NumericalError("Lyapunov residual bound not met");
    }
    return CovarianceMatrix(C);
}

double default_time_step(const DriftModel& model) {
    double largest = 0.0;
    for (const auto& l : model.eigenvalues) largest = std::max(largest, std::abs(l));
    if (largest == 0.0) throw InvalidInput("drift matrix has only zero eigenvalues; no natural time step");
    return 0.01 / largest;
}

CovarianceMatrix integrate_cm(const DriftModel& model, const CovarianceMatrix& initial, double duration, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("integrate_cm: dt must be positive");
    if (!(duration >= 0.0) || !std::isfinite(duration)) throw InvalidInput("integrate_cm: duration must be >= 0");

    const Mat6& A = model.A;
    const Mat6& D = model.D;
    auto rhs = [&](const Mat6& C) { return lyapunov_rhs(A, C, D); };

    Mat6 C = initial.matrix();
    if (duration == 0.0) return CovarianceMatrix(C);

    const auto steps = static_cast<long long>(std::ceil(duration / dt));
    const double h = duration / static_cast<double>(steps);
    for (long long n = 0; n < steps; ++n) {
        const Mat6 k1 = rhs(C);
        const Mat6 k2 = rhs(C + 0.5 * h * k1);
        const Mat6 k3 = rhs(C + 0.5 * h * k2);
        const Mat6 k4 = rhs(C + h * k3);
        C += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        C = (0.5 * (C + C.transpose())).eval();
        if (!C.allFinite()) {
            throw DivergenceError("covariance integration diverged at step " + std::to_string(n));
        }
    }
    return CovarianceMatrix(C);
}

Mat6 two_time_cm(const DriftModel& model, const CovarianceMatrix& stationary, double tau) {
    if (!model.stable) throw UnstableModel("two-time correlation requires a stable drift matrix");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidInput("two_time_cm: tau must be >= 0");
    const Mat6 propagator = (model.A * tau).exp();
    if (!propagator.allFinite()) throw NumericalError("matrix exponential overflowed");
    return propagator * stationary.matrix();
}

}  // namespace magkerr
