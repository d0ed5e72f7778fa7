#include "magkerr/entanglement.hpp"

#include "magkerr/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace magkerr {

std::string_view mode_name(Mode mode) {
    switch (mode) {
        case Mode::Magnon1: return "m1";
        case Mode::Magnon2: return "m2";
        case Mode::Cavity: return "a";
    }
    return "?";
}

ModePair::ModePair(Mode first, Mode second) : first_(first), second_(second) {
    if (first == second) throw InvalidInput("mode pair needs two distinct modes");
}

Mat4 reduce(const CovarianceMatrix& cm, ModePair pair) {
    const std::array<int, 4> rows = {2 * static_cast<int>(pair.first()), 2 * static_cast<int>(pair.first()) + 1,
                                     2 * static_cast<int>(pair.second()), 2 * static_cast<int>(pair.second()) + 1};
    Mat4 out;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) out(i, j) = cm(rows[i], rows[j]);
    }
    return out;
}

Mat4 partial_transpose(const Mat4& cm) {
    const Eigen::Vector4d p(1.0, -1.0, 1.0, 1.0);
    return p.asDiagonal() * cm * p.asDiagonal();
}

namespace {

void check_input(const Mat4& cm) {
    if (!cm.allFinite()) throw InvalidInput("covariance matrix has non-finite entries");
    const double scale = std::max(cm.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((cm - cm.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidInput("covariance matrix is not symmetric");
    }
}

NegativityResult from_nu(double nu_minus) {
    if (!(nu_minus > 0.0)) {
        throw InvalidInput("smallest symplectic eigenvalue is not positive; covariance matrix is unphysical");
    }
    // 2 nu within rounding of 1 is separable; keeps E_N exactly 0 for product states
    if (2.0 * nu_minus >= 1.0 - kSeparableTolerance) return {nu_minus, 0.0};
    return {nu_minus, -std::log(2.0 * nu_minus)};
}

double det2(const Mat4& m, int r, int c) {
    return m(r, c) * m(r + 1, c + 1) - m(r, c + 1) * m(r + 1, c);
}

// nu_-^2 and nu_+^2 from the symplectic invariants.
std::array<double, 2> invariant_spectrum(double sigma, double det) {
    double disc = sigma * sigma - 4.0 * det;
    if (disc < -1e-12 * sigma * sigma) {
        throw NumericalError("negative discriminant in symplectic spectrum");
    }
    disc = std::sqrt(std::max(0.0, disc));
    return {(sigma - disc) / 2.0, (sigma + disc) / 2.0};
}

// Sorted |eigenvalues| of (+)_2 (-sigma_y) . C; they come in equal pairs.
std::array<double, 4> abs_spectrum(const Mat4& cm) {
    // -sigma_y = [[0, i], [-i, 0]]
    Eigen::Matrix<Complex, 4, 4> omega = Eigen::Matrix<Complex, 4, 4>::Zero();
    const Complex i{0.0, 1.0};
    omega(0, 1) = i;
    omega(1, 0) = -i;
    omega(2, 3) = i;
    omega(3, 2) = -i;
    const Eigen::Matrix<Complex, 4, 4> m = omega * cm.cast<Complex>();

    Eigen::ComplexEigenSolver<Eigen::Matrix<Complex, 4, 4>> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");

    // Eigenvalues are real +/- nu pairs for valid input; drop rounding-level imaginary parts.
    const double tiny = 1e-10 * cm.norm();
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) {
        Complex l = solver.eigenvalues()(k);
        if (std::abs(l.imag()) < tiny) l = l.real();
        out[static_cast<std::size_t>(k)] = std::abs(l);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

NegativityResult log_negativity(const Mat4& cm) {
    check_input(cm);
    return from_nu(abs_spectrum(partial_transpose(cm))[0]);
}

NegativityResult log_negativity_closed_form(const Mat4& cm) {
    check_input(cm);
    const double sigma = det2(cm, 0, 0) + det2(cm, 2, 2) - 2.0 * det2(cm, 0, 2);
    const auto spectrum = invariant_spectrum(sigma, cm.determinant());
    return from_nu(std::sqrt(std::max(0.0, spectrum[0])));
}

std::array<double, 2> symplectic_eigenvalues(const Mat4& cm) {
    check_input(cm);
    const auto spectrum = abs_spectrum(cm);
    return {spectrum[0], spectrum[3]};
}

double physicality_margin(const CovarianceMatrix& cm) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& pair : {kMagnonMagnon, kMagnon1Cavity, kMagnon2Cavity}) {
        lowest = std::min(lowest, symplectic_eigenvalues(reduce(cm, pair))[0]);
    }
    return lowest - 0.5;
}

std::map<ModePair, NegativityResult> all_pairs(const CovarianceMatrix& cm) {
    std::map<ModePair, NegativityResult> out;
    for (const auto& pair : {kMagnonMagnon, kMagnon1Cavity, kMagnon2Cavity}) {
        out.emplace(pair, log_negativity(reduce(cm, pair)));
    }
    return out;
}

}  // namespace magkerr
