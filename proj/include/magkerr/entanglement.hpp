#pragma once

// Bipartite Gaussian entanglement of mode pairs: reduction, partial
// transposition, symplectic spectrum and logarithmic negativity.

#include "magkerr/linalg.hpp"
#include "magkerr/steadystate.hpp"

#include <array>
#include <compare>
#include <map>
#include <string_view>

namespace magkerr {

enum class Mode { Magnon1 = 0, Magnon2 = 1, Cavity = 2 };

[[nodiscard]] std::string_view mode_name(Mode mode);

class ModePair {
public:
    /// Throws InvalidInput when both modes are the same.
    ModePair(Mode first, Mode second);

    [[nodiscard]] Mode first() const noexcept { return first_; }
    [[nodiscard]] Mode second() const noexcept { return second_; }

    auto operator<=>(const ModePair&) const = default;

private:
    Mode first_;
    Mode second_;
};

struct NegativityResult {
    double nu_minus;  // smallest symplectic eigenvalue of the partial transpose
    double e_n;       // max(0, -ln(2 nu_minus))
};

/// E_N is reported as exactly 0 when 2 nu_minus >= 1 - kSeparableTolerance,
/// so rounding in the covariance cannot fake entanglement of order 1e-16.
inline constexpr double kSeparableTolerance = 1e-12;

/// 4x4 principal submatrix of the pair's quadratures, (X, Y) of `first` then `second`.
[[nodiscard]] Mat4 reduce(const CovarianceMatrix& cm, ModePair pair);

/// P C P with P = diag(1, -1, 1, 1): flips the sign of the first mode's Y quadrature.
[[nodiscard]] Mat4 partial_transpose(const Mat4& cm);

/// Eigenvalue route: nu_minus = min |eig( (+)_2 (-sigma_y) . P C P )|.
/// Throws InvalidInput on non-finite or non-symmetric input.
[[nodiscard]] NegativityResult log_negativity(const Mat4& cm);

/// Invariant route: with C = [[A, K], [K^T, B]] and S = det A + det B - 2 det K,
/// nu_minus = sqrt((S - sqrt(S^2 - 4 det C)) / 2).
/// Throws NumericalError when S^2 - 4 det C < -1e-12 S^2.
[[nodiscard]] NegativityResult log_negativity_closed_form(const Mat4& cm);

/// Symplectic eigenvalues (nu_-, nu_+) of a two-mode covariance matrix (no transposition),
/// from the same eigenvalue route as log_negativity.
[[nodiscard]] std::array<double, 2> symplectic_eigenvalues(const Mat4& cm);

/// Smallest symplectic eigenvalue over all two-mode reductions minus 1/2;
/// a valid state has this >= 0 (up to rounding).
[[nodiscard]] double physicality_margin(const CovarianceMatrix& cm);

[[nodiscard]] std::map<ModePair, NegativityResult> all_pairs(const CovarianceMatrix& cm);

inline const ModePair kMagnonMagnon{Mode::Magnon1, Mode::Magnon2};
inline const ModePair kMagnon1Cavity{Mode::Magnon1, Mode::Cavity};
inline const ModePair kMagnon2Cavity{Mode::Magnon2, Mode::Cavity};

}  // namespace magkerr
