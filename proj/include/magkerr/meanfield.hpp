#pragma once

// =============================================================================
// Classical steady state of the driven Kerr magnon / cavity system and the
// Kerr-induced couplings that parameterize the linearized fluctuations.
//
// Steady-state equations (rotating frame of the drive, noise dropped):
//
//   0 = -(i delta_s + gamma_s) m_s - 2 i kerr_s |m_s|^2 m_s - i g_s a
//   0 = -(i delta_c + gamma_c) a   - i (g_1 m_1 + g_2 m_2) + rabi
// =============================================================================

#include "magkerr/linalg.hpp"
#include "magkerr/params.hpp"

#include <vector>

namespace magkerr {

struct SteadyAmplitudes {
    Complex m1;
    Complex m2;
    Complex a;
    bool stable = false;
    double max_real_eigenvalue = 0.0;  // rad/s, of the linearized drift matrix
    double residual = 0.0;             // max |equation| / largest term

    /// |m1|^2 + |m2|^2, the quantity branch policies rank by.
    [[nodiscard]] double magnon_population() const { return std::norm(m1) + std::norm(m2); }
};

/// Kerr-induced couplings of one magnon. Angular units.
struct EffectiveCouplings {
    double G = 0.0;
    double F = 0.0;
    double delta_tilde = 0.0;
    Complex Delta_tilde{};  // (G + iF) / 2
};

/// Which Kerr frequency shift a detuning carries. The steady-state equations
/// shift the magnon detuning by 2 kerr |m|^2; the fluctuation dynamics (and
/// the published closed-form amplitude) use 4 kerr |m|^2.
enum class KerrConvention { SteadyState, Fluctuation };

[[nodiscard]] double kerr_shifted_detuning(double delta, double kerr, double population, KerrConvention convention);

struct MeanFieldOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;                              // scaled residual, max norm
    std::vector<double> start_scales = {0.5, 1.0, 2.0, 4.0};  // multiples of the Kerr-free solution
    int phase_steps = 4;                                   // rotations by 2*pi / phase_steps
    double dedup_tolerance = 1e-6;                         // relative to the largest amplitude
    bool frozen_kerr_seeds = true;   // also start from self-consistent frozen-detuning linear solutions
    int seed_points_per_decade = 20;  // population grid for locating them
};

/// All distinct steady states found by multistart damped Newton, ordered by
/// increasing magnon population, each tagged with linear stability.
/// Throws ConvergenceFailure when no start converges.
[[nodiscard]] std::vector<SteadyAmplitudes> solve_meanfield(const SystemParams& params,
                                                           const MeanFieldOptions& options = {},
                                                           const PhysicalConstants& constants = {});

/// Kerr-free (kerr1 = kerr2 = 0) steady state, obtained by linear elimination.
struct LinearAmplitudes {
    Complex m1;
    Complex m2;
    Complex a;
};
[[nodiscard]] LinearAmplitudes linear_steady_state(const SystemParams& params);

/// max |equation residual| divided by the largest individual term.
[[nodiscard]] double steady_state_residual(const SystemParams& params, Complex m1, Complex m2, Complex a);

[[nodiscard]] EffectiveCouplings effective_couplings(const SteadyAmplitudes& amplitudes, const SystemParams& params,
                                                     Magnon which);

/// Couplings with (G, F) as free inputs: delta_tilde = delta + 2 sqrt(G^2 + F^2).
[[nodiscard]] EffectiveCouplings direct_couplings(double G, double F, double delta);

/// Closed-form first-magnon amplitude at given effective detunings:
///
///   m1 = i g1 rabi / [ (dt1 - i gamma1)(delta_c - i gamma_c) - g1^2 - g2^2 (dt1 - i gamma1)/(dt2 - i gamma2) ]
///
/// Throws SingularityError when the denominator vanishes.
[[nodiscard]] Complex m1_closed_form(const SystemParams& params, double delta_tilde_1, double delta_tilde_2);

/// Same expression with the magnon labels exchanged.
[[nodiscard]] Complex m2_closed_form(const SystemParams& params, double delta_tilde_1, double delta_tilde_2);

}  // namespace magkerr
