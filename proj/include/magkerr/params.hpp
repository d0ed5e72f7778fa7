#pragma once

// =============================================================================
// Physical constants, the validated system parameter record, and the scalar
// conversions between experimental knobs (drive power, sphere geometry,
// temperature) and model parameters.
//
// Unit convention: every frequency, rate, detuning, coupling and Kerr
// coefficient held in these types is an angular quantity in rad/s.
// =============================================================================

#include <optional>
#include <string_view>

namespace magkerr {

struct PhysicalConstants {
    double hbar = 1.054571817e-34;             // J s
    double k_boltzmann = 1.380649e-23;         // J / K
    double mu0 = 1.25663706212e-6;             // N / A^2
    double gyromagnetic_ratio = 2.0 * 3.14159265358979323846 * 28.0e9;  // rad / (s T)
    double spin_density = 4.22e27;             // m^-3, Fe3+ in YIG
    double spin_per_site = 2.5;                // Fe3+
};

/// Throws InvalidParameter unless every constant is finite and strictly positive.
void validate(const PhysicalConstants& constants);

enum class DriveKind { Power, Rabi };

enum class Magnon { First = 0, Second = 1 };

/// All physical inputs of the two-magnon / one-cavity model.
///
/// Absolute frequencies and drive detunings are both stored and kept
/// consistent (delta_x == omega_x - omega_d). The drive is stored both as
/// power and Rabi frequency; `drive_primary` records which one the user fixed,
/// so the other is re-derived when gamma_c or omega_d change.
struct SystemParams {
    double omega_m1 = 0.0;
    double omega_m2 = 0.0;
    double omega_c = 0.0;
    double omega_d = 0.0;

    double delta_m1 = 0.0;
    double delta_m2 = 0.0;
    double delta_c = 0.0;

    double g1 = 0.0;
    double g2 = 0.0;

    double gamma_m1 = 0.0;
    double gamma_m2 = 0.0;
    double gamma_c = 0.0;

    double kerr1 = 0.0;
    double kerr2 = 0.0;

    double temperature = 0.0;  // K

    DriveKind drive_primary = DriveKind::Rabi;
    double power = 0.0;  // W
    double rabi = 0.0;   // s^-1, enters the cavity equation as a bare rate

    bool operator==(const SystemParams&) const = default;
};

/// Per-magnon slice of SystemParams.
struct MagnonParams {
    double omega;
    double delta;
    double g;
    double gamma;
    double kerr;
};

[[nodiscard]] MagnonParams magnon_params(const SystemParams& params, Magnon which);

/// Relative tolerance used when both an absolute frequency and a detuning (or
/// both drive power and Rabi frequency) are supplied.
inline constexpr double kConsistencyTolerance = 1e-9;

/// Checks the SystemParams invariants; throws InvalidParameter naming the field.
void validate(const SystemParams& params, const PhysicalConstants& constants = {});

/// Sets one named model parameter (angular units / SI) and re-derives the
/// dependent fields: detunings move the absolute frequency at fixed omega_d,
/// gamma_c re-derives the non-primary drive quantity, and so on.
///
/// Accepted names: delta_c, delta_m, delta_m1, delta_m2, omega_d, g, g1, g2,
/// gamma_c, gamma_m, gamma_m1, gamma_m2, kerr, kerr1, kerr2, power, rabi,
/// temperature. The suffix-less magnon names set both magnons.
[[nodiscard]] SystemParams with_parameter(SystemParams params, std::string_view name, double value,
                                          const PhysicalConstants& constants = {});

[[nodiscard]] bool is_model_parameter(std::string_view name);

// ---------------------------------------------------------------------------
// Scalar conversions
// ---------------------------------------------------------------------------

/// Omega = sqrt(2 P gamma_c / (hbar omega_d)).
[[nodiscard]] double rabi_from_power(double power, double gamma_c, double omega_d,
                                     const PhysicalConstants& constants = {});

/// Inverse of rabi_from_power.
[[nodiscard]] double power_from_rabi(double rabi, double gamma_c, double omega_d,
                                     const PhysicalConstants& constants = {});

/// Bose-Einstein occupation; exactly 0 at zero temperature.
[[nodiscard]] double thermal_occupation(double omega, double temperature,
                                        const PhysicalConstants& constants = {});

struct SphereSpec {
    double diameter = 40e-6;      // m
    double spin_density = 4.22e27;  // m^-3
    std::optional<double> anisotropy_constant;       // J / m^3
    std::optional<double> saturation_magnetization;  // A / m

    [[nodiscard]] double volume() const;

    bool operator==(const SphereSpec&) const = default;
};

void validate(const SphereSpec& sphere);

struct SpinCount {
    double n_sites;       // N = rho V
    double magnon_bound;  // 2 N s
};

[[nodiscard]] SpinCount spin_count(const SphereSpec& sphere, const PhysicalConstants& constants = {});

/// mu0 K_an gamma^2 / (M^2 V). Throws UnsupportedOperation when the sphere
/// lacks the anisotropy constant or the saturation magnetization.
[[nodiscard]] double kerr_coefficient(const SphereSpec& sphere, const PhysicalConstants& constants = {});

}  // namespace magkerr
