#include "magkerr/params.hpp"

#include "magkerr/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace magkerr {

namespace {

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw InvalidParameter(std::string(name) + " must be finite");
    }
}

void require_positive(double value, const char* name) {
    require_finite(value, name);
    if (!(value > 0.0)) {
        throw InvalidParameter(std::string(name) + " must be strictly positive (got " + std::to_string(value) + ")");
    }
}

void require_non_negative(double value, const char* name) {
    require_finite(value, name);
    if (value < 0.0) {
        throw InvalidParameter(std::string(name) + " must be non-negative (got " + std::to_string(value) + ")");
    }
}

bool close_relative(double a, double b, double scale) {
    return std::abs(a - b) <= kConsistencyTolerance * std::max(scale, 1e-300);
}

void check_detuning(double omega, double omega_d, double delta, const char* name) {
    const double scale = std::max({std::abs(omega), std::abs(omega_d), std::abs(delta)});
    if (!close_relative(delta, omega - omega_d, scale)) {
        throw InvalidParameter(std::string(name) + " is inconsistent with the absolute frequencies");
    }
}

}  // namespace

void validate(const PhysicalConstants& constants) {
    require_positive(constants.hbar, "hbar");
    require_positive(constants.k_boltzmann, "k_boltzmann");
    require_positive(constants.mu0, "mu0");
    require_positive(constants.gyromagnetic_ratio, "gyromagnetic_ratio");
    require_positive(constants.spin_density, "spin_density");
    require_positive(constants.spin_per_site, "spin_per_site");
}

MagnonParams magnon_params(const SystemParams& p, Magnon which) {
    if (which == Magnon::First) {
        return {p.omega_m1, p.delta_m1, p.g1, p.gamma_m1, p.kerr1};
    }
    return {p.omega_m2, p.delta_m2, p.g2, p.gamma_m2, p.kerr2};
}

void validate(const SystemParams& p, const PhysicalConstants& constants) {
    require_positive(p.omega_m1, "omega_m1");
    require_positive(p.omega_m2, "omega_m2");
    require_positive(p.omega_c, "omega_c");
    require_positive(p.omega_d, "omega_d");
    require_finite(p.delta_m1, "delta_m1");
    require_finite(p.delta_m2, "delta_m2");
    require_finite(p.delta_c, "delta_c");
    require_non_negative(p.g1, "g1");
    require_non_negative(p.g2, "g2");
    require_positive(p.gamma_m1, "gamma_m1");
    require_positive(p.gamma_m2, "gamma_m2");
    require_positive(p.gamma_c, "gamma_c");
    require_finite(p.kerr1, "kerr1");
    require_finite(p.kerr2, "kerr2");
    require_non_negative(p.temperature, "temperature");
    require_non_negative(p.power, "power");
    require_non_negative(p.rabi, "rabi");

    check_detuning(p.omega_m1, p.omega_d, p.delta_m1, "delta_m1");
    check_detuning(p.omega_m2, p.omega_d, p.delta_m2, "delta_m2");
    check_detuning(p.omega_c, p.omega_d, p.delta_c, "delta_c");

    const double derived = rabi_from_power(p.power, p.gamma_c, p.omega_d, constants);
    if (!close_relative(derived, p.rabi, std::max(derived, p.rabi))) {
        throw InvalidParameter("drive power and Rabi frequency are inconsistent");
    }
}

namespace {

void rederive_drive(SystemParams& p, const PhysicalConstants& constants) {
    if (p.drive_primary == DriveKind::Power) {
        p.rabi = rabi_from_power(p.power, p.gamma_c, p.omega_d, constants);
    } else {
        p.power = power_from_rabi(p.rabi, p.gamma_c, p.omega_d, constants);
    }
}

constexpr std::array<std::string_view, 18> kModelParameters = {
    "delta_c", "delta_m", "delta_m1", "delta_m2", "omega_d", "g",      "g1",    "g2",    "gamma_c",
    "gamma_m", "gamma_m1", "gamma_m2", "kerr",    "kerr1",   "kerr2", "power", "rabi", "temperature",
};

}  // namespace

bool is_model_parameter(std::string_view name) {
    return std::find(kModelParameters.begin(), kModelParameters.end(), name) != kModelParameters.end();
}

SystemParams with_parameter(SystemParams p, std::string_view name, double value,
                            const PhysicalConstants& constants) {
    if (!std::isfinite(value)) {
        throw InvalidParameter("value for '" + std::string(name) + "' must be finite");
    }
    auto set_delta_m1 = [&] { p.delta_m1 = value; p.omega_m1 = p.omega_d + value; };
    auto set_delta_m2 = [&] { p.delta_m2 = value; p.omega_m2 = p.omega_d + value; };

    if (name == "delta_c") {
        p.delta_c = value;
        p.omega_c = p.omega_d + value;
    } else if (name == "delta_m") {
        set_delta_m1();
        set_delta_m2();
    } else if (name == "delta_m1") {
        set_delta_m1();
    } else if (name == "delta_m2") {
        set_delta_m2();
    } else if (name == "omega_d") {
        p.omega_d = value;
        p.omega_m1 = value + p.delta_m1;
        p.omega_m2 = value + p.delta_m2;
        p.omega_c = value + p.delta_c;
        rederive_drive(p, constants);
    } else if (name == "g") {
        p.g1 = p.g2 = value;
    } else if (name == "g1") {
        p.g1 = value;
    } else if (name == "g2") {
        p.g2 = value;
    } else if (name == "gamma_c") {
        p.gamma_c = value;
        rederive_drive(p, constants);
    } else if (name == "gamma_m") {
        p.gamma_m1 = p.gamma_m2 = value;
    } else if (name == "gamma_m1") {
        p.gamma_m1 = value;
    } else if (name == "gamma_m2") {
        p.gamma_m2 = value;
    } else if (name == "kerr") {
        p.kerr1 = p.kerr2 = value;
    } else if (name == "kerr1") {
        p.kerr1 = value;
    } else if (name == "kerr2") {
        p.kerr2 = value;
    } else if (name == "power") {
        p.drive_primary = DriveKind::Power;
        p.power = value;
        rederive_drive(p, constants);
    } else if (name == "rabi") {
        p.drive_primary = DriveKind::Rabi;
        p.rabi = value;
        rederive_drive(p, constants);
    } else if (name == "temperature") {
        p.temperature = value;
    } else {
        throw InvalidParameter("unknown model parameter '" + std::string(name) + "'");
    }
    validate(p, constants);
    return p;
}

double rabi_from_power(double power, double gamma_c, double omega_d, const PhysicalConstants& constants) {
    require_non_negative(power, "power");
    require_non_negative(gamma_c, "gamma_c");
    require_positive(omega_d, "omega_d");
    return std::sqrt(2.0 * power * gamma_c / (constants.hbar * omega_d));
}

double power_from_rabi(double rabi, double gamma_c, double omega_d, const PhysicalConstants& constants) {
    require_non_negative(rabi, "rabi");
    require_positive(gamma_c, "gamma_c");
    require_positive(omega_d, "omega_d");
    return rabi * rabi * constants.hbar * omega_d / (2.0 * gamma_c);
}

double thermal_occupation(double omega, double temperature, const PhysicalConstants& constants) {
    require_positive(omega, "omega");
    require_non_negative(temperature, "temperature");
    if (temperature == 0.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(constants.hbar * omega / (constants.k_boltzmann * temperature));
}

double SphereSpec::volume() const {
    return std::numbers::pi / 6.0 * diameter * diameter * diameter;
}

void validate(const SphereSpec& sphere) {
    require_positive(sphere.diameter, "sphere.diameter");
    require_positive(sphere.spin_density, "sphere.spin_density");
    if (sphere.anisotropy_constant) require_finite(*sphere.anisotropy_constant, "sphere.anisotropy_constant");
    if (sphere.saturation_magnetization) {
        require_positive(*sphere.saturation_magnetization, "sphere.saturation_magnetization");
    }
}

SpinCount spin_count(const SphereSpec& sphere, const PhysicalConstants& constants) {
    validate(sphere);
    const double n_sites = sphere.spin_density * sphere.volume();
    return {n_sites, 2.0 * n_sites * constants.spin_per_site};
}

double kerr_coefficient(const SphereSpec& sphere, const PhysicalConstants& constants) {
    validate(sphere);
    if (!sphere.anisotropy_constant || !sphere.saturation_magnetization) {
        throw UnsupportedOperation(
            "Kerr coefficient needs sphere.anisotropy_constant and sphere.saturation_magnetization; "
            "supply kerr directly instead");
    }
    const double m = *sphere.saturation_magnetization;
    const double gamma = constants.gyromagnetic_ratio;
    return constants.mu0 * *sphere.anisotropy_constant * gamma * gamma / (m * m * sphere.volume());
}

}  // namespace magkerr
