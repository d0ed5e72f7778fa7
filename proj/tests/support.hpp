#pragma once

#include "magkerr/config.hpp"
#include "magkerr/linalg.hpp"
#include "magkerr/params.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace test {

inline constexpr double kMHz = magkerr::kTwoPi * 1e6;

inline std::string recipe(const std::string& name) {
    return std::string(MAGKERR_SOURCE_DIR) + "/recipes/" + name;
}

inline magkerr::Config fig3_config() { return magkerr::load_config(recipe("fig3_baseline.conf")); }
inline magkerr::Config fig2_config() { return magkerr::load_config(recipe("fig2_direct.conf")); }

// Identical magnons, drive given as a Rabi frequency.
inline magkerr::SystemParams simple_params(double rabi = 1e14, double kerr = 0.0) {
    magkerr::SystemParams p;
    p.omega_d = magkerr::kTwoPi * 10.001e9;
    p.delta_m1 = p.delta_m2 = -1.0 * kMHz;
    p.delta_c = -30.0 * kMHz;
    p.omega_m1 = p.omega_d + p.delta_m1;
    p.omega_m2 = p.omega_d + p.delta_m2;
    p.omega_c = p.omega_d + p.delta_c;
    p.g1 = p.g2 = 41.0 * kMHz;
    p.gamma_m1 = p.gamma_m2 = 8.8 * kMHz;
    p.gamma_c = 1.9 * kMHz;
    p.kerr1 = p.kerr2 = kerr;
    p.temperature = 0.01;
    p.drive_primary = magkerr::DriveKind::Rabi;
    p.rabi = rabi;
    p.power = magkerr::power_from_rabi(rabi, p.gamma_c, p.omega_d);
    return p;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace test
