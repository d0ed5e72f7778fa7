#pragma once

// =============================================================================
// Structured key-value configuration files.
//
//   # comment
//   omega_d_over_2pi_GHz   = 10.001
//   delta_m1_over_2pi_MHz  = -1
//   [drive]
//   power = 0.393           # W
//
// `[section]` headers prefix the following keys with "section.". Every
// frequency-like quantity accepts either an angular spelling `<name>_rad_s`
// or a cyclic spelling `<name>_over_2pi_<unit>` with unit in
// {nHz, uHz, mHz, Hz, kHz, MHz, GHz}; cyclic values are multiplied by 2*pi on
// load. The full key list lives in docs/config.md.
// =============================================================================

#include "magkerr/params.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace magkerr {

/// Kerr-induced couplings given directly (identical for both magnons), used
/// when sweeping G and F as independent axes. Angular units.
struct DirectCouplings {
    double G = 0.0;
    double F = 0.0;

    bool operator==(const DirectCouplings&) const = default;
};

struct Config {
    SystemParams system;
    SphereSpec sphere;
    std::optional<DirectCouplings> direct;

    bool operator==(const Config&) const = default;
};

struct RawEntry {
    std::string key;    // fully qualified, e.g. "drive.power"
    std::string value;  // trimmed text
    int line = 0;       // 1-based; 0 for command-line overrides
};

/// Unvalidated key/value view of a config file plus any overrides.
class RawConfig {
public:
    [[nodiscard]] static RawConfig parse(std::string_view text);
    [[nodiscard]] static RawConfig read(const std::filesystem::path& path);

    /// Applies "key=value". Replaces every spelling of the same quantity and
    /// its paired quantity (absolute frequency vs detuning, power vs Rabi).
    void apply_override(std::string_view assignment);

    [[nodiscard]] const std::vector<RawEntry>& entries() const noexcept { return entries_; }

private:
    std::vector<RawEntry> entries_;
};

[[nodiscard]] Config build_config(const RawConfig& raw, const PhysicalConstants& constants = {});

[[nodiscard]] Config parse_config(std::string_view text, const PhysicalConstants& constants = {});

[[nodiscard]] Config load_config(const std::filesystem::path& path, const PhysicalConstants& constants = {});

/// Writes a config that reloads to a bit-identical Config (angular spellings,
/// round-trip precision).
[[nodiscard]] std::string serialize_config(const Config& config);

}  // namespace magkerr
