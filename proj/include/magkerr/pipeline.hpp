#pragma once

// One full evaluation at a parameter point: couplings (from the mean-field
// solve or given directly), drift, stationary covariance, entanglement.

#include "magkerr/config.hpp"
#include "magkerr/dynamics.hpp"
#include "magkerr/entanglement.hpp"
#include "magkerr/meanfield.hpp"
#include "magkerr/steadystate.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace magkerr {

/// Direct: (G, F) from Config::direct. Physical: mean-field solve per point.
enum class CouplingMode { Direct, Physical };

/// How to pick among several stable mean-field roots. Skip marks the point
/// as multistable instead of evaluating it; Error throws MultistableError.
enum class BranchPolicy { LowestAmplitude, HighestAmplitude, Error, Skip };

enum class PointStatus { Ok, Unstable, NoRoot, MultistableSkipped };

[[nodiscard]] std::string_view to_string(CouplingMode mode);
[[nodiscard]] std::string_view to_string(BranchPolicy policy);
[[nodiscard]] std::string_view to_string(PointStatus status);

/// Inverses of to_string; throw InvalidInput on unknown names.
[[nodiscard]] CouplingMode parse_coupling_mode(std::string_view text);
[[nodiscard]] BranchPolicy parse_branch_policy(std::string_view text);
[[nodiscard]] PointStatus parse_point_status(std::string_view text);

struct BranchChoice {
    std::optional<std::size_t> index;  // into the root list
    PointStatus status = PointStatus::Ok;
};

/// Applies the policy to stable roots only. No stable root gives Unstable
/// (index of the lowest root, for diagnostics) and an empty list NoRoot.
[[nodiscard]] BranchChoice select_branch(const std::vector<SteadyAmplitudes>& roots, BranchPolicy policy);

struct PointEvaluation {
    PointStatus status = PointStatus::Ok;
    CouplingMode mode = CouplingMode::Direct;

    std::vector<SteadyAmplitudes> roots;       // physical mode
    std::optional<SteadyAmplitudes> branch;    // physical mode, chosen root

    EffectiveCouplings c1;
    EffectiveCouplings c2;
    DriftModel drift;
    BogoliubovDiagnostics bogoliubov1;
    BogoliubovDiagnostics bogoliubov2;
    std::optional<double> gap1;
    std::optional<double> gap2;

    // Present only for Ok points.
    std::optional<CovarianceMatrix> covariance;
    std::optional<NegativityResult> e_m1m2;
    std::optional<NegativityResult> e_m1a;
    std::optional<NegativityResult> e_m2a;

    [[nodiscard]] std::size_t stable_root_count() const;
    [[nodiscard]] bool evaluated() const { return status == PointStatus::Ok; }
};

/// Throws InvalidInput for direct mode without Config::direct and
/// MultistableError under BranchPolicy::Error. Mean-field convergence
/// failure is reported as NoRoot, an unstable drift as Unstable.
[[nodiscard]] PointEvaluation evaluate(const Config& config, CouplingMode mode, BranchPolicy policy,
                                       const PhysicalConstants& constants = {});

/// <m^dag m> / (2 N s) of the larger magnon; the model assumes it is << 1.
[[nodiscard]] double validity_ratio(const SteadyAmplitudes& amplitudes, const SphereSpec& sphere,
                                    const PhysicalConstants& constants = {});

inline constexpr double kValidityWarningThreshold = 1e-2;

}  // namespace magkerr
