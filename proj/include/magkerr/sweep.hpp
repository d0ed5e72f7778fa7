#pragma once

// =============================================================================
// 1D / 2D parameter sweeps over the evaluation pipeline.
//
// Axis values are given in display units (the column names carry them), e.g.
// delta_c is swept in MHz/2pi. Points are evaluated independently, possibly on
// several threads, and assembled by grid index so results never depend on
// scheduling. Records are stored row-major: axis1 outer, axis2 inner.
// =============================================================================

#include "magkerr/config.hpp"
#include "magkerr/pipeline.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace magkerr {

/// Entry of the axis whitelist.
struct AxisInfo {
    std::string_view name;    // "delta_c"
    std::string_view column;  // "delta_c_over_2pi_MHz"
    double to_internal;       // display value * to_internal = model value
    bool direct_mode;
    bool physical_mode;
};

[[nodiscard]] const std::vector<AxisInfo>& axis_whitelist();

/// Throws InvalidInput for names outside the whitelist.
[[nodiscard]] const AxisInfo& axis_info(std::string_view name);

struct SweepAxis {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;

    /// start + (stop - start) k / (count - 1); the last value is exactly stop.
    [[nodiscard]] double value(std::size_t k) const;

    bool operator==(const SweepAxis&) const = default;
};

/// Parses "name:start:stop:count". Throws InvalidInput.
[[nodiscard]] SweepAxis parse_axis(std::string_view text);

/// Output groups a sweep can request; each expands to one or more columns.
enum class SweepOutput { EM1M2, EM1A, EM2A, Stability, NuMinus, Epsilon, OptimalityGap, Amplitudes };

[[nodiscard]] std::string_view to_string(SweepOutput output);
[[nodiscard]] SweepOutput parse_sweep_output(std::string_view text);
[[nodiscard]] const std::vector<SweepOutput>& all_sweep_outputs();
[[nodiscard]] std::vector<std::string> output_columns(SweepOutput output);

struct SweepSpec {
    CouplingMode mode = CouplingMode::Physical;
    Config base;
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    BranchPolicy policy = BranchPolicy::Error;
    std::vector<SweepOutput> outputs;  // empty: all
};

/// Throws InvalidInput: count < 2, start == stop, non-finite bounds, axis not
/// whitelisted for the mode, repeated axis, direct mode without (G, F).
void validate(const SweepSpec& spec);

struct SweepRecord {
    std::size_t i = 0;
    std::size_t j = 0;
    double x1 = 0.0;
    std::optional<double> x2;
    PointStatus status = PointStatus::Ok;
    std::vector<std::optional<double>> values;  // parallel to SweepResult::columns

    bool operator==(const SweepRecord&) const = default;
};

struct SweepResult {
    CouplingMode mode = CouplingMode::Physical;
    BranchPolicy policy = BranchPolicy::Error;
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    std::vector<std::string> columns;
    std::vector<SweepRecord> records;

    [[nodiscard]] std::optional<std::size_t> column_index(std::string_view column) const;

    bool operator==(const SweepResult&) const = default;
};

/// Config of grid point (i, j) with the axis values applied.
[[nodiscard]] Config point_config(const SweepSpec& spec, std::size_t i, std::size_t j,
                                  const PhysicalConstants& constants = {});

/// Record of grid point (i, j); independent of every other point.
[[nodiscard]] SweepRecord evaluate_grid_point(const SweepSpec& spec, std::size_t i, std::size_t j,
                                              const PhysicalConstants& constants = {});

/// Evaluates the whole grid on `workers` threads (0: hardware concurrency).
/// Any error aborts the sweep; the one at the lowest grid index is rethrown
/// with the offending coordinates prepended, keeping its type.
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec, unsigned workers = 1,
                                    const PhysicalConstants& constants = {});

enum class TableFormat { Csv, Json };

[[nodiscard]] TableFormat parse_table_format(std::string_view text);

/// CSV: header with axis columns, "status", then output columns; values as
/// %.12g, absent values empty. JSON: schema "magkerr.sweep/1", exact doubles.
[[nodiscard]] std::string emit_table(const SweepResult& result, TableFormat format);

/// Inverse of the JSON emitter. Throws InvalidInput on malformed documents.
[[nodiscard]] SweepResult sweep_from_json(std::string_view text);

}  // namespace magkerr
