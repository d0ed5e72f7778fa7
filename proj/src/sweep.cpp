#include "magkerr/sweep.hpp"

#include "magkerr/errors.hpp"
#include "magkerr/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <exception>
#include <thread>

namespace magkerr {

namespace {

constexpr double kMHz = kTwoPi * 1e6;
constexpr double kUHz = kTwoPi * 1e-6;

}  // namespace

const std::vector<AxisInfo>& axis_whitelist() {
    static const std::vector<AxisInfo> table = {
        {"delta_c", "delta_c_over_2pi_MHz", kMHz, true, true},
        {"delta_m", "delta_m_over_2pi_MHz", kMHz, true, true},
        {"delta_m1", "delta_m1_over_2pi_MHz", kMHz, true, true},
        {"delta_m2", "delta_m2_over_2pi_MHz", kMHz, true, true},
        {"g", "g_over_2pi_MHz", kMHz, true, true},
        {"g1", "g1_over_2pi_MHz", kMHz, true, true},
        {"g2", "g2_over_2pi_MHz", kMHz, true, true},
        {"gamma_c", "gamma_c_over_2pi_MHz", kMHz, true, true},
        {"gamma_m", "gamma_m_over_2pi_MHz", kMHz, true, true},
        {"gamma_m1", "gamma_m1_over_2pi_MHz", kMHz, true, true},
        {"gamma_m2", "gamma_m2_over_2pi_MHz", kMHz, true, true},
        {"temperature", "temperature_K", 1.0, true, true},
        {"G", "G_over_2pi_MHz", kMHz, true, false},
        {"F", "F_over_2pi_MHz", kMHz, true, false},
        {"kerr", "kerr_over_2pi_uHz", kUHz, false, true},
        {"kerr1", "kerr1_over_2pi_uHz", kUHz, false, true},
        {"kerr2", "kerr2_over_2pi_uHz", kUHz, false, true},
        {"power", "power_mW", 1e-3, false, true},
        {"rabi", "rabi_per_s", 1.0, false, true},
    };
    return table;
}

const AxisInfo& axis_info(std::string_view name) {
    for (const auto& info : axis_whitelist()) {
        if (info.name == name) return info;
    }
    std::string known;
    for (const auto& info : axis_whitelist()) known += (known.empty() ? "" : ", ") + std::string(info.name);
    throw InvalidInput("unknown sweep axis '" + std::string(name) + "' (allowed: " + known + ")");
}

double SweepAxis::value(std::size_t k) const {
    if (k + 1 == count) return stop;
    return start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
}

SweepAxis parse_axis(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto colon = text.find(':', pos);
        parts.push_back(text.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos));
        if (colon == std::string_view::npos) break;
        pos = colon + 1;
    }
    if (parts.size() != 4) throw InvalidInput("axis must look like name:start:stop:count, got '" + std::string(text) + "'");

    auto number = [&](std::string_view s) {
        double v = 0.0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || end != s.data() + s.size()) {
            throw InvalidInput("axis '" + std::string(text) + "': bad number '" + std::string(s) + "'");
        }
        return v;
    };
    SweepAxis axis;
    axis.name = std::string(parts[0]);
    axis.start = number(parts[1]);
    axis.stop = number(parts[2]);
    std::size_t count = 0;
    const auto [end, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), count);
    if (ec != std::errc{} || end != parts[3].data() + parts[3].size()) {
        throw InvalidInput("axis '" + std::string(text) + "': bad count '" + std::string(parts[3]) + "'");
    }
    axis.count = count;
    return axis;
}

std::string_view to_string(SweepOutput output) {
    switch (output) {
        case SweepOutput::EM1M2: return "E_m1m2";
        case SweepOutput::EM1A: return "E_m1a";
        case SweepOutput::EM2A: return "E_m2a";
        case SweepOutput::Stability: return "stability";
        case SweepOutput::NuMinus: return "nu_minus";
        case SweepOutput::Epsilon: return "epsilon";
        case SweepOutput::OptimalityGap: return "optimality_gap";
        case SweepOutput::Amplitudes: return "amplitudes";
    }
    return "?";
}

const std::vector<SweepOutput>& all_sweep_outputs() {
    static const std::vector<SweepOutput> all = {
        SweepOutput::EM1M2,   SweepOutput::EM1A,          SweepOutput::EM2A,       SweepOutput::Stability,
        SweepOutput::NuMinus, SweepOutput::Epsilon, SweepOutput::OptimalityGap, SweepOutput::Amplitudes};
    return all;
}

SweepOutput parse_sweep_output(std::string_view text) {
    for (auto o : all_sweep_outputs()) {
        if (to_string(o) == text) return o;
    }
    throw InvalidInput("unknown sweep output '" + std::string(text) + "'");
}

std::vector<std::string> output_columns(SweepOutput output) {
    switch (output) {
        case SweepOutput::EM1M2: return {"E_m1m2"};
        case SweepOutput::EM1A: return {"E_m1a"};
        case SweepOutput::EM2A: return {"E_m2a"};
        case SweepOutput::Stability: return {"stable", "max_re_lambda_over_2pi_MHz"};
        case SweepOutput::NuMinus: return {"nu_minus_m1m2", "nu_minus_m1a", "nu_minus_m2a"};
        case SweepOutput::Epsilon: return {"epsilon1_over_2pi_MHz", "epsilon2_over_2pi_MHz"};
        case SweepOutput::OptimalityGap: return {"gap1_over_2pi_MHz", "gap2_over_2pi_MHz"};
        case SweepOutput::Amplitudes: return {"abs_m1", "abs_m2", "abs_a", "n_roots", "n_stable"};
    }
    return {};
}

namespace {

void check_axis(const SweepAxis& axis, CouplingMode mode) {
    const AxisInfo& info = axis_info(axis.name);
    if (mode == CouplingMode::Direct && !info.direct_mode) {
        throw InvalidInput("axis '" + axis.name + "' is not available in direct mode");
    }
    if (mode == CouplingMode::Physical && !info.physical_mode) {
        throw InvalidInput("axis '" + axis.name + "' is only available in direct mode");
    }
    if (axis.count < 2) throw InvalidInput("axis '" + axis.name + "' needs at least 2 points");
    if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) {
        throw InvalidInput("axis '" + axis.name + "' has non-finite bounds");
    }
    if (axis.start == axis.stop) throw InvalidInput("axis '" + axis.name + "' has start == stop");
}

std::vector<SweepOutput> effective_outputs(const SweepSpec& spec) {
    if (spec.outputs.empty()) return all_sweep_outputs();
    std::vector<SweepOutput> out;
    for (auto o : all_sweep_outputs()) {
        if (std::find(spec.outputs.begin(), spec.outputs.end(), o) != spec.outputs.end()) out.push_back(o);
    }
    return out;
}

std::vector<std::string> columns_of(const SweepSpec& spec) {
    std::vector<std::string> columns;
    for (auto o : effective_outputs(spec)) {
        for (auto& c : output_columns(o)) columns.push_back(std::move(c));
    }
    return columns;
}

void apply_axis(Config& config, const SweepAxis& axis, double display_value, const PhysicalConstants& constants) {
    const double v = display_value * axis_info(axis.name).to_internal;
    if (axis.name == "G" || axis.name == "F") {
        if (!config.direct) throw InvalidInput("direct mode needs direct.G and direct.F in the config");
        (axis.name == "G" ? config.direct->G : config.direct->F) = v;
        return;
    }
    config.system = with_parameter(config.system, axis.name, v, constants);
}

std::string coordinates(const SweepSpec& spec, std::size_t i, std::size_t j) {
    auto one = [](const SweepAxis& axis, std::size_t k) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", axis.value(k));
        return std::string(axis_info(axis.name).column) + " = " + buf;
    };
    std::string out = "at " + one(spec.axis1, i);
    if (spec.axis2) out += ", " + one(*spec.axis2, j);
    return out + ": ";
}

[[noreturn]] void rethrow_with_prefix(const std::exception_ptr& error, const std::string& prefix) {
    try {
        std::rethrow_exception(error);
    } catch (const MultistableError& e) {
        throw MultistableError(prefix + e.what());
    } catch (const UnstableModel& e) {
        throw UnstableModel(prefix + e.what());
    } catch (const SingularityError& e) {
        throw SingularityError(prefix + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.what());
    } catch (const DivergenceError& e) {
        throw DivergenceError(prefix + e.what());
    } catch (const PhysicsError& e) {
        throw PhysicsError(prefix + e.what());
    } catch (const InvalidParameter& e) {
        throw InvalidParameter(prefix + e.what());
    } catch (const UnsupportedOperation& e) {
        throw UnsupportedOperation(prefix + e.what());
    } catch (const Error& e) {
        throw InvalidInput(prefix + e.what());
    }
}

}  // namespace

void validate(const SweepSpec& spec) {
    check_axis(spec.axis1, spec.mode);
    if (spec.axis2) {
        check_axis(*spec.axis2, spec.mode);
        if (spec.axis2->name == spec.axis1.name) throw InvalidInput("both axes sweep '" + spec.axis1.name + "'");
    }
    if (spec.mode == CouplingMode::Direct && !spec.base.direct) {
        throw InvalidInput("direct mode needs direct.G and direct.F in the config");
    }
}

std::optional<std::size_t> SweepResult::column_index(std::string_view column) const {
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k] == column) return k;
    }
    return std::nullopt;
}

Config point_config(const SweepSpec& spec, std::size_t i, std::size_t j, const PhysicalConstants& constants) {
    Config config = spec.base;
    apply_axis(config, spec.axis1, spec.axis1.value(i), constants);
    if (spec.axis2) apply_axis(config, *spec.axis2, spec.axis2->value(j), constants);
    return config;
}

SweepRecord evaluate_grid_point(const SweepSpec& spec, std::size_t i, std::size_t j,
                                const PhysicalConstants& constants) {
    const PointEvaluation e = evaluate(point_config(spec, i, j, constants), spec.mode, spec.policy, constants);

    SweepRecord rec;
    rec.i = i;
    rec.j = j;
    rec.x1 = spec.axis1.value(i);
    if (spec.axis2) rec.x2 = spec.axis2->value(j);
    rec.status = e.status;

    // couplings (and hence drift and epsilon) exist unless the root search
    // failed or the branch was skipped
    const bool have_couplings = e.mode == CouplingMode::Direct || e.branch.has_value();
    using Opt = std::optional<double>;
    auto en = [](const std::optional<NegativityResult>& r) { return r ? Opt(r->e_n) : Opt(); };
    auto nu = [](const std::optional<NegativityResult>& r) { return r ? Opt(r->nu_minus) : Opt(); };
    auto eps = [&](const BogoliubovDiagnostics& b) {
        return have_couplings && b.real_epsilon ? Opt(b.epsilon / kMHz) : Opt();
    };
    auto gap = [&](const std::optional<double>& g) { return have_couplings && g ? Opt(*g / kMHz) : Opt(); };

    for (auto o : effective_outputs(spec)) {
        auto& v = rec.values;
        switch (o) {
            case SweepOutput::EM1M2: v.push_back(en(e.e_m1m2)); break;
            case SweepOutput::EM1A: v.push_back(en(e.e_m1a)); break;
            case SweepOutput::EM2A: v.push_back(en(e.e_m2a)); break;
            case SweepOutput::Stability:
                v.push_back(have_couplings ? Opt(e.drift.stable ? 1.0 : 0.0) : Opt());
                v.push_back(have_couplings ? Opt(e.drift.max_real_part / kMHz) : Opt());
                break;
            case SweepOutput::NuMinus:
                v.push_back(nu(e.e_m1m2));
                v.push_back(nu(e.e_m1a));
                v.push_back(nu(e.e_m2a));
                break;
            case SweepOutput::Epsilon:
                v.push_back(eps(e.bogoliubov1));
                v.push_back(eps(e.bogoliubov2));
                break;
            case SweepOutput::OptimalityGap:
                v.push_back(gap(e.gap1));
                v.push_back(gap(e.gap2));
                break;
            case SweepOutput::Amplitudes:
                if (e.mode == CouplingMode::Physical) {
                    v.push_back(e.branch ? Opt(std::abs(e.branch->m1)) : Opt());
                    v.push_back(e.branch ? Opt(std::abs(e.branch->m2)) : Opt());
                    v.push_back(e.branch ? Opt(std::abs(e.branch->a)) : Opt());
                    v.push_back(static_cast<double>(e.roots.size()));
                    v.push_back(static_cast<double>(e.stable_root_count()));
                } else {
                    v.insert(v.end(), 5, Opt());
                }
                break;
        }
    }
    return rec;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned workers, const PhysicalConstants& constants) {
    validate(spec);

    SweepResult result;
    result.mode = spec.mode;
    result.policy = spec.policy;
    result.axis1 = spec.axis1;
    result.axis2 = spec.axis2;
    result.columns = columns_of(spec);

    const std::size_t n2 = spec.axis2 ? spec.axis2->count : 1;
    const std::size_t total = spec.axis1.count * n2;
    result.records.resize(total);
    std::vector<std::exception_ptr> errors(total);

    // Indices are claimed in increasing order and claiming stops after the
    // first failure, so every index below a failing one is still evaluated
    // and the reported (lowest-index) error does not depend on scheduling.
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto work = [&] {
        while (!failed.load()) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) return;
            try {
                result.records[k] = evaluate_grid_point(spec, k / n2, k % n2, constants);
            } catch (...) {
                errors[k] = std::current_exception();
                failed.store(true);
            }
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (std::size_t k = 0; k < total; ++k) {
        if (errors[k]) rethrow_with_prefix(errors[k], coordinates(spec, k / n2, k % n2));
    }
    return result;
}

}  // namespace magkerr
