#include "commands.hpp"

#include "magkerr/errors.hpp"
#include "magkerr/linalg.hpp"
#include "magkerr/sweep.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace magkerr::cli {

namespace {

constexpr double kMHz = kTwoPi * 1e6;

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string policy = "error";
    std::string format = "csv";
    std::string output;
    bool verbose = false;
};

std::string printf_string(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string num(double v) { return printf_string("%.10g", v); }

void add_common(CLI::App& sub, Common& c, bool with_format) {
    sub.add_option("-c,--config", c.config_path, "Config file")->required();
    sub.add_option("--override", c.overrides, "key=value, applied after the config file (repeatable)")
        ->allow_extra_args(false);
    sub.add_option("--branch-policy", c.policy, "Choice among several stable mean-field branches")
        ->check(CLI::IsMember({"lowest-amplitude", "highest-amplitude", "error", "skip"}));
    sub.add_option("-o,--output", c.output, "Output file");
    if (with_format) sub.add_option("--format", c.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    sub.add_flag("-v,--verbose", c.verbose, "Print the effective parameters");
}

Config load(const Common& c) {
    RawConfig raw = RawConfig::read(c.config_path);
    for (const auto& o : c.overrides) raw.apply_override(o);
    return build_config(raw);
}

CouplingMode resolve_mode(const std::string& text, const Config& config) {
    if (text == "auto") return config.direct ? CouplingMode::Direct : CouplingMode::Physical;
    return parse_coupling_mode(text);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw InvalidInput("write to '" + path + "' failed");
}

// Effective parameters in both the /2pi convention and angular units.
void print_parameters(std::ostream& out, const Config& config, CouplingMode mode) {
    const SystemParams& p = config.system;
    struct Row {
        const char* name;
        double value;
        double scale;
        const char* unit;
    };
    std::vector<Row> rows = {
        {"omega_d", p.omega_d, 1e9, "GHz"},   {"omega_m1", p.omega_m1, 1e9, "GHz"},
        {"omega_m2", p.omega_m2, 1e9, "GHz"}, {"omega_c", p.omega_c, 1e9, "GHz"},
        {"delta_m1", p.delta_m1, 1e6, "MHz"}, {"delta_m2", p.delta_m2, 1e6, "MHz"},
        {"delta_c", p.delta_c, 1e6, "MHz"},   {"g1", p.g1, 1e6, "MHz"},
        {"g2", p.g2, 1e6, "MHz"},             {"gamma_m1", p.gamma_m1, 1e6, "MHz"},
        {"gamma_m2", p.gamma_m2, 1e6, "MHz"}, {"gamma_c", p.gamma_c, 1e6, "MHz"},
        {"kerr1", p.kerr1, 1e-6, "uHz"},      {"kerr2", p.kerr2, 1e-6, "uHz"},
    };
    if (mode == CouplingMode::Direct && config.direct) {
        rows.push_back({"G", config.direct->G, 1e6, "MHz"});
        rows.push_back({"F", config.direct->F, 1e6, "MHz"});
    }

    out << "effective parameters\n";
    char line[160];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "  %-9s %16.10g %-3s /2pi  %18.10e rad/s\n", r.name,
                      r.value / (kTwoPi * r.scale), r.unit, r.value);
        out << line;
    }
    std::snprintf(line, sizeof line, "  %-9s %16.10g mW  (%s)\n", "power", p.power * 1e3,
                  p.drive_primary == DriveKind::Power ? "given" : "derived");
    out << line;
    std::snprintf(line, sizeof line, "  %-9s %16.10e 1/s (%s)\n", "rabi", p.rabi,
                  p.drive_primary == DriveKind::Rabi ? "given" : "derived");
    out << line;
    std::snprintf(line, sizeof line, "  %-9s %16.10g K\n", "T", p.temperature);
    out << line;
}

void print_couplings(std::ostream& out, const char* label, const EffectiveCouplings& c,
                     const BogoliubovDiagnostics& b, const std::optional<double>& gap) {
    auto both = [](double v) { return num(v / kMHz) + " MHz/2pi (" + printf_string("%.6e", v) + " rad/s)"; };
    out << label << '\n';
    out << "  G           = " << both(c.G) << '\n';
    out << "  F           = " << both(c.F) << '\n';
    out << "  delta_tilde = " << both(c.delta_tilde) << '\n';
    if (b.real_epsilon) {
        out << "  epsilon     = " << both(b.epsilon) << '\n';
        out << "  u, v        = " << num(b.u) << ", " << num(b.v) << '\n';
    } else {
        out << "  epsilon     = complex (delta_tilde^2 < G^2 + F^2)\n";
    }
    if (gap) out << "  eps+delta_c = " << both(*gap) << '\n';
}

nlohmann::json couplings_json(const EffectiveCouplings& c, const BogoliubovDiagnostics& b,
                              const std::optional<double>& gap) {
    nlohmann::json j = {{"G_rad_s", c.G}, {"F_rad_s", c.F}, {"delta_tilde_rad_s", c.delta_tilde}};
    j["epsilon_rad_s"] = b.real_epsilon ? nlohmann::json(b.epsilon) : nlohmann::json(nullptr);
    j["optimality_gap_rad_s"] = gap ? nlohmann::json(*gap) : nlohmann::json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------

int cmd_solve(const Common& common, const std::string& mode_text, std::ostream& out, std::ostream& err) {
    const Config config = load(common);
    const CouplingMode mode = resolve_mode(mode_text, config);
    const BranchPolicy policy = parse_branch_policy(common.policy);

    print_parameters(out, config, mode);
    out << "mode: " << to_string(mode) << ", branch policy: " << to_string(policy) << "\n\n";

    const PointEvaluation e = evaluate(config, mode, policy);

    nlohmann::json report = {{"mode", std::string(to_string(mode))}, {"status", std::string(to_string(e.status))}};
    std::optional<double> ratio;

    if (mode == CouplingMode::Physical) {
        out << "mean field: " << e.roots.size() << " root(s), " << e.stable_root_count() << " stable\n";
        if (e.branch) {
            const auto& b = *e.branch;
            out << "  |m1| = " << num(std::abs(b.m1)) << ", |m2| = " << num(std::abs(b.m2))
                << ", |a| = " << num(std::abs(b.a)) << '\n';
            ratio = validity_ratio(b, config.sphere);
            out << "  <m^dag m>/(2Ns) = " << printf_string("%.4g", *ratio) << '\n';
            if (*ratio > kValidityWarningThreshold) {
                out << "  warning: magnon population exceeds " << num(kValidityWarningThreshold)
                    << " of the spin bound; the bosonic magnon description is questionable\n";
            }
            // closed-form |m1| with the detuning shifted by 2K|m|^2 (solver) and 4K|m|^2
            const SystemParams& p = config.system;
            double closed[2] = {0.0, 0.0};
            for (int k = 0; k < 2; ++k) {
                const auto conv = k == 0 ? KerrConvention::SteadyState : KerrConvention::Fluctuation;
                const double d1 = kerr_shifted_detuning(p.delta_m1, p.kerr1, std::norm(b.m1), conv);
                const double d2 = kerr_shifted_detuning(p.delta_m2, p.kerr2, std::norm(b.m2), conv);
                closed[k] = std::abs(m1_closed_form(p, d1, d2));
            }
            out << "  closed-form |m1|: " << num(closed[0]) << " (2K|m|^2 shift), " << num(closed[1])
                << " (4K|m|^2 shift)\n";
            report["amplitudes"] = {{"abs_m1", std::abs(b.m1)}, {"abs_m2", std::abs(b.m2)}, {"abs_a", std::abs(b.a)},
                                    {"closed_form_abs_m1_2k", closed[0]}, {"closed_form_abs_m1_4k", closed[1]}};
            report["validity_ratio"] = *ratio;
        }
        report["n_roots"] = e.roots.size();
        report["n_stable"] = e.stable_root_count();
    }

    const bool have_couplings = mode == CouplingMode::Direct || e.branch.has_value();
    if (have_couplings) {
        print_couplings(out, "magnon 1", e.c1, e.bogoliubov1, e.gap1);
        print_couplings(out, "magnon 2", e.c2, e.bogoliubov2, e.gap2);
        out << "stability: " << (e.drift.stable ? "stable" : "UNSTABLE") << ", max Re lambda = "
            << num(e.drift.max_real_part / kMHz) << " MHz/2pi (" << printf_string("%.6e", e.drift.max_real_part)
            << " rad/s)\n";
        report["magnon1"] = couplings_json(e.c1, e.bogoliubov1, e.gap1);
        report["magnon2"] = couplings_json(e.c2, e.bogoliubov2, e.gap2);
        report["stable"] = e.drift.stable;
        report["max_re_lambda_rad_s"] = e.drift.max_real_part;
    }

    if (e.evaluated()) {
        out << "entanglement:\n";
        out << "  E_m1m2 = " << num(e.e_m1m2->e_n) << "  (nu_minus " << num(e.e_m1m2->nu_minus) << ")\n";
        out << "  E_m1a  = " << num(e.e_m1a->e_n) << "  (nu_minus " << num(e.e_m1a->nu_minus) << ")\n";
        out << "  E_m2a  = " << num(e.e_m2a->e_n) << "  (nu_minus " << num(e.e_m2a->nu_minus) << ")\n";
        report["E_m1m2"] = e.e_m1m2->e_n;
        report["E_m1a"] = e.e_m1a->e_n;
        report["E_m2a"] = e.e_m2a->e_n;
    }

    if (!common.output.empty()) write_file(common.output, report.dump(1) + "\n");

    switch (e.status) {
        case PointStatus::Ok: return kExitOk;
        case PointStatus::Unstable: err << "error: the steady state is unstable\n"; break;
        case PointStatus::NoRoot: err << "error: the mean-field solve found no steady state\n"; break;
        case PointStatus::MultistableSkipped: err << "error: several stable branches; point skipped\n"; break;
    }
    return kExitPhysics;
}

// ---------------------------------------------------------------------------

struct PowerRange {
    double start_mW;
    double stop_mW;
    std::size_t count;

    [[nodiscard]] double at(std::size_t k) const {
        if (count == 1 || k + 1 == count) return stop_mW;
        return start_mW + (stop_mW - start_mW) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
};

PowerRange parse_power_range(const std::string& text) {
    // reuse the axis grammar: start:stop:count
    const SweepAxis axis = parse_axis("power:" + text);
    if (axis.count < 1) throw InvalidInput("--power needs at least one point");
    if (axis.count >= 2 && axis.start == axis.stop) throw InvalidInput("--power has start == stop");
    if (axis.count == 1 && axis.start != axis.stop) throw InvalidInput("--power with one point needs start == stop");
    if (!(axis.start >= 0.0) || !(axis.stop >= 0.0) || !std::isfinite(axis.start) || !std::isfinite(axis.stop)) {
        throw InvalidInput("--power bounds must be finite and non-negative");
    }
    return {axis.start, axis.stop, axis.count};
}

int cmd_meanfield(const Common& common, const std::string& range_text, std::ostream& out, std::ostream& err) {
    const Config config = load(common);
    const PowerRange range = parse_power_range(range_text);
    if (common.verbose) print_parameters(out, config, CouplingMode::Physical);

    const std::vector<std::string> columns = {"power_mW", "status", "root", "abs_m1", "abs_m2", "abs_a", "stable",
                                              "max_re_lambda_over_2pi_MHz", "validity_ratio", "n_roots",
                                              "n_stable", "monostable"};
    std::string csv;
    for (std::size_t k = 0; k < columns.size(); ++k) csv += (k ? "," : "") + columns[k];
    csv += '\n';
    nlohmann::json rows = nlohmann::json::array();

    std::size_t failures = 0;
    std::optional<bool> previous_monostable;
    for (std::size_t k = 0; k < range.count; ++k) {
        const double mW = range.at(k);
        const SystemParams p = with_parameter(config.system, "power", mW * 1e-3);
        std::vector<SteadyAmplitudes> roots;
        try {
            roots = solve_meanfield(p);
        } catch (const ConvergenceFailure& e) {
            ++failures;
            err << "power " << num(mW) << " mW: " << e.what() << '\n';
            csv += printf_string("%.12g", mW) + ",no-root,,,,,,,,0,0,\n";
            rows.push_back({{"power_mW", mW}, {"status", "no-root"}, {"roots", nlohmann::json::array()}});
            continue;
        }
        const auto n_stable = static_cast<std::size_t>(
            std::count_if(roots.begin(), roots.end(), [](const SteadyAmplitudes& r) { return r.stable; }));
        const bool monostable = n_stable == 1;
        if (previous_monostable && *previous_monostable != monostable) {
            out << "at " << num(mW) << " mW: monostable " << (monostable ? "no -> yes" : "yes -> no") << " ("
                << n_stable << " stable of " << roots.size() << " root(s))\n";
        }
        previous_monostable = monostable;

        nlohmann::json jroots = nlohmann::json::array();
        for (std::size_t r = 0; r < roots.size(); ++r) {
            const auto& root = roots[r];
            const double ratio = validity_ratio(root, config.sphere);
            csv += printf_string("%.12g", mW) + ",ok," + std::to_string(r) + "," +
                   printf_string("%.12g", std::abs(root.m1)) + "," + printf_string("%.12g", std::abs(root.m2)) + "," +
                   printf_string("%.12g", std::abs(root.a)) + "," + (root.stable ? "1" : "0") + "," +
                   printf_string("%.12g", root.max_real_eigenvalue / kMHz) + "," + printf_string("%.12g", ratio) +
                   "," + std::to_string(roots.size()) + "," + std::to_string(n_stable) + "," +
                   (monostable ? "1" : "0") + '\n';
            jroots.push_back({{"abs_m1", std::abs(root.m1)},
                              {"abs_m2", std::abs(root.m2)},
                              {"abs_a", std::abs(root.a)},
                              {"stable", root.stable},
                              {"max_re_lambda_rad_s", root.max_real_eigenvalue},
                              {"validity_ratio", ratio}});
        }
        rows.push_back({{"power_mW", mW}, {"status", "ok"}, {"monostable", monostable}, {"roots", jroots}});
    }

    const std::string table = common.format == "json"
                                  ? nlohmann::json({{"schema", "magkerr.meanfield/1"}, {"points", rows}}).dump(1) + "\n"
                                  : csv;
    if (common.output.empty()) {
        out << table;
    } else {
        write_file(common.output, table);
        out << "wrote " << range.count << " power point(s) to " << common.output << '\n';
    }
    if (failures) {
        err << "error: no steady state at " << failures << " power point(s)\n";
        return kExitPhysics;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepFlags {
    std::string axis1;
    std::string axis2;
    std::string mode = "auto";
    std::vector<std::string> outputs;
    unsigned workers = 0;
};

void print_summary(std::ostream& out, const SweepResult& r) {
    std::map<std::string, std::size_t> counts;
    for (const auto& rec : r.records) ++counts[std::string(to_string(rec.status))];
    out << "points: " << r.records.size();
    for (const auto& [status, n] : counts) out << ", " << status << " " << n;
    out << '\n';

    const std::string c1(axis_info(r.axis1.name).column);
    const std::string c2 = r.axis2 ? std::string(axis_info(r.axis2->name).column) : "";
    for (const char* name : {"E_m1m2", "E_m1a", "E_m2a"}) {
        const auto col = r.column_index(name);
        if (!col) continue;
        const SweepRecord* best = nullptr;
        for (const auto& rec : r.records) {
            const auto& v = rec.values[*col];
            if (v && (!best || *v > *best->values[*col])) best = &rec;
        }
        if (!best) {
            out << "max " << name << ": no evaluated points\n";
            continue;
        }
        out << "max " << name << " = " << num(*best->values[*col]) << " at " << c1 << " = " << num(best->x1);
        if (best->x2) out << ", " << c2 << " = " << num(*best->x2);
        out << '\n';
    }
}

int cmd_sweep(const Common& common, const SweepFlags& flags, bool stability_only, std::ostream& out) {
    if (common.output.empty()) throw InvalidInput("--output is required");
    SweepSpec spec;
    spec.base = load(common);
    spec.mode = resolve_mode(flags.mode, spec.base);
    spec.policy = parse_branch_policy(common.policy);
    spec.axis1 = parse_axis(flags.axis1);
    if (!flags.axis2.empty()) spec.axis2 = parse_axis(flags.axis2);
    if (stability_only) {
        spec.outputs = {SweepOutput::Stability};
        if (spec.mode == CouplingMode::Physical) spec.outputs.push_back(SweepOutput::Amplitudes);
    } else {
        for (const auto& o : flags.outputs) spec.outputs.push_back(parse_sweep_output(o));
    }
    validate(spec);
    if (common.verbose) print_parameters(out, spec.base, spec.mode);

    const SweepResult result = run_sweep(spec, flags.workers);
    write_file(common.output, emit_table(result, parse_table_format(common.format)));

    out << "wrote " << common.output << '\n';
    print_summary(out, result);
    if (stability_only) {
        const auto col = result.column_index("stable");
        std::size_t stable = 0;
        for (const auto& rec : result.records) stable += rec.values[*col] && *rec.values[*col] == 1.0;
        out << "stable points: " << stable << " of " << result.records.size() << '\n';
    }
    return kExitOk;
}

void add_sweep_flags(CLI::App& sub, SweepFlags& flags, bool with_outputs) {
    sub.add_option("--axis1", flags.axis1, "name:start:stop:count, values in the column's display units")
        ->required();
    sub.add_option("--axis2", flags.axis2, "Optional second axis (inner loop)");
    sub.add_option("--mode", flags.mode, "Coupling mode; auto picks direct when the config has [direct]")
        ->check(CLI::IsMember({"auto", "direct", "physical"}));
    if (with_outputs) {
        sub.add_option("--outputs", flags.outputs,
                       "Comma list of E_m1m2,E_m1a,E_m2a,stability,nu_minus,epsilon,optimality_gap,amplitudes")
            ->delimiter(',');
    }
    sub.add_option("--workers", flags.workers, "Worker threads (0: all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kerr magnon entanglement simulator", "magkerr"};
    app.require_subcommand(1);

    Common common;
    std::string solve_mode = "auto";
    std::string power_range;
    SweepFlags sweep_flags;
    SweepFlags stability_flags;

    auto* solve = app.add_subcommand("solve", "Evaluate one parameter point");
    add_common(*solve, common, false);
    solve->add_option("--mode", solve_mode, "Coupling mode; auto picks direct when the config has [direct]")
        ->check(CLI::IsMember({"auto", "direct", "physical"}));

    auto* meanfield = app.add_subcommand("meanfield", "Mean-field branches over a drive power range");
    add_common(*meanfield, common, true);
    meanfield->add_option("--power", power_range, "start:stop:count in mW")->required();

    auto* stability = app.add_subcommand("stability", "Stability map over one or two axes");
    add_common(*stability, common, true);
    add_sweep_flags(*stability, stability_flags, false);

    auto* sweep = app.add_subcommand("sweep", "Entanglement sweep over one or two axes");
    add_common(*sweep, common, true);
    add_sweep_flags(*sweep, sweep_flags, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(common, solve_mode, out, err);
        if (meanfield->parsed()) return cmd_meanfield(common, power_range, out, err);
        if (stability->parsed()) return cmd_sweep(common, stability_flags, true, out);
        return cmd_sweep(common, sweep_flags, false, out);
    } catch (const PhysicsError& e) {
        err << "error: " << e.what() << '\n';
        return kExitPhysics;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace magkerr::cli
