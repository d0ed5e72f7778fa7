#include "magkerr/config.hpp"

#include "magkerr/errors.hpp"
#include "magkerr/linalg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace magkerr {

namespace {

constexpr std::array<std::string_view, 16> kFrequencyQuantities = {
    "omega_m1", "omega_m2", "omega_c",  "omega_d",  "delta_m1", "delta_m2", "delta_c", "g1",
    "g2",       "gamma_m1", "gamma_m2", "gamma_c",  "kerr1",    "kerr2",    "direct.G", "direct.F",
};

struct UnitFactor {
    std::string_view unit;
    double factor;
};

constexpr std::array<UnitFactor, 7> kCyclicUnits = {{
    {"nHz", 1e-9}, {"uHz", 1e-6}, {"mHz", 1e-3}, {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9},
}};

struct ScalarSpelling {
    std::string_view key;
    std::string_view quantity;
    double factor;
};

constexpr std::array<ScalarSpelling, 11> kScalarSpellings = {{
    {"temperature_K", "temperature", 1.0},
    {"temperature_mK", "temperature", 1e-3},
    {"drive.power", "drive.power", 1.0},
    {"drive.power_mW", "drive.power", 1e-3},
    {"drive.rabi", "drive.rabi", 1.0},
    {"sphere.diameter_m", "sphere.diameter", 1.0},
    {"sphere.diameter_um", "sphere.diameter", 1e-6},
    {"sphere.spin_density", "sphere.spin_density", 1.0},
    {"sphere.anisotropy_constant", "sphere.anisotropy_constant", 1.0},
    {"sphere.saturation_magnetization", "sphere.saturation_magnetization", 1.0},
    {"drive.primary", "drive.primary", 0.0},
}};

struct Resolved {
    std::string quantity;
    double factor;
};

bool is_frequency_quantity(std::string_view name) {
    for (auto q : kFrequencyQuantities) {
        if (q == name) return true;
    }
    return false;
}

std::optional<Resolved> resolve_key(std::string_view key) {
    for (const auto& s : kScalarSpellings) {
        if (s.key == key) return Resolved{std::string(s.quantity), s.factor};
    }
    constexpr std::string_view rad_suffix = "_rad_s";
    if (key.size() > rad_suffix.size() && key.ends_with(rad_suffix)) {
        auto base = key.substr(0, key.size() - rad_suffix.size());
        if (is_frequency_quantity(base)) return Resolved{std::string(base), 1.0};
    }
    constexpr std::string_view cyclic = "_over_2pi_";
    if (auto pos = key.find(cyclic); pos != std::string_view::npos) {
        auto base = key.substr(0, pos);
        auto unit = key.substr(pos + cyclic.size());
        if (is_frequency_quantity(base)) {
            for (const auto& u : kCyclicUnits) {
                if (u.unit == unit) return Resolved{std::string(base), kTwoPi * u.factor};
            }
        }
    }
    return std::nullopt;
}

std::string_view partner_of(std::string_view quantity) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 8> pairs = {{
        {"omega_m1", "delta_m1"},
        {"delta_m1", "omega_m1"},
        {"omega_m2", "delta_m2"},
        {"delta_m2", "omega_m2"},
        {"omega_c", "delta_c"},
        {"delta_c", "omega_c"},
        {"drive.power", "drive.rabi"},
        {"drive.rabi", "drive.power"},
    }};
    for (const auto& [a, b] : pairs) {
        if (a == quantity) return b;
    }
    return {};
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const RawEntry& entry) {
    std::string_view text = entry.value;
    if (text.starts_with('+')) text.remove_prefix(1);
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError("expected a finite number, got '" + entry.value + "'", entry.key, entry.line);
    }
    return value;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Slot {
    double value = 0.0;
    std::string text;
    std::string key;
    int line = 0;
};

}  // namespace

RawConfig RawConfig::parse(std::string_view text) {
    RawConfig raw;
    std::string section;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError("malformed section header", std::string(line), line_no);
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value'", std::string(line), line_no);
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", "", line_no);
        std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (auto it = seen.find(full); it != seen.end()) {
            throw ConfigError("duplicate key (first defined on line " + std::to_string(it->second) + ")", full,
                              line_no);
        }
        seen.emplace(full, line_no);
        raw.entries_.push_back({std::move(full), std::string(value), line_no});
    }
    return raw;
}

RawConfig RawConfig::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string(), "", 0);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void RawConfig::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("override must have the form key=value", std::string(assignment), 0);
    }
    RawEntry entry{std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))), 0};
    const auto resolved = resolve_key(entry.key);
    if (!resolved) {
        throw ConfigError("unknown key", entry.key, 0);
    }
    const auto partner = partner_of(resolved->quantity);
    const bool drive = resolved->quantity.starts_with("drive.");
    std::erase_if(entries_, [&](const RawEntry& e) {
        const auto r = resolve_key(e.key);
        if (!r) return false;
        if (r->quantity == resolved->quantity) return true;
        if (!partner.empty() && r->quantity == partner) return true;
        return drive && r->quantity == "drive.primary";
    });
    entries_.push_back(std::move(entry));
}

Config build_config(const RawConfig& raw, const PhysicalConstants& constants) {
    std::map<std::string, Slot, std::less<>> slots;
    for (const auto& entry : raw.entries()) {
        const auto resolved = resolve_key(entry.key);
        if (!resolved) {
            throw ConfigError("unknown key", entry.key, entry.line);
        }
        if (auto it = slots.find(resolved->quantity); it != slots.end()) {
            throw ConfigError("quantity '" + resolved->quantity + "' already given as '" + it->second.key + "'",
                              entry.key, entry.line);
        }
        Slot slot{0.0, entry.value, entry.key, entry.line};
        if (resolved->quantity != "drive.primary") {
            slot.value = parse_number(entry) * resolved->factor;
        }
        slots.emplace(resolved->quantity, std::move(slot));
    }

    auto find = [&](std::string_view q) -> const Slot* {
        auto it = slots.find(q);
        return it == slots.end() ? nullptr : &it->second;
    };
    auto require = [&](std::string_view q, std::string_view hint) -> const Slot& {
        if (const Slot* s = find(q)) return *s;
        throw ConfigError("missing required quantity (e.g. " + std::string(hint) + ")", std::string(q), 0);
    };
    auto check = [](const Slot& s, bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what + " (got " + s.text + ")", s.key, s.line);
    };
    auto positive = [&](const Slot& s) {
        check(s, s.value > 0.0, "must be strictly positive");
        return s.value;
    };
    auto non_negative = [&](const Slot& s) {
        check(s, s.value >= 0.0, "must be non-negative");
        return s.value;
    };

    Config config;
    SystemParams& p = config.system;

    p.omega_d = positive(require("omega_d", "omega_d_over_2pi_GHz"));

    auto frequency_pair = [&](std::string_view abs_name, std::string_view det_name, double& omega, double& delta) {
        const Slot* abs = find(abs_name);
        const Slot* det = find(det_name);
        if (!abs && !det) {
            throw ConfigError("give either " + std::string(abs_name) + " or " + std::string(det_name),
                              std::string(det_name), 0);
        }
        if (abs && det) {
            omega = positive(*abs);
            delta = det->value;
            const double scale = std::max({std::abs(omega), std::abs(p.omega_d), std::abs(delta)});
            check(*det, std::abs(delta - (omega - p.omega_d)) <= kConsistencyTolerance * scale,
                  "inconsistent with " + abs->key + " and omega_d");
        } else if (abs) {
            omega = positive(*abs);
            delta = omega - p.omega_d;
        } else {
            delta = det->value;
            omega = p.omega_d + delta;
            check(*det, omega > 0.0, "implies a non-positive absolute frequency");
        }
    };
    frequency_pair("omega_m1", "delta_m1", p.omega_m1, p.delta_m1);
    frequency_pair("omega_m2", "delta_m2", p.omega_m2, p.delta_m2);
    frequency_pair("omega_c", "delta_c", p.omega_c, p.delta_c);

    p.g1 = non_negative(require("g1", "g1_over_2pi_MHz"));
    p.g2 = non_negative(require("g2", "g2_over_2pi_MHz"));
    p.gamma_m1 = positive(require("gamma_m1", "gamma_m1_over_2pi_MHz"));
    p.gamma_m2 = positive(require("gamma_m2", "gamma_m2_over_2pi_MHz"));
    p.gamma_c = positive(require("gamma_c", "gamma_c_over_2pi_MHz"));
    p.temperature = non_negative(require("temperature", "temperature_K"));

    // sphere
    if (const Slot* s = find("sphere.diameter")) config.sphere.diameter = positive(*s);
    if (const Slot* s = find("sphere.spin_density")) config.sphere.spin_density = positive(*s);
    if (const Slot* s = find("sphere.anisotropy_constant")) config.sphere.anisotropy_constant = s->value;
    if (const Slot* s = find("sphere.saturation_magnetization")) {
        config.sphere.saturation_magnetization = positive(*s);
    }

    // Kerr: explicit values win; otherwise derive from the sphere's anisotropy.
    for (auto [name, target] : {std::pair{"kerr1", &p.kerr1}, std::pair{"kerr2", &p.kerr2}}) {
        if (const Slot* s = find(name)) {
            *target = s->value;
        } else {
            try {
                *target = kerr_coefficient(config.sphere, constants);
            } catch (const UnsupportedOperation&) {
                throw ConfigError(
                    "missing; give it directly or provide sphere.anisotropy_constant and "
                    "sphere.saturation_magnetization",
                    name, 0);
            }
        }
    }

    // drive
    const Slot* power = find("drive.power");
    const Slot* rabi = find("drive.rabi");
    if (!power && !rabi) {
        throw ConfigError("missing drive; give drive.power (W) or drive.rabi (1/s)", "drive", 0);
    }
    if (power) {
        p.power = non_negative(*power);
        p.drive_primary = DriveKind::Power;
        p.rabi = rabi_from_power(p.power, p.gamma_c, p.omega_d, constants);
        if (rabi) {
            non_negative(*rabi);
            check(*rabi,
                  std::abs(rabi->value - p.rabi) <= kConsistencyTolerance * std::max(rabi->value, p.rabi),
                  "inconsistent with drive.power; give only one of them");
            p.rabi = rabi->value;
        }
    } else {
        p.rabi = non_negative(*rabi);
        p.drive_primary = DriveKind::Rabi;
        p.power = power_from_rabi(p.rabi, p.gamma_c, p.omega_d, constants);
    }
    if (const Slot* s = find("drive.primary")) {
        if (s->text == "power") {
            check(*s, power != nullptr, "drive.primary = power requires drive.power");
            p.drive_primary = DriveKind::Power;
        } else if (s->text == "rabi") {
            check(*s, rabi != nullptr, "drive.primary = rabi requires drive.rabi");
            p.drive_primary = DriveKind::Rabi;
        } else {
            check(*s, false, "must be 'power' or 'rabi'");
        }
    }

    // direct couplings
    const Slot* G = find("direct.G");
    const Slot* F = find("direct.F");
    if (G || F) {
        if (!G || !F) {
            throw ConfigError("direct mode needs both direct.G and direct.F", G ? "direct.F" : "direct.G", 0);
        }
        config.direct = DirectCouplings{G->value, F->value};
    }

    try {
        validate(config.system, constants);
        validate(config.sphere);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what(), "", 0);
    }
    return config;
}

Config parse_config(std::string_view text, const PhysicalConstants& constants) {
    return build_config(RawConfig::parse(text), constants);
}

Config load_config(const std::filesystem::path& path, const PhysicalConstants& constants) {
    return build_config(RawConfig::read(path), constants);
}

std::string serialize_config(const Config& config) {
    const SystemParams& p = config.system;
    std::ostringstream out;
    auto put = [&](std::string_view key, double v) { out << key << " = " << format_double(v) << '\n'; };
    out << "# angular units (rad/s) throughout\n";
    put("omega_d_rad_s", p.omega_d);
    put("omega_m1_rad_s", p.omega_m1);
    put("omega_m2_rad_s", p.omega_m2);
    put("omega_c_rad_s", p.omega_c);
    put("delta_m1_rad_s", p.delta_m1);
    put("delta_m2_rad_s", p.delta_m2);
    put("delta_c_rad_s", p.delta_c);
    put("g1_rad_s", p.g1);
    put("g2_rad_s", p.g2);
    put("gamma_m1_rad_s", p.gamma_m1);
    put("gamma_m2_rad_s", p.gamma_m2);
    put("gamma_c_rad_s", p.gamma_c);
    put("kerr1_rad_s", p.kerr1);
    put("kerr2_rad_s", p.kerr2);
    put("temperature_K", p.temperature);
    out << "\n[drive]\n";
    put("power", p.power);
    put("rabi", p.rabi);
    out << "primary = " << (p.drive_primary == DriveKind::Power ? "power" : "rabi") << '\n';
    out << "\n[sphere]\n";
    put("diameter_m", config.sphere.diameter);
    put("spin_density", config.sphere.spin_density);
    if (config.sphere.anisotropy_constant) put("anisotropy_constant", *config.sphere.anisotropy_constant);
    if (config.sphere.saturation_magnetization) {
        put("saturation_magnetization", *config.sphere.saturation_magnetization);
    }
    if (config.direct) {
        out << "\n[direct]\n";
        put("G_rad_s", config.direct->G);
        put("F_rad_s", config.direct->F);
    }
    return out.str();
}

}  // namespace magkerr
