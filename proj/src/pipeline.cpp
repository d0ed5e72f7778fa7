#include "magkerr/pipeline.hpp"

#include "magkerr/errors.hpp"

#include <algorithm>
#include <string>

namespace magkerr {

std::string_view to_string(CouplingMode mode) {
    return mode == CouplingMode::Direct ? "direct" : "physical";
}

std::string_view to_string(BranchPolicy policy) {
    switch (policy) {
        case BranchPolicy::LowestAmplitude: return "lowest-amplitude";
        case BranchPolicy::HighestAmplitude: return "highest-amplitude";
        case BranchPolicy::Error: return "error";
        case BranchPolicy::Skip: return "skip";
    }
    return "?";
}

std::string_view to_string(PointStatus status) {
    switch (status) {
        case PointStatus::Ok: return "ok";
        case PointStatus::Unstable: return "unstable";
        case PointStatus::NoRoot: return "no-root";
        case PointStatus::MultistableSkipped: return "multistable-skipped";
    }
    return "?";
}

CouplingMode parse_coupling_mode(std::string_view text) {
    for (auto m : {CouplingMode::Direct, CouplingMode::Physical}) {
        if (to_string(m) == text) return m;
    }
    throw InvalidInput("unknown coupling mode '" + std::string(text) + "' (direct|physical)");
}

BranchPolicy parse_branch_policy(std::string_view text) {
    for (auto p : {BranchPolicy::LowestAmplitude, BranchPolicy::HighestAmplitude, BranchPolicy::Error,
                   BranchPolicy::Skip}) {
        if (to_string(p) == text) return p;
    }
    throw InvalidInput("unknown branch policy '" + std::string(text) +
                       "' (lowest-amplitude|highest-amplitude|error|skip)");
}

PointStatus parse_point_status(std::string_view text) {
    for (auto s : {PointStatus::Ok, PointStatus::Unstable, PointStatus::NoRoot, PointStatus::MultistableSkipped}) {
        if (to_string(s) == text) return s;
    }
    throw InvalidInput("unknown point status '" + std::string(text) + "'");
}

BranchChoice select_branch(const std::vector<SteadyAmplitudes>& roots, BranchPolicy policy) {
    if (roots.empty()) return {std::nullopt, PointStatus::NoRoot};

    std::vector<std::size_t> stable;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        if (roots[k].stable) stable.push_back(k);
    }
    auto by_population = [&](std::size_t a, std::size_t b) {
        return roots[a].magnon_population() < roots[b].magnon_population();
    };

    if (stable.empty()) {
        std::vector<std::size_t> all(roots.size());
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
        return {*std::min_element(all.begin(), all.end(), by_population), PointStatus::Unstable};
    }
    if (stable.size() == 1) return {stable.front(), PointStatus::Ok};

    switch (policy) {
        case BranchPolicy::LowestAmplitude:
            return {*std::min_element(stable.begin(), stable.end(), by_population), PointStatus::Ok};
        case BranchPolicy::HighestAmplitude:
            return {*std::max_element(stable.begin(), stable.end(), by_population), PointStatus::Ok};
        case BranchPolicy::Skip:
            return {std::nullopt, PointStatus::MultistableSkipped};
        case BranchPolicy::Error:
            break;
    }
    throw MultistableError(std::to_string(stable.size()) +
                           " stable mean-field branches; choose a branch policy (lowest-amplitude, "
                           "highest-amplitude or skip)");
}

std::size_t PointEvaluation::stable_root_count() const {
    return static_cast<std::size_t>(
        std::count_if(roots.begin(), roots.end(), [](const SteadyAmplitudes& r) { return r.stable; }));
}

namespace {

void finish(PointEvaluation& out, const SystemParams& p, const PhysicalConstants& constants) {
    out.drift = build_drift(out.c1, out.c2, p, constants);
    out.bogoliubov1 = bogoliubov(out.c1);
    out.bogoliubov2 = bogoliubov(out.c2);
    out.gap1 = optimality_gap(out.c1, p.delta_c);
    out.gap2 = optimality_gap(out.c2, p.delta_c);
    if (!out.drift.stable) {
        out.status = PointStatus::Unstable;
        return;
    }
    const CovarianceMatrix cm = solve_lyapunov(out.drift);
    out.e_m1m2 = log_negativity(reduce(cm, kMagnonMagnon));
    out.e_m1a = log_negativity(reduce(cm, kMagnon1Cavity));
    out.e_m2a = log_negativity(reduce(cm, kMagnon2Cavity));
    out.covariance = cm;
}

}  // namespace

PointEvaluation evaluate(const Config& config, CouplingMode mode, BranchPolicy policy,
                         const PhysicalConstants& constants) {
    const SystemParams& p = config.system;
    PointEvaluation out;
    out.mode = mode;

    if (mode == CouplingMode::Direct) {
        if (!config.direct) throw InvalidInput("direct mode needs direct.G and direct.F in the config");
        out.c1 = direct_couplings(config.direct->G, config.direct->F, p.delta_m1);
        out.c2 = direct_couplings(config.direct->G, config.direct->F, p.delta_m2);
        finish(out, p, constants);
        return out;
    }

    try {
        out.roots = solve_meanfield(p, {}, constants);
    } catch (const ConvergenceFailure&) {
        out.status = PointStatus::NoRoot;
        return out;
    }

    const BranchChoice choice = select_branch(out.roots, policy);
    out.status = choice.status;
    if (!choice.index) return out;

    out.branch = out.roots[*choice.index];
    out.c1 = effective_couplings(*out.branch, p, Magnon::First);
    out.c2 = effective_couplings(*out.branch, p, Magnon::Second);
    if (choice.status == PointStatus::Ok) {
        finish(out, p, constants);
    } else {
        // diagnostics of the least-excited (unstable) root; no covariance
        out.drift = build_drift(out.c1, out.c2, p, constants);
        out.bogoliubov1 = bogoliubov(out.c1);
        out.bogoliubov2 = bogoliubov(out.c2);
        out.gap1 = optimality_gap(out.c1, p.delta_c);
        out.gap2 = optimality_gap(out.c2, p.delta_c);
    }
    return out;
}

double validity_ratio(const SteadyAmplitudes& amplitudes, const SphereSpec& sphere,
                      const PhysicalConstants& constants) {
    const double bound = spin_count(sphere, constants).magnon_bound;
    return std::max(std::norm(amplitudes.m1), std::norm(amplitudes.m2)) / bound;
}

}  // namespace magkerr
