#include "magkerr/meanfield.hpp"

#include "magkerr/dynamics.hpp"
#include "magkerr/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace magkerr {

namespace {

constexpr Complex kI{0.0, 1.0};

using Vec6r = Eigen::Matrix<double, 6, 1>;

/// Steady-state equations in scaled variables: amplitudes divided by `scale`,
/// equations divided by `scale * rate`.
class ScaledSystem {
public:
    ScaledSystem(const SystemParams& p, double scale, double rate) : p_(p), scale_(scale), rate_(rate) {
        kappa1_ = p.kerr1 * scale * scale / rate;
        kappa2_ = p.kerr2 * scale * scale / rate;
        drive_ = p.rabi / (scale * rate);
    }

    [[nodiscard]] Vec6r residual(const Vec6r& y) const {
        const Complex x1{y(0), y(1)}, x2{y(2), y(3)}, xa{y(4), y(5)};
        const Complex e1 = -(kI * p_.delta_m1 + p_.gamma_m1) / rate_ * x1 - 2.0 * kI * kappa1_ * std::norm(x1) * x1 -
                           kI * (p_.g1 / rate_) * xa;
        const Complex e2 = -(kI * p_.delta_m2 + p_.gamma_m2) / rate_ * x2 - 2.0 * kI * kappa2_ * std::norm(x2) * x2 -
                           kI * (p_.g2 / rate_) * xa;
        const Complex e3 =
            -(kI * p_.delta_c + p_.gamma_c) / rate_ * xa - kI * (p_.g1 * x1 + p_.g2 * x2) / rate_ + drive_;
        Vec6r r;
        r << e1.real(), e1.imag(), e2.real(), e2.imag(), e3.real(), e3.imag();
        return r;
    }

    [[nodiscard]] Mat6 jacobian(const Vec6r& y) const {
        const Complex x1{y(0), y(1)}, x2{y(2), y(3)};
        Mat6 J = Mat6::Zero();
        // Holomorphic part d/dz and anti-holomorphic part d/dz* for each (equation, variable) block.
        auto put = [&J](int eq, int var, Complex dz, Complex dzbar) {
            const Complex d_re = dz + dzbar;
            const Complex d_im = kI * (dz - dzbar);
            J(2 * eq, 2 * var) = d_re.real();
            J(2 * eq + 1, 2 * var) = d_re.imag();
            J(2 * eq, 2 * var + 1) = d_im.real();
            J(2 * eq + 1, 2 * var + 1) = d_im.imag();
        };
        put(0, 0, -(kI * p_.delta_m1 + p_.gamma_m1) / rate_ - 4.0 * kI * kappa1_ * std::norm(x1),
            -2.0 * kI * kappa1_ * x1 * x1);
        put(0, 2, -kI * p_.g1 / rate_, 0.0);
        put(1, 1, -(kI * p_.delta_m2 + p_.gamma_m2) / rate_ - 4.0 * kI * kappa2_ * std::norm(x2),
            -2.0 * kI * kappa2_ * x2 * x2);
        put(1, 2, -kI * p_.g2 / rate_, 0.0);
        put(2, 0, -kI * p_.g1 / rate_, 0.0);
        put(2, 1, -kI * p_.g2 / rate_, 0.0);
        put(2, 2, -(kI * p_.delta_c + p_.gamma_c) / rate_, 0.0);
        return J;
    }

    [[nodiscard]] double scale() const { return scale_; }

private:
    const SystemParams& p_;
    double scale_;
    double rate_;
    double kappa1_ = 0.0;
    double kappa2_ = 0.0;
    double drive_ = 0.0;
};

struct NewtonOutcome {
    Vec6r y;
    double residual;
    bool converged;
};

NewtonOutcome damped_newton(const ScaledSystem& system, Vec6r y, const MeanFieldOptions& options) {
    Vec6r r = system.residual(y);
    double norm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < options.max_iterations && norm >= options.tolerance; ++it) {
        Eigen::FullPivLU<Mat6> lu(system.jacobian(y));
        if (!lu.isInvertible()) break;
        const Vec6r step = lu.solve(-r);
        if (!step.allFinite()) break;

        // Step halving on the Euclidean residual norm.
        const double base = r.squaredNorm();
        double t = 1.0;
        Vec6r trial = y + step;
        Vec6r r_trial = system.residual(trial);
        while (!(r_trial.squaredNorm() < (1.0 - 1e-4 * t) * base) && t > 1e-10) {
            t *= 0.5;
            trial = y + t * step;
            r_trial = system.residual(trial);
        }
        if (!(r_trial.squaredNorm() < base)) break;
        y = trial;
        r = r_trial;
        norm = r.lpNorm<Eigen::Infinity>();
    }
    if (norm >= options.tolerance) return {y, norm, false};

    // A few undamped polishing steps down to the rounding floor.
    for (int polish = 0; polish < 3; ++polish) {
        Eigen::FullPivLU<Mat6> lu(system.jacobian(y));
        if (!lu.isInvertible()) break;
        const Vec6r trial = y + lu.solve(-r);
        const Vec6r r_trial = system.residual(trial);
        if (!(r_trial.squaredNorm() < r.squaredNorm())) break;
        y = trial;
        r = r_trial;
    }
    return {y, r.lpNorm<Eigen::Infinity>(), true};
}

double max_abs(Complex a, Complex b, Complex c) {
    return std::max({std::abs(a), std::abs(b), std::abs(c)});
}

LinearAmplitudes frozen_kerr(const SystemParams& p, double n);

// Populations n where the frozen-Kerr linear response reproduces itself,
// max(|m1|^2, |m2|^2) = n. Exact fixed points for identical magnons or a
// single coupled magnon; good Newton seeds otherwise.
std::vector<double> frozen_kerr_populations(const SystemParams& p, double linear_population, int points_per_decade) {
    auto h = [&](double log_n) {
        const double n = std::exp(log_n);
        const LinearAmplitudes l = frozen_kerr(p, n);
        return std::log(std::max({std::norm(l.m1), std::norm(l.m2), 1e-300})) - log_n;
    };
    auto bisect = [&](double a, double b) {
        double ha = h(a);
        for (int it = 0; it < 60; ++it) {
            const double m = 0.5 * (a + b);
            const double hm = h(m);
            if ((hm > 0.0) == (ha > 0.0)) {
                a = m;
                ha = hm;
            } else {
                b = m;
            }
        }
        return std::exp(0.5 * (a + b));
    };
    const double lo = std::log(linear_population) - 6.0 * std::numbers::ln10;
    const double hi = std::log(linear_population) + 8.0 * std::numbers::ln10;
    const int steps = 14 * points_per_decade;

    std::vector<double> xs(steps + 1), hs(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        xs[k] = lo + (hi - lo) * k / steps;
        hs[k] = h(xs[k]);
    }

    std::vector<double> out;
    for (int k = 0; k < steps; ++k) {
        if ((hs[k] > 0.0) != (hs[k + 1] > 0.0)) out.push_back(bisect(xs[k], xs[k + 1]));
    }
    // A pair of roots closer than one grid cell shows up as an extremum of h
    // that stays on one side of zero; golden-section the extremum and split.
    constexpr double kInvPhi = 0.6180339887498949;
    for (int k = 1; k < steps; ++k) {
        const double sgn = hs[k] > 0.0 ? 1.0 : -1.0;
        if ((hs[k - 1] > 0.0) != (hs[k] > 0.0) || (hs[k + 1] > 0.0) != (hs[k] > 0.0)) continue;
        if (!(sgn * hs[k] < sgn * hs[k - 1] && sgn * hs[k] < sgn * hs[k + 1])) continue;
        double a = xs[k - 1], b = xs[k + 1];
        double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
        double hc = sgn * h(c), hd = sgn * h(d);
        for (int it = 0; it < 80 && hc > 0.0 && hd > 0.0; ++it) {
            if (hc < hd) {
                b = d;
                d = c;
                hd = hc;
                c = b - kInvPhi * (b - a);
                hc = sgn * h(c);
            } else {
                a = c;
                c = d;
                hc = hd;
                d = a + kInvPhi * (b - a);
                hd = sgn * h(d);
            }
        }
        const double m = hc <= hd ? c : d;
        if (std::min(hc, hd) <= 0.0) {
            out.push_back(bisect(xs[k - 1], m));
            out.push_back(bisect(m, xs[k + 1]));
        } else if (std::min(hc, hd) < 1e-6) {
            out.push_back(std::exp(m));  // tangent: double root
        }
    }
    return out;
}

}  // namespace

double kerr_shifted_detuning(double delta, double kerr, double population, KerrConvention convention) {
    const double factor = convention == KerrConvention::SteadyState ? 2.0 : 4.0;
    return delta + factor * kerr * population;
}

namespace {

LinearAmplitudes frozen_kerr(const SystemParams& p, double n) {
    SystemParams q = p;
    q.delta_m1 += 2.0 * p.kerr1 * n;
    q.delta_m2 += 2.0 * p.kerr2 * n;
    return linear_steady_state(q);
}

}  // namespace

LinearAmplitudes linear_steady_state(const SystemParams& p) {
    // (i delta_s + gamma_s) m_s + i g_s a = 0
    // (i delta_c + gamma_c) a + i g1 m1 + i g2 m2 = rabi
    Eigen::Matrix<Complex, 3, 3> M;
    M << kI * p.delta_m1 + p.gamma_m1, 0.0, kI * p.g1,
         0.0, kI * p.delta_m2 + p.gamma_m2, kI * p.g2,
         kI * p.g1, kI * p.g2, kI * p.delta_c + p.gamma_c;
    Eigen::Matrix<Complex, 3, 1> rhs(0.0, 0.0, p.rabi);
    Eigen::Matrix<Complex, 3, 1> x = M.fullPivLu().solve(rhs);
    return {x(0), x(1), x(2)};
}

double steady_state_residual(const SystemParams& p, Complex m1, Complex m2, Complex a) {
    const Complex t1a = -(kI * p.delta_m1 + p.gamma_m1) * m1;
    const Complex t1b = -2.0 * kI * p.kerr1 * std::norm(m1) * m1;
    const Complex t1c = -kI * p.g1 * a;
    const Complex t2a = -(kI * p.delta_m2 + p.gamma_m2) * m2;
    const Complex t2b = -2.0 * kI * p.kerr2 * std::norm(m2) * m2;
    const Complex t2c = -kI * p.g2 * a;
    const Complex t3a = -(kI * p.delta_c + p.gamma_c) * a;
    const Complex t3b = -kI * (p.g1 * m1 + p.g2 * m2);
    const Complex t3c = p.rabi;

    const double largest = std::max({std::abs(t1a), std::abs(t1b), std::abs(t1c), std::abs(t2a), std::abs(t2b),
                                     std::abs(t2c), std::abs(t3a), std::abs(t3b), std::abs(t3c)});
    const double worst = std::max({std::abs(t1a + t1b + t1c), std::abs(t2a + t2b + t2c), std::abs(t3a + t3b + t3c)});
    if (largest == 0.0) return 0.0;
    return worst / largest;
}

std::vector<SteadyAmplitudes> solve_meanfield(const SystemParams& p, const MeanFieldOptions& options,
                                              const PhysicalConstants& constants) {
    validate(p, constants);

    auto tag_stability = [&](SteadyAmplitudes& s) {
        const auto c1 = effective_couplings(s, p, Magnon::First);
        const auto c2 = effective_couplings(s, p, Magnon::Second);
        const auto model = build_drift(c1, c2, p, constants);
        s.stable = model.stable;
        s.max_real_eigenvalue = model.max_real_part;
    };

    if (p.rabi == 0.0) {
        // Damping forces the undriven system to the origin.
        SteadyAmplitudes zero{};
        tag_stability(zero);
        return {zero};
    }

    const LinearAmplitudes lin = linear_steady_state(p);
    const double scale = max_abs(lin.m1, lin.m2, lin.a);
    const double rate =
        std::max({p.gamma_m1, p.gamma_m2, p.gamma_c, std::abs(p.delta_m1), std::abs(p.delta_m2), std::abs(p.delta_c),
                  p.g1, p.g2});
    const ScaledSystem system(p, scale, rate);

    std::vector<SteadyAmplitudes> roots;
    double best_residual = std::numeric_limits<double>::infinity();

    // Starts: frozen-Kerr fixed points first, then the scaled and rotated
    // Kerr-free solution.
    std::vector<LinearAmplitudes> starts;
    const double linear_population = std::max(std::norm(lin.m1), std::norm(lin.m2));
    if (options.frozen_kerr_seeds && (p.kerr1 != 0.0 || p.kerr2 != 0.0) && linear_population > 0.0) {
        for (double n : frozen_kerr_populations(p, linear_population, options.seed_points_per_decade)) {
            starts.push_back(frozen_kerr(p, n));
        }
    }
    for (double s : options.start_scales) {
        for (int k = 0; k < options.phase_steps; ++k) {
            const Complex rot = std::polar(s, 2.0 * std::numbers::pi * k / options.phase_steps);
            starts.push_back({rot * lin.m1, rot * lin.m2, rot * lin.a});
        }
    }

    for (const auto& start : starts) {
        {
            Vec6r y;
            const Complex x1 = start.m1 / scale, x2 = start.m2 / scale, xa = start.a / scale;
            y << x1.real(), x1.imag(), x2.real(), x2.imag(), xa.real(), xa.imag();

            const NewtonOutcome out = damped_newton(system, y, options);
            best_residual = std::min(best_residual, out.residual);
            if (!out.converged) continue;

            SteadyAmplitudes cand;
            cand.m1 = scale * Complex{out.y(0), out.y(1)};
            cand.m2 = scale * Complex{out.y(2), out.y(3)};
            cand.a = scale * Complex{out.y(4), out.y(5)};
            cand.residual = steady_state_residual(p, cand.m1, cand.m2, cand.a);
            if (!(cand.residual < 1e-10)) continue;

            const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const SteadyAmplitudes& r) {
                const double tol =
                    options.dedup_tolerance * std::max(max_abs(r.m1, r.m2, r.a), max_abs(cand.m1, cand.m2, cand.a));
                return max_abs(r.m1 - cand.m1, r.m2 - cand.m2, r.a - cand.a) <= tol;
            });
            if (!duplicate) roots.push_back(cand);
        }
    }

    if (roots.empty()) {
        throw ConvergenceFailure("mean-field Newton iteration did not converge from any start", best_residual);
    }
    for (auto& r : roots) tag_stability(r);
    std::sort(roots.begin(), roots.end(), [](const SteadyAmplitudes& x, const SteadyAmplitudes& y) {
        return x.magnon_population() < y.magnon_population();
    });
    return roots;
}

EffectiveCouplings effective_couplings(const SteadyAmplitudes& amplitudes, const SystemParams& params,
                                       Magnon which) {
    const Complex m = which == Magnon::First ? amplitudes.m1 : amplitudes.m2;
    const MagnonParams mp = magnon_params(params, which);
    const Complex z = 2.0 * mp.kerr * m * m;
    EffectiveCouplings c;
    c.G = z.real();
    c.F = z.imag();
    c.delta_tilde = kerr_shifted_detuning(mp.delta, mp.kerr, std::norm(m), KerrConvention::Fluctuation);
    c.Delta_tilde = 0.5 * Complex{c.G, c.F};
    return c;
}

EffectiveCouplings direct_couplings(double G, double F, double delta) {
    EffectiveCouplings c;
    c.G = G;
    c.F = F;
    c.delta_tilde = delta + 2.0 * std::hypot(G, F);
    c.Delta_tilde = 0.5 * Complex{G, F};
    return c;
}

namespace {

Complex closed_form(double g_self, double gamma_self, double dt_self, double g_other, double gamma_other,
                    double dt_other, const SystemParams& p) {
    const Complex d_self{dt_self, -gamma_self};
    const Complex d_other{dt_other, -gamma_other};
    const Complex d_cav{p.delta_c, -p.gamma_c};
    if (d_other == Complex{}) {
        throw SingularityError("closed-form amplitude: vanishing effective detuning of the other magnon");
    }
    const Complex denom = d_self * d_cav - g_self * g_self - g_other * g_other * d_self / d_other;
    if (std::abs(denom) == 0.0 || !std::isfinite(std::abs(denom))) {
        throw SingularityError("closed-form amplitude: vanishing denominator");
    }
    return kI * g_self * p.rabi / denom;
}

}  // namespace

Complex m1_closed_form(const SystemParams& p, double delta_tilde_1, double delta_tilde_2) {
    return closed_form(p.g1, p.gamma_m1, delta_tilde_1, p.g2, p.gamma_m2, delta_tilde_2, p);
}

Complex m2_closed_form(const SystemParams& p, double delta_tilde_1, double delta_tilde_2) {
    return closed_form(p.g2, p.gamma_m2, delta_tilde_2, p.g1, p.gamma_m1, delta_tilde_1, p);
}

}  // namespace magkerr
