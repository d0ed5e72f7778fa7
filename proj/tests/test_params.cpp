#include "catch_amalgamated.hpp"

#include "magkerr/errors.hpp"
#include "magkerr/params.hpp"
#include "support.hpp"

#include <cmath>

using namespace magkerr;
using Catch::Matchers::WithinRel;

TEST_CASE("physical constants") {
    PhysicalConstants c;
    REQUIRE_NOTHROW(validate(c));
    CHECK_THAT(c.gyromagnetic_ratio / kTwoPi, WithinRel(28e9, 1e-15));
    c.hbar = 0.0;
    CHECK_THROWS_AS(validate(c), InvalidParameter);
    c = {};
    c.mu0 = std::nan("");
    CHECK_THROWS_AS(validate(c), InvalidParameter);
}

TEST_CASE("rabi frequency from drive power") {
    // 314 mW, gamma_c/2pi = 1.9 MHz, omega_d/2pi = 10 GHz gives about 1.06e15 1/s
    const double rabi = rabi_from_power(0.314, kTwoPi * 1.9e6, kTwoPi * 10e9);
    CHECK_THAT(rabi, WithinRel(1.06e15, 0.01));

    // independent arithmetic with literal constants
    const double expected = std::sqrt(2.0 * 0.314 * (2 * M_PI * 1.9e6) / (1.054571817e-34 * 2 * M_PI * 10e9));
    CHECK_THAT(rabi, WithinRel(expected, 1e-14));

    CHECK(rabi_from_power(0.0, 1.0, 1.0) == 0.0);
    CHECK_THAT(rabi_from_power(4 * 0.2, 3e7, 6e10), WithinRel(2 * rabi_from_power(0.2, 3e7, 6e10), 1e-14));

    CHECK_THROWS_AS(rabi_from_power(-1.0, 1.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(rabi_from_power(1.0, 1.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(rabi_from_power(std::nan(""), 1.0, 1.0), InvalidParameter);
}

TEST_CASE("power and rabi round trip") {
    const double gamma_c = kTwoPi * 1.9e6;
    const double omega_d = kTwoPi * 10e9;
    for (double p = 1e-6; p <= 10.0; p *= 1.7) {
        CHECK_THAT(power_from_rabi(rabi_from_power(p, gamma_c, omega_d), gamma_c, omega_d), WithinRel(p, 1e-12));
    }
}

TEST_CASE("thermal occupation") {
    const double omega = kTwoPi * 10e9;
    // x = hbar omega / kB T ~ 48.0 at 10 mK
    const double x = 1.054571817e-34 * omega / (1.380649e-23 * 0.01);
    CHECK_THAT(x, WithinRel(48.0, 0.01));
    CHECK_THAT(thermal_occupation(omega, 0.01), WithinRel(std::exp(-x) / (1 - std::exp(-x)), 1e-12));
    CHECK_THAT(thermal_occupation(omega, 0.01), WithinRel(1.4e-21, 0.05));

    const PhysicalConstants c;
    const double t_ln2 = c.hbar * omega / (c.k_boltzmann * std::log(2.0));
    CHECK_THAT(thermal_occupation(omega, t_ln2), WithinRel(1.0, 1e-12));

    CHECK(thermal_occupation(omega, 0.0) == 0.0);
    CHECK(thermal_occupation(1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(thermal_occupation(0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(thermal_occupation(-1.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(thermal_occupation(1.0, -1.0), InvalidParameter);
}

TEST_CASE("thermal occupation is monotone") {
    const std::vector<double> omegas = {kTwoPi * 1e8, kTwoPi * 1e9, kTwoPi * 1e10, kTwoPi * 1e11};
    const std::vector<double> temps = {0.001, 0.01, 0.1, 1.0, 10.0, 300.0};
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        for (std::size_t j = 0; j < temps.size(); ++j) {
            const double n = thermal_occupation(omegas[i], temps[j]);
            if (j + 1 < temps.size()) CHECK(thermal_occupation(omegas[i], temps[j + 1]) > n);
            if (i + 1 < omegas.size()) CHECK(thermal_occupation(omegas[i + 1], temps[j]) < n);
        }
    }
}

TEST_CASE("spin count of a 40 um YIG sphere") {
    const SphereSpec sphere;
    CHECK_THAT(sphere.volume(), WithinRel(M_PI / 6 * 64e-15, 1e-14));
    const SpinCount n = spin_count(sphere);
    CHECK_THAT(n.n_sites, WithinRel(1.41e14, 0.005));
    CHECK_THAT(n.magnon_bound, WithinRel(7.07e14, 0.005));
    CHECK_THAT(n.magnon_bound, WithinRel(5.0 * n.n_sites, 1e-15));

    SphereSpec twice = sphere;
    twice.diameter *= 2;
    CHECK_THAT(spin_count(twice).n_sites, WithinRel(8 * n.n_sites, 1e-14));
    SphereSpec dense = sphere;
    dense.spin_density *= 3;
    CHECK_THAT(spin_count(dense).n_sites, WithinRel(3 * n.n_sites, 1e-14));

    SphereSpec bad = sphere;
    bad.diameter = 0;
    CHECK_THROWS_AS(spin_count(bad), InvalidParameter);
}

TEST_CASE("kerr coefficient from sphere anisotropy") {
    SphereSpec sphere;
    CHECK_THROWS_AS(kerr_coefficient(sphere), UnsupportedOperation);
    sphere.saturation_magnetization = 1.4e5;
    CHECK_THROWS_AS(kerr_coefficient(sphere), UnsupportedOperation);

    // pick K_an so the coefficient is 2 pi x 1 uHz, then evaluate forward
    const PhysicalConstants c;
    const double target = kTwoPi * 1e-6;
    const double m = 1.4e5;
    sphere.anisotropy_constant = target * m * m * sphere.volume() / (c.mu0 * c.gyromagnetic_ratio * c.gyromagnetic_ratio);
    CHECK_THAT(kerr_coefficient(sphere), WithinRel(target, 1e-12));

    SphereSpec bigger = sphere;
    bigger.diameter *= std::cbrt(2.0);
    CHECK_THAT(kerr_coefficient(bigger), WithinRel(target / 2, 1e-12));

    sphere.anisotropy_constant = 0.0;
    CHECK(kerr_coefficient(sphere) == 0.0);
}

TEST_CASE("system parameter validation") {
    SystemParams p = test::simple_params();
    REQUIRE_NOTHROW(validate(p));

    SECTION("damping must be positive") {
        p.gamma_c = 0.0;
        CHECK_THROWS_AS(validate(p), InvalidParameter);
    }
    SECTION("couplings must be non-negative") {
        p.g1 = -1.0;
        CHECK_THROWS_AS(validate(p), InvalidParameter);
    }
    SECTION("detuning must match the absolute frequencies") {
        p.delta_c += 1e3;
        CHECK_THROWS_AS(validate(p), InvalidParameter);
    }
    SECTION("detuning mismatch below the relative tolerance is accepted") {
        p.delta_c += 1e-3;  // 1e-3 / 6e10 ~ 2e-14
        CHECK_NOTHROW(validate(p));
    }
    SECTION("drive power and rabi must agree") {
        p.power *= 1.01;
        CHECK_THROWS_AS(validate(p), InvalidParameter);
    }
    SECTION("temperature must be non-negative") {
        p.temperature = -1.0;
        CHECK_THROWS_AS(validate(p), InvalidParameter);
    }
}

TEST_CASE("with_parameter re-derives dependent fields") {
    const SystemParams p = test::simple_params();

    const SystemParams q = with_parameter(p, "delta_c", 10 * test::kMHz);
    CHECK(q.delta_c == 10 * test::kMHz);
    CHECK(q.omega_c == p.omega_d + 10 * test::kMHz);
    CHECK(q.omega_d == p.omega_d);

    const SystemParams both = with_parameter(p, "delta_m", 3 * test::kMHz);
    CHECK(both.delta_m1 == 3 * test::kMHz);
    CHECK(both.delta_m2 == 3 * test::kMHz);

    // Rabi is primary here, so a new gamma_c changes the power
    const SystemParams r = with_parameter(p, "gamma_c", 2 * p.gamma_c);
    CHECK(r.rabi == p.rabi);
    CHECK_THAT(r.power, WithinRel(p.power / 2, 1e-14));

    const SystemParams s = with_parameter(with_parameter(p, "power", 0.393), "gamma_c", 2 * p.gamma_c);
    CHECK(s.drive_primary == DriveKind::Power);
    CHECK(s.power == 0.393);
    CHECK_THAT(s.rabi, WithinRel(rabi_from_power(0.393, 2 * p.gamma_c, p.omega_d), 1e-15));

    const SystemParams d = with_parameter(p, "omega_d", p.omega_d + 5 * test::kMHz);
    CHECK(d.delta_c == p.delta_c);
    CHECK(d.omega_c == d.omega_d + p.delta_c);

    CHECK(with_parameter(p, "kerr", 1.0).kerr2 == 1.0);
    CHECK(with_parameter(p, "g2", 0.0).g2 == 0.0);

    CHECK_THROWS_AS(with_parameter(p, "bogus", 1.0), InvalidParameter);
    CHECK_THROWS_AS(with_parameter(p, "gamma_c", -1.0), InvalidParameter);
    CHECK_THROWS_AS(with_parameter(p, "g", std::nan("")), InvalidParameter);
    CHECK(is_model_parameter("gamma_m"));
    CHECK_FALSE(is_model_parameter("G"));
}

TEST_CASE("magnon parameter slices") {
    SystemParams p = test::simple_params();
    p.g2 = 0.0;
    p.kerr1 = 5.0;
    CHECK(magnon_params(p, Magnon::First).kerr == 5.0);
    CHECK(magnon_params(p, Magnon::Second).g == 0.0);
    CHECK(magnon_params(p, Magnon::First).g == p.g1);
}
