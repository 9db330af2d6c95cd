#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "graphnls/phase_plane.hpp"
#include "oracles.hpp"

using namespace graphnls::phase;

TEST_CASE("potential landmark values") {
    PhaseParams pp{8.0, 1.0, 1.0};
    CHECK(potential(0.0, pp) == 0.0);
    CHECK(potential(1.0, pp) == doctest::Approx(1.0 / 8.0 - 0.5).epsilon(1e-15));

    // gamma_plus is the positive zero: root-find against the closed form.
    const double gp = pp.gamma_plus();
    CHECK(gp == doctest::Approx(std::pow(4.0, 1.0 / 6.0)).epsilon(1e-14));
    double lo = pp.gamma_minus(), hi = 2.0 * gp;
    for (int i = 0; i < 200; ++i) {
        const double c = 0.5 * (lo + hi);
        (potential(c, pp) < 0 ? lo : hi) = c;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(gp).epsilon(1e-12));
}

TEST_CASE("hamiltonian at the landmarks") {
    PhaseParams pp{8.0, 1.0, 1.0};
    CHECK(hamiltonian(0.0, 0.0, pp) == 0.0);
    CHECK(hamiltonian(pp.gamma_minus(), 0.0, pp) == doctest::Approx(pp.beta()).epsilon(1e-15));
    CHECK(std::abs(hamiltonian(pp.gamma_plus(), 0.0, pp)) < 1e-15);
    CHECK(pp.beta() == doctest::Approx(1.0 / 8.0 - 0.5).epsilon(1e-15));  // m = rho = 1
}

TEST_CASE("five-way level classification") {
    PhaseParams pp{8.0, 1.0, 1.0};
    const double beta = pp.beta();
    CHECK(beta == doctest::Approx(-3.0 / 8.0));
    CHECK(classify_level(-0.5, pp).cls == LevelClass::Empty);
    CHECK(classify_level(beta, pp).cls == LevelClass::EquilibriumMinimum);
    CHECK(classify_level(beta, pp).v_plus == doctest::Approx(pp.gamma_minus()));
    CHECK(classify_level(0.5 * beta, pp).cls == LevelClass::PositivePeriodic);
    PhaseLevel hom = classify_level(0.0, pp);
    CHECK(hom.cls == LevelClass::Homoclinic);
    CHECK(hom.v_plus == doctest::Approx(pp.gamma_plus()));
    PhaseLevel sc = classify_level(0.2, pp);
    CHECK(sc.cls == LevelClass::SignChangingPeriodic);
    CHECK(sc.v_minus == doctest::Approx(-sc.v_plus));
    CHECK(sc.v_plus > pp.gamma_plus());
}

TEST_CASE("turning points interlace and sit on the level") {
    for (double p : {7.0, 8.0, 10.0}) {
        for (double m : {0.7, 1.0, 2.0}) {
            for (double rho : {0.5, 1.0}) {
                PhaseParams pp{p, m, rho};
                const double beta = pp.beta();
                for (double f : {0.9, 0.5, 0.05, 1e-4}) {
                    PhaseLevel lv = classify_level(f * beta, pp);
                    REQUIRE(lv.cls == LevelClass::PositivePeriodic);
                    CHECK(0.0 < lv.v_minus);
                    CHECK(lv.v_minus < pp.gamma_minus());
                    CHECK(pp.gamma_minus() < lv.v_plus);
                    CHECK(lv.v_plus < pp.gamma_plus());
                    CHECK(std::abs(potential(lv.v_minus, pp) - lv.ell) <=
                          1e-12 * std::abs(beta));
                    CHECK(std::abs(potential(lv.v_plus, pp) - lv.ell) <=
                          1e-12 * std::abs(beta));
                }
            }
        }
    }
}

TEST_CASE("m = 0 well carries only the zero orbit at level zero") {
    PhaseParams pp{8.0, 0.0, 1.0};
    CHECK(classify_level(-1e-3, pp).cls == LevelClass::Empty);
    PhaseLevel z = classify_level(0.0, pp);
    CHECK(z.cls == LevelClass::EquilibriumMinimum);
    CHECK(z.v_plus == 0.0);
    CHECK(classify_level(1.0, pp).cls == LevelClass::SignChangingPeriodic);
}

TEST_CASE("inverse_g endpoints, accuracy, monotonicity") {
    for (double p : {7.0, 8.0, 10.0}) {
        const double z0 = 1.0 / p - 0.5;
        CHECK(inverse_g(0.0, p) == 0.0);
        CHECK(inverse_g(z0, p) == 1.0);
        PhaseParams pp{p, 1.0, 1.0};
        double prev = 1.0;
        for (double f : {0.999, 0.9, 0.5, 0.1, 1e-3, 1e-8}) {
            const double z = f * z0;
            const double g = inverse_g(z, p);
            CHECK(std::abs(potential(g, pp) - z) <= 1e-13);
            CHECK(g < prev);  // g decreases as z increases toward 0
            prev = g;
        }
        CHECK_THROWS_AS(inverse_g(z0 - 1e-3, p), std::invalid_argument);
        CHECK_THROWS_AS(inverse_g(1e-3, p), std::invalid_argument);
    }
}

TEST_CASE("inverse_g square-root asymptote near zero") {
    const double g = inverse_g(-1e-6, 8.0);
    CHECK(std::abs(g - std::sqrt(2e-6)) / std::sqrt(2e-6) < 1e-3);
}

TEST_CASE("g expansion at the well-bottom endpoint") {
    {
        auto ratios = g_edge_asymptotic_check(8.0, {1.0 / 8.0 - 0.5 + 1e-8, 1.0 / 8.0 - 0.5});
        CHECK(std::abs(ratios[0] - 1.0) < 0.01);
        CHECK(ratios[1] == 1.0);  // endpoint convention
    }
    {
        auto ratios = g_edge_asymptotic_check(10.0, {1.0 / 10.0 - 0.5 + 1e-10});
        CHECK(std::abs(ratios[0] - 1.0) < 0.01);
    }
    CHECK_THROWS_AS(g_edge_asymptotic_check(5.0, {0.0}), std::invalid_argument);
}

TEST_CASE("period approaches the harmonic limit at the well bottom") {
    for (double p : {7.0, 8.0, 10.0}) {
        for (double m : {1.0, 2.0}) {
            PhaseParams pp{p, m, 1.0};
            const double harmonic = 2.0 * M_PI / (m * std::sqrt(p - 2.0));
            const double T = period(pp.beta() * (1.0 - 1e-8), pp);
            CHECK(T == doctest::Approx(harmonic).epsilon(1e-4));
            const double N = mass_over_period(pp.beta() * (1.0 - 1e-6), pp);
            const double gm = pp.gamma_minus();
            CHECK(N == doctest::Approx(gm * gm * T).epsilon(1e-4));
        }
    }
}

TEST_CASE("quadrature period and mass match the time-domain oracle") {
    PhaseParams pp{8.0, 1.0, 1.0};
    const double ell = -0.1;
    oracles::HalfOrbit o = oracles::rk4_orbit(8.0, 1.0, 1.0, ell);
    CHECK(std::abs(period(ell, pp) - o.period) / o.period < 1e-6);
    CHECK(std::abs(mass_over_period(ell, pp) - o.mass) / o.mass < 1e-6);
}

TEST_CASE("oracle equivalence across p and a log level grid") {
    for (double p : {7.0, 10.0}) {
        PhaseParams pp{p, 1.0, 1.0};
        const double beta = pp.beta();
        for (double f : {0.7, 0.07, 0.003}) {
            const double ell = f * beta;
            oracles::HalfOrbit o = oracles::rk4_orbit(p, 1.0, 1.0, ell);
            CHECK(std::abs(period(ell, pp) - o.period) / o.period < 1e-6);
            CHECK(std::abs(mass_over_period(ell, pp) - o.mass) / o.mass < 1e-6);
        }
    }
}

TEST_CASE("period rejects non-periodic levels") {
    PhaseParams pp{8.0, 1.0, 1.0};
    CHECK_THROWS_AS(period(2.0 * pp.beta(), pp), std::invalid_argument);
    CHECK_THROWS_AS(mass_over_period(0.0, pp), std::invalid_argument);
}

TEST_CASE("period grows monotonically toward the homoclinic level") {
    PhaseParams pp{8.0, 1.0, 1.0};
    double prev = 0.0;
    for (double f : {0.9, 0.5, 0.1, 1e-2, 1e-4, 1e-6}) {
        const double T = period(f * pp.beta(), pp);
        CHECK(T > prev);
        prev = T;
    }
}

TEST_CASE("full-period log asymptote") {
    // The slow passage near zero contributes -(1/2) ln(-ell) twice per cycle,
    // so T(ell) + ln(-ell) approaches a constant.
    PhaseParams pp{8.0, 1.0, 1.0};
    double prev_ratio = 0.0;
    for (double ell : {-1e-4, -1e-6, -1e-8}) {
        const double ratio = period(ell, pp) / (-std::log(-ell));
        if (prev_ratio != 0.0) {
            CHECK(ratio < prev_ratio);  // approaches 1 from above
            CHECK(ratio > 1.0);
        }
        prev_ratio = ratio;
    }
    CHECK(std::abs(prev_ratio - 1.0) < 0.15);
}

TEST_CASE("mass-per-period tends to twice kappa_p") {
    for (double p : {7.0, 8.0, 10.0}) {
        PhaseParams pp{p, 1.0, 1.0};
        const double kp = kappa_p(p);
        CHECK(std::abs(0.5 * mass_over_period(-1e-10, pp) - kp) < 1e-4);
    }
}

TEST_CASE("kappa_p dual-quadrature agreement") {
    for (double p : {7.0, 8.0, 10.0})
        CHECK(std::abs(kappa_p(p) - kappa_p_tanh_sinh(p)) <= 1e-9 * kappa_p(p));
}

TEST_CASE("mass scaling prefactor across m and rho") {
    const double p = 8.0;
    const double kp = kappa_p(p);
    for (double m : {1.0, 2.0}) {
        for (double rho : {0.5, 1.0}) {
            PhaseParams pp{p, m, rho};
            const double pref = std::pow(rho, -2.0 / (p - 2.0)) *
                                std::pow(m, 4.0 / (p - 2.0) - 1.0);
            const double limit = 2.0 * kp * pref;
            const double ell = -1e-9 * std::abs(pp.beta());
            CHECK(mass_over_period(ell, pp) == doctest::Approx(limit).epsilon(2e-4));
        }
    }
}

TEST_CASE("scaling map identity and potential scaling") {
    PhaseParams pp{8.0, 1.0, 1.0};
    ScalingMap sm = scaling_map(pp, -0.1);
    CHECK(sm.ell_11 == doctest::Approx(-0.1));
    CHECK(sm.amplitude == doctest::Approx(1.0));
    CHECK(sm.length == doctest::Approx(1.0));
    CHECK(sm.period_defect < 1e-12);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 3.0);
    for (double p : {7.0, 8.0}) {
        PhaseParams gen{p, 1.7, 0.6};
        const double e = p - 2.0;
        const double pref = std::pow(gen.rho, -2.0 / e) * std::pow(gen.m, 2.0 * p / e);
        const double arg = std::pow(gen.rho, 1.0 / e) * std::pow(gen.m, -2.0 / e);
        for (int i = 0; i < 50; ++i) {
            const double x = unit(rng);
            const double lhs = potential(x, gen);
            const double rhs = pref * potential(arg * x, PhaseParams{p, 1.0, 1.0});
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("period scaling law, m = 2") {
    PhaseParams pp{8.0, 2.0, 1.0};
    const double ell = -0.05 * std::abs(pp.beta());
    ScalingMap sm = scaling_map(pp, -0.05 * std::abs(pp.beta()));
    CHECK(sm.period_defect < 1e-8);
    const double t_full = period(ell, pp);
    const double t_norm = period(sm.ell_11, PhaseParams{8.0, 1.0, 1.0});
    CHECK(t_full == doctest::Approx(0.5 * t_norm).epsilon(1e-8));
}

TEST_CASE("orbit properties: positive periodic") {
    PhaseParams pp{8.0, 1.0, 1.0};
    OrbitReport rep = orbit_properties(-0.1, pp, 10);
    REQUIRE(rep.ok);
    CHECK(rep.level.cls == LevelClass::PositivePeriodic);
    CHECK(rep.min_v > 0.0);
    CHECK(rep.min_v == doctest::Approx(rep.level.v_minus).epsilon(1e-7));
    CHECK(rep.max_v == doctest::Approx(rep.level.v_plus).epsilon(1e-7));
    CHECK(rep.hamiltonian_drift <= 1e-8);
    CHECK(rep.symmetry_defect <= 1e-7);
}

TEST_CASE("orbit properties: sign-changing level") {
    PhaseParams pp{8.0, 1.0, 1.0};
    OrbitReport rep = orbit_properties(0.25, pp, 6);
    REQUIRE(rep.ok);
    CHECK(rep.level.cls == LevelClass::SignChangingPeriodic);
    CHECK(rep.min_v == doctest::Approx(-rep.max_v).epsilon(1e-7));
    CHECK(rep.hamiltonian_drift <= 1e-8);
}

TEST_CASE("orbit properties: homoclinic decay within the reliable window") {
    for (double m : {1.0, 2.0}) {
        PhaseParams pp{8.0, m, 1.0};
        OrbitReport rep = orbit_properties(0.0, pp, 1);
        REQUIRE(rep.ok);
        CHECK(rep.level.cls == LevelClass::Homoclinic);
        CHECK(rep.max_v == doctest::Approx(pp.gamma_plus()).epsilon(1e-9));
        CHECK(rep.decay_ok);
        CHECK(rep.decay_sup <= rep.decay_threshold);
    }
}

TEST_CASE("orbit properties: constant and empty levels do not integrate") {
    PhaseParams pp{8.0, 1.0, 1.0};
    CHECK_FALSE(orbit_properties(pp.beta(), pp).integrated);
    CHECK_FALSE(orbit_properties(2.0 * pp.beta(), pp).integrated);
    OrbitReport z = orbit_properties(0.0, PhaseParams{8.0, 0.0, 1.0});
    CHECK_FALSE(z.integrated);
    CHECK(z.max_v == 0.0);
}
