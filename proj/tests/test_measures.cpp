#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symh/measures.hpp>

#include <cmath>

using namespace symh;
using namespace symh::measures;
using namespace symh::dynamics;

namespace {

FlowConfig splitting(int m = 16) {
    FlowConfig c;
    c.integrator = Integrator::SplittingSeparable;
    c.substeps_per_unit_time = m;
    return c;
}

}  // namespace

TEST_CASE("orbit_measure: fixed point, integrable defect, linearity") {
    HamiltonianSpec HP = HamiltonianSpec::pendulum(0.05);
    FlowConfig cfg = splitting();

    // fixed equilibrium: rotation 0, invariance defect ~ 0
    LiftedOrbit fix = iterate_lift(HP, PhasePoint{Vec(0.0), Vec(0.0)}, 4, cfg);
    OrbitMeasure m0 = orbit_measure(HP, {fix}, {1.0}, cfg);
    CHECK(m0.rotation[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(m0.invariance_defect < 1e-8);

    // single integrable orbit over k = 8: defect <= 2/8
    HamiltonianSpec HI = HamiltonianSpec::integrable(Profile::quadratic(1.0), true);
    LiftedOrbit orb = iterate_lift(HI, PhasePoint{Vec(0.1), Vec(0.7)}, 8, cfg);
    OrbitMeasure m1 = orbit_measure(HI, {orb}, {1.0}, cfg);
    CHECK(m1.rotation[0] == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(m1.invariance_defect <= 2.0 / 8 + 1e-9);

    // two orbits with weights (1/2, 1/2): rotation is the average
    LiftedOrbit orb2 = iterate_lift(HI, PhasePoint{Vec(0.3), Vec(0.2)}, 8, cfg);
    OrbitMeasure m2 = orbit_measure(HI, {orb, orb2}, {0.5, 0.5}, cfg);
    CHECK(m2.rotation[0] == doctest::Approx(0.45).epsilon(1e-10));

    CHECK_THROWS_AS(orbit_measure(HI, {}, {}, cfg), EmptyInput);
}

TEST_CASE("rotation and action of the truncated Liouville measure") {
    HamiltonianSpec H = truncate_coercive(HamiltonianSpec::pendulum(0.06), 1.0);
    OrbitMeasure mu = liouville_measure(H, 2.2, 128, 257);
    Vec rho = rotation_of_measure(mu, H);
    CHECK(std::abs(rho[0]) <= 1e-3);

    double act = average_action(mu, H);
    double cal = calabi(H);
    CHECK(std::abs(act + (1 + 1) * cal) <= 1e-3);  // n = 1
}

TEST_CASE("measure action identities in closed form") {
    FlowConfig cfg = splitting();
    // Dirac at a fixed point outside the support
    HamiltonianSpec HB = HamiltonianSpec::integrable(Profile::bump(0.2, 0.5), false, 0.5);
    LiftedOrbit far = iterate_lift(HB, PhasePoint{Vec(0.2), Vec(0.9)}, 4, cfg);
    OrbitMeasure md = orbit_measure(HB, {far}, {1.0}, cfg);
    CHECK(rotation_of_measure(md, HB)[0] == doctest::Approx(0.0));
    CHECK(average_action(md, HB) == doctest::Approx(0.0));

    // integrable orbit at p0: rho = H'(p0), A = p0 H'(p0) - H(p0)
    HamiltonianSpec HI = HamiltonianSpec::integrable(Profile::quadratic(1.0), true);
    double p0 = 0.6;
    LiftedOrbit orb = iterate_lift(HI, PhasePoint{Vec(0.0), Vec(p0)}, 8, cfg);
    OrbitMeasure mi = orbit_measure(HI, {orb}, {1.0}, cfg);
    CHECK(rotation_of_measure(mi, HI)[0] == doctest::Approx(p0).epsilon(1e-9));
    CHECK(average_action(mi, HI) ==
          doctest::Approx(p0 * p0 - p0 * p0 / 2).epsilon(1e-9));
}

TEST_CASE("build_mu_alpha: integrable closed form and infeasible alpha") {
    HamiltonianSpec HI = HamiltonianSpec::integrable(Profile::quadratic(1.0), true);
    FlowConfig cfg = splitting();
    double p0 = 0.5;
    OrbitMeasure mu = build_mu_alpha(HI, p0, p0, 8, cfg);
    CHECK(mu.rotation[0] == doctest::Approx(p0).epsilon(1e-6));
    CHECK(mu.avg_action == doctest::Approx(p0 * p0 / 2).epsilon(1e-6));

    CHECK_THROWS_AS(build_mu_alpha(HI, p0 + 0.4, p0, 8, cfg), InfeasibleAlpha);
}

TEST_CASE("support checks: autonomous level support and mass fraction") {
    const double a = 0.01;
    HamiltonianSpec HT = truncate_coercive(HamiltonianSpec::pendulum(a), 1.6);
    FlowConfig cfg;
    cfg.integrator = Integrator::ImplicitMidpoint;
    cfg.substeps_per_unit_time = 24;
    double p0 = 0.4;  // rotation zone
    auto at_p = orbits_at_momentum(HT, 16, p0, cfg, 64);
    REQUIRE(!at_p.empty());
    double alpha = at_p.front().rotation[0];
    CHECK(alpha != 0.0);
    OrbitMeasure mu = build_mu_alpha(HT, alpha, p0, 16, cfg);
    SupportReport rep = support_checks(mu, HT);
    CHECK(rep.mass_inside_support == doctest::Approx(1.0));
    CHECK(rep.energy_spread <= 5e-4);                 // autonomous level support
    CHECK(rep.level_identity_gap <= 5e-3);            // A = p alpha - c
}

TEST_CASE("theorem identity improves with k for the integrable case") {
    HamiltonianSpec HI = HamiltonianSpec::integrable(Profile::quadratic(1.0), true);
    FlowConfig cfg = splitting();
    double p0 = 0.5, alpha = 0.5;
    double prev = 1e300;
    for (int k : {8, 16, 32}) {
        OrbitMeasure mu = build_mu_alpha(HI, alpha, p0, k, cfg);
        double gap = std::abs(mu.avg_action - (p0 * alpha - p0 * p0 / 2));
        CHECK(gap <= prev + 1e-12);
        prev = gap;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("R-set emission") {
    // H == 0: single point (0, 0)
    std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<double> zero(grid.size(), 0.0);
    auto rows0 = emit_R_set(grid, zero, 1);
    for (auto& r : rows0) {
        CHECK(r.alpha == doctest::Approx(0.0));
        CHECK(r.action == doctest::Approx(0.0));
    }

    // integrable: graph {(H'(p), p H'(p) - H(p))}
    std::vector<double> hbar;
    for (double p : grid) hbar.push_back(p * p / 2);
    auto rows = emit_R_set(grid, hbar, 1);
    for (auto& r : rows) {
        CHECK(r.alpha == doctest::Approx(r.p).epsilon(0.3));
        CHECK(r.action == doctest::Approx(r.p * r.alpha - r.p * r.p / 2).epsilon(1e-9));
    }
}
