#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symh/flow.hpp>

#include <cmath>

using namespace symh;
using namespace symh::dynamics;

static FlowConfig splitting(int m = 16) {
    FlowConfig c;
    c.integrator = Integrator::SplittingSeparable;
    c.substeps_per_unit_time = m;
    return c;
}
static FlowConfig midpoint(int m = 16) {
    FlowConfig c;
    c.integrator = Integrator::ImplicitMidpoint;
    c.substeps_per_unit_time = m;
    return c;
}

TEST_CASE("identity flow for H == 0") {
    HamiltonianSpec H = HamiltonianSpec::zero();
    PhasePoint z{Vec(0.3), Vec(0.7)};
    PhasePoint o = time_one_map(H, z, splitting());
    CHECK(o.q[0] == 0.3);
    CHECK(o.p[0] == 0.7);
}

TEST_CASE("integrable closed-form flow q <- q + t p") {
    HamiltonianSpec H = HamiltonianSpec::integrable(Profile::quadratic(1.0), true);
    PhasePoint z{Vec(0.0), Vec(0.5)};
    PhasePoint o = time_one_map(H, z, splitting());
    CHECK(o.q[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(o.p[0] == doctest::Approx(0.5));

    // iterate_lift action: p = 1, A_2 average = 1/2 for H = p^2/2
    LiftedOrbit orb = iterate_lift(H, PhasePoint{Vec(0.0), Vec(1.0)}, 2, splitting());
    CHECK(orb.endpoint().q[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(orb.endpoint().p[0] == doctest::Approx(1.0));
    CHECK(orb.average_action() == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("pendulum equilibrium is fixed") {
    HamiltonianSpec H = HamiltonianSpec::pendulum(0.1);
    PhasePoint z{Vec(0.0), Vec(0.0)};
    PhasePoint o = time_one_map(H, z, splitting());
    CHECK(o.q[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(o.p[0] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("frozen outside compact support, bit for bit") {
    HamiltonianSpec H =
        HamiltonianSpec::integrable(Profile::bump(0.3, 0.8), false, 0.8);
    PhasePoint z{Vec(0.42), Vec(1.5)};
    PhasePoint o = time_one_map(H, z, splitting());
    CHECK(o.q[0] == 0.42);
    CHECK(o.p[0] == 1.5);

    // time-periodic custom bump: endpoint z, action 0
    CustomGridData g;
    g.nt = 8;
    g.nq = 16;
    g.np = 33;
    g.p_lo = -0.8;
    g.p_hi = 0.8;
    g.values.assign(static_cast<size_t>(g.nt) * g.nq * g.np, 0.0);
    for (int it = 0; it < g.nt; ++it)
        for (int iq = 0; iq < g.nq; ++iq)
            for (int ip = 0; ip < g.np; ++ip) {
                double t = static_cast<double>(it) / g.nt;
                double q = static_cast<double>(iq) / g.nq;
                double p = -0.8 + 1.6 * ip / (g.np - 1);
                double v = 0.05 * (1 + 0.5 * std::sin(2 * M_PI * t)) *
                           std::exp(-20 * (p * p)) * std::sin(2 * M_PI * q);
                // flatten to an exact zero near the p-boundary
                if (std::abs(p) > 0.6) v = 0.0;
                g.values[(static_cast<size_t>(it) * g.nq + iq) * g.np + ip] = v;
            }
    HamiltonianSpec HC = HamiltonianSpec::custom(g);
    PhasePoint far{Vec(0.3), Vec(0.79)};
    LiftedOrbit orb = iterate_lift(HC, far, 5, midpoint());
    CHECK(orb.endpoint().q[0] == 0.3);
    CHECK(orb.endpoint().p[0] == 0.79);
    CHECK(orb.action == 0.0);
}

TEST_CASE("lift equivariance is exact") {
    // dyadic base points keep q + e exactly representable
    HamiltonianSpec H = HamiltonianSpec::pendulum(0.05);
    FlowConfig cfg = splitting();
    PhasePoint z{Vec(0.375), Vec(0.21)};
    PhasePoint a = time_one_map(H, z, cfg);
    PhasePoint b = time_one_map(H, PhasePoint{Vec(z.q[0] + 1.0), z.p}, cfg);
    CHECK(b.q[0] == a.q[0] + 1.0);
    CHECK(b.p[0] == a.p[0]);

    HamiltonianSpec HS = HamiltonianSpec::separable(
        Profile::quadratic(1.0), Profile::cosine(0.05), true);
    PhasePoint z2{Vec(0.8125), Vec(0.21)};
    PhasePoint a2 = time_one_map(HS, z2, cfg);
    PhasePoint b2 = time_one_map(HS, PhasePoint{Vec(z2.q[0] - 2.0), z2.p}, cfg);
    CHECK(b2.q[0] == a2.q[0] - 2.0);
    CHECK(b2.p[0] == a2.p[0]);

    // implicit midpoint path as well
    HamiltonianSpec HT = truncate_coercive(H, 2.0);
    FlowConfig mid;
    mid.integrator = Integrator::ImplicitMidpoint;
    PhasePoint a3 = time_one_map(HT, z, mid);
    PhasePoint b3 = time_one_map(HT, PhasePoint{Vec(z.q[0] + 1.0), z.p}, mid);
    CHECK(b3.q[0] == a3.q[0] + 1.0);
    CHECK(b3.p[0] == a3.p[0]);
}

TEST_CASE("symplectic residual of the time-one map") {
    HamiltonianSpec H = HamiltonianSpec::pendulum(0.08);
    FlowConfig cfg = splitting(16);
    for (double q0 : {0.1, 0.45, 0.8})
        for (double p0 : {-0.4, 0.2}) {
            double h = 1e-6;
            auto F = [&](double q, double p) {
                return time_one_map(H, PhasePoint{Vec(q), Vec(p)}, cfg);
            };
            PhasePoint fq1 = F(q0 + h, p0), fq0 = F(q0 - h, p0);
            PhasePoint fp1 = F(q0, p0 + h), fp0 = F(q0, p0 - h);
            double a = (fq1.q[0] - fq0.q[0]) / (2 * h), b = (fp1.q[0] - fp0.q[0]) / (2 * h);
            double c = (fq1.p[0] - fq0.p[0]) / (2 * h), d = (fp1.p[0] - fp0.p[0]) / (2 * h);
            double det = a * d - b * c;
            CHECK(std::abs(det - 1.0) <= 1e-5);
        }
}

TEST_CASE("energy conservation over long horizons") {
    HamiltonianSpec H = HamiltonianSpec::pendulum(0.05);
    for (int m : {16, 32}) {
        FlowConfig cfg = splitting(m);
        PhasePoint z{Vec(0.2), Vec(0.3)};
        double e0 = H.value(0.0, z.q, z.p);
        LiftedOrbit orb = iterate_lift(H, z, 64, cfg);
        double worst = 0;
        for (auto& s : orb.samples)
            worst = std::max(worst, std::abs(H.value(0.0, s.q, s.p) - e0));
        CHECK(worst <= 2.0 / (m * m));
    }
}

TEST_CASE("orbit action is consistent with the sample quadrature") {
    HamiltonianSpec H = HamiltonianSpec::pendulum(0.05);
    FlowConfig cfg = splitting(32);
    LiftedOrbit orb = iterate_lift(H, PhasePoint{Vec(0.1), Vec(0.4)}, 4, cfg);
    double quad = 0.0;
    for (size_t i = 0; i + 1 < orb.samples.size(); ++i) {
        double dt = orb.times[i + 1] - orb.times[i];
        double qd = (orb.samples[i + 1].q[0] - orb.samples[i].q[0]) / dt;
        const auto& z = orb.samples[i];
        const auto& w = orb.samples[i + 1];
        double h0 = H.value(orb.times[i], z.q, z.p), h1 = H.value(orb.times[i + 1], w.q, w.p);
        quad += dt * (0.5 * (z.p[0] + w.p[0]) * qd - 0.5 * (h0 + h1));
    }
    CHECK(orb.action == doctest::Approx(quad).epsilon(1e-3));
}

TEST_CASE("rotation vector") {
    HamiltonianSpec H0 = HamiltonianSpec::zero();
    LiftedOrbit o0 = iterate_lift(H0, PhasePoint{Vec(0.2), Vec(0.1)}, 5, splitting());
    CHECK(rotation_vector(o0)[0] == 0.0);

    HamiltonianSpec H = HamiltonianSpec::integrable(Profile::quadratic(1.0), true);
    LiftedOrbit o = iterate_lift(H, PhasePoint{Vec(0.0), Vec(0.5)}, 4, splitting());
    CHECK(rotation_vector(o)[0] == doctest::Approx(0.5).epsilon(1e-12));

    // libration inside the pendulum well has zero winding
    HamiltonianSpec HP = HamiltonianSpec::pendulum(0.1);
    LiftedOrbit ol = iterate_lift(HP, PhasePoint{Vec(0.1), Vec(0.0)}, 64, splitting());
    CHECK(std::abs(rotation_vector(ol)[0]) <= 0.02);
}

TEST_CASE("implicit midpoint matches splitting on a separable family") {
    HamiltonianSpec H = HamiltonianSpec::pendulum(0.05);
    PhasePoint z{Vec(0.3), Vec(0.25)};
    PhasePoint a = time_one_map(H, z, splitting(64));
    PhasePoint b = time_one_map(H, z, midpoint(64));
    CHECK(a.q[0] == doctest::Approx(b.q[0]).epsilon(5e-5));
    CHECK(a.p[0] == doctest::Approx(b.p[0]).epsilon(5e-5));
}

TEST_CASE("truncated flow agrees with the original inside the window") {
    HamiltonianSpec H = HamiltonianSpec::pendulum(0.04);
    HamiltonianSpec T = truncate_coercive(H, 2.0);
    FlowConfig cfg = midpoint(16);
    PhasePoint z{Vec(0.25), Vec(0.6)};
    LiftedOrbit a = iterate_lift(H, z, 6, cfg);
    LiftedOrbit b = iterate_lift(T, z, 6, cfg);
    CHECK(a.endpoint().q[0] == b.endpoint().q[0]);
    CHECK(a.endpoint().p[0] == b.endpoint().p[0]);
}
