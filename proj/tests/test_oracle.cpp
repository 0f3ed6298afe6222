#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symh/oracle.hpp>

#include <cmath>
#include <random>

using namespace symh;
using namespace symh::oracle;
using namespace symh::dynamics;
using selector::ClassKind;

TEST_CASE("lax-oleinik: free kinetic energy gives P^2/2") {
    HamiltonianSpec H = HamiltonianSpec::integrable(Profile::quadratic(1.0), true);
    for (double P : {0.0, 0.5, -0.8}) {
        double v = lax_oleinik_effham(H, P);
        CHECK(std::abs(v - P * P / 2) < 1e-3);
    }
}

TEST_CASE("lax-oleinik: mechanical Hamiltonian at P = 0 gives max V") {
    const double a = 0.08;
    HamiltonianSpec H = HamiltonianSpec::pendulum(a);
    double v = lax_oleinik_effham(H, 0.0);
    CHECK(std::abs(v - a) < 1e-2);
}

TEST_CASE("lax-oleinik rejects nonconvex momentum profiles") {
    HamiltonianSpec H = HamiltonianSpec::integrable(Profile::double_well(0.5, 0.8), true);
    CHECK_THROWS_AS(lax_oleinik_effham(H, 0.0), NonConvexInput);
}

TEST_CASE("pendulum action integral: plateau and perturbative limit") {
    const double a = 0.04;
    auto r0 = pendulum_effham(a, 0.0);
    CHECK(r0.value == doctest::Approx(a));
    CHECK(r0.p_c == doctest::Approx((2.0 / M_PI) * std::sqrt(2.0 * a)).epsilon(1e-3));

    // inside the plateau
    CHECK(pendulum_effham(a, 0.5 * r0.p_c).value == doctest::Approx(a));
    // far outside: behaves like the free Hamiltonian
    CHECK(pendulum_effham(a, 2.0).value == doctest::Approx(2.0).epsilon(0.05));

    // amplitude -> 0: uniform convergence to P^2/2 on compacts
    for (double P : {0.3, 0.8, 1.5}) {
        double prev_err = 1e300;
        for (double amp : {0.04, 0.01, 0.0025}) {
            double err = std::abs(pendulum_effham(amp, P).value - P * P / 2);
            CHECK(err < prev_err + 1e-12);
            prev_err = err;
        }
        CHECK(prev_err < 5e-3);
    }
}

TEST_CASE("cross-oracle agreement on the pendulum family") {
    const double a = 0.06;
    HamiltonianSpec H = HamiltonianSpec::pendulum(a);
    for (double P : {0.0, 0.3, 0.9, 1.6, 2.0}) {
        double lo = lax_oleinik_effham(H, P);
        double ai = pendulum_effham(a, P).value;
        CHECK(std::abs(lo - ai) < 1e-2);
    }
}

TEST_CASE("convexity of the output table for convex input") {
    HamiltonianSpec H = HamiltonianSpec::pendulum(0.05);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(-2.0 + 4.0 * i / 20);
    EffHamTable t = pendulum_table(0.05, grid);
    CHECK(t.convexity_violations(1e-8) == 0);
}

namespace {

genfunc::GeneratingLandscape random_tiny(std::mt19937_64& gen, int dim) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    genfunc::GeneratingLandscape L;
    for (int d = 0; d < dim; ++d) {
        Axis a;
        if (d == 0) {
            a.lo = 0;
            a.hi = 1;
            a.nodes = dim == 3 ? 8 : 10;
            a.periodic = true;
        } else {
            a.lo = -1;
            a.hi = 1;
            a.nodes = dim == 3 ? 6 : 9;
            std::uniform_int_distribution<int> coin(0, 3);
            if (coin(gen) == 0) a.cone_lo = a.cone_hi = true;
        }
        L.f.axes.push_back(a);
    }
    L.f.values.resize(L.f.size());
    for (auto& v : L.f.values) v = u(gen);
    for (auto& a : L.f.axes)
        if (a.cone_lo) ++L.sampled_negative;
    return L;
}

}  // namespace

TEST_CASE("selector equals the exhaustive oracle on tiny landscapes") {
    std::mt19937_64 gen(42);
    int checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
        int dim = 1 + trial % 3;
        genfunc::GeneratingLandscape L = random_tiny(gen, dim);
        for (ClassKind cls : {ClassKind::Fundamental, ClassKind::Unit}) {
            double a, b;
            try {
                a = selector::minimax(L, cls);
            } catch (const ClassNotFound&) {
                continue;
            }
            b = brute_force_minimax(L, cls);
            CHECK(a == b);  // bit-for-bit
            ++checked;
        }
    }
    CHECK(checked >= 12);
}

TEST_CASE("oracle guards its size contract") {
    std::mt19937_64 gen(1);
    genfunc::GeneratingLandscape L;
    Axis a;
    a.lo = 0;
    a.hi = 1;
    a.nodes = 40;
    a.periodic = true;
    Axis b = a;
    b.periodic = false;
    Axis c = a;
    c.periodic = false;
    L.f.axes = {a, b, c};
    L.f.values.assign(L.f.size(), 0.0);
    CHECK_THROWS_AS(brute_force_minimax(L, ClassKind::Unit), TooLarge);
}
