#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symh/oracle.hpp>
#include <symh/selector.hpp>

#include <cmath>

using namespace symh;
using namespace symh::selector;
using namespace symh::dynamics;
using genfunc::GeneratingLandscape;
using genfunc::LandscapeGrids;

namespace {

FlowConfig splitting(int m = 16) {
    FlowConfig c;
    c.integrator = Integrator::SplittingSeparable;
    c.substeps_per_unit_time = m;
    return c;
}

GeneratingLandscape circle_landscape(const std::vector<double>& vals) {
    GeneratingLandscape L;
    Axis a;
    a.lo = 0;
    a.hi = 1;
    a.nodes = static_cast<int>(vals.size());
    a.periodic = true;
    L.f.axes = {a};
    L.f.values = vals;
    return L;
}

}  // namespace

TEST_CASE("extreme classes on a closed manifold: c(mu) = max, c(1) = min") {
    GeneratingLandscape L = circle_landscape({0.3, -1.0, 0.2, 2.0, 0.7, -0.4});
    CHECK(minimax(L, ClassKind::Fundamental) == doctest::Approx(2.0));
    CHECK(minimax(L, ClassKind::Unit) == doctest::Approx(-1.0));
    CHECK(minimax(L, ClassKind::Unit) <= minimax(L, ClassKind::Fundamental));
}

TEST_CASE("H == 0 landscape selects 0 for both classes") {
    LandscapeGrids g;
    g.x_nodes = 12;
    for (int k : {1, 2, 4}) {
        GeneratingLandscape L =
            genfunc::build_landscape(HamiltonianSpec::zero(), k, Vec(0.1), g);
        CHECK(minimax(L, ClassKind::Fundamental) == doctest::Approx(0.0));
        CHECK(minimax(L, ClassKind::Unit) == doctest::Approx(0.0));
    }
}

TEST_CASE("homogenize: integrable fixed point h_k = H") {
    Profile prof = Profile::quadratic(1.0);
    HamiltonianSpec H = truncate_coercive(HamiltonianSpec::integrable(prof, true), 2.0);
    std::vector<double> p_grid;
    for (int i = 0; i <= 16; ++i) p_grid.push_back(-1.5 + 3.0 * i / 16);
    HomogenizeOptions opt;
    opt.grids.x_nodes = 16;
    opt.with_uncertainty = false;
    auto rep = homogenize(H, {1, 2, 4}, p_grid, opt);
    for (auto& t : rep.tables)
        for (size_t i = 0; i < p_grid.size(); ++i)
            CHECK(std::abs(t.values[i] - p_grid[i] * p_grid[i] / 2) < 1e-3);
    // Cauchy differences are tiny in the integrable case
    for (double d : rep.cauchy_sup_diffs) CHECK(d < 1e-6);
    // normalization: homogenize(H + c) = homogenize(H) + c exactly
    HamiltonianSpec Hc = H;
    Hc.offset = 0.25;
    auto repc = homogenize(Hc, {1, 2}, p_grid, opt);
    for (size_t i = 0; i < p_grid.size(); ++i)
        CHECK(repc.tables[0].values[i] == rep.tables[0].values[i] + 0.25);
}

TEST_CASE("pendulum h_k across routes: coercive chain vs truncated shooting") {
    // the same dynamics charted by two different reduction routes must agree;
    // the shooting chart needs momentum-return monotonicity, so the amplitude
    // stays small enough that k steps rotate below a quarter turn
    const double a = 0.002;
    HamiltonianSpec HP = HamiltonianSpec::pendulum(a);
    HamiltonianSpec HT = truncate_coercive(HP, 1.6);
    LandscapeGrids g;
    g.x_nodes = 48;
    g.fiber_nodes = 33;
    FlowConfig mid;
    mid.integrator = Integrator::ImplicitMidpoint;
    genfunc::LandscapeFamily chain(HP, splitting(), g);
    genfunc::LandscapeFamily shoot(HT, mid, g);
    for (double y : {0.0, 0.15}) {
        for (int k : {2, 4}) {
            GeneratingLandscape Lc = chain.build(k, Vec(y));
            GeneratingLandscape Ls = shoot.build(k, Vec(y));
            INFO("k=", k, " y=", y, " routes ", Lc.route, " vs ", Ls.route);
            CHECK(Lc.route != Ls.route);
            double vc = minimax(Lc, ClassKind::Fundamental);
            double vs = minimax(Ls, ClassKind::Fundamental);
            CHECK(std::abs(vc - vs) < 1e-3);
        }
    }
}

TEST_CASE("monotonicity: ordered Hamiltonians give ordered selectors") {
    Profile base = Profile::quadratic(1.0);
    HamiltonianSpec H1 = truncate_coercive(HamiltonianSpec::integrable(base, true), 2.0);
    // H2 = H1 + nonnegative momentum bump
    Profile bump = Profile::bump(0.2, 0.5, 0.2);
    std::vector<double> samples;
    const int N = 257;
    for (int i = 0; i < N; ++i) {
        double p = -3.2 + 6.4 * i / (N - 1);
        samples.push_back(cutoff_c2(std::abs(p) - 2.0) * (p * p / 2) + bump.eval(p));
    }
    HamiltonianSpec H2 =
        HamiltonianSpec::integrable(Profile::from_samples(-3.2, 3.2, samples, false), false, 3.2);
    LandscapeGrids g;
    g.x_nodes = 12;
    for (int k : {1, 2, 4})
        for (double y : {-0.5, 0.2, 0.4}) {
            double v1 = minimax(genfunc::build_landscape(H1, k, Vec(y), g),
                                ClassKind::Fundamental);
            double v2 = minimax(genfunc::build_landscape(H2, k, Vec(y), g),
                                ClassKind::Fundamental);
            CHECK(v1 <= v2 + 1e-6);
        }
}

TEST_CASE("capacities: identity map gives (0, 0)") {
    auto c = capacities(HamiltonianSpec::zero(), 3);
    CHECK(c.c_plus == doctest::Approx(0.0));
    CHECK(c.c_minus == doctest::Approx(0.0));
}

TEST_CASE("capacities: nonpositive bump has c_plus > 0 at k = 1") {
    // H <= 0 compact: constant orbits carry action -H >= 0
    HamiltonianSpec H =
        HamiltonianSpec::integrable(Profile::bump(-0.1, 0.4), false, 0.4);
    auto c = capacities(H, 1);
    CHECK(c.c_plus == doctest::Approx(0.1).epsilon(0.05));
    CHECK(c.c_minus <= 1e-9);
    CHECK(c.c_minus >= -1e-4);  // interpolation ripple scale
    CHECK(c.c_minus <= c.c_plus);
}

TEST_CASE("capacity sequence (1/k) c_plus stays bounded for a saddle bump") {
    CustomGridData g;
    g.nt = 1;
    g.nq = 32;
    g.np = 65;
    g.p_lo = -1.0;
    g.p_hi = 1.0;
    g.values.resize(static_cast<size_t>(g.nq) * g.np);
    for (int iq = 0; iq < g.nq; ++iq)
        for (int ip = 0; ip < g.np; ++ip) {
            double q = static_cast<double>(iq) / g.nq;
            double p = -1.0 + 2.0 * ip / (g.np - 1);
            double bump = cutoff_c2(std::abs(p) / 0.6);
            g.values[static_cast<size_t>(iq) * g.np + ip] =
                0.004 * std::cos(2 * M_PI * q) * bump;
        }
    HamiltonianSpec H = HamiltonianSpec::custom(g);
    FlowConfig mid;
    mid.integrator = Integrator::ImplicitMidpoint;
    LandscapeGrids lg;
    lg.x_nodes = 32;
    lg.fiber_nodes = 49;
    double prev = 1e300;
    int non_increase = 0;
    for (int k : {1, 2, 4, 8}) {
        auto c = capacities(H, k, lg, mid);
        double val = c.c_plus / k;
        CHECK(val > 0.0);
        CHECK(val < 0.01);
        if (val <= prev + 2e-3) ++non_increase;
        prev = val;
    }
    CHECK(non_increase >= 3);  // non-increasing trend within tolerance
}

TEST_CASE("strong critical values: cubic, plateau, Morse") {
    // sampled x^3: monotone, no interior strong value (ends excluded)
    SampledFunction cubic;
    Axis a;
    a.lo = -1;
    a.hi = 1;
    a.nodes = 41;
    cubic.axes = {a};
    for (int i = 0; i < 41; ++i) {
        double x = a.coord(i);
        cubic.values.push_back(x * x * x);
    }
    auto sv = strong_critical_values(cubic);
    for (auto& s : sv) CHECK(std::abs(s.value) > 0.2);  // 0 is never reported

    // plateau: f < 0 left, 0 on the middle, > 0 right: no strong value at 0
    SampledFunction plat;
    plat.axes = {a};
    for (int i = 0; i < 41; ++i) {
        double x = a.coord(i);
        plat.values.push_back(x < -0.5 ? (x + 0.5) : (x > 0.5 ? (x - 0.5) : 0.0));
    }
    auto sp = strong_critical_values(plat);
    for (auto& s : sp) CHECK(std::abs(s.value) > 1e-9);

    // smooth Morse function on the circle: all four critical values reported
    SampledFunction morse;
    Axis c;
    c.lo = 0;
    c.hi = 1;
    c.nodes = 256;
    c.periodic = true;
    morse.axes = {c};
    for (int i = 0; i < 256; ++i) {
        double x = c.coord(i);
        morse.values.push_back(std::cos(2 * M_PI * x) + 0.4 * std::cos(4 * M_PI * x));
    }
    auto sm = strong_critical_values(morse);
    // hand enumeration: 2 maxima, 2 minima, all distinct values
    double got[4] = {1e9, 1e9, 1e9, 1e9};
    std::vector<double> crit;
    for (int i = 0; i < 256; ++i) {
        double prev = morse.values[(i + 255) % 256], cur = morse.values[i],
               nxt = morse.values[(i + 1) % 256];
        if ((cur > prev && cur > nxt) || (cur < prev && cur < nxt)) crit.push_back(cur);
    }
    CHECK(crit.size() == 4);
    for (double cv : crit) {
        bool found = false;
        for (auto& s : sm)
            if (std::abs(s.value - cv) < 1e-9) found = true;
        CHECK(found);
    }
    (void)got;
}

TEST_CASE("barcode convergence for the pendulum family") {
    const double a = 0.01;
    HamiltonianSpec H = HamiltonianSpec::pendulum(a);
    LandscapeGrids g;
    g.x_nodes = 48;
    g.fiber_nodes = 33;
    genfunc::LandscapeFamily fam(H, splitting(), g);
    double y = 0.05;
    std::vector<PersistenceDiagram> dias;
    for (int k : {1, 2, 4, 8}) dias.push_back(sublevel_persistence(fam.build(k, Vec(y))));
    double d12 = bottleneck_distance(dias[0], dias[1]);
    double d24 = bottleneck_distance(dias[1], dias[2]);
    double d48 = bottleneck_distance(dias[2], dias[3]);
    INFO("distances ", d12, " ", d24, " ", d48);
    CHECK(d24 <= d12 + 1e-3);
    CHECK(d48 <= d24 + 1e-3);
}
