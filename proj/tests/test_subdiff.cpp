#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symh/subdiff.hpp>

#include <cmath>
#include <random>

using namespace symh;
using namespace symh::subdiff;

namespace {

SampledFunction line_fn(double lo, double hi, int n, double (*fn)(double)) {
    SampledFunction f;
    Axis a;
    a.lo = lo;
    a.hi = hi;
    a.nodes = n;
    f.axes = {a};
    for (int i = 0; i < n; ++i) f.values.push_back(fn(a.coord(i)));
    return f;
}

double fabs_(double x) { return std::abs(x); }
double fneg_(double x) { return -std::abs(x); }
double fsmooth_(double x) { return 0.3 * x * x + 0.5 * x; }

std::vector<std::vector<double>> grid1(double lo, double hi, int n) {
    std::vector<std::vector<double>> g;
    for (int i = 0; i < n; ++i) g.push_back({lo + (hi - lo) * i / (n - 1)});
    return g;
}

}  // namespace

TEST_CASE("clarke_pl: textbook sets") {
    SampledFunction f = line_fn(-1, 1, 41, fabs_);
    auto P = clarke_pl(f, {0.0});
    CHECK(P.vertices.size() == 2);
    CHECK(P.vertices.front()[0] == doctest::Approx(-1.0));
    CHECK(P.vertices.back()[0] == doctest::Approx(1.0));
    CHECK(P.min_norm == doctest::Approx(0.0));

    // the Clarke hull ignores the max/min distinction
    SampledFunction g = line_fn(-1, 1, 41, fneg_);
    auto Pn = clarke_pl(g, {0.0});
    CHECK(Pn.vertices.front()[0] == doctest::Approx(-1.0));
    CHECK(Pn.vertices.back()[0] == doctest::Approx(1.0));

    // smooth function: singleton within grid tolerance
    SampledFunction s = line_fn(-1, 1, 81, fsmooth_);
    auto Ps = clarke_pl(s, {0.4});
    double expect = 0.3 * 2 * 0.4 + 0.5;
    for (auto& v : Ps.vertices) CHECK(v[0] == doctest::Approx(expect).epsilon(0.02));

    CHECK_THROWS_AS(clarke_pl(s, {-1.0}), BoundaryPoint);
}

TEST_CASE("clarke_pl scaling and sum rule") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        SampledFunction f, g;
        Axis a;
        a.lo = -1;
        a.hi = 1;
        a.nodes = 21;
        f.axes = {a};
        g.axes = {a};
        for (int i = 0; i < 21; ++i) {
            f.values.push_back(u(gen));
            g.values.push_back(u(gen));
        }
        double alpha = 0.7;
        SampledFunction fs = f;
        for (auto& v : fs.values) v *= alpha;
        auto Pf = clarke_pl(f, {0.05});
        auto Pfs = clarke_pl(fs, {0.05});
        CHECK(Pfs.vertices.front()[0] ==
              doctest::Approx(alpha * Pf.vertices.front()[0]).epsilon(1e-9));
        CHECK(Pfs.vertices.back()[0] ==
              doctest::Approx(alpha * Pf.vertices.back()[0]).epsilon(1e-9));

        SampledFunction sum = f;
        for (int i = 0; i < 21; ++i) sum.values[i] += g.values[i];
        auto Pg = clarke_pl(g, {0.05});
        auto Psum = clarke_pl(sum, {0.05});
        // Minkowski sum of intervals
        double lo = Pf.vertices.front()[0] + Pg.vertices.front()[0];
        double hi = Pf.vertices.back()[0] + Pg.vertices.back()[0];
        CHECK(Psum.vertices.front()[0] >= lo - 1e-9);
        CHECK(Psum.vertices.back()[0] <= hi + 1e-9);
    }
}

TEST_CASE("clarke_pl in two dimensions") {
    SampledFunction f;
    Axis a;
    a.lo = -1;
    a.hi = 1;
    a.nodes = 21;
    f.axes = {a, a};
    f.values.resize(f.size());
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) {
            double x = a.coord(i), y = a.coord(j);
            f.values[static_cast<size_t>(i) * 21 + j] = std::abs(x) + 0.5 * y;
        }
    auto P = clarke_pl(f, {0.0, 0.0});
    // hull spans gradients (-1, 0.5) .. (1, 0.5)
    CHECK(P.contains({0.0, 0.5}, 1e-6));
    CHECK(P.contains({0.9, 0.5}, 1e-6));
    CHECK(!P.contains({0.0, 0.0}, 0.2));
    CHECK(P.min_norm == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("strong_diff: kink, smooth point, plateau") {
    SampledFunction f = line_fn(-1, 1, 81, fabs_);
    auto P = strong_diff(f, {0.0}, grid1(-0.8, 0.8, 9));
    // every |alpha| < 1 keeps a strict local minimum at 0
    CHECK(P.detected.size() == 9);

    SampledFunction s = line_fn(-1, 1, 81, fsmooth_);
    auto Ps = strong_diff(s, {0.25}, grid1(-1.0, 1.0, 41));
    double gexp = 0.3 * 2 * 0.25 + 0.5;
    REQUIRE(!Ps.detected.empty());
    for (auto& al : Ps.detected) CHECK(std::abs(al[0] - gexp) < 0.08);

    SampledFunction z;
    Axis a;
    a.lo = -1;
    a.hi = 1;
    a.nodes = 41;
    z.axes = {a};
    z.values.assign(41, 0.0);
    auto Pz = strong_diff(z, {0.0}, {{0.0}});
    REQUIRE(Pz.detected.size() == 1);
    CHECK(Pz.degenerate_flags[0]);  // plateau: detected but non-isolated
}

TEST_CASE("limit_diff: one-sided limits of the kink") {
    SampledFunction f = line_fn(-1, 1, 161, fabs_);
    auto D = limit_diff(f, {0.0}, {0.2, 0.1, 0.05}, grid1(-1.2, 1.2, 25));
    bool has_p1 = false, has_m1 = false;
    for (auto& v : D.detected) {
        CHECK(v[0] >= -1.0 - 1e-9);
        CHECK(v[0] <= 1.0 + 1e-9);
        if (std::abs(v[0] - 1.0) < 1e-9) has_p1 = true;
        if (std::abs(v[0] + 1.0) < 1e-9) has_m1 = true;
    }
    CHECK(has_p1);
    CHECK(has_m1);

    SampledFunction s = line_fn(-1, 1, 161, fsmooth_);
    auto Ds = limit_diff(s, {0.25}, {0.2, 0.1, 0.05}, grid1(-1.0, 1.0, 81));
    double gexp = 0.3 * 2 * 0.25 + 0.5;
    for (auto& v : Ds.detected) CHECK(std::abs(v[0] - gexp) < 0.12);
}

TEST_CASE("containment chain strong <= limit <= clarke") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        SampledFunction f;
        Axis a;
        a.lo = -1;
        a.hi = 1;
        a.nodes = 33;
        f.axes = {a};
        for (int i = 0; i < 33; ++i) f.values.push_back(0.5 * u(gen));
        std::vector<double> x{a.coord(16)};
        auto C = clarke_pl(f, x);
        double h = a.step();
        double lip = 0.0;
        for (int i = 0; i + 1 < 33; ++i)
            lip = std::max(lip, std::abs(f.values[i + 1] - f.values[i]) / h);
        double tol = 2.0 * h * lip + 1e-9;
        auto gridA = grid1(C.vertices.front()[0] - 0.2, C.vertices.back()[0] + 0.2, 15);
        auto S = strong_diff(f, x, gridA);
        auto D = limit_diff(f, x, {3 * h, 2 * h}, gridA);
        for (auto& al : S.detected) {
            CHECK(D.contains(al, tol));
            CHECK(C.contains(al, tol));
        }
        for (auto& al : D.detected) CHECK(C.contains(al, tol));
    }
}

TEST_CASE("C0 convergence keeps strong differentials detectable nearby") {
    // f_k -> |x| in C0; 0.5 in d_s|.|(0) must be picked up at points x_k -> 0
    auto detected_near_zero = [&](double eps) {
        SampledFunction f;
        Axis a;
        a.lo = -1;
        a.hi = 1;
        a.nodes = 161;
        f.axes = {a};
        for (int i = 0; i < 161; ++i) {
            double x = a.coord(i);
            f.values.push_back(std::sqrt(x * x + eps * eps));
        }
        auto D = limit_diff(f, {0.0}, {0.15}, {{0.5}});
        return !D.detected.empty();
    };
    CHECK(detected_near_zero(0.0));
    CHECK(detected_near_zero(0.02));
    CHECK(detected_near_zero(0.08));
}

TEST_CASE("ball inclusion for compactly supported bumps") {
    // negative bump with sup norm 1 on [-1, 1]
    SampledFunction f;
    Axis a;
    a.lo = -1;
    a.hi = 1;
    a.nodes = 101;
    f.axes = {a};
    for (int i = 0; i < 101; ++i) {
        double x = a.coord(i);
        f.values.push_back(-cutoff_c2(std::abs(x) / 0.8));
    }
    auto rep = ball_inclusion_check(f, 11);
    CHECK(rep.failures == 0);
    int inside = 0;
    for (auto& r : rep.rows)
        if (r.in_ball) {
            ++inside;
            CHECK(r.certified);
            CHECK(!r.witness_x.empty());
        }
    CHECK(inside > 0);

    SampledFunction z = f;
    z.values.assign(z.values.size(), 0.0);
    CHECK_THROWS_AS(ball_inclusion_check(z, 5), ConstantFunction);
}

TEST_CASE("lambda_f lower semicontinuity along refining grids") {
    // refining the grid must not raise the min-norm at a kink in the limit
    double prev = 1e300;
    for (int n : {21, 41, 81, 161}) {
        SampledFunction f = line_fn(-1, 1, n, fabs_);
        auto P = clarke_pl(f, {0.0});
        CHECK(P.min_norm <= prev + 1e-12);
        prev = P.min_norm;
    }
    CHECK(prev == doctest::Approx(0.0));
}
