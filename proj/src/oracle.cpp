#include <symh/oracle.hpp>
#include <symh/io.hpp>

#include <algorithm>
#include <cmath>

namespace symh::oracle {

// ---------------------------------------------------------------------------
// Lax-Oleinik cell problem
// ---------------------------------------------------------------------------

static void convexity_gate(const HamiltonianSpec& H, double window) {
    Vec q = Vec::zero(1), p1 = Vec::zero(1), p2 = Vec::zero(1), pm = Vec::zero(1);
    for (int iq = 0; iq < 16; ++iq) {
        q[0] = iq / 16.0;
        for (int i = 0; i <= 24; ++i)
            for (int j = i + 1; j <= 24; ++j) {
                p1[0] = -window + 2 * window * i / 24.0;
                p2[0] = -window + 2 * window * j / 24.0;
                pm[0] = 0.5 * (p1[0] + p2[0]);
                double lhs = H.value_base(0.0, q, pm);
                double rhs = 0.5 * (H.value_base(0.0, q, p1) + H.value_base(0.0, q, p2));
                if (lhs > rhs + 1e-9 + 1e-9 * std::abs(rhs))
                    throw NonConvexInput("H is not convex in p on the window");
            }
    }
}

double lax_oleinik_effham(const HamiltonianSpec& H, double P, const LaxOleinikOptions& opt,
                          double* residual) {
    if (H.n != 1) throw NonConvexInput("cell problem implemented for n = 1");
    convexity_gate(H, opt.v_max);

    const int NQ = opt.q_nodes, NV = opt.v_controls;
    // Legendre transform L(q, v) = sup_p (v p - H(q, p)) on a p-grid + refine.
    std::vector<double> L(static_cast<size_t>(NQ) * NV);
    Vec q = Vec::zero(1), p = Vec::zero(1);
    const int NP = 192;
    for (int iq = 0; iq < NQ; ++iq) {
        q[0] = static_cast<double>(iq) / NQ;
        for (int iv = 0; iv < NV; ++iv) {
            double v = -opt.v_max + 2.0 * opt.v_max * iv / (NV - 1);
            double best = -1e300;
            double bp = 0;
            for (int ip = 0; ip <= NP; ++ip) {
                p[0] = -opt.v_max + 2.0 * opt.v_max * ip / NP;
                double val = v * p[0] - H.value_base(0.0, q, p);
                if (val > best) {
                    best = val;
                    bp = p[0];
                }
            }
            // golden refinement around the grid maximizer
            double a = bp - 2.0 * opt.v_max / NP, b = bp + 2.0 * opt.v_max / NP;
            for (int it = 0; it < 40; ++it) {
                double m1 = a + 0.382 * (b - a), m2 = a + 0.618 * (b - a);
                p[0] = m1;
                double f1 = v * m1 - H.value_base(0.0, q, p);
                p[0] = m2;
                double f2 = v * m2 - H.value_base(0.0, q, p);
                if (f1 < f2) a = m1;
                else b = m2;
            }
            p[0] = 0.5 * (a + b);
            best = std::max(best, v * p[0] - H.value_base(0.0, q, p));
            L[static_cast<size_t>(iq) * NV + iv] = best;
        }
    }

    // value iteration u <- min_v [ u(q - v dt) + dt (L(q - v dt, v) - P v) ]
    std::vector<double> u(NQ, 0.0), un(NQ, 0.0);
    auto u_at = [&](const std::vector<double>& w, double x) {
        double s = (x - std::floor(x)) * NQ;
        int i = static_cast<int>(s);
        if (i >= NQ) i = NQ - 1;
        double t = s - i;
        return (1 - t) * w[i] + t * w[(i + 1) % NQ];
    };
    auto L_at = [&](double x, int iv) {
        double s = (x - std::floor(x)) * NQ;
        int i = static_cast<int>(s);
        if (i >= NQ) i = NQ - 1;
        double t = s - i;
        return (1 - t) * L[static_cast<size_t>(i) * NV + iv] +
               t * L[static_cast<size_t>((i + 1) % NQ) * NV + iv];
    };
    double drift = 0.0;
    double res = 1e300;
    for (int it = 0; it < opt.iters; ++it) {
        double dmin = 1e300, dmax = -1e300;
        for (int iq = 0; iq < NQ; ++iq) {
            double x = static_cast<double>(iq) / NQ;
            double best = 1e300;
            for (int iv = 0; iv < NV; ++iv) {
                double v = -opt.v_max + 2.0 * opt.v_max * iv / (NV - 1);
                double xa = x - v * opt.dt;
                double cand = u_at(u, xa) + opt.dt * (L_at(xa, iv) - P * v);
                best = std::min(best, cand);
            }
            un[iq] = best;
            double d = un[iq] - u[iq];
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        drift = 0.5 * (dmin + dmax) / opt.dt;
        res = (dmax - dmin) / opt.dt;
        double mean = 0;
        for (double v : un) mean += v;
        mean /= NQ;
        for (int iq = 0; iq < NQ; ++iq) u[iq] = un[iq] - mean;
        if (it > 50 && res < 1e-10) break;
    }
    if (residual) *residual = res;
    return -drift;
}

EffHamTable lax_oleinik_table(const HamiltonianSpec& H, const std::vector<double>& p_grid,
                              const LaxOleinikOptions& opt) {
    EffHamTable t;
    t.method = EffHamMethod::LaxOleinik;
    t.p_grid = p_grid;
    double worst = 0.0;
    for (double P : p_grid) {
        double r = 0.0;
        t.values.push_back(lax_oleinik_effham(H, P, opt, &r));
        worst = std::max(worst, r);
    }
    t.residual = worst;
    return t;
}

std::string EffHamTable::to_csv() const {
    CsvTable t;
    t.header = {"p", "value"};
    for (size_t i = 0; i < p_grid.size(); ++i)
        t.rows.push_back({format_g17(p_grid[i]), format_g17(values[i])});
    return t.to_string();
}

int EffHamTable::convexity_violations(double tol) const {
    int bad = 0;
    for (size_t i = 1; i + 1 < values.size(); ++i)
        if (values[i] > 0.5 * (values[i - 1] + values[i + 1]) + tol) ++bad;
    return bad;
}

// ---------------------------------------------------------------------------
// Pendulum action integral
// ---------------------------------------------------------------------------

static double pendulum_P_of_E(double a, double E) {
    // V(q) = a (1 - cos 2 pi q) / 2; P(E) = int_0^1 sqrt(2(E - V)) dq
    const int N = 512;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        double q = (i + 0.5) / N;
        double V = a * (1.0 - std::cos(2.0 * M_PI * q)) / 2.0;
        acc += std::sqrt(std::max(0.0, 2.0 * (E - V)));
    }
    return acc / N;
}

PendulumEffHam pendulum_effham(double amplitude, double P) {
    PendulumEffHam r;
    r.plateau_value = amplitude;
    r.p_c = pendulum_P_of_E(amplitude, amplitude);
    double aP = std::abs(P);
    if (aP <= r.p_c) {
        r.value = amplitude;
        return r;
    }
    double lo = amplitude, hi = std::max(2.0 * amplitude + 1.0, aP * aP * 2.0 + amplitude);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (pendulum_P_of_E(amplitude, mid) < aP) lo = mid;
        else hi = mid;
    }
    r.value = 0.5 * (lo + hi);
    return r;
}

EffHamTable pendulum_table(double amplitude, const std::vector<double>& p_grid) {
    EffHamTable t;
    t.method = EffHamMethod::ActionIntegral;
    t.p_grid = p_grid;
    for (double P : p_grid) t.values.push_back(pendulum_effham(amplitude, P).value);
    t.residual = 0.0;
    return t;
}

// ---------------------------------------------------------------------------
// brute-force minimax
// ---------------------------------------------------------------------------

double brute_force_minimax(const GeneratingLandscape& L, selector::ClassKind cls) {
    if (L.f.dim() > 3) throw TooLarge("more than 3 free variables");
    if (L.f.size() > 1729) throw TooLarge("more than 12^3 cells");
    bool murel = false;
    int target = L.sampled_negative;
    if (cls == selector::ClassKind::Fundamental) {
        for (auto& a : L.f.axes) {
            if (a.periodic) ++target;
            if (a.murel_lo || a.murel_hi) {
                ++target;
                murel = true;
            }
        }
    }
    int full_rank = selector::relative_image_rank(L.f, murel, target, selector::INF);
    if (full_rank < 1) throw ClassNotFound("oracle: class absent in the full complex");

    std::vector<double> levels(L.f.values);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    // image rank is monotone in the level: binary search the first birth
    size_t lo = 0, hi = levels.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (selector::relative_image_rank(L.f, murel, target, levels[mid]) >= 1)
            hi = mid;
        else
            lo = mid + 1;
    }
    return levels[lo];
}

}  // namespace symh::oracle
