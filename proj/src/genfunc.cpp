#include <symh/genfunc.hpp>
#include <symh/io.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <cstdlib>

namespace symh::genfunc {

using dynamics::flow_steps;
using dynamics::StepPieces;

// ---------------------------------------------------------------------------
// Local Catmull-Rom tensor evaluation for the two table types.
// ---------------------------------------------------------------------------

static inline void crw(double t, double w[4]) {
    w[0] = 0.5 * (-t + 2 * t * t - t * t * t);
    w[1] = 0.5 * (2 - 5 * t * t + 3 * t * t * t);
    w[2] = 0.5 * (t + 4 * t * t - 3 * t * t * t);
    w[3] = 0.5 * (-t * t + t * t * t);
}
static inline void crdw(double t, double w[4]) {
    w[0] = 0.5 * (-1 + 4 * t - 3 * t * t);
    w[1] = 0.5 * (-10 * t + 9 * t * t);
    w[2] = 0.5 * (1 + 8 * t - 9 * t * t);
    w[3] = 0.5 * (-2 * t + 3 * t * t);
}

// 2D table: axis0 periodic over [0,1) with n0 cells, axis1 clamped [lo1,hi1] n1 nodes.
static double table_eval(const std::vector<double>& g, int n0, int n1, double lo1, double hi1,
                         double x0, double x1, int daxis) {
    double u = x0 - std::floor(x0);
    double s0 = u * n0;
    int i0 = static_cast<int>(s0);
    if (i0 >= n0) i0 = n0 - 1;
    double t0 = s0 - i0;

    double s1 = (x1 - lo1) / (hi1 - lo1) * (n1 - 1);
    int i1;
    double t1;
    if (s1 <= 0) {
        i1 = 0;
        t1 = s1;
    } else if (s1 >= n1 - 1) {
        i1 = n1 - 2;
        t1 = s1 - (n1 - 2);
    } else {
        i1 = static_cast<int>(s1);
        t1 = s1 - i1;
    }
    double w0[4], w1[4];
    if (daxis == 0) crdw(t0, w0); else crw(t0, w0);
    if (daxis == 1) crdw(t1, w1); else crw(t1, w1);
    double acc = 0;
    for (int a = 0; a < 4; ++a) {
        int ia = ((i0 + a - 1) % n0 + n0) % n0;
        for (int b = 0; b < 4; ++b) {
            int ib = std::clamp(i1 + b - 1, 0, n1 - 1);
            acc += w0[a] * w1[b] * g[static_cast<size_t>(ia) * n1 + ib];
        }
    }
    if (daxis == 0) acc *= n0;
    if (daxis == 1) acc *= (n1 - 1) / (hi1 - lo1);
    return acc;
}

double StepGenFun::at(const std::vector<double>& g, double q, double P, int daxis) const {
    return table_eval(g, nq, np, p_lo, p_hi, q, P, daxis);
}

double DiscreteLagrangian::at(const std::vector<double>& g, double q, double dq,
                              int daxis) const {
    return table_eval(g, nq, nd, d_lo, d_hi, q, dq, daxis);
}

// ---------------------------------------------------------------------------
// step_genfunc
// ---------------------------------------------------------------------------

StepGenFun step_genfunc(const HamiltonianSpec& H, double t0, double dt, const FlowConfig& cfg,
                        int nq, int np, double p_pad) {
    if (H.n != 1) throw GridBudgetExceeded("step tables are built for n = 1");
    HamiltonianSpec Hb = H;
    Hb.offset = 0.0;  // offsets are folded in symbolically by landscape assembly
    double R = H.coercive ? 2.5 : H.support_radius;
    StepGenFun T;
    T.t0 = t0;
    T.dt = dt;
    T.nq = nq;
    T.np = np;
    T.p_lo = -(R + p_pad);
    T.p_hi = R + p_pad;
    T.S.assign(static_cast<size_t>(nq) * np, 0.0);
    T.p_in.assign(T.S.size(), 0.0);
    T.drift.assign(T.S.size(), 0.0);

    // Contraction gate: the momentum-out map p -> mom(Phi_dt(q, p)) must stay
    // close to the identity; otherwise (q, P) does not chart the step.
    for (int iq = 0; iq < 5; ++iq)
        for (int ip = 0; ip <= 6; ++ip) {
            double q = iq / 5.0;
            double p = T.p_lo + (T.p_hi - T.p_lo) * ip / 6.0;
            double h = 1e-5;
            PhasePoint a{Vec(q), Vec(p - h)}, b{Vec(q), Vec(p + h)};
            double ma = flow_steps(Hb, t0, dt, a, cfg).out.p[0];
            double mb = flow_steps(Hb, t0, dt, b, cfg).out.p[0];
            double der = (mb - ma) / (2 * h);
            if (std::abs(der - 1.0) > 0.6)
                throw NoGeneratingFunction("momentum map not contracting; shrink dt");
        }

    for (int iq = 0; iq < nq; ++iq) {
        double q = static_cast<double>(iq) / nq;
        double warm = T.p_lo;
        for (int ip = 0; ip < np; ++ip) {
            double P = T.p_lo + (T.p_hi - T.p_lo) * ip / (np - 1);
            double p = ip == 0 ? P : warm + (T.p_hi - T.p_lo) / (np - 1);
            StepPieces piece{};
            bool done = false;
            for (int it = 0; it < 60; ++it) {
                piece = flow_steps(Hb, t0, dt, PhasePoint{Vec(q), Vec(p)}, cfg);
                double r = piece.out.p[0] - P;
                if (std::abs(r) < 1e-12) {
                    done = true;
                    break;
                }
                double h = 1e-7 * std::max(1.0, std::abs(p));
                StepPieces pp = flow_steps(Hb, t0, dt, PhasePoint{Vec(q), Vec(p + h)}, cfg);
                double der = (pp.out.p[0] - piece.out.p[0]) / h;
                if (std::abs(der) < 0.25) throw NoGeneratingFunction("degenerate momentum map");
                p -= r / der;
            }
            if (!done) throw NoGeneratingFunction("momentum solve did not converge");
            warm = p;
            size_t id = static_cast<size_t>(iq) * np + ip;
            T.S[id] = piece.genfun;
            T.p_in[id] = p;
            T.drift[id] = piece.out.q[0] - q;
        }
    }

    // Residual: finite differences of S against the defining relations.
    double res = 0.0;
    double hq = 1.0 / nq, hp = (T.p_hi - T.p_lo) / (np - 1);
    for (int iq = 0; iq < nq; ++iq)
        for (int ip = 2; ip < np - 2; ++ip) {
            size_t id = static_cast<size_t>(iq) * np + ip;
            size_t iqm = static_cast<size_t>((iq + nq - 1) % nq) * np + ip;
            size_t iqp = static_cast<size_t>((iq + 1) % nq) * np + ip;
            double Sq = (T.S[iqp] - T.S[iqm]) / (2 * hq);
            double SP = (T.S[id + 1] - T.S[id - 1]) / (2 * hp);
            double P = T.p_lo + hp * ip;
            res = std::max(res, std::abs(Sq - (T.p_in[id] - P)));
            res = std::max(res, std::abs(SP - T.drift[id]));
        }
    T.iteration_residual = res;
    return T;
}

// ---------------------------------------------------------------------------
// Discrete Lagrangian of the unit-time map (twist charting).
// ---------------------------------------------------------------------------

static DiscreteLagrangian build_lagrangian(const HamiltonianSpec& H, const FlowConfig& cfg,
                                           double d_max, int nq, int nd) {
    if (H.n != 1) throw GridBudgetExceeded("Lagrangian tables are built for n = 1");
    HamiltonianSpec Hb = H;
    Hb.offset = 0.0;
    DiscreteLagrangian T;
    T.nq = nq;
    T.nd = nd;
    T.d_lo = -d_max;
    T.d_hi = d_max;
    T.L.assign(static_cast<size_t>(nq) * nd, 0.0);
    T.p0.assign(T.L.size(), 0.0);
    T.p1.assign(T.L.size(), 0.0);
    double twist_sign = 0.0;
    for (int iq = 0; iq < nq; ++iq) {
        double q = static_cast<double>(iq) / nq;
        double warm = T.d_lo;
        for (int id = 0; id < nd; ++id) {
            double dq = T.d_lo + (T.d_hi - T.d_lo) * id / (nd - 1);
            double w = id == 0 ? dq : warm;
            StepPieces piece{};
            bool done = false;
            for (int it = 0; it < 80; ++it) {
                piece = flow_steps(Hb, 0.0, 1.0, PhasePoint{Vec(q), Vec(w)}, cfg);
                double r = (piece.out.q[0] - q) - dq;
                if (std::abs(r) < 1e-12) {
                    done = true;
                    break;
                }
                double h = 1e-7 * std::max(1.0, std::abs(w));
                StepPieces pp = flow_steps(Hb, 0.0, 1.0, PhasePoint{Vec(q), Vec(w + h)}, cfg);
                double der = (pp.out.q[0] - piece.out.q[0]) / h;
                if (std::abs(der) < 1e-4)
                    throw NoGeneratingFunction("twist condition fails for position charting");
                if (twist_sign == 0.0) twist_sign = der > 0 ? 1.0 : -1.0;
                if (der * twist_sign < 0)
                    throw NoGeneratingFunction("twist sign change across the window");
                w -= r / der;
            }
            if (!done) throw NoGeneratingFunction("position solve did not converge");
            warm = w;
            size_t idd = static_cast<size_t>(iq) * nd + id;
            T.L[idd] = -piece.action;
            T.p0[idd] = w;
            T.p1[idd] = piece.out.p[0];
        }
    }
    return T;
}

// ---------------------------------------------------------------------------
// LandscapeFamily
// ---------------------------------------------------------------------------

LandscapeFamily::LandscapeFamily(HamiltonianSpec H, FlowConfig cfg, LandscapeGrids grids)
    : H_(std::move(H)), cfg_(cfg), grids_(grids) {
    offset_ = H_.offset;
    H_.offset = 0.0;
    H_.validate();
}

int LandscapeFamily::coupling_index(int n, int k) { return n * (k - 1); }

const StepGenFun& LandscapeFamily::unit_table(double center, double halfwidth) const {
    double need_lo = center - halfwidth, need_hi = center + halfwidth;
    if (!unit_ || unit_->p_lo > need_lo || unit_->p_hi < need_hi) {
        double R = H_.coercive ? std::max(2.5, std::abs(center) + halfwidth)
                               : H_.support_radius;
        double pad = std::max(grids_.p_pad, std::abs(center) + halfwidth - R + 0.25);
        unit_ = step_genfunc(H_, 0.0, 1.0, cfg_, grids_.table_nq, grids_.table_np, pad);
        unit_center_ = center;
        unit_halfwidth_ = halfwidth;
    }
    return *unit_;
}

const DiscreteLagrangian& LandscapeFamily::lagrangian_table(double d_max) const {
    if (!lag_ || lag_->d_hi < d_max) {
        lag_ = build_lagrangian(H_, cfg_, d_max, grids_.table_nq, grids_.table_nd);
        lag_dmax_ = d_max;
    }
    return *lag_;
}

// Momentum spread of orbits relevant to the slice (energy heuristic).
static double momentum_spread(const HamiltonianSpec& H) {
    double vmax = 0.0;
    for (int i = 0; i < 64; ++i) {
        double q = i / 64.0;
        vmax = std::max(vmax, std::abs(H.scale * H.potential(0.0, q)));
    }
    double tpp = 1e9;
    for (int i = 0; i <= 32; ++i) {
        double p = -1.5 + 3.0 * i / 32.0;
        double v = std::abs(H.scale * H.kinetic_dd(p));
        tpp = std::min(tpp, v);
    }
    tpp = std::max(tpp, 0.05);
    return std::sqrt(2.0 * std::max(vmax, 1e-12) / tpp);
}

// --- integrable route -------------------------------------------------------

GeneratingLandscape LandscapeFamily::build_integrable(int k, const Vec& y) const {
    GeneratingLandscape L;
    L.k = k;
    L.n = H_.n;
    L.y = y;
    L.negative_index = coupling_index(H_.n, k);
    L.sampled_negative = 0;
    L.offset = offset_;
    L.route = "integrable";
    Axis ax;
    ax.lo = 0.0;
    ax.hi = 1.0;
    ax.nodes = grids_.x_nodes;
    ax.periodic = true;
    L.f.axes = {ax};
    L.f.values.assign(static_cast<size_t>(ax.nodes), 0.0);
    if (H_.n == 1) {
        const StepGenFun& S = unit_table(y[0], 0.5);
        for (int i = 0; i < ax.nodes; ++i) {
            double x = ax.coord(i);
            L.f.values[i] = S.s(wrap01(k * x), y[0]) + offset_;
        }
    } else {
        Vec q = Vec::zero(H_.n);
        double v = H_.value_base(0.0, q, y);
        for (int i = 0; i < ax.nodes; ++i) L.f.values[i] = v + offset_;
        L.route = "integrable-analytic";
    }
    return L;
}

// --- full-grid route (k = 1 exact; k = 2 with rotated fiber) ----------------

GeneratingLandscape LandscapeFamily::build_full_k2(int k, const Vec& y) const {
    GeneratingLandscape L;
    L.k = k;
    L.n = 1;
    L.y = y;
    L.negative_index = coupling_index(1, k);
    L.offset = offset_;
    double spread = momentum_spread(H_);
    double win = std::abs(y[0]) + spread + 1.0;
    const StepGenFun& S = unit_table(0.0, win);

    Axis ax;
    ax.nodes = grids_.x_nodes;
    ax.periodic = true;
    if (k == 1) {
        L.route = "full-k1";
        L.sampled_negative = 0;
        L.f.axes = {ax};
        L.f.values.assign(static_cast<size_t>(ax.nodes), 0.0);
        for (int i = 0; i < ax.nodes; ++i)
            L.f.values[i] = S.s(wrap01(ax.coord(i)), y[0]) + offset_;
        return L;
    }
    // k = 2: F = (1/2)[S(2x, y+pi) + S(2x+r, y)] - (a^2 - b^2)/2,
    // with fiber rotation r = a + b, pi = a - b; the negative end is |a| large.
    L.route = "full-k2";
    L.sampled_negative = 1;
    double srange = 0.0;
    for (double v : S.S) srange = std::max(srange, std::abs(v));
    double W = std::max({2.0 * std::sqrt(std::max(srange, 1e-6)), spread + 1.25, 2.0});
    Axis aa, ab;
    aa.lo = -W;
    aa.hi = W;
    aa.nodes = grids_.fiber_nodes;
    aa.cone_lo = aa.cone_hi = true;
    ab = aa;
    ab.cone_lo = ab.cone_hi = false;
    L.f.axes = {ax, aa, ab};
    long cells = static_cast<long>(ax.nodes) * aa.nodes * ab.nodes;
    if (cells > grids_.cell_budget) throw GridBudgetExceeded("full-k2 grid over budget");
    L.f.values.assign(static_cast<size_t>(cells), 0.0);
    size_t id = 0;
    double leak = 0.0;
    for (int i = 0; i < ax.nodes; ++i) {
        double x = ax.coord(i);
        for (int ia = 0; ia < aa.nodes; ++ia) {
            double a = aa.coord(ia);
            for (int ib = 0; ib < ab.nodes; ++ib, ++id) {
                double b = ab.coord(ib);
                double r = a + b, pi = a - b;
                double quad = -(a * a - b * b) / 2.0;
                double sterm =
                    0.5 * (S.s(wrap01(2 * x), y[0] + pi) + S.s(wrap01(2 * x + r), y[0]));
                L.f.values[id] = sterm + quad + offset_;
                if (ia == 0 || ia == aa.nodes - 1) leak = std::max(leak, std::abs(sterm));
            }
        }
    }
    L.support_leak = leak;
    return L;
}

// --- convex (discrete-action) route -----------------------------------------

namespace {

// After the momentum Legendre step the chain carries L = -A per link, so for
// convex kinetic parts the interior positions are critical at a MAXIMUM (these
// are exactly the n(k-1) negative directions of the coupling form); for
// concave parts at a minimum. inv_sign turns the run solve into a minimization
// of inv_sign * Phi with a positive-definite gate either way.
struct ChainProblem {
    const DiscreteLagrangian* lag;
    const StepGenFun* stab;
    double y;
    double inv_sign;  // -1: convex kinetic part, +1: concave
    double d_cap;
};

// Solve one eliminated run of interior positions with both ends anchored
// (right_free = false) or ending at the free chain end Q_k (right_free = true).
// Positions vector holds the run values; returns false if the (signed) Hessian
// is not positive definite at the solution.
bool solve_run(const ChainProblem& C, double left, double* Qs, int m, bool right_free,
               double right_anchor, double Q1) {
    if (m == 0) return true;
    auto grad_hess = [&](std::vector<double>& g, std::vector<double>& hd,
                         std::vector<double>& he) {
        g.assign(m, 0.0);
        hd.assign(m, 0.0);
        he.assign(m - 1 >= 0 ? m - 1 : 0, 0.0);
        double fdh = 1e-5;
        for (int j = 0; j <= m; ++j) {
            double qa = j == 0 ? left : Qs[j - 1];
            bool last_pair = (j == m);
            double qb = last_pair ? (right_free ? 0.0 : right_anchor) : Qs[j];
            if (last_pair && right_free) break;  // no link beyond the free end
            double dq = qb - qa;
            double lq = C.lag->l_dq(qa, dq), ld = C.lag->l_dd(qa, dq);
            // d/dqa L(qa, qb-qa) = l_dq - l_dd ; d/dqb = l_dd
            if (j >= 1) g[j - 1] += C.inv_sign * (lq - ld);
            if (j < m) g[j] += C.inv_sign * ld;
            // second derivatives by finite differences of the first
            double ldd = (C.lag->l_dd(qa, dq + fdh) - C.lag->l_dd(qa, dq - fdh)) / (2 * fdh);
            double lqd = (C.lag->l_dq(qa, dq + fdh) - C.lag->l_dq(qa, dq - fdh)) / (2 * fdh);
            double lqq = (C.lag->l_dq(qa + fdh, dq) - C.lag->l_dq(qa - fdh, dq)) / (2 * fdh);
            // Hess in (qa, qb): [lqq - 2 lqd + ldd, lqd - ldd; ., ldd]
            double haa = lqq - 2 * lqd + ldd, hab = lqd - ldd, hbb = ldd;
            if (j >= 1) hd[j - 1] += C.inv_sign * haa;
            if (j < m) hd[j] += C.inv_sign * hbb;
            if (j >= 1 && j < m) he[j - 1] += C.inv_sign * hab;
        }
        if (right_free) {
            // boundary terms S(Q_k, y) + (Q_k - Q1) y on the last run variable
            double qk = Qs[m - 1];
            double sq = C.stab->s_dq(qk, C.y);
            g[m - 1] += C.inv_sign * (sq + C.y);
            double sqq = (C.stab->s_dq(qk + fdh, C.y) - C.stab->s_dq(qk - fdh, C.y)) / (2 * fdh);
            hd[m - 1] += C.inv_sign * sqq;
        }
    };
    std::vector<double> g, hd, he;
    for (int iter = 0; iter < 60; ++iter) {
        grad_hess(g, hd, he);
        double gn = 0;
        for (double v : g) gn = std::max(gn, std::abs(v));
        if (gn < 1e-11) break;
        std::vector<double> rhs(g);
        for (auto& v : rhs) v = -v;
        std::vector<double> d(hd), e(he);
        if (!solve_tridiag_spd(m, d, e, rhs)) {
            // damped gradient fallback; definiteness is re-checked at the end
            for (int j = 0; j < m; ++j) Qs[j] -= 0.2 * g[j];
            continue;
        }
        double cap = C.d_cap;
        for (int j = 0; j < m; ++j) Qs[j] += std::clamp(rhs[j], -cap, cap);
    }
    grad_hess(g, hd, he);
    double gn = 0;
    for (double v : g) gn = std::max(gn, std::abs(v));
    if (gn > 1e-6) {
        if (std::getenv("SYMH_DEBUG_CHAIN")) {
            std::fprintf(stderr, "solve_run: m=%d free=%d left=%g gn=%g Q:", m,
                         static_cast<int>(right_free), left, gn);
            for (int j = 0; j < m; ++j) std::fprintf(stderr, " %g", Qs[j]);
            std::fprintf(stderr, "\n");
        }
        return false;
    }
    std::vector<double> rhs(m, 0.0);
    std::vector<double> d(hd), e(he);
    bool pd = solve_tridiag_spd(m, d, e, rhs);  // positive-definiteness gate
    if (!pd && std::getenv("SYMH_DEBUG_CHAIN")) {
        std::fprintf(stderr, "solve_run: PD gate failed, m=%d diag:", m);
        for (double v : hd) std::fprintf(stderr, " %g", v);
        std::fprintf(stderr, "\n");
    }
    return pd;
}

}  // namespace

GeneratingLandscape LandscapeFamily::build_convex_chain(int k, const Vec& y) const {
    const double tpp = H_.scale * H_.kinetic_dd(y[0]);
    const double sign = tpp >= 0 ? 1.0 : -1.0;

    double spread = momentum_spread(H_);
    double win = std::abs(y[0]) + 2.5 * spread + 0.3;
    double dmax = 0.0;
    for (int i = 0; i <= 64; ++i) {
        double p = -win + 2 * win * i / 64.0;
        dmax = std::max(dmax, std::abs(H_.scale * H_.kinetic_d(p)));
    }
    dmax += 0.35;
    const DiscreteLagrangian& lag = lagrangian_table(dmax);
    const StepGenFun& stab = unit_table(y[0], spread + 0.75);

    // quarter-period rule for run lengths
    double vpp = 0.0;
    for (int i = 0; i < 64; ++i) {
        double q = i / 64.0;
        double h = 1e-4;
        double d2 = (H_.potential_d(0.0, q + h) - H_.potential_d(0.0, q - h)) / (2 * h);
        vpp = std::max(vpp, std::abs(H_.scale * d2));
    }
    int Lmax = vpp < 1e-9 ? k : std::max(1, static_cast<int>(std::floor(
                                                M_PI / (2.0 * std::sqrt(vpp)))) -
                                                1);
    int interior = k - 1;  // Q_2 .. Q_k
    int kept = 0;
    while (kept <= 2) {
        int runs = kept + 1;
        int longest = (interior - kept + runs - 1) / runs;
        if (longest <= Lmax || interior - kept == 0) break;
        ++kept;
    }
    if (kept > 2) throw GridBudgetExceeded("convex chain needs more than 3 free variables");

    std::vector<int> kept_idx;  // indices in 2..k
    for (int j = 1; j <= kept; ++j)
        kept_idx.push_back(2 + (interior - 1) * j / (kept + 1));

    double dbar = H_.scale * H_.kinetic_d(y[0]);
    double dv = 0.0;
    for (int i = 0; i <= 32; ++i) {
        double p = y[0] - spread + 2 * spread * i / 32.0;
        dv = std::max(dv, std::abs(H_.scale * H_.kinetic_d(p) - dbar));
    }

    GeneratingLandscape L;
    L.k = k;
    L.n = 1;
    L.y = y;
    L.negative_index = coupling_index(1, k);
    L.sampled_negative = kept;  // retained chain positions are negative directions
    L.offset = offset_;
    L.route = sign > 0 ? "convex-chain" : "concave-chain";

    double widen = 1.0;
    for (int attempt = 0; attempt < 3; ++attempt) {
        L.f.axes.clear();
        Axis ax;
        ax.nodes = grids_.x_nodes;
        ax.periodic = true;
        L.f.axes = {ax};
        for (int kk : kept_idx) {
            Axis ar;
            double wjd = widen * grids_.fiber_margin * ((kk - 1) * dv + 0.05);
            ar.lo = -wjd;
            ar.hi = wjd;
            ar.nodes = grids_.fiber_nodes;
            ar.cone_lo = ar.cone_hi = true;  // the chain decays here: negative end
            L.f.axes.push_back(ar);
        }
        size_t total = L.f.size();
        if (static_cast<long>(total) > grids_.cell_budget)
            throw GridBudgetExceeded("convex chain grid over budget");
        L.f.values.assign(total, 0.0);

        ChainProblem C{&lag, &stab, y[0], -sign, 0.45};
        std::vector<double> Q(k + 1, 0.0);  // Q[1..k]
        std::vector<int> idx(L.f.dim(), 0);
        const int D = L.f.dim();
        for (size_t flat = 0; flat < total; ++flat) {
            size_t rem = flat;
            for (int d = D - 1; d >= 0; --d) {
                idx[d] = static_cast<int>(rem % L.f.axes[d].nodes);
                rem /= L.f.axes[d].nodes;
            }
            double x = L.f.axes[0].coord(idx[0]);
            double Q1 = k * x;
            Q[1] = Q1;
            for (size_t m = 0; m < kept_idx.size(); ++m) {
                int j = kept_idx[m];
                Q[j] = Q1 + (j - 1) * dbar + L.f.axes[m + 1].coord(idx[m + 1]);
            }
            // solve eliminated runs between anchors
            std::vector<int> anchors{1};
            for (int j : kept_idx) anchors.push_back(j);
            anchors.push_back(k + 1);  // sentinel: run to the free end
            bool ok = true;
            for (size_t a = 0; a + 1 < anchors.size(); ++a) {
                int s = anchors[a], e = anchors[a + 1];
                int m = (e == k + 1) ? (k - s) : (e - s - 1);
                if (m <= 0) continue;
                bool right_free = (e == k + 1);
                std::vector<double> run(m);
                for (int j = 0; j < m; ++j) {
                    double t = static_cast<double>(j + 1) / (m + 1);
                    run[j] = right_free ? Q[s] + (j + 1) * dbar
                                        : (1 - t) * Q[s] + t * Q[e];
                }
                if (!solve_run(C, Q[s], run.data(), m, right_free,
                               right_free ? 0.0 : Q[e], Q1)) {
                    ok = false;
                    break;
                }
                for (int j = 0; j < m; ++j) Q[s + 1 + j] = run[j];
            }
            if (!ok)
                throw GridBudgetExceeded("chain segment lost definiteness; refine kept nodes");
            double obj = 0.0;
            for (int j = 1; j < k; ++j) obj += lag.l(Q[j], Q[j + 1] - Q[j]);
            obj += stab.s(Q[k], y[0]) + (Q[k] - Q1) * y[0];
            L.f.values[flat] = obj / k + offset_;
        }
        if (kept == 0) break;
        // clearance: the retained negative directions must decay at the faces
        double face_max = -1e300, mid_max = -1e300;
        std::vector<int> idx2(L.f.dim(), 0);
        for (size_t flat = 0; flat < total; ++flat) {
            size_t rem = flat;
            bool on_face = false;
            for (int d = D - 1; d >= 0; --d) {
                idx2[d] = static_cast<int>(rem % L.f.axes[d].nodes);
                rem /= L.f.axes[d].nodes;
            }
            for (int d = 1; d < D; ++d)
                if (idx2[d] == 0 || idx2[d] == L.f.axes[d].nodes - 1) on_face = true;
            if (on_face)
                face_max = std::max(face_max, L.f.values[flat]);
            else
                mid_max = std::max(mid_max, L.f.values[flat]);
        }
        if (face_max < mid_max - 1e-12) break;
        widen *= 1.6;
        if (attempt == 2)
            throw GridBudgetExceeded("convex chain box failed the clearance check");
    }
    return L;
}

// --- shooting route (compact support, momentum-return monotone) -------------

GeneratingLandscape LandscapeFamily::build_shooting(int k, const Vec& y, bool graph) const {
    double W = H_.support_radius + 0.6;
    auto flowk = [&](double q, double w) {
        return dynamics::iterate_lift(H_, PhasePoint{Vec(q), Vec(w)}, k, cfg_);
    };
    auto momk = [&](double q, double w) {
        StepPieces cur{PhasePoint{Vec(q), Vec(w)}, 0.0, 0.0};
        for (int u = 0; u < k; ++u) {
            StepPieces nxt = flow_steps(H_, 0.0, 1.0, cur.out, cfg_);
            cur.out = nxt.out;
            cur.action += nxt.action;
        }
        return cur;
    };
    // monotone momentum-return gate
    for (int iq = 0; iq <= 8; ++iq)
        for (int iw = 0; iw <= 16; ++iw) {
            double q = iq / 9.0, w = -W + 2 * W * iw / 16.0;
            double h = 1e-5;
            double m0 = momk(q, w - h).out.p[0], m1 = momk(q, w + h).out.p[0];
            if ((m1 - m0) / (2 * h) < 0.15)
                throw GridBudgetExceeded("momentum return not monotone; shooting route invalid");
        }

    auto solve_w = [&](double q, double target, double hint) {
        double lo = -W, hi = W;
        double w = std::clamp(hint, lo, hi);
        for (int it = 0; it < 60; ++it) {
            StepPieces pc = momk(q, w);
            double r = pc.out.p[0] - target;
            if (std::abs(r) < 1e-12) return w;
            if (r > 0) hi = std::min(hi, w);
            else lo = std::max(lo, w);
            double h = 1e-7;
            double der = (momk(q, w + h).out.p[0] - pc.out.p[0]) / h;
            double wn = (der > 1e-4) ? w - r / der : 0.5 * (lo + hi);
            if (wn <= lo || wn >= hi) wn = 0.5 * (lo + hi);
            w = wn;
        }
        return w;
    };

    GeneratingLandscape L;
    L.k = k;
    L.n = 1;
    L.y = y;
    L.graph_mode = graph;
    L.negative_index = coupling_index(1, k);
    L.sampled_negative = 0;
    L.offset = offset_;
    L.route = graph ? "shooting-graph" : "shooting";

    Axis ax;
    ax.nodes = grids_.x_nodes;
    ax.periodic = true;
    if (!graph) {
        L.f.axes = {ax};
        L.f.values.assign(static_cast<size_t>(ax.nodes), 0.0);
        double hint = y[0];
        for (int i = 0; i < ax.nodes; ++i) {
            double x = ax.coord(i);
            double w = solve_w(wrap01(k * x), y[0], hint);
            hint = w;
            StepPieces pc = momk(wrap01(k * x), w);
            double dq = pc.out.q[0] - wrap01(k * x);
            L.f.values[i] = (y[0] * dq - pc.action) / k + offset_;
        }
        return L;
    }
    Axis ap;
    ap.lo = -W;
    ap.hi = W;
    ap.nodes = std::max(grids_.fiber_nodes, 65);
    ap.murel_lo = ap.murel_hi = true;
    L.f.axes = {ax, ap};
    L.f.values.assign(static_cast<size_t>(ax.nodes) * ap.nodes, 0.0);
    size_t id = 0;
    for (int i = 0; i < ax.nodes; ++i) {
        double q = ax.coord(i);
        double hint = ap.lo;
        for (int j = 0; j < ap.nodes; ++j, ++id) {
            double P = ap.coord(j);
            double w = solve_w(q, P, j == 0 ? P : hint);
            hint = w + (2.0 * W / (ap.nodes - 1));
            StepPieces pc = momk(q, w);
            double dq = pc.out.q[0] - q;
            // action convention: critical values are orbit actions
            L.f.values[id] = pc.action - P * dq - k * offset_;
        }
    }
    (void)flowk;
    return L;
}

// --- dispatch ----------------------------------------------------------------

GeneratingLandscape LandscapeFamily::build_impl(int k, const Vec& y, bool graph) const {
    if (k < 1) throw ConfigError("k >= 1 required");
    bool integrable_family = H_.family == dynamics::Family::Zero ||
                             H_.family == dynamics::Family::Integrable;
    if (integrable_family) {
        if (!graph) return build_integrable(k, y);
        if (H_.coercive) throw UnsupportedCoercive("graph landscape needs compact support");
        // integrable graph mode: orbits keep their momentum; assemble directly
        GeneratingLandscape L;
        L.k = k;
        L.n = 1;
        L.graph_mode = true;
        L.negative_index = coupling_index(1, k);
        L.offset = offset_;
        L.route = "integrable-graph";
        double W = H_.support_radius + 0.6;
        Axis ax, ap;
        ax.nodes = grids_.x_nodes;
        ax.periodic = true;
        ap.lo = -W;
        ap.hi = W;
        ap.nodes = std::max(grids_.fiber_nodes, 65);
        ap.murel_lo = ap.murel_hi = true;
        L.f.axes = {ax, ap};
        L.f.values.assign(static_cast<size_t>(ax.nodes) * ap.nodes, 0.0);
        const StepGenFun& S = unit_table(0.0, W);
        size_t id = 0;
        for (int i = 0; i < ax.nodes; ++i) {
            double q = ax.coord(i);
            for (int j = 0; j < ap.nodes; ++j, ++id)
                L.f.values[id] = -k * (S.s(q, ap.coord(j)) + offset_);
        }
        return L;
    }
    if (H_.n != 1) throw GridBudgetExceeded("only integrable families are supported at n = 2");
    if (!graph && k == 1) return build_full_k2(1, y);
    if (graph && k == 1) {
        // exact: no fiber at all
        GeneratingLandscape L = build_shooting_k1_graph_exact(y);
        return L;
    }
    if (!graph && H_.separable() && !H_.time_dependent && H_.time_mod == 0.0) {
        double t_lo = 1e9, t_hi = -1e9;
        double win = std::abs(y[0]) + momentum_spread(H_) + 0.3;
        for (int i = 0; i <= 32; ++i) {
            double p = y[0] - win + 2 * win * i / 32.0;
            double v = H_.scale * H_.kinetic_dd(p);
            t_lo = std::min(t_lo, v);
            t_hi = std::max(t_hi, v);
        }
        if (t_lo > 0.04 || t_hi < -0.04) return build_convex_chain(k, y);
    }
    if (H_.compact_support()) {
        try {
            return build_shooting(k, y, graph);
        } catch (const GridBudgetExceeded&) {
            if (!graph && k <= 2) return build_full_k2(k, y);
            throw;
        }
    }
    if (!graph && k <= 2) return build_full_k2(k, y);
    throw GridBudgetExceeded("no landscape route is valid for this Hamiltonian at this k");
}

GeneratingLandscape LandscapeFamily::build(int k, const Vec& y) const {
    return build_impl(k, y, false);
}

GeneratingLandscape LandscapeFamily::build_graph(int k) const {
    if (H_.coercive) throw UnsupportedCoercive("graph landscape needs compact support");
    return build_impl(k, Vec(0.0), true);
}

GeneratingLandscape LandscapeFamily::compose(const GeneratingLandscape& Fk, int ell) const {
    if (ell < 1) throw ConfigError("ell >= 1 required");
    if (ell == 1) return Fk;
    // Block chaining with the pairwise-difference coupling is associative:
    // assembling l blocks of the k-chain equals the lk-chain with outer 1/l.
    GeneratingLandscape G = build_impl(Fk.k * ell, Fk.y, Fk.graph_mode);
    G.k = Fk.k;
    G.ell = ell;
    return G;
}

// Exact graph landscape at k = 1 (no fiber variables).
GeneratingLandscape LandscapeFamily::build_shooting_k1_graph_exact(const Vec&) const {
    GeneratingLandscape L;
    L.k = 1;
    L.n = 1;
    L.graph_mode = true;
    L.negative_index = 0;
    L.offset = offset_;
    L.route = "graph-k1";
    double W = H_.support_radius + 0.6;
    const StepGenFun& S = unit_table(0.0, W);
    Axis ax, ap;
    ax.nodes = grids_.x_nodes;
    ax.periodic = true;
    ap.lo = -W;
    ap.hi = W;
    ap.nodes = std::max(grids_.fiber_nodes, 65);
    ap.murel_lo = ap.murel_hi = true;
    L.f.axes = {ax, ap};
    L.f.values.assign(static_cast<size_t>(ax.nodes) * ap.nodes, 0.0);
    size_t id = 0;
    for (int i = 0; i < ax.nodes; ++i)
        for (int j = 0; j < ap.nodes; ++j, ++id)
            L.f.values[id] = -(S.s(ax.coord(i), ap.coord(j)) + offset_);
    return L;
}

// ---------------------------------------------------------------------------
// Wrappers, diagnostics, cache
// ---------------------------------------------------------------------------

GeneratingLandscape build_landscape(const HamiltonianSpec& H, int k, const Vec& y,
                                    const LandscapeGrids& grids,
                                    std::optional<FlowConfig> cfg) {
    FlowConfig c = cfg ? *cfg : FlowConfig::for_spec(H);
    LandscapeFamily fam(H, c, grids);
    return fam.build(k, y);
}

GeneratingLandscape compose_landscape(const LandscapeFamily& fam, const GeneratingLandscape& Fk,
                                      int ell) {
    return fam.compose(Fk, ell);
}

double grad_residual(const GeneratingLandscape& L, const std::vector<double>& point) {
    if (!L.f.inside(point)) throw OutOfBox("grad_residual: point outside the grid box");
    auto g = L.f.fd_gradient(point);
    double s = 0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
}

static void put_u64(std::string& s, uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
static void put_f64(std::string& s, double d) {
    uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(s, v);
}
static uint64_t get_u64(const std::string& s, size_t& off) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    off += 8;
    return v;
}
static double get_f64(const std::string& s, size_t& off) {
    uint64_t v = get_u64(s, off);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

void save_landscape(const GeneratingLandscape& L, const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "little-endian container");
    std::string s = "SYLND001";
    put_u64(s, static_cast<uint64_t>(L.k));
    put_u64(s, static_cast<uint64_t>(L.ell));
    put_u64(s, static_cast<uint64_t>(L.n));
    put_u64(s, L.graph_mode ? 1 : 0);
    put_u64(s, static_cast<uint64_t>(L.negative_index));
    put_u64(s, static_cast<uint64_t>(L.sampled_negative));
    put_f64(s, L.y.n > 0 ? L.y[0] : 0.0);
    put_f64(s, L.y.n > 1 ? L.y[1] : 0.0);
    put_f64(s, L.offset);
    put_f64(s, L.support_leak);
    put_u64(s, L.route.size());
    s += L.route;
    put_u64(s, static_cast<uint64_t>(L.f.axes.size()));
    for (const auto& a : L.f.axes) {
        put_f64(s, a.lo);
        put_f64(s, a.hi);
        put_u64(s, static_cast<uint64_t>(a.nodes));
        uint64_t flags = (a.periodic ? 1 : 0) | (a.cone_lo ? 2 : 0) | (a.cone_hi ? 4 : 0) |
                         (a.murel_lo ? 8 : 0) | (a.murel_hi ? 16 : 0);
        put_u64(s, flags);
    }
    put_u64(s, L.f.values.size());
    for (double v : L.f.values) put_f64(s, v);
    write_text_file(path, s);
}

GeneratingLandscape load_landscape(const std::string& path) {
    std::string s = read_text_file(path);
    if (s.size() < 8 || s.substr(0, 8) != "SYLND001") throw error("bad landscape container");
    size_t off = 8;
    GeneratingLandscape L;
    L.k = static_cast<int>(get_u64(s, off));
    L.ell = static_cast<int>(get_u64(s, off));
    L.n = static_cast<int>(get_u64(s, off));
    L.graph_mode = get_u64(s, off) != 0;
    L.negative_index = static_cast<int>(get_u64(s, off));
    L.sampled_negative = static_cast<int>(get_u64(s, off));
    double y0 = get_f64(s, off), y1 = get_f64(s, off);
    L.y = L.n == 2 ? Vec(y0, y1) : Vec(y0);
    L.offset = get_f64(s, off);
    L.support_leak = get_f64(s, off);
    size_t rl = get_u64(s, off);
    L.route = s.substr(off, rl);
    off += rl;
    size_t na = get_u64(s, off);
    for (size_t i = 0; i < na; ++i) {
        Axis a;
        a.lo = get_f64(s, off);
        a.hi = get_f64(s, off);
        a.nodes = static_cast<int>(get_u64(s, off));
        uint64_t flags = get_u64(s, off);
        a.periodic = flags & 1;
        a.cone_lo = flags & 2;
        a.cone_hi = flags & 4;
        a.murel_lo = flags & 8;
        a.murel_hi = flags & 16;
        L.f.axes.push_back(a);
    }
    size_t nv = get_u64(s, off);
    L.f.values.resize(nv);
    for (size_t i = 0; i < nv; ++i) L.f.values[i] = get_f64(s, off);
    return L;
}

uint64_t landscape_cache_key(const HamiltonianSpec& H, const LandscapeGrids& grids, int k,
                             int ell, const Vec& y, bool graph_mode) {
    uint64_t h = fnv1a64(H.to_json());
    double nums[] = {static_cast<double>(grids.x_nodes), static_cast<double>(grids.fiber_nodes),
                     grids.fiber_margin, static_cast<double>(k), static_cast<double>(ell),
                     y.n > 0 ? y[0] : 0.0, y.n > 1 ? y[1] : 0.0, graph_mode ? 1.0 : 0.0,
                     static_cast<double>(grids.table_nq), static_cast<double>(grids.table_np)};
    h = fnv1a64(nums, sizeof(nums), h);
    return h;
}

}  // namespace symh::genfunc
