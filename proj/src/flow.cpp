#include <symh/flow.hpp>

#include <cmath>

namespace symh::dynamics {

void FlowConfig::validate() const {
    if (substeps_per_unit_time < 1) throw ConfigError("substeps_per_unit_time >= 1 required");
    if (newton_tol <= 0) throw ConfigError("newton_tol > 0 required");
}

FlowConfig FlowConfig::for_spec(const HamiltonianSpec& H) {
    FlowConfig cfg;
    cfg.integrator =
        H.separable() ? Integrator::SplittingSeparable : Integrator::ImplicitMidpoint;
    return cfg;
}

namespace {

// The integrator state keeps q split into an integer winding and a fraction;
// lattice shifts of the initial condition then reproduce the identical
// substep arithmetic bit for bit (the lift-equivariance contract).
struct LiftState {
    double frac[2];  // in [0, 1)
    double wind[2];  // integer-valued
    double p[2];
    int n;
};

void renorm(LiftState& s) {
    for (int i = 0; i < s.n; ++i) {
        while (s.frac[i] >= 1.0) {
            s.frac[i] -= 1.0;
            s.wind[i] += 1.0;
        }
        while (s.frac[i] < 0.0) {
            s.frac[i] += 1.0;
            s.wind[i] -= 1.0;
        }
    }
}

// Momentum kick by the potential frozen at time t, duration dt. Exact map.
void kick(const HamiltonianSpec& H, double t, double dt, LiftState& s, double& action) {
    if (H.family == Family::Zero || H.family == Family::Integrable) return;
    double vsum = 0.0;
    double share = H.n == 1 ? 1.0 : 0.5;
    for (int i = 0; i < H.n; ++i) {
        double v = H.potential(t, s.frac[i]) * share;
        double f = H.potential_d(t, s.frac[i]) * share;
        s.p[i] -= dt * H.scale * f;
        vsum += v;
    }
    action -= dt * H.scale * vsum;
}

// Position drift by the kinetic part, duration dt. Exact map.
void drift(const HamiltonianSpec& H, double dt, LiftState& s, double& action) {
    for (int i = 0; i < H.n; ++i) {
        double tp = H.kinetic_d(s.p[i]);
        s.frac[i] += dt * H.scale * tp;
        action += dt * H.scale * (s.p[i] * tp - H.kinetic(s.p[i]));
    }
    renorm(s);
}

// One implicit-midpoint substep in fraction coordinates; the action increment
// is <p_mid, dq> - dt H(mid).
void midpoint_step(const HamiltonianSpec& H, double t, double dt, LiftState& s, double& action,
                   const FlowConfig& cfg) {
    const int n = H.n;
    const int m = 2 * n;
    double zb[4], zn[4];
    for (int i = 0; i < n; ++i) {
        zb[i] = s.frac[i];
        zb[n + i] = s.p[i];
    }
    for (int i = 0; i < m; ++i) zn[i] = zb[i];
    double tmid = t + dt / 2.0;

    auto field = [&](const double* w, double* out) {
        Vec q = Vec::zero(n), p = Vec::zero(n);
        for (int i = 0; i < n; ++i) {
            q[i] = w[i];
            p[i] = w[n + i];
        }
        Vec gq = H.dq(tmid, q, p), gp = H.dp(tmid, q, p);
        for (int i = 0; i < n; ++i) {
            out[i] = gp[i];
            out[n + i] = -gq[i];
        }
    };

    bool ok = false;
    for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
        double mid[4], f[4], G[4];
        for (int i = 0; i < m; ++i) mid[i] = 0.5 * (zb[i] + zn[i]);
        field(mid, f);
        double gn = 0;
        for (int i = 0; i < m; ++i) {
            G[i] = zn[i] - zb[i] - dt * f[i];
            gn = std::max(gn, std::abs(G[i]));
        }
        if (gn <= cfg.newton_tol) {
            ok = true;
            break;
        }
        double J[16];
        for (int c = 0; c < m; ++c) {
            double h = 1e-7 * std::max(1.0, std::abs(zn[c]));
            double save = zn[c];
            zn[c] = save + h;
            double midp[4], fp[4];
            for (int i = 0; i < m; ++i) midp[i] = 0.5 * (zb[i] + zn[i]);
            field(midp, fp);
            zn[c] = save;
            for (int r = 0; r < m; ++r)
                J[r * m + c] = (r == c ? 1.0 : 0.0) - dt * (fp[r] - f[r]) / h;
        }
        double rhs[4];
        for (int i = 0; i < m; ++i) rhs[i] = -G[i];
        if (!solve_small(m, J, rhs)) throw NonConvergentImplicitStep("singular Newton system");
        for (int i = 0; i < m; ++i) zn[i] += rhs[i];
    }
    if (!ok) throw NonConvergentImplicitStep("midpoint Newton did not converge");

    double mid[4];
    for (int i = 0; i < m; ++i) mid[i] = 0.5 * (zb[i] + zn[i]);
    Vec qm = Vec::zero(n), pm = Vec::zero(n);
    for (int i = 0; i < n; ++i) {
        qm[i] = mid[i];
        pm[i] = mid[n + i];
    }
    double hval = H.value_base(tmid, qm, pm);
    double inc = 0.0;
    for (int i = 0; i < n; ++i) inc += pm[i] * (zn[i] - zb[i]);
    action += inc - dt * hval;
    for (int i = 0; i < n; ++i) {
        s.frac[i] = zn[i];
        s.p[i] = zn[n + i];
    }
    renorm(s);
}

}  // namespace

StepPieces flow_steps(const HamiltonianSpec& H, double t0, double dt, const PhasePoint& z0,
                      const FlowConfig& cfg) {
    cfg.validate();
    StepPieces r;
    r.out = z0;
    if (H.family == Family::Zero) return r;

    LiftState s;
    s.n = H.n;
    for (int i = 0; i < H.n; ++i) {
        double w = std::floor(z0.q[i]);
        s.wind[i] = w;
        s.frac[i] = z0.q[i] - w;
        s.p[i] = z0.p[i];
    }
    double base_wind[2] = {s.wind[0], s.wind[1]};

    int m = std::max(1, static_cast<int>(std::ceil(cfg.substeps_per_unit_time * std::abs(dt))));
    double h = dt / m;
    double A = 0.0;
    if (cfg.integrator == Integrator::SplittingSeparable) {
        if (!H.separable())
            throw ConfigError("SplittingSeparable requires a separable Hamiltonian");
        for (int sstep = 0; sstep < m; ++sstep) {
            double t = t0 + sstep * h;
            kick(H, t, h / 2.0, s, A);
            drift(H, h, s, A);
            kick(H, t + h, h / 2.0, s, A);
        }
    } else {
        for (int sstep = 0; sstep < m; ++sstep)
            midpoint_step(H, t0 + sstep * h, h, s, A, cfg);
    }
    if (H.offset != 0.0) A -= H.offset * dt;
    r.action = A;
    for (int i = 0; i < H.n; ++i) {
        r.out.q[i] = s.wind[i] + s.frac[i];
        r.out.p[i] = s.p[i];
    }
    double sp = 0.0;
    for (int i = 0; i < H.n; ++i)
        sp += r.out.p[i] * ((s.wind[i] - base_wind[i]) + (r.out.q[i] - s.wind[i]) -
                            (z0.q[i] - base_wind[i]));
    r.genfun = sp - A;
    return r;
}

PhasePoint time_one_map(const HamiltonianSpec& H, const PhasePoint& z, const FlowConfig& cfg) {
    if (H.compact_support() && H.outside_support(z.p)) return z;
    return flow_steps(H, 0.0, 1.0, z, cfg).out;
}

LiftedOrbit iterate_lift(const HamiltonianSpec& H, const PhasePoint& z, int k,
                         const FlowConfig& cfg) {
    if (k < 1) throw ConfigError("iterate_lift: k >= 1 required");
    cfg.validate();
    LiftedOrbit orb;
    orb.horizon = k;
    orb.times.push_back(0.0);
    orb.samples.push_back(z);
    PhasePoint cur = z;
    double A = 0.0;
    const int m = cfg.substeps_per_unit_time;
    const bool frozen = H.compact_support() && H.outside_support(z.p);
    for (int unit = 0; unit < k; ++unit) {
        for (int sstep = 0; sstep < m; ++sstep) {
            double t = unit + static_cast<double>(sstep) / m;
            if (!frozen) {
                StepPieces piece = flow_steps(H, t, 1.0 / m, cur, cfg);
                cur = piece.out;
                A += piece.action;
            }
            orb.times.push_back(t + 1.0 / m);
            orb.samples.push_back(cur);
        }
    }
    orb.action = A;
    return orb;
}

Vec rotation_vector(const LiftedOrbit& orb) {
    if (orb.horizon < 1.0) throw ConfigError("rotation_vector: horizon >= 1 required");
    Vec d = orb.endpoint().q - orb.samples.front().q;
    return (1.0 / orb.horizon) * d;
}

}  // namespace symh::dynamics
