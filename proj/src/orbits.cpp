#include <symh/orbits.hpp>

#include <algorithm>
#include <cmath>

namespace symh::dynamics {

namespace {

PhasePoint flow_k(const HamiltonianSpec& H, const PhasePoint& z, int k, const FlowConfig& cfg) {
    PhasePoint cur = z;
    for (int u = 0; u < k; ++u) cur = flow_steps(H, 0.0, 1.0, cur, cfg).out;
    return cur;
}

double avg_action_k(const HamiltonianSpec& H, const PhasePoint& z, int k,
                    const FlowConfig& cfg) {
    double A = 0;
    PhasePoint cur = z;
    for (int u = 0; u < k; ++u) {
        StepPieces p = flow_steps(H, 0.0, 1.0, cur, cfg);
        cur = p.out;
        A += p.action;
    }
    return A / k;
}

}  // namespace

// ---------------------------------------------------------------------------
// translated orbits (q-translation only; momentum free)
// ---------------------------------------------------------------------------

TranslatedOrbit find_translated_orbit(const HamiltonianSpec& H, int k, const Vec& alpha,
                                      const PhasePoint& seed, const FlowConfig& cfg) {
    if (k < 1) throw ConfigError("k >= 1 required");
    const int n = H.n;
    double W = H.coercive ? std::abs(alpha.norm()) + 2.0 : H.support_radius + 0.5;

    auto qdrift = [&](const PhasePoint& z) {
        PhasePoint out = flow_k(H, z, k, cfg);
        Vec d = out.q - z.q;
        for (int i = 0; i < n; ++i) d[i] -= k * alpha[i];
        return std::pair<Vec, PhasePoint>(d, out);
    };

    std::vector<PhasePoint> seeds{seed};
    const int QS = 8, PS = 17;
    for (int iq = 0; iq < QS; ++iq)
        for (int ip = 0; ip < PS; ++ip) {
            PhasePoint s;
            s.q = Vec::zero(n);
            s.p = Vec::zero(n);
            s.q[0] = static_cast<double>(iq) / QS;
            s.p[0] = -W + 2.0 * W * ip / (PS - 1);
            if (n == 2) {
                s.q[1] = wrap01(0.3 + 1.7 * s.q[0]);
                s.p[1] = s.p[0] * 0.5;
            }
            seeds.push_back(s);
        }

    TranslatedOrbit best;
    best.residual = 1e300;
    for (const auto& s0 : seeds) {
        PhasePoint z = s0;
        for (int it = 0; it < 40; ++it) {
            auto [r, out] = qdrift(z);
            double rn = r.norm_inf();
            if (rn < best.residual) {
                best.z = z;
                best.residual = rn;
                best.p_prime = out.p;
            }
            if (rn <= cfg.newton_tol) return best;
            // Newton in the momentum variables only (q kept from the seed)
            double J[4] = {0, 0, 0, 0};
            double h = 1e-7;
            for (int c = 0; c < n; ++c) {
                PhasePoint zp = z;
                zp.p[c] += h;
                auto [rp, outp] = qdrift(zp);
                for (int rr = 0; rr < n; ++rr) J[rr * n + c] = (rp[rr] - r[rr]) / h;
            }
            double rhs[2];
            for (int i = 0; i < n; ++i) rhs[i] = -r[i];
            if (!solve_small(n, J, rhs)) break;
            double step = 0;
            for (int i = 0; i < n; ++i) step = std::max(step, std::abs(rhs[i]));
            double damp = step > 0.5 ? 0.5 / step : 1.0;
            for (int i = 0; i < n; ++i) z.p[i] += damp * rhs[i];
            if (!H.coercive && std::abs(z.p[0]) > W + 1.0) break;
        }
    }
    throw NoOrbitFound("no translated orbit at this rotation vector (k = " +
                       std::to_string(k) + ")");
}

// ---------------------------------------------------------------------------
// momentum-returning orbits
// ---------------------------------------------------------------------------

std::vector<ReturningOrbit> find_returning_orbits(const HamiltonianSpec& H, int k,
                                                  const Vec& alpha, const FlowConfig& cfg,
                                                  int q_seeds, int p_seeds, double p_window) {
    const int n = H.n;
    if (n != 1) throw ConfigError("returning-orbit search implemented for n = 1");
    double W = p_window > 0 ? p_window
                            : (H.coercive ? std::abs(alpha[0]) + 1.5 : H.support_radius + 0.4);
    std::vector<ReturningOrbit> found;
    auto resid = [&](double q, double p) {
        PhasePoint out = flow_k(H, PhasePoint{Vec(q), Vec(p)}, k, cfg);
        return std::pair<double, double>(out.q[0] - q - k * alpha[0], out.p[0] - p);
    };
    for (int iq = 0; iq < q_seeds; ++iq)
        for (int ip = 0; ip < p_seeds; ++ip) {
            double q = static_cast<double>(iq) / q_seeds;
            double p = -W + 2.0 * W * ip / (p_seeds - 1);
            // 2D Newton on (q, p)
            bool ok = false;
            for (int it = 0; it < 50; ++it) {
                auto [rq, rp] = resid(q, p);
                double rn = std::max(std::abs(rq), std::abs(rp));
                if (rn <= cfg.newton_tol) {
                    ok = true;
                    break;
                }
                double h = 1e-7;
                auto [rq1, rp1] = resid(q + h, p);
                auto [rq2, rp2] = resid(q, p + h);
                double J[4] = {(rq1 - rq) / h, (rq2 - rq) / h, (rp1 - rp) / h, (rp2 - rp) / h};
                double rhs[2] = {-rq, -rp};
                if (!solve_small(2, J, rhs)) break;
                double step = std::max(std::abs(rhs[0]), std::abs(rhs[1]));
                double damp = step > 0.35 ? 0.35 / step : 1.0;
                q += damp * rhs[0];
                p += damp * rhs[1];
                if (std::abs(p) > W + 1.5) break;
            }
            if (!ok) continue;
            ReturningOrbit R;
            R.z = PhasePoint{Vec(q), Vec(p)};
            auto [rq, rp] = resid(q, p);
            R.residual = std::max(std::abs(rq), std::abs(rp));
            R.rotation = Vec(alpha[0]);
            R.avg_action = avg_action_k(H, R.z, k, cfg);
            bool dup = false;
            for (auto& o : found) {
                double dq = std::abs(wrap01(o.z.q[0] - q + 0.5) - 0.5);
                if (dq < 1e-6 && std::abs(o.z.p[0] - p) < 1e-6) dup = true;
            }
            if (!dup) found.push_back(R);
        }
    if (found.empty()) throw NoOrbitFound("no momentum-returning orbit at this rotation");
    return found;
}

std::vector<ReturningOrbit> orbits_at_momentum(const HamiltonianSpec& H, int k, double p,
                                               const FlowConfig& cfg, int q_seeds) {
    if (H.n != 1) throw ConfigError("orbits_at_momentum implemented for n = 1");
    std::vector<ReturningOrbit> out;
    auto momret = [&](double q) {
        PhasePoint o = flow_k(H, PhasePoint{Vec(q), Vec(p)}, k, cfg);
        return std::pair<double, PhasePoint>(o.p[0] - p, o);
    };
    double prev = momret(0.0).first;
    for (int i = 1; i <= q_seeds; ++i) {
        double q1 = static_cast<double>(i) / q_seeds;
        double cur = momret(q1).first;
        double q0 = static_cast<double>(i - 1) / q_seeds;
        bool bracket = prev == 0.0 || (prev < 0) != (cur < 0);
        if (std::abs(prev) < 1e-13 && std::abs(cur) < 1e-13) {
            // flat zero stretch: integrable-like level, every point returns
            bracket = true;
        }
        if (bracket) {
            double a = q0, b = q1, fa = prev;
            for (int it = 0; it < 80; ++it) {
                double m = 0.5 * (a + b);
                double fm = momret(m).first;
                if ((fm < 0) == (fa < 0)) {
                    a = m;
                    fa = fm;
                } else
                    b = m;
            }
            double q = 0.5 * (a + b);
            auto [r, o] = momret(q);
            ReturningOrbit R;
            R.z = PhasePoint{Vec(q), Vec(p)};
            R.residual = std::abs(r);
            R.rotation = Vec((o.q[0] - q) / k);
            R.avg_action = avg_action_k(H, R.z, k, cfg);
            bool dup = false;
            for (auto& e : out)
                if (std::abs(wrap01(e.z.q[0] - q + 0.5) - 0.5) < 1e-5) dup = true;
            if (!dup && R.residual < 1e-7) out.push_back(R);
        }
        prev = cur;
    }
    return out;
}

// ---------------------------------------------------------------------------
// census of periodic orbits
// ---------------------------------------------------------------------------

int CensusReport::distinct_actions(double tol) const {
    std::vector<double> a;
    for (auto& r : rows) a.push_back(r.action);
    std::sort(a.begin(), a.end());
    int cnt = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (i == 0 || a[i] - a[i - 1] > tol * std::max(1.0, std::abs(a[i]))) ++cnt;
    return cnt;
}

CensusReport census(const HamiltonianSpec& H, int N, const FlowConfig& cfg, uint64_t seed,
                    double dedup_radius) {
    if (N > 64) throw ConfigError("census: N <= 64");
    if (H.n != 1) throw ConfigError("census implemented for n = 1");
    CensusReport rep;
    if (H.sup_norm_estimate() < 1e-12) {
        rep.degenerate = true;  // identity flow: every point is fixed
        return rep;
    }
    double W = H.coercive ? 1.6 : H.support_radius + 0.3;
    double vmax = 0.0;
    for (int i = 0; i <= 64; ++i) {
        Vec p(-W + 2 * W * i / 64.0);
        Vec q(0.33);
        vmax = std::max(vmax, std::abs(H.dp(0.0, q, p)[0]));
    }
    Rng rng(seed);

    auto try_solve = [&](int v, int u, double q0, double p0, CensusRow& out) {
        double q = q0, p = p0;
        for (int it = 0; it < 60; ++it) {
            PhasePoint o = flow_k(H, PhasePoint{Vec(q), Vec(p)}, v, cfg);
            double rq = o.q[0] - q - u, rp = o.p[0] - p;
            double rn = std::max(std::abs(rq), std::abs(rp));
            if (rn <= cfg.newton_tol) {
                out.period = v;
                out.rotation = Vec(static_cast<double>(u) / v);
                out.z = PhasePoint{Vec(wrap01(q)), Vec(p)};
                out.action = avg_action_k(H, out.z, v, cfg);
                return true;
            }
            double h = 1e-7;
            PhasePoint o1 = flow_k(H, PhasePoint{Vec(q + h), Vec(p)}, v, cfg);
            PhasePoint o2 = flow_k(H, PhasePoint{Vec(q), Vec(p + h)}, v, cfg);
            double J[4] = {(o1.q[0] - o.q[0]) / h - 1.0, (o2.q[0] - o.q[0]) / h,
                           (o1.p[0] - o.p[0]) / h, (o2.p[0] - o.p[0]) / h - 1.0};
            double rhs[2] = {-rq, -rp};
            if (!solve_small(2, J, rhs)) return false;
            double step = std::max(std::abs(rhs[0]), std::abs(rhs[1]));
            double damp = step > 0.3 ? 0.3 / step : 1.0;
            q += damp * rhs[0];
            p += damp * rhs[1];
            if (std::abs(p) > W + 1.2) return false;
        }
        return false;
    };

    // cached orbit points per stored row, for geometric deduplication
    std::vector<std::vector<PhasePoint>> orbit_pts;
    auto is_new = [&](const CensusRow& r) {
        for (size_t e = 0; e < rep.rows.size(); ++e) {
            if (rep.rows[e].period != r.period) continue;
            for (const auto& pt : orbit_pts[e]) {
                double dq = std::abs(wrap01(pt.q[0] - r.z.q[0] + 0.5) - 0.5);
                double dp = std::abs(pt.p[0] - r.z.p[0]);
                if (dq < dedup_radius && dp < dedup_radius) return false;
            }
        }
        return true;
    };
    auto store = [&](const CensusRow& row) {
        std::vector<PhasePoint> pts;
        PhasePoint cur = row.z;
        for (int u = 0; u < row.period; ++u) {
            pts.push_back(cur);
            cur = flow_steps(H, 0.0, 1.0, cur, cfg).out;
        }
        rep.rows.push_back(row);
        orbit_pts.push_back(std::move(pts));
    };

    // mean drift profile over p: candidates for rotation u/v sit near its roots
    const int PROF = 96;
    std::vector<double> prof(PROF + 1);
    for (int i = 0; i <= PROF; ++i) {
        double p = -W + 2 * W * i / PROF;
        double acc = 0;
        for (int j = 0; j < 8; ++j) acc += H.dp(0.0, Vec(j / 8.0), Vec(p))[0];
        prof[i] = acc / 8;
    }
    for (int v = 1; v <= N; ++v) {
        int umax = static_cast<int>(std::ceil(v * vmax)) + 1;
        for (int u = -umax; u <= umax; ++u) {
            double target = static_cast<double>(u) / v;
            if (std::abs(target) > vmax * 1.05 + 1e-9) continue;
            std::vector<double> p_seeds_v;
            for (int i = 0; i < PROF; ++i) {
                double a = prof[i] - target, b = prof[i + 1] - target;
                if (a == 0.0 || (a < 0) != (b < 0)) {
                    double t = a / (a - b + (a == b ? 1e-300 : 0.0));
                    p_seeds_v.push_back(-W + 2 * W * (i + t) / PROF);
                }
            }
            if (u == 0) p_seeds_v.push_back(0.0);
            if (p_seeds_v.empty()) continue;
            if (p_seeds_v.size() > 3) p_seeds_v.resize(3);
            int found_here = 0;
            for (double p0 : p_seeds_v) {
                for (int iq = 0; iq < 6 && found_here < 4; ++iq) {
                    double q0 = (iq + 0.37) / 6.0 + 0.01 * rng.uniform(-1, 1);
                    CensusRow row;
                    if (!try_solve(v, u, q0, p0, row)) continue;
                    // reduce to the minimal period
                    bool minimal = true;
                    for (int d = 1; d < v; ++d) {
                        if (v % d != 0) continue;
                        PhasePoint o = flow_k(H, row.z, d, cfg);
                        double dq = o.q[0] - row.z.q[0];
                        if (std::abs(dq - std::round(dq)) < 1e-8 &&
                            std::abs(o.p[0] - row.z.p[0]) < 1e-8) {
                            minimal = false;
                            break;
                        }
                    }
                    if (!minimal) continue;
                    if (is_new(row)) {
                        store(row);
                        ++found_here;
                    }
                }
            }
        }
    }
    std::sort(rep.rows.begin(), rep.rows.end(), [](const CensusRow& a, const CensusRow& b) {
        if (a.period != b.period) return a.period < b.period;
        if (a.rotation[0] != b.rotation[0]) return a.rotation[0] < b.rotation[0];
        return a.action < b.action;
    });
    return rep;
}

}  // namespace symh::dynamics
