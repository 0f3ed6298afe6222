#include <symh/measures.hpp>
#include <symh/io.hpp>
#include <symh/subdiff.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace symh::measures {

// ---------------------------------------------------------------------------
// time averages along pieces
// ---------------------------------------------------------------------------

namespace {

// time-average of g(q, p) along the orbit piece (trapezoid over samples);
// single-sample pieces are point masses.
template <typename G>
double piece_average(const LiftedOrbit& orb, G&& g) {
    if (orb.samples.size() == 1) return g(orb.samples[0]);
    double acc = 0.0;
    for (size_t i = 0; i + 1 < orb.samples.size(); ++i) {
        double dt = orb.times[i + 1] - orb.times[i];
        acc += 0.5 * dt * (g(orb.samples[i]) + g(orb.samples[i + 1]));
    }
    return acc / orb.horizon;
}

template <typename G>
double measure_average(const OrbitMeasure& mu, G&& g) {
    double acc = 0.0;
    for (const auto& pc : mu.pieces) acc += pc.weight * piece_average(pc.orbit, g);
    return acc;
}

}  // namespace

OrbitMeasure orbit_measure(const HamiltonianSpec& H, const std::vector<LiftedOrbit>& orbits,
                           const std::vector<double>& weights, const FlowConfig& cfg,
                           uint64_t observable_seed) {
    if (orbits.empty()) throw EmptyInput("orbit_measure: no orbits");
    if (orbits.size() != weights.size()) throw ConfigError("weights size mismatch");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0) throw ConfigError("weights must be nonnegative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw ConfigError("weights must sum to 1");

    OrbitMeasure mu;
    mu.rotation = Vec::zero(H.n);
    for (size_t i = 0; i < orbits.size(); ++i) {
        mu.pieces.push_back({orbits[i], weights[i]});
        if (orbits[i].horizon >= 1.0) {
            Vec r = dynamics::rotation_vector(orbits[i]);
            for (int d = 0; d < H.n; ++d) mu.rotation[d] += weights[i] * r[d];
        }
        mu.avg_action += weights[i] * orbits[i].average_action();
    }

    // invariance defect over a fixed dictionary of trigonometric observables
    Rng rng(observable_seed);
    double defect = 0.0;
    std::vector<std::array<double, 4>> dict;  // (aq, ap, phase, kind)
    for (int i = 0; i < 32; ++i)
        dict.push_back({static_cast<double>(rng.uniform_int(0, 2)),
                        rng.uniform(0.3, 1.8), rng.uniform(0.0, 2 * M_PI),
                        static_cast<double>(rng.uniform_int(0, 1))});
    for (auto& ob : dict) {
        auto g = [&](const PhasePoint& z) {
            double a = 2 * M_PI * (ob[0] * z.q[0] + 0.0) + ob[1] * z.p[0] + ob[2];
            return ob[3] > 0.5 ? std::sin(a) : std::cos(a);
        };
        double direct = measure_average(mu, g);
        // pushforward: average g(Phi^1(z)) along the pieces
        double pushed = 0.0;
        for (const auto& pc : mu.pieces) {
            auto gp = [&](const PhasePoint& z) {
                return g(dynamics::time_one_map(H, z, cfg));
            };
            pushed += pc.weight * piece_average(pc.orbit, gp);
        }
        defect = std::max(defect, std::abs(pushed - direct));
    }
    mu.invariance_defect = defect;
    return mu;
}

Vec rotation_of_measure(const OrbitMeasure& mu, const HamiltonianSpec& H) {
    Vec r = Vec::zero(H.n);
    for (int d = 0; d < H.n; ++d)
        r[d] = measure_average(mu, [&](const PhasePoint& z) {
            return H.dp(0.0, z.q, z.p)[d];
        });
    return r;
}

double average_action(const OrbitMeasure& mu, const HamiltonianSpec& H) {
    return measure_average(mu, [&](const PhasePoint& z) {
        Vec hp = H.dp(0.0, z.q, z.p);
        return dot(z.p, hp) - H.value_base(0.0, z.q, z.p);
    });
}

OrbitMeasure liouville_measure(const HamiltonianSpec& H, double chi_radius, int q_nodes,
                               int p_nodes) {
    if (H.n != 1) throw ConfigError("liouville_measure implemented for n = 1");
    OrbitMeasure mu;
    mu.rotation = Vec::zero(1);
    // weights carry the chi omega cell masses (unnormalized, as in the
    // Liouville identities); quadratures against it are plain integrals
    double P = chi_radius + 1.0;  // C^2 cutoff over [R, R+1]
    double cell = (2.0 * P / (p_nodes - 1)) * (1.0 / q_nodes);
    for (int iq = 0; iq < q_nodes; ++iq)
        for (int ip = 0; ip < p_nodes; ++ip) {
            double q = static_cast<double>(iq) / q_nodes;
            double p = -P + 2.0 * P * ip / (p_nodes - 1);
            double chi = cutoff_c2(std::abs(p) - chi_radius);
            if (chi == 0.0) continue;
            double w = chi * cell * ((ip == 0 || ip == p_nodes - 1) ? 0.5 : 1.0);
            LiftedOrbit orb;
            orb.times = {0.0};
            orb.samples = {PhasePoint{Vec(q), Vec(p)}};
            orb.horizon = 0.0;
            mu.pieces.push_back({orb, w});
        }
    return mu;
}

// ---------------------------------------------------------------------------
// mu_alpha via Caratheodory combination of translated orbits
// ---------------------------------------------------------------------------

OrbitMeasure build_mu_alpha(const HamiltonianSpec& H, double alpha, double p, int k,
                            const FlowConfig& cfg, std::optional<double> hbar_level) {
    if (H.n != 1) throw ConfigError("build_mu_alpha implemented for n = 1");
    // attainable rotations at the slice: momentum-returning orbits through p
    auto at_p = dynamics::orbits_at_momentum(H, k, p, cfg, 128);
    if (at_p.empty()) throw NoOrbitFound("no momentum-returning orbits at this slice");
    double lo = 1e300, hi = -1e300;
    for (auto& o : at_p) {
        lo = std::min(lo, o.rotation[0]);
        hi = std::max(hi, o.rotation[0]);
    }
    double tol = 5e-4 + 2.0 / 64.0 / k;  // hull inflation at sampling scale
    if (alpha < lo - tol || alpha > hi + tol)
        throw InfeasibleAlpha("alpha outside the attainable rotation hull [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");

    // Caratheodory: at n = 1 two vertices suffice. Among orbits with nearly the
    // same rotation, prefer the ones at the homogenized critical level.
    auto level_gap = [&](const dynamics::ReturningOrbit& o) {
        if (!hbar_level) return 0.0;
        return std::abs(p * o.rotation[0] - o.avg_action - *hbar_level);
    };
    const dynamics::ReturningOrbit* left = nullptr;
    const dynamics::ReturningOrbit* right = nullptr;
    const double rot_tie = 1e-9;
    for (auto& o : at_p) {
        if (o.rotation[0] <= alpha + 1e-12) {
            if (!left || o.rotation[0] > left->rotation[0] + rot_tie ||
                (std::abs(o.rotation[0] - left->rotation[0]) <= rot_tie &&
                 level_gap(o) < level_gap(*left)))
                left = &o;
        }
        if (o.rotation[0] >= alpha - 1e-12) {
            if (!right || o.rotation[0] < right->rotation[0] - rot_tie ||
                (std::abs(o.rotation[0] - right->rotation[0]) <= rot_tie &&
                 level_gap(o) < level_gap(*right)))
                right = &o;
        }
    }
    if (!left) left = right;
    if (!right) right = left;

    std::vector<LiftedOrbit> orbits;
    std::vector<double> weights;
    if (left == right || std::abs(left->rotation[0] - right->rotation[0]) < 1e-12) {
        orbits.push_back(dynamics::iterate_lift(H, left->z, k, cfg));
        weights.push_back(1.0);
    } else {
        double lam = (right->rotation[0] - alpha) /
                     (right->rotation[0] - left->rotation[0]);
        lam = std::clamp(lam, 0.0, 1.0);
        orbits.push_back(dynamics::iterate_lift(H, left->z, k, cfg));
        orbits.push_back(dynamics::iterate_lift(H, right->z, k, cfg));
        weights = {lam, 1.0 - lam};
    }
    OrbitMeasure mu = orbit_measure(H, orbits, weights, cfg);
    mu.momentum_p = p;
    return mu;
}

// ---------------------------------------------------------------------------
// support checks
// ---------------------------------------------------------------------------

SupportReport support_checks(const OrbitMeasure& mu, const HamiltonianSpec& H) {
    SupportReport rep;
    double inside = 0.0, total = 0.0;
    double emin = 1e300, emax = -1e300, emean = 0.0, ew = 0.0;
    for (const auto& pc : mu.pieces) {
        for (size_t i = 0; i < pc.orbit.samples.size(); ++i) {
            const PhasePoint& z = pc.orbit.samples[i];
            double w = pc.weight / static_cast<double>(pc.orbit.samples.size());
            total += w;
            bool in = !H.outside_support(z.p) &&
                      std::abs(H.value_base(0.0, z.q, z.p)) > 0.0;
            if (H.compact_support()) {
                if (!H.outside_support(z.p)) inside += w;
            } else {
                inside += w;
            }
            (void)in;
            double e = H.value_base(0.0, z.q, z.p);
            emin = std::min(emin, e);
            emax = std::max(emax, e);
            emean += w * e;
            ew += w;
        }
    }
    rep.mass_inside_support = total > 0 ? inside / total : 0.0;
    rep.energy_spread = emax - emin;
    rep.level_value = ew > 0 ? emean / ew : 0.0;
    if (mu.momentum_p) {
        double lhs = mu.avg_action;
        double rhs = *mu.momentum_p * mu.rotation[0] - rep.level_value;
        rep.level_identity_gap = std::abs(lhs - rhs);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// R-bar set emission
// ---------------------------------------------------------------------------

std::vector<RSetRow> emit_R_set(const std::vector<double>& p_grid,
                                const std::vector<double>& hbar, int alpha_samples_per_node) {
    std::vector<RSetRow> rows;
    for (size_t i = 0; i < p_grid.size(); ++i) {
        double p = p_grid[i];
        double sl, sr;
        if (i == 0)
            sl = sr = (hbar[1] - hbar[0]) / (p_grid[1] - p_grid[0]);
        else if (i + 1 == p_grid.size())
            sl = sr = (hbar[i] - hbar[i - 1]) / (p_grid[i] - p_grid[i - 1]);
        else {
            sl = (hbar[i] - hbar[i - 1]) / (p_grid[i] - p_grid[i - 1]);
            sr = (hbar[i + 1] - hbar[i]) / (p_grid[i + 1] - p_grid[i]);
        }
        double lo = std::min(sl, sr), hi = std::max(sl, sr);
        int m = std::max(1, alpha_samples_per_node);
        for (int j = 0; j < m; ++j) {
            double a = m == 1 ? 0.5 * (lo + hi)
                              : lo + (hi - lo) * j / (m - 1);
            RSetRow r;
            r.alpha = a;
            r.action = p * a - hbar[i];
            r.p = p;
            rows.push_back(r);
        }
    }
    // flag extremal points of the sampled (alpha, action) cloud
    std::vector<std::vector<double>> pts;
    for (auto& r : rows) pts.push_back({r.alpha, r.action});
    if (pts.size() >= 3) {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        auto cross = [](auto& o, auto& a, auto& b) {
            return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        };
        std::vector<std::vector<double>> h;
        for (auto& p2 : pts) {
            while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), p2) <= 0) h.pop_back();
            h.push_back(p2);
        }
        size_t lower = h.size() + 1;
        for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
            while (h.size() >= lower && cross(h[h.size() - 2], h.back(), *it) <= 0)
                h.pop_back();
            h.push_back(*it);
        }
        h.pop_back();
        for (auto& r : rows)
            for (auto& v : h)
                if (std::abs(v[0] - r.alpha) < 1e-12 && std::abs(v[1] - r.action) < 1e-12)
                    r.extremal = true;
    }
    return rows;
}

std::string rset_to_csv(const std::vector<RSetRow>& rows) {
    CsvTable t;
    t.header = {"alpha", "action", "p", "extremal"};
    for (auto& r : rows)
        t.rows.push_back({format_g17(r.alpha), format_g17(r.action), format_g17(r.p),
                          r.extremal ? "1" : "0"});
    return t.to_string();
}

std::string measure_to_json(const OrbitMeasure& mu) {
    nlohmann::json j;
    j["rotation"] = mu.rotation[0];
    j["avg_action"] = mu.avg_action;
    j["invariance_defect"] = mu.invariance_defect;
    if (mu.momentum_p) j["momentum_p"] = *mu.momentum_p;
    auto arr = nlohmann::json::array();
    for (auto& pc : mu.pieces) {
        nlohmann::json e;
        e["weight"] = pc.weight;
        e["horizon"] = pc.orbit.horizon;
        e["q0"] = pc.orbit.samples.front().q[0];
        e["p0"] = pc.orbit.samples.front().p[0];
        e["avg_action"] = pc.orbit.average_action();
        arr.push_back(e);
    }
    j["pieces"] = arr;
    return j.dump(2);
}

}  // namespace symh::measures
