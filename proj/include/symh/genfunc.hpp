#pragma once

#include <symh/flow.hpp>
#include <symh/sampled.hpp>

#include <memory>
#include <optional>
#include <string>

namespace symh::genfunc {

using dynamics::FlowConfig;
using dynamics::HamiltonianSpec;
using dynamics::PhasePoint;

// ---------------------------------------------------------------------------
// StepGenFun: sampled type-(q,P) generating function of one flow step.
// Relations at every grid node:  p = P + dS/dq,  Q = q + dS/dP,
// where (q,p) -> (Q,P) is the integrator map over [t0, t0+dt].
// ---------------------------------------------------------------------------

struct StepGenFun {
    double t0 = 0.0, dt = 1.0;
    int nq = 0, np = 0;
    double p_lo = 0.0, p_hi = 0.0;
    std::vector<double> S;      // generating value  <P, Q-q> - action
    std::vector<double> p_in;   // input momentum solved from (q, P)
    std::vector<double> drift;  // Q - q
    double iteration_residual = 0.0;

    double at(const std::vector<double>& g, double q, double P, int daxis = -1) const;
    double s(double q, double P) const { return at(S, q, P); }
    double s_dq(double q, double P) const { return at(S, q, P, 0); }
    double s_dP(double q, double P) const { return at(S, q, P, 1); }
};

// Builds the table; throws NoGeneratingFunction when the fixed-point/Newton
// solve for the input momentum fails to contract (dt too large).
StepGenFun step_genfunc(const HamiltonianSpec& H, double t0, double dt, const FlowConfig& cfg,
                        int nq = 96, int np = 161, double p_pad = 1.0);

// Discrete Lagrangian of the unit-time map: L(Q, Q') = -action of the step
// with endpoint positions (Q, Q'); defined where the map is twist
// (d position / d momentum > 0). Sampled over Q in T^1, dQ = Q'-Q in [-D, D].
struct DiscreteLagrangian {
    int nq = 0, nd = 0;
    double d_lo = 0, d_hi = 0;
    std::vector<double> L;
    std::vector<double> p0;  // input momentum of the step
    std::vector<double> p1;  // output momentum of the step
    double at(const std::vector<double>& g, double q, double dq, int daxis = -1) const;
    double l(double q, double dq) const { return at(L, q, dq); }
    double l_dq(double q, double dq) const { return at(L, q, dq, 0); }
    double l_dd(double q, double dq) const { return at(L, q, dq, 1); }
};

// ---------------------------------------------------------------------------
// GeneratingLandscape: sampled quadratic-at-infinity landscape, reduced to at
// most 3 free variables. Eliminated fiber directions are recorded through
// negative_index (index of the coupling form B_k) and sampled_negative (the
// negative directions still present as coned axes of the sample grid).
// ---------------------------------------------------------------------------

struct GeneratingLandscape {
    int k = 1;
    int ell = 1;
    int n = 1;
    bool graph_mode = false;   // graph-of-the-map landscape in the action convention
    Vec y;                     // fixed momentum slice (ignored in graph mode)
    SampledFunction f;         // values over the free variables
    int negative_index = 0;    // index of B_k at infinity
    int sampled_negative = 0;  // negative directions represented by coned axes
    std::string route;         // construction route id
    double support_leak = 0.0; // max |F - B_k| over negative-end faces (full route)
    double offset = 0.0;       // additive constant of H, folded in exactly
};

struct LandscapeGrids {
    int x_nodes = 64;
    int fiber_nodes = 49;
    double fiber_margin = 1.5;
    double p_pad = 1.0;          // step-table momentum padding around the slice
    long cell_budget = 2'500'000;
    int table_nq = 96;
    int table_np = 161;
    int table_nd = 129;
};

// Finite-difference gradient norm of the landscape at a point (free variables).
double grad_residual(const GeneratingLandscape& L, const std::vector<double>& point);

// ---------------------------------------------------------------------------
// LandscapeFamily: shared step tables + route machinery for one Hamiltonian.
// ---------------------------------------------------------------------------

class LandscapeFamily {
public:
    LandscapeFamily(HamiltonianSpec H, FlowConfig cfg, LandscapeGrids grids = {});

    // F_k landscape at fixed momentum slice y.
    GeneratingLandscape build(int k, const Vec& y) const;
    // Graph-mode landscape of phi^k (action convention), for capacities.
    GeneratingLandscape build_graph(int k) const;
    // l-fold composition G_{l,k}; block chaining is associative, so the
    // composed landscape is assembled as the lk-step chain with outer 1/l.
    GeneratingLandscape compose(const GeneratingLandscape& Fk, int ell) const;

    const HamiltonianSpec& spec() const { return H_; }
    const FlowConfig& flow_config() const { return cfg_; }
    const LandscapeGrids& grids() const { return grids_; }
    const StepGenFun& unit_table(double y_center, double halfwidth) const;
    const DiscreteLagrangian& lagrangian_table(double d_max) const;

    // Index of the coupling form B_k over the fiber (LDL inertia count).
    static int coupling_index(int n, int k);

    // Diagnostics from the most recent build on this thread.
    struct RouteInfo {
        std::string route;
        double residual = 0.0;
    };

private:
    GeneratingLandscape build_impl(int k, const Vec& y, bool graph) const;
    GeneratingLandscape build_integrable(int k, const Vec& y) const;
    GeneratingLandscape build_full_k2(int k, const Vec& y) const;
    GeneratingLandscape build_convex_chain(int k, const Vec& y) const;
    GeneratingLandscape build_shooting(int k, const Vec& y, bool graph) const;
    GeneratingLandscape build_shooting_k1_graph_exact(const Vec& y) const;

    HamiltonianSpec H_;       // offset stripped
    double offset_ = 0.0;
    FlowConfig cfg_;
    LandscapeGrids grids_;
    mutable std::optional<StepGenFun> unit_;
    mutable double unit_center_ = 0.0, unit_halfwidth_ = 0.0;
    mutable std::optional<DiscreteLagrangian> lag_;
    mutable double lag_dmax_ = 0.0;
};

// Convenience wrappers matching the operation names.
GeneratingLandscape build_landscape(const HamiltonianSpec& H, int k, const Vec& y,
                                    const LandscapeGrids& grids = {},
                                    std::optional<FlowConfig> cfg = std::nullopt);
GeneratingLandscape compose_landscape(const LandscapeFamily& fam, const GeneratingLandscape& Fk,
                                      int ell);

// Binary cache container (header + little-endian float64 payload).
void save_landscape(const GeneratingLandscape& L, const std::string& path);
GeneratingLandscape load_landscape(const std::string& path);
uint64_t landscape_cache_key(const HamiltonianSpec& H, const LandscapeGrids& grids, int k,
                             int ell, const Vec& y, bool graph_mode);

}  // namespace symh::genfunc
