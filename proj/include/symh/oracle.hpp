#pragma once

#include <symh/selector.hpp>

namespace symh::oracle {

using dynamics::HamiltonianSpec;
using genfunc::GeneratingLandscape;

// ---------------------------------------------------------------------------
// Effective Hamiltonian ground truth for convex-in-p Hamiltonians.
// ---------------------------------------------------------------------------

enum class EffHamMethod { LaxOleinik, ActionIntegral };

struct EffHamTable {
    std::vector<double> p_grid;
    std::vector<double> values;
    EffHamMethod method = EffHamMethod::LaxOleinik;
    double residual = 0.0;
    std::string to_csv() const;
    // discrete midpoint convexity violations (0 expected for convex input)
    int convexity_violations(double tol = 1e-9) const;
};

struct LaxOleinikOptions {
    int q_nodes = 256;
    int v_controls = 64;
    double v_max = 2.5;
    double dt = 0.25;
    int iters = 4000;
};

// Additive eigenvalue of the discounted/averaged Lax-Oleinik operator at
// cohomology P. Throws NonConvexInput when the directional convexity test fails.
double lax_oleinik_effham(const HamiltonianSpec& H, double P, const LaxOleinikOptions& opt = {},
                          double* residual = nullptr);

EffHamTable lax_oleinik_table(const HamiltonianSpec& H, const std::vector<double>& p_grid,
                              const LaxOleinikOptions& opt = {});

// Semi-analytic pendulum benchmark via the action integral.
struct PendulumEffHam {
    double value = 0.0;
    double plateau_value = 0.0;  // max V
    double p_c = 0.0;            // plateau half-width
};
PendulumEffHam pendulum_effham(double amplitude, double P);
EffHamTable pendulum_table(double amplitude, const std::vector<double>& p_grid);

// ---------------------------------------------------------------------------
// Exhaustive minimax oracle on tiny landscapes (independent of the
// boundary-matrix reduction path).
// ---------------------------------------------------------------------------

double brute_force_minimax(const GeneratingLandscape& L, selector::ClassKind cls);

}  // namespace symh::oracle
