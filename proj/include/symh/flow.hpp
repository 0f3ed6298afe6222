#pragma once

#include <symh/hamiltonian.hpp>

#include <vector>

namespace symh::dynamics {

// Point on the universal cover R^{2n}; projection to the torus is q mod Z^n.
struct PhasePoint {
    Vec q;
    Vec p;
};

enum class Integrator { SplittingSeparable, ImplicitMidpoint };

struct FlowConfig {
    Integrator integrator = Integrator::SplittingSeparable;
    int substeps_per_unit_time = 16;
    double newton_tol = 1e-12;
    int max_newton_iters = 50;

    void validate() const;
    static FlowConfig for_spec(const HamiltonianSpec& H);  // picks a compatible integrator
};

// Lifted trajectory with accumulated action.
// `action` is the accumulated integral of p dq - H dt over [0, horizon];
// the average action is action / horizon.
struct LiftedOrbit {
    std::vector<double> times;
    std::vector<PhasePoint> samples;
    double action = 0.0;
    double horizon = 0.0;
    double average_action() const { return horizon > 0 ? action / horizon : 0.0; }
    const PhasePoint& endpoint() const { return samples.back(); }
};

// One elementary integrator piece together with the exact generating-function
// bookkeeping of the discrete map: S-value in the (q, P) convention and the
// action increment, both evaluated on the computed sub-trajectory.
struct StepPieces {
    PhasePoint out;
    double action = 0.0;   // integral of p dq - H dt along the integrator pieces
    double genfun = 0.0;   // type-(q,P) generating value: <P, Q-q> - action
};

// Advance by dt (one substep chain of length cfg.substeps_per_unit_time * dt).
StepPieces flow_steps(const HamiltonianSpec& H, double t0, double dt, const PhasePoint& z,
                      const FlowConfig& cfg);

// Time-one flow on the universal cover. Identity (bit for bit) outside supp(H).
PhasePoint time_one_map(const HamiltonianSpec& H, const PhasePoint& z, const FlowConfig& cfg);

// Orbit over [0, k] with per-substep samples and accumulated action.
LiftedOrbit iterate_lift(const HamiltonianSpec& H, const PhasePoint& z, int k,
                         const FlowConfig& cfg);

// q-component of (Phi^T(z) - z) / T.
Vec rotation_vector(const LiftedOrbit& orb);

}  // namespace symh::dynamics
