#pragma once

#include <symh/orbits.hpp>
#include <symh/selector.hpp>

#include <optional>

namespace symh::measures {

using dynamics::FlowConfig;
using dynamics::HamiltonianSpec;
using dynamics::LiftedOrbit;
using dynamics::PhasePoint;

// Weighted list of orbit pieces approximating an invariant measure. A piece
// with a single sample is a point mass (used for the truncated Liouville
// measure); orbit pieces carry the time average over their horizon.
struct OrbitMeasure {
    struct Piece {
        LiftedOrbit orbit;
        double weight = 0.0;
    };
    std::vector<Piece> pieces;
    Vec rotation;
    double avg_action = 0.0;
    double invariance_defect = 0.0;
    std::optional<double> momentum_p;  // provenance for measures built at a slice
};

// Assemble a measure from orbits and weights; the invariance defect is the
// worst discrepancy of the time-one pushforward over a fixed dictionary of
// 32 trigonometric observables.
OrbitMeasure orbit_measure(const HamiltonianSpec& H, const std::vector<LiftedOrbit>& orbits,
                           const std::vector<double>& weights, const FlowConfig& cfg,
                           uint64_t observable_seed = 2026);

// Duality pairing of the measure with the coordinate one-forms.
Vec rotation_of_measure(const OrbitMeasure& mu, const HamiltonianSpec& H);
// Integral of p dH/dp - H against the measure.
double average_action(const OrbitMeasure& mu, const HamiltonianSpec& H);

// Truncated Liouville measure chi(|p|) omega^n as a grid of point masses.
OrbitMeasure liouville_measure(const HamiltonianSpec& H, double chi_radius, int q_nodes = 96,
                               int p_nodes = 129);

// Caratheodory combination of translated orbits realizing rotation alpha at
// momentum slice p. Throws InfeasibleAlpha when alpha is outside the hull of
// attainable rotations, NoOrbitFound when the orbit search fails.
// When hbar_level is given (the homogenized value at p), candidate orbits are
// ranked by |p alpha_j - A_j - hbar_level|: the theorem's orbits sit at the
// selector's critical level, not at an arbitrary momentum-returning orbit.
OrbitMeasure build_mu_alpha(const HamiltonianSpec& H, double alpha, double p, int k,
                            const FlowConfig& cfg,
                            std::optional<double> hbar_level = std::nullopt);

struct SupportReport {
    double mass_inside_support = 0.0;  // fraction of mass in int supp(H)
    double energy_spread = 0.0;        // max H-variation along pieces (autonomous)
    double level_value = 0.0;          // common energy level c
    double level_identity_gap = 0.0;   // |A(mu) - (p alpha - c)| when p is known
};
SupportReport support_checks(const OrbitMeasure& mu, const HamiltonianSpec& H);

// Sampled R-bar set {(alpha, <p, alpha> - Hbar(p))} from a selector table.
struct RSetRow {
    double alpha = 0.0;
    double action = 0.0;
    double p = 0.0;
    bool extremal = false;  // vertex of the convex hull of the sampled set
};
std::vector<RSetRow> emit_R_set(const std::vector<double>& p_grid,
                                const std::vector<double>& hbar,
                                int alpha_samples_per_node = 3);
std::string rset_to_csv(const std::vector<RSetRow>& rows);
std::string measure_to_json(const OrbitMeasure& mu);

}  // namespace symh::measures
