#pragma once

#include <symh/flow.hpp>

#include <vector>

namespace symh::dynamics {

struct TranslatedOrbit {
    PhasePoint z;       // initial point on the universal cover
    double residual = 0.0;
    Vec p_prime;        // attained final momentum (free by the theorem)
};

// Solution of Phi^k(z) = z + (k alpha, *) with the q-translation enforced and
// the momentum component free. Seeded Newton with grid retries.
TranslatedOrbit find_translated_orbit(const HamiltonianSpec& H, int k, const Vec& alpha,
                                      const PhasePoint& seed, const FlowConfig& cfg);

// Momentum-returning variant: Phi^k(z) = z + (k alpha, 0); these are the
// orbits carried by the selector's critical points.
struct ReturningOrbit {
    PhasePoint z;
    Vec rotation;       // (q drift) / k
    double residual = 0.0;
    double avg_action = 0.0;
};
std::vector<ReturningOrbit> find_returning_orbits(const HamiltonianSpec& H, int k,
                                                  const Vec& alpha, const FlowConfig& cfg,
                                                  int q_seeds = 24, int p_seeds = 33,
                                                  double p_window = 0.0);

// All momentum-returning orbits launched exactly at momentum p: solves
// mom(Phi^k(q, p)) = p over q and reports the attained rotations (the
// vertex data of Conv~_p in the subdifferential inclusion).
std::vector<ReturningOrbit> orbits_at_momentum(const HamiltonianSpec& H, int k, double p,
                                               const FlowConfig& cfg, int q_seeds = 96);

// ---------------------------------------------------------------------------
// Periodic-orbit census
// ---------------------------------------------------------------------------

struct CensusRow {
    int period = 0;       // minimal period v
    Vec rotation;         // u / v
    double action = 0.0;  // average action over one minimal period
    PhasePoint z;
};

struct CensusReport {
    std::vector<CensusRow> rows;
    bool degenerate = false;  // H == 0: every point fixed, no meaningful count
    int distinct_actions(double tol = 1e-7) const;
};

CensusReport census(const HamiltonianSpec& H, int N, const FlowConfig& cfg, uint64_t seed = 1,
                    double dedup_radius = 1e-6);

}  // namespace symh::dynamics
