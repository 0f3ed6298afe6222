#pragma once

#include <symh/sampled.hpp>
#include <symh/selector.hpp>

#include <vector>

namespace symh::subdiff {

// Convex polytope of (sub)differentials at a base point. For n = 1 the hull
// is the interval [min vertex, max vertex].
struct SubdiffPolytope {
    std::vector<std::vector<double>> vertices;  // hull vertices
    std::vector<std::vector<double>> detected;  // raw detected points (pre-hull)
    std::vector<double> at;                     // base point
    std::vector<bool> degenerate_flags;         // per detected point
    double min_norm = 0.0;                      // lambda_f: min-norm hull element

    bool contains(const std::vector<double>& g, double tol) const;
};

// PL Clarke differential: hull of gradients of simplices adjacent to x.
// Throws BoundaryPoint when x lies on a non-periodic boundary.
SubdiffPolytope clarke_pl(const SampledFunction& f, const std::vector<double>& x);

// Strong differential: alpha in the grid such that f - <alpha, .> has a strong
// critical point at x (local relative-homology test with a persistence-lifetime
// proxy; plateau hits are reported with a degenerate flag, never asserted).
struct StrongDiffOptions {
    int neighborhood_cells = 4;
    double lifetime_factor = 2.0;
};
SubdiffPolytope strong_diff(const SampledFunction& f, const std::vector<double>& x,
                            const std::vector<std::vector<double>>& alpha_grid,
                            const StrongDiffOptions& opt = {});

// D_s f(x): strong differentials plus accumulation points of strong
// differentials at sample points converging to x along the radius schedule.
SubdiffPolytope limit_diff(const SampledFunction& f, const std::vector<double>& x,
                           const std::vector<double>& radius_schedule,
                           const std::vector<std::vector<double>>& alpha_grid,
                           const StrongDiffOptions& opt = {});

// Every alpha on a grid of B(0, ||f||_inf / 4) must be certified as a strong
// differential somewhere (global min/max of f - <alpha, .>).
struct BallInclusionRow {
    std::vector<double> alpha;
    bool certified = false;
    bool in_ball = true;
    std::vector<double> witness_x;
};
struct BallInclusionReport {
    std::vector<BallInclusionRow> rows;
    int failures = 0;  // uncertified alphas inside the ball
    std::string to_csv() const;
};
BallInclusionReport ball_inclusion_check(const SampledFunction& f, int alpha_resolution);

std::string polytope_to_json(const SubdiffPolytope& p);

// Clarke interval of a one-dimensional table (used for selector tables h_k).
SubdiffPolytope clarke_of_table(const std::vector<double>& grid,
                                const std::vector<double>& values, double p);

}  // namespace symh::subdiff
