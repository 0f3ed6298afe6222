#pragma once

#include <symh/genfunc.hpp>
#include <symh/persistence.hpp>

#include <optional>

namespace symh::selector {

using genfunc::GeneratingLandscape;
using genfunc::LandscapeFamily;
using genfunc::LandscapeGrids;
using dynamics::FlowConfig;
using dynamics::HamiltonianSpec;

enum class ClassKind { Fundamental, Unit };  // mu_x (x) 1  /  1 (x) 1

// Persistence of the landscape's sublevel filtration relative to the negative
// end; reported degrees are shifted by the sampled negative directions so the
// fundamental class always sits in degree n and the unit class in degree 0.
PersistenceDiagram sublevel_persistence(const GeneratingLandscape& L);

struct MinimaxResult {
    double value = 0.0;
    std::vector<double> witness;  // coordinates of the birth witness vertex
    int degree = 0;
};

// Birth value of the essential class matching (class degree + index shift).
double minimax(const GeneratingLandscape& L, ClassKind cls);
MinimaxResult minimax_located(const GeneratingLandscape& L, ClassKind cls);

// ---------------------------------------------------------------------------
// Homogenization tables
// ---------------------------------------------------------------------------

struct SelectorTable {
    std::vector<double> p_grid;
    std::vector<double> values;
    std::vector<double> uncertainty;
    int k = 0;
    std::string to_csv() const;
    std::string to_json() const;
};

struct HomogenizeReport {
    std::vector<SelectorTable> tables;       // one per k in k_list
    std::vector<double> cauchy_sup_diffs;    // sup |h_{k_{i+1}} - h_{k_i}|
    SelectorTable extrapolated;              // k = 0 marks the extrapolated table
    double rate_estimate = 1.0;
};

struct HomogenizeOptions {
    LandscapeGrids grids;
    std::optional<FlowConfig> flow;
    bool with_uncertainty = true;
    ClassKind cls = ClassKind::Fundamental;
};

HomogenizeReport homogenize(const HamiltonianSpec& H, const std::vector<int>& k_list,
                            const std::vector<double>& p_grid, const HomogenizeOptions& opt = {});

// ---------------------------------------------------------------------------
// Capacities c(mu, .) and c(1, .) of the graph-mode landscape of phi^k.
// ---------------------------------------------------------------------------

struct Capacities {
    double c_plus = 0.0;
    double c_minus = 0.0;
};
Capacities capacities(const HamiltonianSpec& H, int k, const LandscapeGrids& grids = {},
                      std::optional<FlowConfig> cfg = std::nullopt);

// ---------------------------------------------------------------------------
// Strong critical values of a sampled function (persistence-lifetime proxy for
// the vanishing-epsilon relative homology).
// ---------------------------------------------------------------------------

struct StrongValue {
    double value = 0.0;
    std::vector<std::vector<double>> witnesses;  // locating vertices
    bool degenerate = false;                     // plateau / non-isolated witness
};

struct StrongValueOptions {
    double lifetime_factor = 2.0;    // threshold = factor * grid modulus
    bool exclude_boundary = true;    // drop values witnessed only on the box boundary
};

std::vector<StrongValue> strong_critical_values(const SampledFunction& f,
                                                const StrongValueOptions& opt = {});

// Diagram emission helpers.
std::string diagram_to_csv(const PersistenceDiagram& d);
std::string diagram_to_json(const PersistenceDiagram& d);

}  // namespace symh::selector
