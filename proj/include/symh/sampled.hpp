#pragma once

#include <symh/util.hpp>

#include <string>
#include <vector>

namespace symh {

// One axis of a sampled box/torus grid. Periodic axes have `nodes` cells and
// no boundary; non-periodic axes have `nodes` vertices spanning [lo, hi].
// cone_*: face belongs to the negative end (coned off in every relative run).
// murel_*: face additionally coned when selecting compact-support classes.
struct Axis {
    double lo = 0.0, hi = 1.0;
    int nodes = 2;
    bool periodic = false;
    bool cone_lo = false, cone_hi = false;
    bool murel_lo = false, murel_hi = false;

    double step() const { return (hi - lo) / (periodic ? nodes : nodes - 1); }
    double coord(int i) const { return lo + step() * i; }
};

// Dense sampled function over up to 3 axes (row-major, last axis fastest).
struct SampledFunction {
    std::vector<Axis> axes;
    std::vector<double> values;

    int dim() const { return static_cast<int>(axes.size()); }
    size_t size() const {
        size_t s = 1;
        for (auto& a : axes) s *= static_cast<size_t>(a.nodes);
        return s;
    }
    size_t index(const std::vector<int>& idx) const {
        size_t s = 0;
        for (int d = 0; d < dim(); ++d) s = s * axes[d].nodes + idx[d];
        return s;
    }
    double at(const std::vector<int>& idx) const { return values[index(idx)]; }
    double& at(const std::vector<int>& idx) { return values[index(idx)]; }

    // Largest jump between adjacent samples: grid modulus of continuity.
    double modulus() const;
    // Multilinear interpolation and finite-difference gradient at a point.
    double interp(const std::vector<double>& x) const;
    std::vector<double> fd_gradient(const std::vector<double>& x) const;
    bool inside(const std::vector<double>& x) const;
};

}  // namespace symh
