#pragma once

#include <symh/sampled.hpp>

#include <limits>
#include <string>
#include <vector>

namespace symh::selector {

constexpr double INF = std::numeric_limits<double>::infinity();

struct PersistencePair {
    double birth = 0.0;
    double death = INF;  // INF marks an essential class
    int degree = 0;
    // vertex index of the birth witness (argmax vertex of the creator cell)
    std::vector<int> witness;
    bool essential() const { return death == INF; }
    double lifetime() const { return death - birth; }
};

struct PersistenceDiagram {
    std::vector<PersistencePair> pairs;
    std::string relative_to;  // which boundary faces were coned off
};

// Sublevel-set persistence of the cubical lower-star filtration over the
// sampled grid, relative to coned faces. `cone_murel` additionally cones the
// faces tagged for compact-support classes.
PersistenceDiagram cubical_persistence(const SampledFunction& f, bool cone_murel);

// Bottleneck distance between diagrams (degrees matched; essential classes
// matched among themselves by birth).
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);

// Exhaustive-rank oracle: dimension of the image
//   H_deg(sublevel_c union cones) -> H_deg(full complex union cones)
// computed by Gaussian elimination over Z/2 (no reuse of the reduction above).
int relative_image_rank(const SampledFunction& f, bool cone_murel, int degree, double c);

}  // namespace symh::selector
