#include <symh/subdiff.hpp>
#include <symh/io.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace symh::subdiff {

// ---------------------------------------------------------------------------
// hull helpers (n <= 2)
// ---------------------------------------------------------------------------

static std::vector<std::vector<double>> hull_points(std::vector<std::vector<double>> pts) {
    if (pts.empty()) return pts;
    const size_t dim = pts[0].size();
    if (dim == 1) {
        double lo = pts[0][0], hi = pts[0][0];
        for (auto& p : pts) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        if (lo == hi) return {{lo}};
        return {{lo}, {hi}};
    }
    // 2D monotone chain
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;
    auto cross = [](const std::vector<double>& o, const std::vector<double>& a,
                    const std::vector<double>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::vector<double>> h;
    for (auto& p : pts) {
        while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), p) <= 0) h.pop_back();
        h.push_back(p);
    }
    size_t lower = h.size() + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (h.size() >= lower && cross(h[h.size() - 2], h.back(), *it) <= 0) h.pop_back();
        h.push_back(*it);
    }
    h.pop_back();
    return h;
}

bool SubdiffPolytope::contains(const std::vector<double>& g, double tol) const {
    if (vertices.empty()) return false;
    if (g.size() == 1) {
        double lo = 1e300, hi = -1e300;
        for (auto& v : vertices) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        return g[0] >= lo - tol && g[0] <= hi + tol;
    }
    // 2D: inside the (tolerance-inflated) hull iff on the inner side of all edges
    auto h = vertices;
    if (h.size() == 1)
        return std::hypot(g[0] - h[0][0], g[1] - h[0][1]) <= tol;
    for (size_t i = 0; i < h.size(); ++i) {
        auto& a = h[i];
        auto& b = h[(i + 1) % h.size()];
        double ex = b[0] - a[0], ey = b[1] - a[1];
        double len = std::hypot(ex, ey);
        if (len < 1e-15) continue;
        double sd = ((g[0] - a[0]) * ey - (g[1] - a[1]) * ex) / len;
        if (sd > tol) return false;
    }
    return true;
}

static double min_norm_of(const std::vector<std::vector<double>>& verts) {
    if (verts.empty()) return 0.0;
    if (verts[0].size() == 1) {
        double lo = 1e300, hi = -1e300;
        for (auto& v : verts) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        if (lo <= 0.0 && hi >= 0.0) return 0.0;
        return std::min(std::abs(lo), std::abs(hi));
    }
    // 2D: distance from origin to the hull (vertices + edges), 0 if inside
    double best = 1e300;
    bool inside = true;
    const auto& h = verts;
    for (size_t i = 0; i < h.size(); ++i) {
        const auto& a = h[i];
        const auto& b = h[(i + 1) % h.size()];
        double ex = b[0] - a[0], ey = b[1] - a[1];
        double l2 = ex * ex + ey * ey;
        double t = l2 > 0 ? std::clamp((-(a[0]) * ex - a[1] * ey) / l2, 0.0, 1.0) : 0.0;
        double px = a[0] + t * ex, py = a[1] + t * ey;
        best = std::min(best, std::hypot(px, py));
        if (l2 > 0) {
            double sd = (0.0 - a[0]) * ey - (0.0 - a[1]) * ex;
            if (sd > 0) inside = false;
        }
    }
    if (h.size() >= 3 && inside) return 0.0;
    return best;
}

// ---------------------------------------------------------------------------
// clarke_pl
// ---------------------------------------------------------------------------

static void nearest_node(const SampledFunction& f, const std::vector<double>& x,
                         std::vector<int>& idx) {
    idx.assign(f.dim(), 0);
    for (int d = 0; d < f.dim(); ++d) {
        const Axis& a = f.axes[d];
        double s = (x[d] - a.lo) / a.step();
        if (a.periodic) {
            double u = (x[d] - a.lo) / (a.hi - a.lo);
            u -= std::floor(u);
            s = u * a.nodes;
            idx[d] = static_cast<int>(std::lround(s)) % a.nodes;
        } else {
            idx[d] = std::clamp(static_cast<int>(std::lround(s)), 0, a.nodes - 1);
        }
    }
}

SubdiffPolytope clarke_pl(const SampledFunction& f, const std::vector<double>& x) {
    SubdiffPolytope P;
    P.at = x;
    std::vector<int> idx;
    nearest_node(f, x, idx);
    const int D = f.dim();
    for (int d = 0; d < D; ++d) {
        const Axis& a = f.axes[d];
        if (!a.periodic && (idx[d] == 0 || idx[d] == a.nodes - 1))
            throw BoundaryPoint("clarke_pl at a non-periodic boundary node");
    }
    std::vector<std::vector<double>> grads;
    if (D == 1) {
        const Axis& a = f.axes[0];
        double h = a.step();
        auto val = [&](int i) {
            int n = a.nodes;
            return f.values[((i % n) + n) % n];
        };
        double sl = (val(idx[0]) - val(idx[0] - 1)) / h;
        double sr = (val(idx[0] + 1) - val(idx[0])) / h;
        grads.push_back({sl});
        grads.push_back({sr});
    } else {
        // split each grid square into two triangles along the main diagonal;
        // collect gradients of the (up to 8) triangles touching the node
        const Axis& ax = f.axes[0];
        const Axis& ay = f.axes[1];
        double hx = ax.step(), hy = ay.step();
        auto val = [&](int i, int j) {
            int ni = ax.nodes, nj = ay.nodes;
            i = ax.periodic ? ((i % ni) + ni) % ni : std::clamp(i, 0, ni - 1);
            j = ay.periodic ? ((j % nj) + nj) % nj : std::clamp(j, 0, nj - 1);
            std::vector<int> id{i, j};
            return f.at(id);
        };
        for (int ci = idx[0] - 1; ci <= idx[0]; ++ci)
            for (int cj = idx[1] - 1; cj <= idx[1]; ++cj) {
                // square (ci, cj) .. (ci+1, cj+1); triangles (00,10,11) and (00,01,11)
                double v00 = val(ci, cj), v10 = val(ci + 1, cj);
                double v01 = val(ci, cj + 1), v11 = val(ci + 1, cj + 1);
                grads.push_back({(v10 - v00) / hx, (v11 - v10) / hy});
                grads.push_back({(v11 - v01) / hx, (v01 - v00) / hy});
            }
    }
    P.detected = grads;
    P.vertices = hull_points(grads);
    P.min_norm = min_norm_of(P.vertices);
    return P;
}

// ---------------------------------------------------------------------------
// strong_diff
// ---------------------------------------------------------------------------

namespace {

// restriction of f - <alpha, .> to a grid neighborhood of x
SampledFunction local_tilt(const SampledFunction& f, const std::vector<int>& c,
                           const std::vector<double>& alpha, int radius) {
    SampledFunction g;
    const int D = f.dim();
    std::vector<int> lo(D), n(D);
    for (int d = 0; d < D; ++d) {
        const Axis& a = f.axes[d];
        int l = c[d] - radius, h = c[d] + radius;
        if (!a.periodic) {
            l = std::max(l, 0);
            h = std::min(h, a.nodes - 1);
        }
        lo[d] = l;
        n[d] = h - l + 1;
        Axis b;
        b.lo = a.lo + l * a.step();
        b.hi = a.lo + h * a.step();
        b.nodes = n[d];
        b.periodic = false;
        g.axes.push_back(b);
    }
    g.values.assign(g.size(), 0.0);
    std::vector<int> idx(D, 0);
    for (size_t flat = 0; flat < g.size(); ++flat) {
        size_t rem = flat;
        for (int d = D - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rem % n[d]);
            rem /= n[d];
        }
        std::vector<int> src(D);
        double tilt = 0.0;
        for (int d = 0; d < D; ++d) {
            int i = lo[d] + idx[d];
            const Axis& a = f.axes[d];
            src[d] = a.periodic ? ((i % a.nodes) + a.nodes) % a.nodes
                                : std::clamp(i, 0, a.nodes - 1);
            tilt += alpha[d] * (a.lo + i * a.step());
        }
        g.values[flat] = f.at(src) - tilt;
    }
    return g;
}

struct StrongHit {
    bool hit = false;
    bool degenerate = false;
};

StrongHit strong_at(const SampledFunction& f, const std::vector<int>& c,
                    const std::vector<double>& alpha, const StrongDiffOptions& opt) {
    SampledFunction g = local_tilt(f, c, alpha, opt.neighborhood_cells);
    // center index inside g
    std::vector<int> cc(g.dim());
    for (int d = 0; d < g.dim(); ++d) {
        int lo = c[d] - opt.neighborhood_cells;
        if (!f.axes[d].periodic) lo = std::max(lo, 0);
        cc[d] = c[d] - lo;
    }
    double v0 = g.at(cc);

    // boundary ring extremes
    double ring_min = 1e300, ring_max = -1e300;
    std::vector<int> idx(g.dim(), 0);
    for (size_t flat = 0; flat < g.size(); ++flat) {
        size_t rem = flat;
        bool onb = false;
        for (int d = g.dim() - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rem % g.axes[d].nodes);
            rem /= g.axes[d].nodes;
        }
        for (int d = 0; d < g.dim(); ++d)
            if (idx[d] == 0 || idx[d] == g.axes[d].nodes - 1) onb = true;
        if (!onb) continue;
        ring_min = std::min(ring_min, g.values[flat]);
        ring_max = std::max(ring_max, g.values[flat]);
    }
    StrongHit out;
    double mod = g.modulus();
    double scale = std::max({1.0, std::abs(v0), std::abs(ring_min), std::abs(ring_max)});
    double fuzz = 1e-12 * scale;
    // strict local min or max relative to the window ring
    if (v0 < ring_min - fuzz || v0 > ring_max + fuzz) {
        out.hit = true;
        // plateau detection: any immediate neighbour sharing the value
        bool flat_nbhd = false;
        for (int d = 0; d < g.dim(); ++d)
            for (int s = -1; s <= 1; s += 2) {
                std::vector<int> j = cc;
                j[d] += s;
                if (j[d] < 0 || j[d] >= g.axes[d].nodes) continue;
                if (g.at(j) == v0) flat_nbhd = true;
            }
        out.degenerate = flat_nbhd;
        return out;
    }
    if (v0 <= ring_min + fuzz && v0 >= ring_max - fuzz) {
        // flat window at sample precision: plateau; detected but degenerate
        out.hit = true;
        out.degenerate = true;
        return out;
    }
    // interior saddle-type change: local relative homology via the exhaustive
    // rank at the two levels around v0
    double eps = std::max(opt.lifetime_factor * mod, 1e-12);
    for (int deg = 1; deg < g.dim(); ++deg) {
        int r_hi = selector::relative_image_rank(g, false, deg, v0 + eps);
        int r_lo = selector::relative_image_rank(g, false, deg, v0 - eps);
        if (r_hi > r_lo) {
            // require the witness cell of the change to touch the center
            out.hit = true;
            out.degenerate = false;
            return out;
        }
    }
    return out;
}

}  // namespace

SubdiffPolytope strong_diff(const SampledFunction& f, const std::vector<double>& x,
                            const std::vector<std::vector<double>>& alpha_grid,
                            const StrongDiffOptions& opt) {
    SubdiffPolytope P;
    P.at = x;
    std::vector<int> c;
    nearest_node(f, x, c);
    for (const auto& alpha : alpha_grid) {
        StrongHit h = strong_at(f, c, alpha, opt);
        if (h.hit) {
            P.detected.push_back(alpha);
            P.degenerate_flags.push_back(h.degenerate);
        }
    }
    P.vertices = hull_points(P.detected);
    P.min_norm = min_norm_of(P.vertices);
    return P;
}

SubdiffPolytope limit_diff(const SampledFunction& f, const std::vector<double>& x,
                           const std::vector<double>& radius_schedule,
                           const std::vector<std::vector<double>>& alpha_grid,
                           const StrongDiffOptions& opt) {
    SubdiffPolytope P;
    P.at = x;
    const int D = f.dim();
    // alphas detected at the base point itself
    SubdiffPolytope base = strong_diff(f, x, alpha_grid, opt);
    std::vector<std::vector<double>> acc = base.detected;

    // accumulation points: alphas detected at some sample point within EVERY
    // radius of the (decreasing) schedule
    std::vector<int> c;
    nearest_node(f, x, c);
    for (size_t ai = 0; ai < alpha_grid.size(); ++ai) {
        bool in_all = true;
        for (double r : radius_schedule) {
            bool found = false;
            int cells = std::max(1, static_cast<int>(std::ceil(r / f.axes[0].step())));
            std::vector<int> off(D, -cells);
            while (true) {
                bool zero = true;
                for (int d = 0; d < D; ++d)
                    if (off[d] != 0) zero = false;
                if (!zero) {
                    std::vector<int> cj(D);
                    bool ok = true;
                    for (int d = 0; d < D; ++d) {
                        cj[d] = c[d] + off[d];
                        const Axis& a = f.axes[d];
                        if (a.periodic)
                            cj[d] = ((cj[d] % a.nodes) + a.nodes) % a.nodes;
                        else if (cj[d] < 1 || cj[d] > a.nodes - 2)
                            ok = false;
                    }
                    if (ok && strong_at(f, cj, alpha_grid[ai], opt).hit) found = true;
                }
                if (found) break;
                int d = D - 1;
                while (d >= 0 && ++off[d] > cells) off[d--] = -cells;
                if (d < 0) break;
            }
            if (!found) {
                in_all = false;
                break;
            }
        }
        if (in_all) acc.push_back(alpha_grid[ai]);
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    P.detected = acc;
    P.vertices = hull_points(acc);
    P.min_norm = min_norm_of(P.vertices);
    return P;
}

// ---------------------------------------------------------------------------
// ball inclusion (Lemma on compactly supported functions)
// ---------------------------------------------------------------------------

BallInclusionReport ball_inclusion_check(const SampledFunction& f, int alpha_resolution) {
    double sup = 0.0;
    for (double v : f.values) sup = std::max(sup, std::abs(v));
    if (sup < 1e-13) throw ConstantFunction("ball_inclusion_check needs a non-constant f");
    const double R = sup / 4.0;
    const int D = f.dim();

    BallInclusionReport rep;
    std::vector<int> ai(D, 0);
    while (true) {
        std::vector<double> alpha(D);
        for (int d = 0; d < D; ++d)
            alpha[d] = -R + 2.0 * R * ai[d] / (alpha_resolution - 1);
        double nrm = 0;
        for (double a : alpha) nrm += a * a;
        nrm = std::sqrt(nrm);
        BallInclusionRow row;
        row.alpha = alpha;
        row.in_ball = nrm <= R + 1e-12;
        if (row.in_ball) {
            // tilted function on the full box; global interior min or max
            // strictly below/above the boundary ring certifies the alpha
            double best_min = 1e300, best_max = -1e300;
            std::vector<double> xmin(D, 0), xmax(D, 0);
            double ring_min = 1e300, ring_max = -1e300;
            std::vector<int> idx(D, 0);
            for (size_t flat = 0; flat < f.size(); ++flat) {
                size_t rem = flat;
                for (int d = D - 1; d >= 0; --d) {
                    idx[d] = static_cast<int>(rem % f.axes[d].nodes);
                    rem /= f.axes[d].nodes;
                }
                double tilt = 0;
                bool onb = false;
                for (int d = 0; d < D; ++d) {
                    tilt += alpha[d] * f.axes[d].coord(idx[d]);
                    if (!f.axes[d].periodic &&
                        (idx[d] == 0 || idx[d] == f.axes[d].nodes - 1))
                        onb = true;
                }
                double v = f.values[flat] - tilt;
                if (onb) {
                    ring_min = std::min(ring_min, v);
                    ring_max = std::max(ring_max, v);
                    continue;
                }
                if (v < best_min) {
                    best_min = v;
                    for (int d = 0; d < D; ++d) xmin[d] = f.axes[d].coord(idx[d]);
                }
                if (v > best_max) {
                    best_max = v;
                    for (int d = 0; d < D; ++d) xmax[d] = f.axes[d].coord(idx[d]);
                }
            }
            if (best_min < ring_min - 1e-13) {
                row.certified = true;
                row.witness_x = xmin;
            } else if (best_max > ring_max + 1e-13) {
                row.certified = true;
                row.witness_x = xmax;
            } else {
                row.certified = false;
                ++rep.failures;
            }
        }
        rep.rows.push_back(std::move(row));
        int d = D - 1;
        while (d >= 0 && ++ai[d] >= alpha_resolution) ai[d--] = 0;
        if (d < 0) break;
    }
    return rep;
}

std::string BallInclusionReport::to_csv() const {
    CsvTable t;
    t.header = {"alpha", "in_ball", "certified", "witness_x"};
    for (auto& r : rows) {
        std::string a, w;
        for (size_t i = 0; i < r.alpha.size(); ++i)
            a += (i ? ";" : "") + format_g17(r.alpha[i]);
        for (size_t i = 0; i < r.witness_x.size(); ++i)
            w += (i ? ";" : "") + format_g17(r.witness_x[i]);
        t.rows.push_back({a, r.in_ball ? "1" : "0", r.certified ? "1" : "0", w});
    }
    return t.to_string();
}

std::string polytope_to_json(const SubdiffPolytope& p) {
    nlohmann::json j;
    j["at"] = p.at;
    j["vertices"] = p.vertices;
    j["detected"] = p.detected;
    j["min_norm"] = p.min_norm;
    return j.dump(2);
}

SubdiffPolytope clarke_of_table(const std::vector<double>& grid,
                                const std::vector<double>& values, double p) {
    SubdiffPolytope P;
    P.at = {p};
    if (grid.size() < 3) throw BoundaryPoint("table too small");
    size_t i = 1;
    while (i + 2 < grid.size() && grid[i + 1] < p) ++i;
    // nearest interior node
    size_t best = i;
    for (size_t j = 1; j + 1 < grid.size(); ++j)
        if (std::abs(grid[j] - p) < std::abs(grid[best] - p)) best = j;
    double sl = (values[best] - values[best - 1]) / (grid[best] - grid[best - 1]);
    double sr = (values[best + 1] - values[best]) / (grid[best + 1] - grid[best]);
    P.detected = {{sl}, {sr}};
    P.vertices = hull_points(P.detected);
    P.min_norm = min_norm_of(P.vertices);
    return P;
}

}  // namespace symh::subdiff
