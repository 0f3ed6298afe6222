#include <symh/selector.hpp>
#include <symh/io.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace symh::selector {

// ---------------------------------------------------------------------------
// sublevel persistence with landscape degree conventions
// ---------------------------------------------------------------------------

PersistenceDiagram sublevel_persistence(const GeneratingLandscape& L) {
    if (L.f.dim() > 3) throw GridBudgetExceeded("free dimension > 3");
    PersistenceDiagram d = cubical_persistence(L.f, false);
    for (auto& p : d.pairs) p.degree -= L.sampled_negative;
    return d;
}

static int periodic_axis_count(const GeneratingLandscape& L) {
    int c = 0;
    for (auto& a : L.f.axes)
        if (a.periodic) ++c;
    return c;
}
static int murel_axis_count(const GeneratingLandscape& L) {
    int c = 0;
    for (auto& a : L.f.axes)
        if (a.murel_lo || a.murel_hi) ++c;
    return c;
}

MinimaxResult minimax_located(const GeneratingLandscape& L, ClassKind cls) {
    bool murel = cls == ClassKind::Fundamental && murel_axis_count(L) > 0;
    PersistenceDiagram d = cubical_persistence(L.f, murel);
    int target = L.sampled_negative;
    if (cls == ClassKind::Fundamental)
        target += periodic_axis_count(L) + murel_axis_count(L);
    const PersistencePair* hit = nullptr;
    int count = 0;
    for (auto& p : d.pairs)
        if (p.essential() && p.degree == target) {
            ++count;
            if (!hit || p.birth < hit->birth) hit = &p;
        }
    if (!hit)
        throw ClassNotFound("no essential class in degree " + std::to_string(target) +
                            " (wrong negative index or grid box too small)");
    if (count > 1 && cls == ClassKind::Unit) {
        // a disconnected sublevel complex cannot occur for our boxes
        throw ClassNotFound("ambiguous essential class in degree " + std::to_string(target));
    }
    MinimaxResult r;
    r.value = hit->birth;
    r.degree = target;
    for (size_t dn = 0; dn < hit->witness.size(); ++dn)
        r.witness.push_back(L.f.axes[dn].coord(hit->witness[dn]));
    return r;
}

double minimax(const GeneratingLandscape& L, ClassKind cls) {
    return minimax_located(L, cls).value;
}

// ---------------------------------------------------------------------------
// homogenize
// ---------------------------------------------------------------------------

std::string SelectorTable::to_csv() const {
    CsvTable t;
    t.header = {"p", "value", "uncertainty"};
    for (size_t i = 0; i < p_grid.size(); ++i)
        t.rows.push_back({format_g17(p_grid[i]), format_g17(values[i]),
                          format_g17(i < uncertainty.size() ? uncertainty[i] : 0.0)});
    return t.to_string();
}

std::string SelectorTable::to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["p_grid"] = p_grid;
    j["values"] = values;
    j["uncertainty"] = uncertainty;
    return j.dump(2);
}

HomogenizeReport homogenize(const HamiltonianSpec& H, const std::vector<int>& k_list,
                            const std::vector<double>& p_grid, const HomogenizeOptions& opt) {
    for (size_t i = 1; i < k_list.size(); ++i)
        if (k_list[i] <= k_list[i - 1]) throw ConfigError("k_list must be increasing");
    FlowConfig cfg = opt.flow ? *opt.flow : FlowConfig::for_spec(H);
    LandscapeFamily fam(H, cfg, opt.grids);
    LandscapeGrids coarse = opt.grids;
    coarse.x_nodes = std::max(8, opt.grids.x_nodes / 2);
    coarse.fiber_nodes = std::max(9, opt.grids.fiber_nodes / 2) | 1;
    LandscapeFamily fam_coarse(H, cfg, coarse);

    HomogenizeReport rep;
    for (int k : k_list) {
        SelectorTable t;
        t.k = k;
        t.p_grid = p_grid;
        for (double p : p_grid) {
            Vec y = H.n == 2 ? Vec(p, 0.0) : Vec(p);
            GeneratingLandscape L = fam.build(k, y);
            double v = minimax(L, opt.cls);
            t.values.push_back(v);
            if (opt.with_uncertainty) {
                double vc = minimax(fam_coarse.build(k, y), opt.cls);
                t.uncertainty.push_back(std::abs(v - vc));
            } else {
                t.uncertainty.push_back(0.0);
            }
        }
        rep.tables.push_back(std::move(t));
    }
    for (size_t i = 1; i < rep.tables.size(); ++i) {
        double s = 0;
        for (size_t j = 0; j < p_grid.size(); ++j)
            s = std::max(s, std::abs(rep.tables[i].values[j] - rep.tables[i - 1].values[j]));
        rep.cauchy_sup_diffs.push_back(s);
    }

    // Extrapolated table: fit h_k = Hbar + C k^-beta on the last three tables;
    // the result carries the correction size as its uncertainty, never claimed exact.
    SelectorTable ex;
    ex.k = 0;
    ex.p_grid = p_grid;
    const size_t m = rep.tables.size();
    double beta_acc = 0.0;
    int beta_n = 0;
    for (size_t j = 0; j < p_grid.size(); ++j) {
        double v;
        double unc;
        if (m >= 3) {
            double h1 = rep.tables[m - 3].values[j];
            double h2 = rep.tables[m - 2].values[j];
            double h3 = rep.tables[m - 1].values[j];
            double k1 = rep.tables[m - 3].k, k2 = rep.tables[m - 2].k,
                   k3 = rep.tables[m - 1].k;
            double d1 = h2 - h1, d2 = h3 - h2;
            double rho = (std::abs(d1) > 1e-14) ? d2 / d1 : 0.0;
            double beta = 1.0;
            if (rho > 1e-6 && k2 / k1 == k3 / k2)
                beta = std::clamp(-std::log(rho) / std::log(k2 / k1), 0.25, 3.0);
            double q = std::pow(k2 / k3, beta) / (1.0 - std::pow(k2 / k3, beta) + 1e-300);
            double corr = std::abs(d2) > 1e-14 ? d2 * std::pow(k3 / k2, -beta) /
                                                     (1.0 - std::pow(k3 / k2, -beta))
                                               : 0.0;
            (void)q;
            v = h3 - corr;
            unc = std::abs(corr) + rep.tables[m - 1].uncertainty[j];
            if (std::abs(d1) > 1e-12) {
                beta_acc += beta;
                ++beta_n;
            }
        } else {
            v = rep.tables[m - 1].values[j];
            unc = (m >= 2 ? std::abs(rep.tables[m - 1].values[j] - rep.tables[m - 2].values[j])
                          : 0.0) +
                  rep.tables[m - 1].uncertainty[j];
        }
        ex.values.push_back(v);
        ex.uncertainty.push_back(unc);
    }
    rep.rate_estimate = beta_n ? beta_acc / beta_n : 1.0;
    rep.extrapolated = std::move(ex);
    return rep;
}

// ---------------------------------------------------------------------------
// capacities
// ---------------------------------------------------------------------------

Capacities capacities(const HamiltonianSpec& H, int k, const LandscapeGrids& grids,
                      std::optional<FlowConfig> cfg) {
    if (H.coercive) throw UnsupportedCoercive("capacities need compact support");
    FlowConfig c = cfg ? *cfg : FlowConfig::for_spec(H);
    LandscapeFamily fam(H, c, grids);
    GeneratingLandscape G = fam.build_graph(k);
    Capacities out;
    out.c_plus = minimax(G, ClassKind::Fundamental);
    out.c_minus = minimax(G, ClassKind::Unit);
    return out;
}

// ---------------------------------------------------------------------------
// strong critical values
// ---------------------------------------------------------------------------

static bool witness_on_boundary(const SampledFunction& f, const std::vector<int>& w) {
    for (int d = 0; d < f.dim(); ++d) {
        if (f.axes[d].periodic) continue;
        if (w[d] == 0 || w[d] == f.axes[d].nodes - 1) return true;
    }
    return false;
}

static bool witness_flat(const SampledFunction& f, const std::vector<int>& w) {
    // all grid neighbours share the value: plateau (non-isolated)
    double v0 = f.at(w);
    for (int d = 0; d < f.dim(); ++d) {
        for (int s = -1; s <= 1; s += 2) {
            std::vector<int> j = w;
            int nd = f.axes[d].nodes;
            if (f.axes[d].periodic)
                j[d] = (w[d] + s + nd) % nd;
            else {
                j[d] = w[d] + s;
                if (j[d] < 0 || j[d] >= nd) continue;
            }
            if (f.at(j) != v0) return false;
        }
    }
    return true;
}

std::vector<StrongValue> strong_critical_values(const SampledFunction& f,
                                                const StrongValueOptions& opt) {
    PersistenceDiagram d = cubical_persistence(f, false);
    double thresh = opt.lifetime_factor * f.modulus();
    std::vector<std::pair<double, std::vector<int>>> hits;  // (value, witness)
    for (auto& p : d.pairs) {
        if (!p.essential() && p.lifetime() <= thresh) continue;
        hits.push_back({p.birth, p.witness});
        if (!p.essential()) {
            // the death level is a strong value as well; locate it crudely at
            // the witness of the pairing cell via a nearby maximal vertex
            hits.push_back({p.death, {}});
        }
    }
    std::vector<StrongValue> out;
    std::sort(hits.begin(), hits.end(),
              [](auto& a, auto& b) { return a.first < b.first; });
    for (auto& [v, w] : hits) {
        if (!w.empty() && opt.exclude_boundary && witness_on_boundary(f, w)) continue;
        if (!out.empty() && std::abs(out.back().value - v) < 1e-12) {
            if (!w.empty()) {
                std::vector<double> coords;
                for (int dn = 0; dn < f.dim(); ++dn) coords.push_back(f.axes[dn].coord(w[dn]));
                out.back().witnesses.push_back(coords);
                out.back().degenerate = out.back().degenerate || witness_flat(f, w);
            }
            continue;
        }
        StrongValue sv;
        sv.value = v;
        if (!w.empty()) {
            std::vector<double> coords;
            for (int dn = 0; dn < f.dim(); ++dn) coords.push_back(f.axes[dn].coord(w[dn]));
            sv.witnesses.push_back(coords);
            sv.degenerate = witness_flat(f, w);
        }
        out.push_back(std::move(sv));
    }
    return out;
}

// ---------------------------------------------------------------------------
// diagram emission
// ---------------------------------------------------------------------------

std::string diagram_to_csv(const PersistenceDiagram& d) {
    CsvTable t;
    t.header = {"birth", "death", "degree"};
    for (auto& p : d.pairs)
        t.rows.push_back({format_g17(p.birth),
                          p.essential() ? "inf" : format_g17(p.death),
                          std::to_string(p.degree)});
    return t.to_string();
}

std::string diagram_to_json(const PersistenceDiagram& d) {
    nlohmann::json j;
    j["relative_to"] = d.relative_to;
    auto arr = nlohmann::json::array();
    for (auto& p : d.pairs) {
        nlohmann::json e;
        e["birth"] = p.birth;
        if (p.essential())
            e["death"] = "inf";
        else
            e["death"] = p.death;
        e["degree"] = p.degree;
        arr.push_back(e);
    }
    j["pairs"] = arr;
    return j.dump(2);
}

}  // namespace symh::selector
