#include <symh/persistence.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>

namespace symh {

// ---------------------------------------------------------------------------
// SampledFunction helpers
// ---------------------------------------------------------------------------

double SampledFunction::modulus() const {
    double m = 0.0;
    const int D = dim();
    std::vector<int> idx(D, 0);
    const size_t N = size();
    for (size_t flat = 0; flat < N; ++flat) {
        size_t rem = flat;
        for (int d = D - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rem % axes[d].nodes);
            rem /= axes[d].nodes;
        }
        double v = values[flat];
        for (int d = 0; d < D; ++d) {
            int nd = axes[d].nodes;
            if (idx[d] + 1 < nd || axes[d].periodic) {
                std::vector<int> j = idx;
                j[d] = (idx[d] + 1) % nd;
                m = std::max(m, std::abs(at(j) - v));
            }
        }
    }
    return m;
}

bool SampledFunction::inside(const std::vector<double>& x) const {
    for (int d = 0; d < dim(); ++d) {
        if (axes[d].periodic) continue;
        if (x[d] < axes[d].lo - 1e-12 || x[d] > axes[d].hi + 1e-12) return false;
    }
    return true;
}

double SampledFunction::interp(const std::vector<double>& x) const {
    const int D = dim();
    std::vector<int> base(D);
    std::vector<double> t(D);
    for (int d = 0; d < D; ++d) {
        const Axis& a = axes[d];
        double s;
        if (a.periodic) {
            double u = (x[d] - a.lo) / (a.hi - a.lo);
            u -= std::floor(u);
            s = u * a.nodes;
            base[d] = static_cast<int>(s) % a.nodes;
        } else {
            s = (x[d] - a.lo) / a.step();
            s = std::clamp(s, 0.0, static_cast<double>(a.nodes - 1));
            base[d] = std::min(static_cast<int>(s), a.nodes - 2);
        }
        t[d] = s - static_cast<int>(s);
        if (!a.periodic && base[d] == a.nodes - 2 && s >= a.nodes - 1) t[d] = 1.0;
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << D); ++corner) {
        double w = 1.0;
        std::vector<int> idx(D);
        for (int d = 0; d < D; ++d) {
            int bit = (corner >> d) & 1;
            w *= bit ? t[d] : 1.0 - t[d];
            idx[d] = base[d] + bit;
            if (axes[d].periodic) idx[d] %= axes[d].nodes;
        }
        if (w != 0.0) acc += w * at(idx);
    }
    return acc;
}

std::vector<double> SampledFunction::fd_gradient(const std::vector<double>& x) const {
    const int D = dim();
    std::vector<double> g(D, 0.0);
    for (int d = 0; d < D; ++d) {
        double h = axes[d].step();
        std::vector<double> a(x), b(x);
        a[d] -= h;
        b[d] += h;
        if (!axes[d].periodic) {
            a[d] = std::max(a[d], axes[d].lo);
            b[d] = std::min(b[d], axes[d].hi);
        }
        g[d] = (interp(b) - interp(a)) / (b[d] - a[d]);
    }
    return g;
}

}  // namespace symh

namespace symh::selector {

// ---------------------------------------------------------------------------
// Cubical complex with coned boundary faces.
// ---------------------------------------------------------------------------

namespace {

struct Complex {
    const SampledFunction* f = nullptr;
    bool murel = false;
    int D = 0;
    struct Type {
        int dim = 0;
        std::array<int, 3> ext{};    // extent bit per axis
        std::array<int, 3> count{};  // cells per axis for this type
        size_t base = 0;             // first id of this type
        size_t total = 1;
    };
    std::vector<Type> types;
    size_t n_base = 0;
    std::vector<int32_t> a_index;   // base cell -> index into acells, or -1
    std::vector<uint32_t> acells;   // relative-subcomplex base cells
    size_t apex = 0;                // == n_base + acells.size() is the apex id
    size_t total = 0;

    explicit Complex(const SampledFunction& fn, bool cone_murel) : f(&fn), murel(cone_murel) {
        D = fn.dim();
        size_t base = 0;
        for (int mask = 0; mask < (1 << D); ++mask) {
            Type t;
            t.dim = 0;
            t.total = 1;
            for (int d = 0; d < D; ++d) {
                t.ext[d] = (mask >> d) & 1;
                t.dim += t.ext[d];
                const Axis& a = fn.axes[d];
                t.count[d] = a.periodic ? a.nodes : (t.ext[d] ? a.nodes - 1 : a.nodes);
                t.total *= static_cast<size_t>(t.count[d]);
            }
            t.base = base;
            base += t.total;
            types.push_back(t);
        }
        n_base = base;
        a_index.assign(n_base, -1);
        for (size_t id = 0; id < n_base; ++id)
            if (on_coned_face(id)) {
                a_index[id] = static_cast<int32_t>(acells.size());
                acells.push_back(static_cast<uint32_t>(id));
            }
        apex = n_base + acells.size();
        total = apex + 1;
    }

    int type_of(size_t id) const {
        int t = static_cast<int>(types.size()) - 1;
        while (types[t].base > id) --t;
        return t;
    }

    void decode(size_t id, int& t, std::array<int, 3>& idx) const {
        t = type_of(id);
        size_t rem = id - types[t].base;
        for (int d = D - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rem % types[t].count[d]);
            rem /= types[t].count[d];
        }
    }

    size_t encode(int t, const std::array<int, 3>& idx) const {
        size_t s = 0;
        for (int d = 0; d < D; ++d) s = s * types[t].count[d] + idx[d];
        return types[t].base + s;
    }

    bool is_cone(size_t id) const { return id >= n_base && id < apex; }

    int dim_of(size_t id) const {
        if (id == apex) return 0;
        if (is_cone(id)) return dim_of(acells[id - n_base]) + 1;
        return types[type_of(id)].dim;
    }

    bool on_coned_face(size_t id) const {
        int t;
        std::array<int, 3> idx;
        decode(id, t, idx);
        for (int d = 0; d < D; ++d) {
            const Axis& a = f->axes[d];
            if (a.periodic || types[t].ext[d] == 1) continue;
            bool lo = a.cone_lo || (murel && a.murel_lo);
            bool hi = a.cone_hi || (murel && a.murel_hi);
            if (lo && idx[d] == 0) return true;
            if (hi && idx[d] == a.nodes - 1) return true;
        }
        return false;
    }

    // max vertex value; the relative subcomplex, its cones and the apex all
    // sit at -infinity
    double value_of(size_t id) const {
        if (id >= n_base) return -INF;
        if (a_index[id] >= 0) return -INF;
        int t;
        std::array<int, 3> idx;
        decode(id, t, idx);
        double m = -INF;
        int dims = types[t].dim;
        for (int corner = 0; corner < (1 << dims); ++corner) {
            std::array<int, 3> v = idx;
            int bit = 0;
            for (int d = 0; d < D; ++d)
                if (types[t].ext[d]) {
                    if ((corner >> bit) & 1) v[d] = (v[d] + 1) % f->axes[d].nodes;
                    ++bit;
                }
            std::vector<int> vi(v.begin(), v.begin() + D);
            m = std::max(m, f->at(vi));
        }
        return m;
    }

    std::vector<int> witness_vertex(size_t id) const {
        int t;
        std::array<int, 3> idx;
        decode(id, t, idx);
        double best = -INF;
        std::vector<int> out(D, 0);
        int dims = types[t].dim;
        for (int corner = 0; corner < (1 << dims); ++corner) {
            std::array<int, 3> v = idx;
            int bit = 0;
            for (int d = 0; d < D; ++d)
                if (types[t].ext[d]) {
                    if ((corner >> bit) & 1) v[d] = (v[d] + 1) % f->axes[d].nodes;
                    ++bit;
                }
            std::vector<int> vi(v.begin(), v.begin() + D);
            double val = f->at(vi);
            if (val > best) {
                best = val;
                out = vi;
            }
        }
        return out;
    }

    void facets(size_t id, std::vector<size_t>& out) const {
        out.clear();
        if (id == apex) return;
        if (is_cone(id)) {
            size_t sigma = acells[id - n_base];
            out.push_back(sigma);
            if (dim_of(sigma) == 0) {
                out.push_back(apex);
            } else {
                std::vector<size_t> fs;
                facets(sigma, fs);
                for (size_t tau : fs) {
                    // faces of a relative cell stay in the subcomplex
                    out.push_back(n_base + static_cast<size_t>(a_index[tau]));
                }
            }
            return;
        }
        int t;
        std::array<int, 3> idx;
        decode(id, t, idx);
        for (int d = 0; d < D; ++d) {
            if (!types[t].ext[d]) continue;
            int t0 = t & ~(1 << d);
            std::array<int, 3> lo = idx, hi = idx;
            hi[d] = (idx[d] + 1) % f->axes[d].nodes;
            out.push_back(encode(t0, lo));
            out.push_back(encode(t0, hi));
        }
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Persistence by boundary-matrix reduction over Z/2.
// ---------------------------------------------------------------------------

PersistenceDiagram cubical_persistence(const SampledFunction& f, bool cone_murel) {
    Complex C(f, cone_murel);
    const size_t N = C.total;

    std::vector<uint32_t> order(N);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<double> val(N);
    std::vector<int8_t> dims(N);
    for (size_t i = 0; i < N; ++i) {
        val[i] = C.value_of(i);
        dims[i] = static_cast<int8_t>(C.dim_of(i));
    }
    // apex and relative cells first (faces before cofaces via dim tiebreak)
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        bool ia = val[a] == -INF, ib = val[b] == -INF;
        if (ia != ib) return ia;
        if (ia && ib) {
            if (dims[a] != dims[b]) return dims[a] < dims[b];
            return a < b;
        }
        if (val[a] != val[b]) return val[a] < val[b];
        if (dims[a] != dims[b]) return dims[a] < dims[b];
        return a < b;
    });
    std::vector<uint32_t> rank(N);
    for (size_t i = 0; i < N; ++i) rank[order[i]] = static_cast<uint32_t>(i);

    std::vector<int64_t> owner(N, -1);        // pivot rank -> column rank
    std::vector<std::vector<uint32_t>> cols(N);
    std::vector<int64_t> paired_with(N, -1);  // creator rank -> destroyer rank

    std::vector<uint32_t> col, merged;
    std::vector<size_t> facet_buf;
    for (size_t j = 0; j < N; ++j) {
        size_t cell = order[j];
        C.facets(cell, facet_buf);
        col.clear();
        for (size_t s : facet_buf) col.push_back(rank[s]);
        std::sort(col.begin(), col.end());
        // kill duplicate facets (wrap-around in tiny periodic axes)
        for (size_t i = 0; i + 1 < col.size();) {
            if (col[i] == col[i + 1]) col.erase(col.begin() + i, col.begin() + i + 2);
            else ++i;
        }
        while (!col.empty()) {
            uint32_t low = col.back();
            int64_t own = owner[low];
            if (own < 0) break;
            const auto& other = cols[own];
            merged.clear();
            size_t a = 0, b = 0;
            while (a < col.size() && b < other.size()) {
                if (col[a] == other[b]) {
                    ++a;
                    ++b;
                } else if (col[a] < other[b])
                    merged.push_back(col[a++]);
                else
                    merged.push_back(other[b++]);
            }
            while (a < col.size()) merged.push_back(col[a++]);
            while (b < other.size()) merged.push_back(other[b++]);
            col.swap(merged);
        }
        if (!col.empty()) {
            uint32_t low = col.back();
            owner[low] = static_cast<int64_t>(j);
            paired_with[low] = static_cast<int64_t>(j);
            cols[j] = col;
        }
    }

    PersistenceDiagram D;
    {
        std::string rel;
        for (size_t d = 0; d < f.axes.size(); ++d) {
            const Axis& a = f.axes[d];
            auto add = [&](bool on, const char* side) {
                if (on) {
                    if (!rel.empty()) rel += '|';
                    rel += "axis" + std::to_string(d) + side;
                }
            };
            add(a.cone_lo || (cone_murel && a.murel_lo), "-");
            add(a.cone_hi || (cone_murel && a.murel_hi), "+");
        }
        D.relative_to = rel.empty() ? "none" : rel;
    }

    std::vector<char> is_destroyer(N, 0);
    for (size_t r = 0; r < N; ++r)
        if (owner[r] >= 0) is_destroyer[static_cast<size_t>(owner[r])] = 1;

    for (size_t r = 0; r < N; ++r) {
        size_t cell = order[r];
        if (is_destroyer[r]) continue;
        double b = val[cell];
        if (paired_with[r] >= 0) {
            size_t dr = static_cast<size_t>(paired_with[r]);
            double d = val[order[dr]];
            if (b == -INF || d == b) continue;
            PersistencePair pp;
            pp.birth = b;
            pp.death = d;
            pp.degree = dims[cell];
            pp.witness = C.witness_vertex(cell);
            D.pairs.push_back(pp);
        } else {
            if (b == -INF) continue;  // the apex component (reduced homology)
            PersistencePair pp;
            pp.birth = b;
            pp.death = INF;
            pp.degree = dims[cell];
            pp.witness = C.witness_vertex(cell);
            D.pairs.push_back(pp);
        }
    }
    std::sort(D.pairs.begin(), D.pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
        if (a.degree != b.degree) return a.degree < b.degree;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    return D;
}

// ---------------------------------------------------------------------------
// Bottleneck distance
// ---------------------------------------------------------------------------

namespace {

// Feasibility of a bottleneck threshold: perfect matching on the standard
// augmented graph, left = P + diagonal proxies of Q, right = Q + diagonal
// proxies of P. Kuhn's algorithm; diagrams stay small.
bool match_feasible(const std::vector<std::pair<double, double>>& P,
                    const std::vector<std::pair<double, double>>& Q, double t) {
    const size_t n = P.size(), m = Q.size();
    const size_t L = n + m, R = m + n;
    auto half = [](const std::pair<double, double>& p) { return (p.second - p.first) / 2.0; };
    std::vector<std::vector<int>> adj(L);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) {
            double c = std::max(std::abs(P[i].first - Q[j].first),
                                std::abs(P[i].second - Q[j].second));
            if (c <= t) adj[i].push_back(static_cast<int>(j));
        }
        if (half(P[i]) <= t) adj[i].push_back(static_cast<int>(m + i));  // own diagonal
    }
    for (size_t j = 0; j < m; ++j) {
        size_t u = n + j;  // diagonal proxy for Q[j]
        if (half(Q[j]) <= t) adj[u].push_back(static_cast<int>(j));
        for (size_t i = 0; i < n; ++i) adj[u].push_back(static_cast<int>(m + i));  // diag-diag
    }
    std::vector<int> matchR(R, -1);
    std::vector<char> used;
    std::function<bool(size_t)> tryk = [&](size_t u) -> bool {
        for (int v : adj[u]) {
            if (used[v]) continue;
            used[v] = 1;
            if (matchR[v] < 0 || tryk(static_cast<size_t>(matchR[v]))) {
                matchR[v] = static_cast<int>(u);
                return true;
            }
        }
        return false;
    };
    for (size_t u = 0; u < L; ++u) {
        used.assign(R, 0);
        if (!tryk(u)) return false;
    }
    return true;
}

}  // namespace

double bottleneck_distance(const PersistenceDiagram& A, const PersistenceDiagram& B) {
    int dmin = 0, dmax = 0;
    for (auto& p : A.pairs) dmax = std::max(dmax, p.degree);
    for (auto& p : B.pairs) dmax = std::max(dmax, p.degree);
    double result = 0.0;
    for (int deg = dmin; deg <= dmax; ++deg) {
        std::vector<std::pair<double, double>> P, Q;
        std::vector<double> EA, EB;
        for (auto& p : A.pairs)
            if (p.degree == deg) {
                if (p.essential()) EA.push_back(p.birth);
                else P.push_back({p.birth, p.death});
            }
        for (auto& p : B.pairs)
            if (p.degree == deg) {
                if (p.essential()) EB.push_back(p.birth);
                else Q.push_back({p.birth, p.death});
            }
        if (EA.size() != EB.size()) return INF;
        std::sort(EA.begin(), EA.end());
        std::sort(EB.begin(), EB.end());
        for (size_t i = 0; i < EA.size(); ++i)
            result = std::max(result, std::abs(EA[i] - EB[i]));
        if (P.empty() && Q.empty()) continue;
        // candidate thresholds
        std::vector<double> cand;
        for (auto& p : P) cand.push_back((p.second - p.first) / 2);
        for (auto& q : Q) cand.push_back((q.second - q.first) / 2);
        for (auto& p : P)
            for (auto& q : Q)
                cand.push_back(std::max(std::abs(p.first - q.first),
                                        std::abs(p.second - q.second)));
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        // binary search the smallest feasible candidate for this degree
        size_t lo = 0, hi = cand.size() - 1;
        if (!match_feasible(P, Q, cand[hi])) return INF;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (match_feasible(P, Q, cand[mid])) hi = mid;
            else lo = mid + 1;
        }
        result = std::max(result, cand[lo]);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Exhaustive-rank oracle (independent of the reduction above).
// ---------------------------------------------------------------------------

namespace {

// rank over Z/2 of a sparse column list, eliminating into dense bitset rows
int z2_rank(std::vector<std::vector<uint32_t>> colsv, size_t nrows) {
    std::vector<std::vector<uint64_t>> pivots;  // dense eliminated columns
    std::vector<int64_t> pivot_row_owner(nrows, -1);
    const size_t words = (nrows + 63) / 64;
    int rank = 0;
    std::vector<uint64_t> cur(words);
    for (auto& c : colsv) {
        std::fill(cur.begin(), cur.end(), 0);
        for (uint32_t r : c) cur[r >> 6] ^= 1ULL << (r & 63);
        while (true) {
            int64_t hi = -1;
            for (int64_t w = static_cast<int64_t>(words) - 1; w >= 0; --w)
                if (cur[w]) {
                    hi = w * 64 + (63 - __builtin_clzll(cur[w]));
                    break;
                }
            if (hi < 0) break;
            int64_t own = pivot_row_owner[hi];
            if (own < 0) {
                pivot_row_owner[hi] = static_cast<int64_t>(pivots.size());
                pivots.push_back(cur);
                ++rank;
                break;
            }
            const auto& pv = pivots[static_cast<size_t>(own)];
            for (size_t w = 0; w < words; ++w) cur[w] ^= pv[w];
        }
    }
    return rank;
}

}  // namespace

int relative_image_rank(const SampledFunction& f, bool cone_murel, int degree, double c) {
    Complex C(f, cone_murel);
    const size_t N = C.total;
    if (N > 80000) throw TooLarge("exhaustive oracle complex too large");
    std::vector<char> in_sub(N, 0), in_full(N, 1);
    for (size_t i = 0; i < N; ++i) in_sub[i] = C.value_of(i) <= c ? 1 : 0;

    // local cell numbering per dimension
    auto build = [&](const std::vector<char>& in, int dim, std::vector<uint32_t>& ids) {
        ids.clear();
        for (size_t i = 0; i < N; ++i)
            if (in[i] && C.dim_of(i) == dim) ids.push_back(static_cast<uint32_t>(i));
    };
    auto boundary_cols = [&](const std::vector<char>& in, int dim,
                             const std::vector<uint32_t>& rows_ids) {
        std::vector<int64_t> row_of(N, -1);
        for (size_t i = 0; i < rows_ids.size(); ++i) row_of[rows_ids[i]] = static_cast<int64_t>(i);
        std::vector<std::vector<uint32_t>> cols;
        std::vector<size_t> fb;
        for (size_t i = 0; i < N; ++i) {
            if (!in[i] || C.dim_of(i) != dim) continue;
            C.facets(i, fb);
            std::vector<uint32_t> col;
            for (size_t s : fb) {
                if (row_of[s] < 0) continue;  // should not happen: subcomplex closed
                col.push_back(static_cast<uint32_t>(row_of[s]));
            }
            std::sort(col.begin(), col.end());
            for (size_t a = 0; a + 1 < col.size();) {
                if (col[a] == col[a + 1]) col.erase(col.begin() + a, col.begin() + a + 2);
                else ++a;
            }
            cols.push_back(std::move(col));
        }
        return cols;
    };

    // dim-(degree) cycles of the sublevel: z = ker d_deg restricted to sublevel.
    // image rank in H_deg(full): rank( [Z_sub + B_full] / B_full )
    //   = rank(B_full ∪ Z_sub) - rank(B_full)
    // where Z_sub spans cycles of the subcomplex, B_full the boundaries.
    std::vector<uint32_t> rows_deg_full;
    build(in_full, degree, rows_deg_full);
    std::vector<int64_t> row_of_full(N, -1);
    for (size_t i = 0; i < rows_deg_full.size(); ++i)
        row_of_full[rows_deg_full[i]] = static_cast<int64_t>(i);

    // boundaries from (degree+1)-cells of the full complex
    std::vector<std::vector<uint32_t>> Bfull;
    {
        std::vector<size_t> fb;
        for (size_t i = 0; i < N; ++i) {
            if (C.dim_of(i) != degree + 1) continue;
            C.facets(i, fb);
            std::vector<uint32_t> col;
            for (size_t s : fb)
                if (row_of_full[s] >= 0) col.push_back(static_cast<uint32_t>(row_of_full[s]));
            std::sort(col.begin(), col.end());
            for (size_t a = 0; a + 1 < col.size();) {
                if (col[a] == col[a + 1]) col.erase(col.begin() + a, col.begin() + a + 2);
                else ++a;
            }
            if (!col.empty()) Bfull.push_back(std::move(col));
        }
    }

    // cycle space of the sublevel in degree `degree`: kernel of its boundary map.
    // compute by eliminating the boundary matrix of sublevel deg-cells and
    // collecting kernel combinations.
    std::vector<uint32_t> cells_deg_sub;
    build(in_sub, degree, cells_deg_sub);
    std::vector<uint32_t> rows_dm1;
    build(in_sub, degree - 1, rows_dm1);
    std::vector<int64_t> row_of_dm1(N, -1);
    for (size_t i = 0; i < rows_dm1.size(); ++i) row_of_dm1[rows_dm1[i]] = static_cast<int64_t>(i);

    const size_t nr = rows_dm1.size();
    const size_t wr = (nr + 63) / 64 + 1;
    const size_t nc = cells_deg_sub.size();
    const size_t wc = (nc + 63) / 64 + 1;
    // augmented elimination to extract kernel vectors
    std::vector<std::vector<uint64_t>> piv_cols;
    std::vector<std::vector<uint64_t>> piv_tracks;
    std::vector<int64_t> prow(nr + 1, -1);
    std::vector<std::vector<uint32_t>> kernel;  // kernel vectors as lists of sub-cell indices
    std::vector<size_t> fb;
    std::vector<uint64_t> cur(wr), trk(wc);
    for (size_t ci = 0; ci < nc; ++ci) {
        std::fill(cur.begin(), cur.end(), 0);
        std::fill(trk.begin(), trk.end(), 0);
        C.facets(cells_deg_sub[ci], fb);
        std::vector<uint32_t> col;
        for (size_t s : fb)
            if (row_of_dm1[s] >= 0) col.push_back(static_cast<uint32_t>(row_of_dm1[s]));
        std::sort(col.begin(), col.end());
        for (size_t a = 0; a + 1 < col.size();) {
            if (col[a] == col[a + 1]) col.erase(col.begin() + a, col.begin() + a + 2);
            else ++a;
        }
        for (uint32_t r : col) cur[r >> 6] ^= 1ULL << (r & 63);
        trk[ci >> 6] ^= 1ULL << (ci & 63);
        bool zero = false;
        while (true) {
            int64_t hi = -1;
            for (int64_t w = static_cast<int64_t>(wr) - 1; w >= 0; --w)
                if (cur[w]) {
                    hi = w * 64 + (63 - __builtin_clzll(cur[w]));
                    break;
                }
            if (hi < 0) {
                zero = true;
                break;
            }
            int64_t own = prow[hi];
            if (own < 0) {
                prow[hi] = static_cast<int64_t>(piv_cols.size());
                piv_cols.push_back(cur);
                piv_tracks.push_back(trk);
                break;
            }
            for (size_t w = 0; w < wr; ++w) cur[w] ^= piv_cols[own][w];
            for (size_t w = 0; w < wc; ++w) trk[w] ^= piv_tracks[own][w];
        }
        if (zero) {
            std::vector<uint32_t> kv;
            for (size_t b = 0; b < nc; ++b)
                if (trk[b >> 6] & (1ULL << (b & 63))) kv.push_back(static_cast<uint32_t>(b));
            kernel.push_back(std::move(kv));
        }
    }

    // express kernel vectors in full-complex row numbering
    std::vector<std::vector<uint32_t>> Zsub;
    for (auto& kv : kernel) {
        std::vector<uint32_t> z;
        for (uint32_t local : kv) {
            size_t cell = cells_deg_sub[local];
            z.push_back(static_cast<uint32_t>(row_of_full[cell]));
        }
        std::sort(z.begin(), z.end());
        Zsub.push_back(std::move(z));
    }

    int rb = z2_rank(Bfull, rows_deg_full.size());
    std::vector<std::vector<uint32_t>> both = Bfull;
    for (auto& z : Zsub) both.push_back(z);
    int rboth = z2_rank(both, rows_deg_full.size());
    // reduced homology in degree 0: the apex component is the trivial class
    int correction = (degree == 0) ? 1 : 0;
    return rboth - rb - correction;
}

}  // namespace symh::selector
