#include <symh/hamiltonian.hpp>
#include <symh/io.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace symh::dynamics {

static const double TWO_PI = 2.0 * M_PI;

// ---------------------------------------------------------------------------
// Profile
// ---------------------------------------------------------------------------

Profile Profile::quadratic(double a) {
    Profile p;
    p.kind = Kind::Quadratic;
    p.a = a;
    return p;
}
Profile Profile::cosine(double a, double period, double center) {
    Profile p;
    p.kind = Kind::Cosine;
    p.a = a;
    p.b = period;
    p.c = center;
    return p;
}
Profile Profile::double_well(double a, double c) {
    Profile p;
    p.kind = Kind::DoubleWell;
    p.a = a;
    p.c = c;
    return p;
}
Profile Profile::bump(double a, double width, double center) {
    Profile p;
    p.kind = Kind::Bump;
    p.a = a;
    p.b = width;
    p.c = center;
    return p;
}
Profile Profile::from_samples(double lo, double hi, std::vector<double> vals, bool periodic) {
    Profile p;
    p.kind = Kind::Spline;
    p.lo = lo;
    p.hi = hi;
    p.periodic = periodic;
    p.samples = std::move(vals);
    return p;
}

static const CubicSpline& profile_spline(const Profile& p) {
    if (!p.spline) p.spline.emplace(p.lo, p.hi, p.samples, p.periodic);
    return *p.spline;
}

double Profile::eval(double x) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Quadratic: return a * x * x / 2.0;
        case Kind::Cosine: return a * (1.0 - std::cos(TWO_PI * (x - c) / b)) / 2.0;
        case Kind::DoubleWell: {
            double u = (x / c) * (x / c) - 1.0;
            return a * u * u / 4.0;
        }
        case Kind::Bump: return a * cutoff_c2(std::abs(x - this->c) / b);
        case Kind::Spline: return profile_spline(*this).eval(x);
    }
    return 0.0;
}

double Profile::deriv(double x) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Quadratic: return a * x;
        case Kind::Cosine: return a * (TWO_PI / b) * std::sin(TWO_PI * (x - c) / b) / 2.0;
        case Kind::DoubleWell: {
            double s = x / c;
            return a * (s * s - 1.0) * s / c;
        }
        case Kind::Bump: {
            double d = x - c;
            double sg = d >= 0 ? 1.0 : -1.0;
            return a * cutoff_c2_d(std::abs(d) / b) * sg / b;
        }
        case Kind::Spline: return profile_spline(*this).deriv(x);
    }
    return 0.0;
}

double Profile::deriv2(double x) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Quadratic: return a;
        case Kind::Cosine: {
            double w = TWO_PI / b;
            return a * w * w * std::cos(TWO_PI * (x - c) / b) / 2.0;
        }
        case Kind::DoubleWell: {
            double s = x / c;
            return a * (3.0 * s * s - 1.0) / (c * c);
        }
        case Kind::Bump: {
            // finite difference of the C^2 cutoff derivative
            double h = 1e-6 * std::max(1.0, b);
            return (deriv(x + h) - deriv(x - h)) / (2 * h);
        }
        case Kind::Spline: return profile_spline(*this).deriv2(x);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// CustomGridData: tensor Catmull-Rom evaluation, periodic in t and q.
// ---------------------------------------------------------------------------

double CustomGridData::at(int it, int iq, int ip) const {
    it = ((it % nt) + nt) % nt;
    iq = ((iq % nq) + nq) % nq;
    ip = std::clamp(ip, 0, np - 1);
    return values[static_cast<size_t>(it) * nq * np + static_cast<size_t>(iq) * np + ip];
}

// Catmull-Rom basis on [0,1].
static inline void cr_weights(double t, double w[4]) {
    w[0] = 0.5 * (-t + 2 * t * t - t * t * t);
    w[1] = 0.5 * (2 - 5 * t * t + 3 * t * t * t);
    w[2] = 0.5 * (t + 4 * t * t - 3 * t * t * t);
    w[3] = 0.5 * (-t * t + t * t * t);
}
static inline void cr_dweights(double t, double w[4]) {
    w[0] = 0.5 * (-1 + 4 * t - 3 * t * t);
    w[1] = 0.5 * (-10 * t + 9 * t * t);
    w[2] = 0.5 * (1 + 8 * t - 9 * t * t);
    w[3] = 0.5 * (-2 * t + 3 * t * t);
}

struct GridLoc {
    int i;
    double t;
};

static GridLoc grid_loc_periodic(double x, int n) {
    double u = x - std::floor(x);
    double s = u * n;
    int i = static_cast<int>(s);
    if (i >= n) i = n - 1;
    return {i, s - i};
}

static GridLoc grid_loc_clamped(double x, double lo, double hi, int n) {
    double s = (x - lo) / (hi - lo) * (n - 1);
    if (s <= 0) return {0, 0.0};
    if (s >= n - 1) return {n - 2, 1.0};
    int i = static_cast<int>(s);
    return {i, s - i};
}

// deriv_axis: -1 value, 0 d/dt, 1 d/dq, 2 d/dp
static double custom_eval(const CustomGridData& g, double t, double q, double p,
                          int deriv_axis) {
    GridLoc lt = g.nt > 1 ? grid_loc_periodic(t, g.nt) : GridLoc{0, 0.0};
    GridLoc lq = grid_loc_periodic(q, g.nq);
    GridLoc lp = grid_loc_clamped(p, g.p_lo, g.p_hi, g.np);
    double wt[4], wq[4], wp[4];
    if (deriv_axis == 0) cr_dweights(lt.t, wt); else cr_weights(lt.t, wt);
    if (deriv_axis == 1) cr_dweights(lq.t, wq); else cr_weights(lq.t, wq);
    if (deriv_axis == 2) cr_dweights(lp.t, wp); else cr_weights(lp.t, wp);
    double acc = 0;
    for (int a = 0; a < 4; ++a) {
        if (g.nt == 1 && a != 1) continue;
        double wa = g.nt == 1 ? 1.0 : wt[a];
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                double w = wa * wq[b] * wp[c];
                if (w == 0.0) continue;
                acc += w * g.at(lt.i + a - 1, lq.i + b - 1, lp.i + c - 1);
            }
    }
    if (deriv_axis == 0) acc *= g.nt;
    if (deriv_axis == 1) acc *= g.nq;
    if (deriv_axis == 2) acc *= (g.np - 1) / (g.p_hi - g.p_lo);
    return acc;
}

// ---------------------------------------------------------------------------
// HamiltonianSpec
// ---------------------------------------------------------------------------

void HamiltonianSpec::validate() const {
    if (n != 1 && n != 2) throw ConfigError("n must be 1 or 2");
    bool has_radius = support_radius > 0;
    if (coercive == has_radius && !coercive)
        throw ConfigError("support_radius > 0 XOR coercive must hold");
    if (coercive && !trunc_radii.empty())
        throw ConfigError("truncated spec cannot stay coercive");
    if (family == Family::CustomGrid) {
        if (n != 1) throw ConfigError("CustomGrid supports n = 1");
        if (grid.nq < 2 || grid.np < 2 || grid.nt < 1) throw ConfigError("grid too small");
        if (grid.values.size() !=
            static_cast<size_t>(grid.nt) * grid.nq * grid.np)
            throw ConfigError("grid value count mismatch");
    }
}

double truncation_factor(const HamiltonianSpec& H, double pnorm) {
    double f = 1.0;
    for (double R : H.trunc_radii) f *= cutoff_c2(pnorm - R);
    return f;
}
double truncation_factor_d(const HamiltonianSpec& H, double pnorm) {
    // derivative of the product w.r.t. pnorm
    double f = 0.0;
    for (size_t i = 0; i < H.trunc_radii.size(); ++i) {
        double g = cutoff_c2_d(pnorm - H.trunc_radii[i]);
        for (size_t j = 0; j < H.trunc_radii.size(); ++j)
            if (j != i) g *= cutoff_c2(pnorm - H.trunc_radii[j]);
        f += g;
    }
    return f;
}

static double pnorm_of(const Vec& p) { return p.norm(); }

double HamiltonianSpec::kinetic(double p1) const {
    switch (family) {
        case Family::Zero: return 0.0;
        case Family::Integrable: return p_profile.eval(p1);
        case Family::MechanicalPendulum: return p1 * p1 / 2.0;
        case Family::SeparableNonconvex: return p_profile.eval(p1);
        case Family::CustomGrid: return 0.0;
    }
    return 0.0;
}
double HamiltonianSpec::kinetic_d(double p1) const {
    switch (family) {
        case Family::Zero: return 0.0;
        case Family::Integrable: return p_profile.deriv(p1);
        case Family::MechanicalPendulum: return p1;
        case Family::SeparableNonconvex: return p_profile.deriv(p1);
        case Family::CustomGrid: return 0.0;
    }
    return 0.0;
}
double HamiltonianSpec::kinetic_dd(double p1) const {
    switch (family) {
        case Family::Zero: return 0.0;
        case Family::Integrable: return p_profile.deriv2(p1);
        case Family::MechanicalPendulum: return 1.0;
        case Family::SeparableNonconvex: return p_profile.deriv2(p1);
        case Family::CustomGrid: return 0.0;
    }
    return 0.0;
}

static double time_factor(const HamiltonianSpec& H, double t) {
    return H.time_mod == 0.0 ? 1.0 : 1.0 + H.time_mod * std::sin(TWO_PI * t);
}

double HamiltonianSpec::potential(double t, double q1) const {
    double q = wrap01(q1);
    double v = 0.0;
    switch (family) {
        case Family::Zero:
        case Family::Integrable:
        case Family::CustomGrid: return 0.0;
        case Family::MechanicalPendulum:
            v = amplitude * (1.0 - std::cos(TWO_PI * q)) / 2.0;
            break;
        case Family::SeparableNonconvex: v = q_profile.eval(q); break;
    }
    return v * time_factor(*this, t);
}
double HamiltonianSpec::potential_d(double t, double q1) const {
    double q = wrap01(q1);
    double v = 0.0;
    switch (family) {
        case Family::Zero:
        case Family::Integrable:
        case Family::CustomGrid: return 0.0;
        case Family::MechanicalPendulum:
            v = amplitude * TWO_PI * std::sin(TWO_PI * q) / 2.0;
            break;
        case Family::SeparableNonconvex: v = q_profile.deriv(q); break;
    }
    return v * time_factor(*this, t);
}

bool HamiltonianSpec::separable() const {
    if (!trunc_radii.empty()) return false;
    switch (family) {
        case Family::Zero:
        case Family::Integrable:
        case Family::MechanicalPendulum:
        case Family::SeparableNonconvex: return true;
        case Family::CustomGrid: return false;
    }
    return false;
}

double HamiltonianSpec::value_base(double t, const Vec& q, const Vec& p) const {
    double h = 0.0;
    if (family == Family::CustomGrid) {
        h = custom_eval(grid, t, wrap01(q[0]), p[0], -1);
    } else if (n == 1) {
        h = kinetic(p[0]) + potential(t, q[0]);
    } else {
        // n = 2: kinetic sum over components, potential split evenly per axis.
        h = kinetic(p[0]) + kinetic(p[1]) + 0.5 * (potential(t, q[0]) + potential(t, q[1]));
    }
    h *= scale;
    if (!trunc_radii.empty()) h *= truncation_factor(*this, pnorm_of(p));
    return h;
}

double HamiltonianSpec::value(double t, const Vec& q, const Vec& p) const {
    return value_base(t, q, p) + offset;
}

Vec HamiltonianSpec::dq(double t, const Vec& q, const Vec& p) const {
    Vec g = Vec::zero(n);
    double tf = trunc_radii.empty() ? 1.0 : truncation_factor(*this, pnorm_of(p));
    if (family == Family::CustomGrid) {
        g[0] = custom_eval(grid, t, wrap01(q[0]), p[0], 1) * scale;
        return g;
    }
    if (n == 1) {
        g[0] = scale * tf * potential_d(t, q[0]);
    } else {
        g[0] = scale * tf * 0.5 * potential_d(t, q[0]);
        g[1] = scale * tf * 0.5 * potential_d(t, q[1]);
    }
    return g;
}

Vec HamiltonianSpec::dp(double t, const Vec& q, const Vec& p) const {
    Vec g = Vec::zero(n);
    if (family == Family::CustomGrid) {
        g[0] = custom_eval(grid, t, wrap01(q[0]), p[0], 2) * scale;
        return g;
    }
    for (int i = 0; i < n; ++i) g[i] = scale * kinetic_d(p[i]);
    if (!trunc_radii.empty()) {
        double pn = pnorm_of(p);
        double tf = truncation_factor(*this, pn);
        double tfd = truncation_factor_d(*this, pn);
        double base = value_base(t, q, p) / (tf == 0.0 ? 1.0 : tf);  // untruncated scale*H
        if (tf == 0.0) base = 0.0;
        for (int i = 0; i < n; ++i) {
            double dpn = pn > 1e-300 ? p[i] / pn : 0.0;
            g[i] = tf * g[i] + tfd * dpn * base;
        }
    }
    return g;
}

bool HamiltonianSpec::outside_support(const Vec& p) const {
    if (coercive) return false;
    double pn = pnorm_of(p);
    if (!trunc_radii.empty()) {
        double rmin = *std::min_element(trunc_radii.begin(), trunc_radii.end());
        return pn >= rmin + 1.0;
    }
    switch (family) {
        case Family::Zero: return true;
        case Family::Integrable:
        case Family::SeparableNonconvex: return pn >= support_radius;
        case Family::MechanicalPendulum: return false;
        case Family::CustomGrid: return p[0] <= grid.p_lo || p[0] >= grid.p_hi;
    }
    return false;
}

double HamiltonianSpec::sup_norm_estimate() const {
    double m = 0.0;
    double R = coercive ? 3.0 : support_radius;
    const int N = 48;
    Vec q = Vec::zero(n), p = Vec::zero(n);
    for (int iq = 0; iq < N; ++iq)
        for (int ip = 0; ip <= N; ++ip) {
            q[0] = static_cast<double>(iq) / N;
            p[0] = -R + 2.0 * R * ip / N;
            if (n == 2) {
                q[1] = wrap01(0.37 + 2.0 * q[0]);
                p[1] = 0.0;
            }
            m = std::max(m, std::abs(value_base(0.0, q, p)));
            m = std::max(m, std::abs(value_base(0.31, q, p)));
        }
    return m;
}

HamiltonianSpec HamiltonianSpec::zero(int n) {
    HamiltonianSpec H;
    H.family = Family::Zero;
    H.n = n;
    H.support_radius = 1.0;
    return H;
}
HamiltonianSpec HamiltonianSpec::integrable(Profile prof, bool coercive, double support_radius) {
    HamiltonianSpec H;
    H.family = Family::Integrable;
    H.p_profile = std::move(prof);
    H.coercive = coercive;
    H.support_radius = coercive ? 0.0 : support_radius;
    return H;
}
HamiltonianSpec HamiltonianSpec::pendulum(double amplitude) {
    HamiltonianSpec H;
    H.family = Family::MechanicalPendulum;
    H.amplitude = amplitude;
    H.coercive = true;
    H.support_radius = 0.0;
    return H;
}
HamiltonianSpec HamiltonianSpec::separable(Profile T, Profile V, bool coercive,
                                           double support_radius) {
    HamiltonianSpec H;
    H.family = Family::SeparableNonconvex;
    H.p_profile = std::move(T);
    H.q_profile = std::move(V);
    H.coercive = coercive;
    H.support_radius = coercive ? 0.0 : support_radius;
    return H;
}
HamiltonianSpec HamiltonianSpec::custom(CustomGridData grid) {
    HamiltonianSpec H;
    H.family = Family::CustomGrid;
    H.grid = std::move(grid);
    H.support_radius = std::max(std::abs(H.grid.p_lo), std::abs(H.grid.p_hi));
    H.time_dependent = H.grid.nt > 1;
    return H;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

using nlohmann::json;

static json profile_to_json(const Profile& p) {
    json j;
    switch (p.kind) {
        case Profile::Kind::Zero: j["kind"] = "zero"; break;
        case Profile::Kind::Quadratic: j["kind"] = "quadratic"; break;
        case Profile::Kind::Cosine: j["kind"] = "cosine"; break;
        case Profile::Kind::DoubleWell: j["kind"] = "double_well"; break;
        case Profile::Kind::Bump: j["kind"] = "bump"; break;
        case Profile::Kind::Spline: j["kind"] = "spline"; break;
    }
    j["a"] = p.a;
    j["b"] = p.b;
    j["c"] = p.c;
    if (p.kind == Profile::Kind::Spline) {
        j["lo"] = p.lo;
        j["hi"] = p.hi;
        j["periodic"] = p.periodic;
        j["samples"] = p.samples;
    }
    return j;
}

static Profile profile_from_json(const json& j) {
    Profile p;
    std::string k = j.value("kind", "zero");
    if (k == "zero") p.kind = Profile::Kind::Zero;
    else if (k == "quadratic") p.kind = Profile::Kind::Quadratic;
    else if (k == "cosine") p.kind = Profile::Kind::Cosine;
    else if (k == "double_well") p.kind = Profile::Kind::DoubleWell;
    else if (k == "bump") p.kind = Profile::Kind::Bump;
    else if (k == "spline") p.kind = Profile::Kind::Spline;
    else throw ConfigError("profile.kind: unknown value '" + k + "'");
    p.a = j.value("a", 0.0);
    p.b = j.value("b", 1.0);
    p.c = j.value("c", 0.0);
    if (p.kind == Profile::Kind::Spline) {
        p.lo = j.at("lo").get<double>();
        p.hi = j.at("hi").get<double>();
        p.periodic = j.value("periodic", false);
        p.samples = j.at("samples").get<std::vector<double>>();
    }
    return p;
}

std::string HamiltonianSpec::to_json() const {
    json j;
    switch (family) {
        case Family::Zero: j["family"] = "zero"; break;
        case Family::Integrable: j["family"] = "integrable"; break;
        case Family::MechanicalPendulum: j["family"] = "mechanical_pendulum"; break;
        case Family::SeparableNonconvex: j["family"] = "separable_nonconvex"; break;
        case Family::CustomGrid: j["family"] = "custom_grid"; break;
    }
    j["n"] = n;
    j["time_dependent"] = time_dependent;
    j["coercive"] = coercive;
    j["support_radius"] = support_radius;
    j["scale"] = scale;
    j["offset"] = offset;
    j["amplitude"] = amplitude;
    j["time_mod"] = time_mod;
    j["p_profile"] = profile_to_json(p_profile);
    j["q_profile"] = profile_to_json(q_profile);
    j["trunc_radii"] = trunc_radii;
    if (family == Family::CustomGrid) {
        j["grid"] = {{"nt", grid.nt}, {"nq", grid.nq},     {"np", grid.np},
                     {"p_lo", grid.p_lo}, {"p_hi", grid.p_hi}, {"values", grid.values}};
    }
    return j.dump(2);
}

HamiltonianSpec HamiltonianSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("hamiltonian: invalid JSON: ") + e.what());
    }
    HamiltonianSpec H;
    std::string fam = j.value("family", "zero");
    if (fam == "zero") H.family = Family::Zero;
    else if (fam == "integrable") H.family = Family::Integrable;
    else if (fam == "mechanical_pendulum") H.family = Family::MechanicalPendulum;
    else if (fam == "separable_nonconvex") H.family = Family::SeparableNonconvex;
    else if (fam == "custom_grid") H.family = Family::CustomGrid;
    else throw ConfigError("hamiltonian.family: unknown value '" + fam + "'");
    H.n = j.value("n", 1);
    H.time_dependent = j.value("time_dependent", false);
    H.coercive = j.value("coercive", false);
    H.support_radius = j.value("support_radius", H.coercive ? 0.0 : 1.0);
    H.scale = j.value("scale", 1.0);
    H.offset = j.value("offset", 0.0);
    H.amplitude = j.value("amplitude", 0.0);
    H.time_mod = j.value("time_mod", 0.0);
    if (j.contains("p_profile")) H.p_profile = profile_from_json(j["p_profile"]);
    if (j.contains("q_profile")) H.q_profile = profile_from_json(j["q_profile"]);
    if (j.contains("trunc_radii")) H.trunc_radii = j["trunc_radii"].get<std::vector<double>>();
    if (H.family == Family::CustomGrid) {
        if (!j.contains("grid")) throw ConfigError("hamiltonian.grid: missing");
        const json& g = j["grid"];
        H.grid.nt = g.at("nt").get<int>();
        H.grid.nq = g.at("nq").get<int>();
        H.grid.np = g.at("np").get<int>();
        H.grid.p_lo = g.at("p_lo").get<double>();
        H.grid.p_hi = g.at("p_hi").get<double>();
        H.grid.values = g.at("values").get<std::vector<double>>();
        H.time_dependent = H.grid.nt > 1;
    }
    H.validate();
    return H;
}

HamiltonianSpec HamiltonianSpec::custom_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::vector<std::array<double, 4>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.find_first_not_of("tqpH, \r") == std::string::npos) {
            first = false;
            continue;  // header row
        }
        first = false;
        std::array<double, 4> r{};
        char* end = nullptr;
        const char* s = line.c_str();
        for (int c = 0; c < 4; ++c) {
            r[c] = std::strtod(s, &end);
            if (end == s) throw ConfigError("custom CSV: bad row '" + line + "'");
            s = end;
            while (*s == ',' || *s == ' ') ++s;
        }
        rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError("custom CSV: no rows");
    auto uniq = [&](int col) {
        std::vector<double> u;
        for (auto& r : rows) u.push_back(r[col]);
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                u.end());
        return u;
    };
    auto ts = uniq(0), qs = uniq(1), ps = uniq(2);
    CustomGridData g;
    g.nt = static_cast<int>(ts.size());
    g.nq = static_cast<int>(qs.size());
    g.np = static_cast<int>(ps.size());
    g.p_lo = ps.front();
    g.p_hi = ps.back();
    if (rows.size() != static_cast<size_t>(g.nt) * g.nq * g.np)
        throw ConfigError("custom CSV: not a complete t x q x p grid");
    g.values.assign(rows.size(), 0.0);
    auto idx_of = [](const std::vector<double>& u, double v) {
        auto it = std::lower_bound(u.begin(), u.end(), v - 1e-12);
        return static_cast<int>(it - u.begin());
    };
    for (auto& r : rows) {
        int it = idx_of(ts, r[0]), iq = idx_of(qs, r[1]), ip = idx_of(ps, r[2]);
        g.values[static_cast<size_t>(it) * g.nq * g.np + static_cast<size_t>(iq) * g.np + ip] =
            r[3];
    }
    return custom(std::move(g));
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

HamiltonianSpec truncate_coercive(const HamiltonianSpec& H, double R) {
    HamiltonianSpec out = H;
    out.trunc_radii.push_back(R);
    out.coercive = false;
    out.support_radius = 0.0;
    for (double r : out.trunc_radii) out.support_radius = std::max(out.support_radius, r + 1.0);
    if (H.family == Family::CustomGrid)
        out.support_radius =
            std::max(out.support_radius, std::max(std::abs(H.grid.p_lo), std::abs(H.grid.p_hi)));
    if (!H.coercive) out.support_radius = std::min(out.support_radius, H.support_radius);
    return out;
}

double calabi(const HamiltonianSpec& H) {
    if (H.coercive) throw UnsupportedCoercive("calabi needs compact support");
    if (H.offset != 0.0) throw UnsupportedCoercive("calabi needs compact support (offset != 0)");
    const double R = H.support_radius;
    const int NQ = 192, NP = 384;
    const int NT = H.time_dependent || H.time_mod != 0.0 ? 48 : 1;
    double acc = 0.0;
    Vec q = Vec::zero(H.n), p = Vec::zero(H.n);
    if (H.n == 1) {
        for (int it = 0; it < NT; ++it) {
            double t = static_cast<double>(it) / NT;
            for (int iq = 0; iq < NQ; ++iq) {
                q[0] = static_cast<double>(iq) / NQ;
                // composite Simpson in p
                double sp = 0.0;
                for (int ip = 0; ip <= NP; ++ip) {
                    p[0] = -R + 2.0 * R * ip / NP;
                    double w = (ip == 0 || ip == NP) ? 1.0 : (ip % 2 ? 4.0 : 2.0);
                    sp += w * H.value_base(t, q, p);
                }
                acc += sp * (2.0 * R / NP) / 3.0;
            }
        }
        return acc / (NQ * NT);
    }
    // n = 2: trapezoid in q (periodic), Simpson^2 in p.
    const int NQ2 = 48, NP2 = 96;
    for (int it = 0; it < NT; ++it) {
        double t = static_cast<double>(it) / NT;
        for (int i1 = 0; i1 < NQ2; ++i1)
            for (int i2 = 0; i2 < NQ2; ++i2) {
                q[0] = static_cast<double>(i1) / NQ2;
                q[1] = static_cast<double>(i2) / NQ2;
                double sp = 0.0;
                for (int j1 = 0; j1 <= NP2; ++j1) {
                    double w1 = (j1 == 0 || j1 == NP2) ? 1.0 : (j1 % 2 ? 4.0 : 2.0);
                    p[0] = -R + 2.0 * R * j1 / NP2;
                    for (int j2 = 0; j2 <= NP2; ++j2) {
                        double w2 = (j2 == 0 || j2 == NP2) ? 1.0 : (j2 % 2 ? 4.0 : 2.0);
                        p[1] = -R + 2.0 * R * j2 / NP2;
                        sp += w1 * w2 * H.value_base(t, q, p);
                    }
                }
                acc += sp * (2.0 * R / NP2) * (2.0 * R / NP2) / 9.0;
            }
    }
    return acc / (NQ2 * NQ2 * NT);
}

}  // namespace symh::dynamics
