#pragma once

#include <symh/util.hpp>

#include <optional>
#include <string>
#include <vector>

namespace symh::dynamics {

using symh::Vec;

// ---------------------------------------------------------------------------
// One-variable profiles used as kinetic parts T(p) and potentials V(q).
// ---------------------------------------------------------------------------

struct Profile {
    enum class Kind { Zero, Quadratic, Cosine, DoubleWell, Bump, Spline };
    Kind kind = Kind::Zero;
    // Quadratic:  a * x^2 / 2
    // Cosine:     a * (1 - cos(2 pi (x - c) / b)) / 2     (b = period)
    // DoubleWell: a * ((x/c)^2 - 1)^2 / 4                 (minima at +-c, barrier a/4)
    // Bump:       a * cutoff_c2(|x - c| / b)              (support |x - c| <= b)
    double a = 0, b = 1, c = 0;
    // Spline samples on a uniform grid.
    double lo = 0, hi = 1;
    bool periodic = false;
    std::vector<double> samples;

    double eval(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
    bool is_zero() const { return kind == Kind::Zero || (kind != Kind::Spline && a == 0.0); }
    // Lazily built spline backing (Kind::Spline only).
    mutable std::optional<CubicSpline> spline;

    static Profile zero() { return {}; }
    static Profile quadratic(double a);
    static Profile cosine(double a, double period = 1.0, double center = 0.0);
    static Profile double_well(double a, double c);
    static Profile bump(double a, double width, double center = 0.0);
    static Profile from_samples(double lo, double hi, std::vector<double> vals, bool periodic);
};

// Sampled H(t,q,p) for torus dimension 1; t and q are 1-periodic.
struct CustomGridData {
    int nt = 1, nq = 2, np = 2;
    double p_lo = -1, p_hi = 1;
    std::vector<double> values;  // index [it*nq*np + iq*np + ip]
    double at(int it, int iq, int ip) const;
};

enum class Family { Zero, Integrable, MechanicalPendulum, SeparableNonconvex, CustomGrid };

// ---------------------------------------------------------------------------
// HamiltonianSpec: a serializable description of a Hamiltonian family on T*T^n.
// The additive constant `offset` is tracked symbolically; flows never see it,
// generating functions and actions account for it exactly.
// ---------------------------------------------------------------------------

struct HamiltonianSpec {
    Family family = Family::Zero;
    int n = 1;
    bool time_dependent = false;
    bool coercive = false;
    double support_radius = 1.0;  // H == 0 for |p| >= support_radius (when not coercive)
    double scale = 1.0;
    double offset = 0.0;

    Profile p_profile;  // Integrable / SeparableNonconvex kinetic part
    Profile q_profile;  // SeparableNonconvex potential
    double amplitude = 0.0;          // MechanicalPendulum: V = amplitude (1 - cos 2 pi q)/2
    double time_mod = 0.0;           // separable families: V scaled by (1 + time_mod sin 2 pi t)
    CustomGridData grid;             // CustomGrid family
    std::vector<double> trunc_radii;  // momentum cutoffs (C^2 over [R, R+1]), outermost last

    void validate() const;  // throws ConfigError on ill-formed specs

    // --- evaluation (scale and truncation included; offset included in value) ---
    double value(double t, const Vec& q, const Vec& p) const;
    double value_base(double t, const Vec& q, const Vec& p) const;  // without offset
    Vec dq(double t, const Vec& q, const Vec& p) const;
    Vec dp(double t, const Vec& q, const Vec& p) const;

    // Separable structure T(p) + theta(t) V(q) usable by the splitting integrator.
    // Truncation wrappers break separability.
    bool separable() const;
    double kinetic(double p1) const;           // n = 1 path
    double kinetic_d(double p1) const;
    double kinetic_dd(double p1) const;
    double potential(double t, double q1) const;
    double potential_d(double t, double q1) const;

    bool compact_support() const { return !coercive; }
    // True when the momentum lies outside the support shell (flow is frozen there).
    bool outside_support(const Vec& p) const;
    double sup_norm_estimate() const;  // coarse sup |H| over the support / unit box

    static HamiltonianSpec zero(int n = 1);
    static HamiltonianSpec integrable(Profile prof, bool coercive, double support_radius = 0.0);
    static HamiltonianSpec pendulum(double amplitude);
    static HamiltonianSpec separable(Profile T, Profile V, bool coercive,
                                     double support_radius = 0.0);
    static HamiltonianSpec custom(CustomGridData grid);

    // Structured-text (JSON) round trip.
    std::string to_json() const;
    static HamiltonianSpec from_json(const std::string& text);
    // Sampled CustomGrid as CSV with t,q,p,H columns.
    static HamiltonianSpec custom_from_csv(const std::string& csv_text);
};

// Multiplicative C^2 momentum cutoff of all applied truncations at |p|.
double truncation_factor(const HamiltonianSpec& H, double pnorm);
double truncation_factor_d(const HamiltonianSpec& H, double pnorm);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Compactly supported spec agreeing with H on {|p| <= R} (C^2 cutoff over [R, R+1]).
HamiltonianSpec truncate_coercive(const HamiltonianSpec& H, double R);

// Cal(phi_H) = int_0^1 int_{T*T^n} H omega^n dt, by quadrature.
// Requires compact support (UnsupportedCoercive otherwise).
double calabi(const HamiltonianSpec& H);

}  // namespace symh::dynamics
