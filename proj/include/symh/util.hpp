#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace symh {

// ---------------------------------------------------------------------------
// Errors named by the conditions they report.
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

#define SYMH_ERROR(Name)                                        \
    struct Name : error {                                       \
        explicit Name(const std::string& msg = #Name)           \
            : error(std::string(#Name) + ": " + msg) {}         \
    }

SYMH_ERROR(NonConvergentImplicitStep);
SYMH_ERROR(NoOrbitFound);
SYMH_ERROR(NoGeneratingFunction);
SYMH_ERROR(GridBudgetExceeded);
SYMH_ERROR(ClassNotFound);
SYMH_ERROR(OutOfBox);
SYMH_ERROR(BoundaryPoint);
SYMH_ERROR(ConstantFunction);
SYMH_ERROR(NonConvexInput);
SYMH_ERROR(TooLarge);
SYMH_ERROR(EmptyInput);
SYMH_ERROR(InfeasibleAlpha);
SYMH_ERROR(UnsupportedCoercive);
SYMH_ERROR(ConfigError);
SYMH_ERROR(BudgetExceeded);

#undef SYMH_ERROR

// ---------------------------------------------------------------------------
// Fixed-capacity vector for torus dimension n = 1 or 2.
// ---------------------------------------------------------------------------

struct Vec {
    std::array<double, 2> v{0.0, 0.0};
    int n = 1;

    Vec() = default;
    explicit Vec(double x) : v{x, 0.0}, n(1) {}
    Vec(double x, double y) : v{x, y}, n(2) {}
    static Vec zero(int dim) {
        Vec r;
        r.n = dim;
        return r;
    }

    double& operator[](int i) { return v[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) v[i] += o.v[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) v[i] -= o.v[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n; ++i) v[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }

    double norm() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += v[i] * v[i];
        return std::sqrt(s);
    }
    double norm_inf() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s = std::max(s, std::abs(v[i]));
        return s;
    }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
    return s;
}

// Reduce to the fundamental domain [0,1); exact for integer shifts.
inline double wrap01(double x) { return x - std::floor(x); }

// C^2 monotone cutoff: 1 on s<=0, 0 on s>=1 (quintic smoothstep complement).
inline double cutoff_c2(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}
inline double cutoff_c2_d(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return -s * s * (30.0 + s * (-60.0 + 30.0 * s));
}

// ---------------------------------------------------------------------------
// Natural / periodic cubic spline on a uniform grid.
// ---------------------------------------------------------------------------

class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(double lo, double hi, std::vector<double> values, bool periodic);

    double eval(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool periodic() const { return periodic_; }
    const std::vector<double>& values() const { return y_; }

private:
    void locate(double x, int& i, double& t) const;
    double lo_ = 0, hi_ = 1, h_ = 1;
    bool periodic_ = false;
    std::vector<double> y_;   // node values
    std::vector<double> m_;   // second derivatives at nodes
};

// ---------------------------------------------------------------------------
// Small dense linear algebra used by the implicit integrator / Newton solves.
// ---------------------------------------------------------------------------

// Solve A x = b for an m x m system (m <= 4), Gaussian elimination with
// partial pivoting. Returns false on (near-)singular A.
bool solve_small(int m, double* A, double* b);

// Solve a symmetric tridiagonal system in place; diag d[0..m), offdiag e[0..m-1).
// Returns false if a pivot is not strictly positive (used as a definiteness gate).
bool solve_tridiag_spd(int m, std::vector<double> d, std::vector<double> e,
                       std::vector<double>& rhs);

// Inertia (n_neg, n_zero, n_pos) of a small symmetric matrix via Jacobi rotations.
struct Inertia {
    int neg = 0, zero = 0, pos = 0;
};
Inertia symmetric_inertia(std::vector<double> A, int m, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Deterministic RNG helper: every stochastic choice is keyed off a seed.
// ---------------------------------------------------------------------------

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}
    double uniform(double a, double b) {
        std::uniform_real_distribution<double> d(a, b);
        return d(gen);
    }
    int uniform_int(int a, int b) {
        std::uniform_int_distribution<int> d(a, b);
        return d(gen);
    }
};

}  // namespace symh
