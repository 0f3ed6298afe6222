#include <symh/io.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>

namespace symh {

// ---------------------------------------------------------------------------
// CubicSpline
// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(double lo, double hi, std::vector<double> values, bool periodic)
    : lo_(lo), hi_(hi), periodic_(periodic), y_(std::move(values)) {
    const int n = static_cast<int>(y_.size());
    if (n < 2) throw error("CubicSpline: need at least 2 samples");
    h_ = (hi_ - lo_) / (periodic_ ? n : n - 1);
    m_.assign(n, 0.0);
    if (n == 2) return;

    if (!periodic_) {
        // Natural spline: tridiagonal solve for interior second derivatives.
        std::vector<double> d(n - 2, 4.0), e(n - 3, 1.0), rhs(n - 2);
        for (int i = 1; i + 1 < n; ++i)
            rhs[i - 1] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / (h_ * h_);
        if (!solve_tridiag_spd(n - 2, d, e, rhs)) throw error("CubicSpline: solve failed");
        for (int i = 1; i + 1 < n; ++i) m_[i] = rhs[i - 1];
    } else {
        // Periodic spline: cyclic tridiagonal via Sherman-Morrison.
        const int m = n;
        std::vector<double> rhs(m);
        for (int i = 0; i < m; ++i) {
            double ym = y_[(i + m - 1) % m], yp = y_[(i + 1) % m];
            rhs[i] = 6.0 * (ym - 2.0 * y_[i] + yp) / (h_ * h_);
        }
        // System: 4 on diag, 1 on off-diags, cyclic corners 1.
        auto solve_noncyclic = [&](std::vector<double> r) {
            std::vector<double> d(m, 4.0), e(m - 1, 1.0);
            d[0] -= 1.0;  // Sherman-Morrison modification u = (1,0,...,0,1)
            d[m - 1] -= 1.0;
            if (!solve_tridiag_spd(m, d, e, r)) throw error("CubicSpline: periodic solve failed");
            return r;
        };
        std::vector<double> u(m, 0.0);
        u[0] = 1.0;
        u[m - 1] = 1.0;
        auto z1 = solve_noncyclic(rhs);
        auto z2 = solve_noncyclic(u);
        double fact = (z1[0] + z1[m - 1]) / (1.0 + z2[0] + z2[m - 1]);
        for (int i = 0; i < m; ++i) m_[i] = z1[i] - fact * z2[i];
    }
}

void CubicSpline::locate(double x, int& i, double& t) const {
    const int n = static_cast<int>(y_.size());
    if (periodic_) {
        double u = (x - lo_) / (hi_ - lo_);
        u -= std::floor(u);
        double s = u * n;
        i = static_cast<int>(s);
        if (i >= n) i = n - 1;
        t = s - i;
    } else {
        double s = (x - lo_) / h_;
        if (s <= 0) {
            i = 0;
            t = s;
        } else if (s >= n - 1) {
            i = n - 2;
            t = s - i;
        } else {
            i = static_cast<int>(s);
            t = s - i;
        }
    }
}

double CubicSpline::eval(double x) const {
    int i;
    double t;
    locate(x, i, t);
    const int n = static_cast<int>(y_.size());
    int j = periodic_ ? (i + 1) % n : i + 1;
    double a = 1.0 - t, b = t;
    return a * y_[i] + b * y_[j] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[j]) * h_ * h_ / 6.0;
}

double CubicSpline::deriv(double x) const {
    int i;
    double t;
    locate(x, i, t);
    const int n = static_cast<int>(y_.size());
    int j = periodic_ ? (i + 1) % n : i + 1;
    double a = 1.0 - t, b = t;
    return (y_[j] - y_[i]) / h_ +
           h_ * ((3.0 * b * b - 1.0) * m_[j] - (3.0 * a * a - 1.0) * m_[i]) / 6.0;
}

double CubicSpline::deriv2(double x) const {
    int i;
    double t;
    locate(x, i, t);
    const int n = static_cast<int>(y_.size());
    int j = periodic_ ? (i + 1) % n : i + 1;
    return (1.0 - t) * m_[i] + t * m_[j];
}

// ---------------------------------------------------------------------------
// Small linear algebra
// ---------------------------------------------------------------------------

bool solve_small(int m, double* A, double* b) {
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(A[r * m + col]) > std::abs(A[piv * m + col])) piv = r;
        if (std::abs(A[piv * m + col]) < 1e-14) return false;
        if (piv != col) {
            for (int c = 0; c < m; ++c) std::swap(A[piv * m + c], A[col * m + c]);
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < m; ++r) {
            double f = A[r * m + col] / A[col * m + col];
            for (int c = col; c < m; ++c) A[r * m + c] -= f * A[col * m + c];
            b[r] -= f * b[col];
        }
    }
    for (int r = m - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < m; ++c) s -= A[r * m + c] * b[c];
        b[r] = s / A[r * m + r];
    }
    return true;
}

bool solve_tridiag_spd(int m, std::vector<double> d, std::vector<double> e,
                       std::vector<double>& rhs) {
    for (int i = 1; i < m; ++i) {
        if (d[i - 1] <= 0) return false;
        double w = e[i - 1] / d[i - 1];
        d[i] -= w * e[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (d[m - 1] <= 0) return false;
    rhs[m - 1] /= d[m - 1];
    for (int i = m - 2; i >= 0; --i) rhs[i] = (rhs[i] - e[i] * rhs[i + 1]) / d[i];
    return true;
}

Inertia symmetric_inertia(std::vector<double> A, int m, double tol) {
    // Cyclic Jacobi; m stays small (<= ~48).
    double scale = 0;
    for (double v : A) scale = std::max(scale, std::abs(v));
    if (scale == 0) return Inertia{0, m, 0};
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) off = std::max(off, std::abs(A[i * m + j]));
        if (off < 1e-13 * scale) break;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                double aij = A[i * m + j];
                if (std::abs(aij) < 1e-15 * scale) continue;
                double theta = 0.5 * (A[j * m + j] - A[i * m + i]) / aij;
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < m; ++k) {
                    double aik = A[i * m + k], ajk = A[j * m + k];
                    A[i * m + k] = c * aik - s * ajk;
                    A[j * m + k] = s * aik + c * ajk;
                }
                for (int k = 0; k < m; ++k) {
                    double aki = A[k * m + i], akj = A[k * m + j];
                    A[k * m + i] = c * aki - s * akj;
                    A[k * m + j] = s * aki + c * akj;
                }
            }
    }
    Inertia in;
    for (int i = 0; i < m; ++i) {
        double v = A[i * m + i];
        if (v > tol * scale)
            ++in.pos;
        else if (v < -tol * scale)
            ++in.neg;
        else
            ++in.zero;
    }
    return in;
}

// ---------------------------------------------------------------------------
// CSV / hashing / files
// ---------------------------------------------------------------------------

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed) {
    const auto* b = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= b[i];
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t fnv1a64(const std::string& s, uint64_t seed) { return fnv1a64(s.data(), s.size(), seed); }

std::string hash_hex(uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open for write: " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open for read: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string CsvTable::to_string() const {
    std::string out;
    for (size_t c = 0; c < header.size(); ++c) {
        out += header[c];
        out += (c + 1 < header.size()) ? ',' : '\n';
    }
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            out += (c + 1 < row.size()) ? ',' : '\n';
        }
    }
    return out;
}

}  // namespace symh
