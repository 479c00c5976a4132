#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace finsler {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double euclidean_length(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline bool is_zero_vector(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

/// Dense symmetric matrix. Writes go through set(), which mirrors the entry,
/// so stored matrices are symmetric by construction rather than by rounding.
class SymMat {
public:
    explicit SymMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n <= 0) throw std::invalid_argument("SymMat: dimension must be positive");
    }

    int dim() const { return n_; }

    double operator()(int i, int j) const { return a_[idx(i, j)]; }

    void set(int i, int j, double v) {
        a_[idx(i, j)] = v;
        a_[idx(j, i)] = v;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    /// x^T A x
    double quad(std::span<const double> x) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s += x[static_cast<std::size_t>(i)] * a_[idx(i, j)] * x[static_cast<std::size_t>(j)];
        return s;
    }

    /// Eigenvalues in ascending order: closed form for n <= 2, cyclic Jacobi
    /// rotations otherwise.
    std::vector<double> eigenvalues() const {
        if (n_ == 1) return {a_[0]};
        if (n_ == 2) {
            const double tr = trace();
            const double diff = (*this)(0, 0) - (*this)(1, 1);
            const double disc = std::sqrt(diff * diff + 4.0 * (*this)(0, 1) * (*this)(0, 1));
            return {(tr - disc) / 2.0, (tr + disc) / 2.0};
        }
        return jacobi_eigenvalues();
    }

    double min_eigenvalue() const { return eigenvalues().front(); }

    double det() const {
        if (n_ == 1) return a_[0];
        if (n_ == 2) return a_[0] * a_[3] - a_[1] * a_[2];
        double p = 1.0;
        for (double ev : jacobi_eigenvalues()) p *= ev;
        return p;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

    std::vector<double> jacobi_eigenvalues() const {
        std::vector<double> a = a_;
        const auto at = [&](int i, int j) -> double& { return a[idx(i, j)]; };
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j) off += at(i, j) * at(i, j);
            if (off < 1e-30) break;
            for (int p = 0; p < n_; ++p) {
                for (int q = p + 1; q < n_; ++q) {
                    if (at(p, q) == 0.0) continue;
                    const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                    const double t = (theta >= 0 ? 1.0 : -1.0) /
                                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    for (int k = 0; k < n_; ++k) {
                        const double akp = at(k, p), akq = at(k, q);
                        at(k, p) = c * akp - s * akq;
                        at(k, q) = s * akp + c * akq;
                    }
                    for (int k = 0; k < n_; ++k) {
                        const double apk = at(p, k), aqk = at(q, k);
                        at(p, k) = c * apk - s * aqk;
                        at(q, k) = s * apk + c * aqk;
                    }
                }
            }
        }
        std::vector<double> ev(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
        std::sort(ev.begin(), ev.end());
        return ev;
    }

    int n_;
    std::vector<double> a_;
};

} // namespace finsler
