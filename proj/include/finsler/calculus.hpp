#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include <finsler/hyperdual.hpp>
#include <finsler/linalg.hpp>
#include <finsler/norms.hpp>

namespace finsler {

/// Value, gradient and Hessian of a scalar function at a point. The Hessian
/// is assembled from one propagation per coordinate pair, so it is symmetric
/// by construction.
struct SecondOrderJet {
    double value = 0.0;
    Vector grad;
    SymMat hess;

    explicit SecondOrderJet(int n) : grad(static_cast<std::size_t>(n), 0.0), hess(n) {}
};

/// Second-order forward propagation of an arbitrary scalar-generic callable.
/// Each of the n(n+1)/2 coordinate pairs gets one pass with the two nilpotent
/// units seeded along that pair; the mixed component of the result is the
/// corresponding Hessian entry, exact to machine precision.
template <class Fn>
SecondOrderJet second_order_jet(const Fn& f, std::span<const double> y) {
    const int n = static_cast<int>(y.size());
    SecondOrderJet jet(n);
    std::vector<HyperDual> v(y.begin(), y.end());
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            v[static_cast<std::size_t>(i)].e1 = 1.0;
            v[static_cast<std::size_t>(j)].e2 = 1.0;
            const HyperDual r = f(std::span<const HyperDual>(v));
            if (i == j) {
                jet.value = r.re;
                jet.grad[static_cast<std::size_t>(i)] = r.e1;
            }
            jet.hess.set(i, j, r.e12);
            v[static_cast<std::size_t>(i)].e1 = 0.0;
            v[static_cast<std::size_t>(j)].e2 = 0.0;
        }
    }
    return jet;
}

/// Jet of F^2 at y != 0.
inline SecondOrderJet jet_of_norm_squared(const MinkowskiNorm& f, std::span<const double> y) {
    if (static_cast<int>(y.size()) != f.dimension())
        throw std::invalid_argument("vector length does not match norm dimension");
    if (is_zero_vector(y))
        throw std::invalid_argument("norm square is not differentiable at the origin");
    return second_order_jet(
        [&f](std::span<const HyperDual> v) { return f.squared(v); }, y);
}

inline double default_fd_step(std::span<const double> y) {
    // Balances truncation against roundoff for smooth double-precision input.
    return 1e-4 * std::max(1.0, euclidean_length(y));
}

/// Central-difference Hessian of F^2, the independent oracle for the jet
/// path. Off-diagonal entries use the four-corner stencil, which is already
/// symmetric in (i, j), so mirroring the entry is the (H + H^T)/2 average.
inline SymMat finite_difference_hessian(const MinkowskiNorm& f, std::span<const double> y,
                                        double h) {
    const int n = static_cast<int>(y.size());
    if (n != f.dimension())
        throw std::invalid_argument("vector length does not match norm dimension");
    if (is_zero_vector(y))
        throw std::invalid_argument("finite differences need y != 0");
    if (!(h > 0.0) || !(h < euclidean_length(y) / 100.0))
        throw std::invalid_argument("finite-difference step must satisfy 0 < h < |y|/100");

    Vector p(y.begin(), y.end());
    const auto f2 = [&](const Vector& v) { return f.squared(std::span<const double>(v)); };

    SymMat hess(n);
    const double center = f2(p);
    for (int i = 0; i < n; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        p[si] = y[si] + h;
        const double fp = f2(p);
        p[si] = y[si] - h;
        const double fm = f2(p);
        p[si] = y[si];
        hess.set(i, i, (fp - 2.0 * center + fm) / (h * h));
        for (int j = i + 1; j < n; ++j) {
            const std::size_t sj = static_cast<std::size_t>(j);
            double corners = 0.0;
            for (int a : {1, -1}) {
                for (int b : {1, -1}) {
                    p[si] = y[si] + a * h;
                    p[sj] = y[sj] + b * h;
                    corners += a * b * f2(p);
                }
            }
            p[si] = y[si];
            p[sj] = y[sj];
            hess.set(i, j, corners / (4.0 * h * h));
        }
    }
    return hess;
}

inline SymMat finite_difference_hessian(const MinkowskiNorm& f, std::span<const double> y) {
    return finite_difference_hessian(f, y, default_fd_step(y));
}

} // namespace finsler
