#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <finsler/calculus.hpp>
#include <finsler/linalg.hpp>
#include <finsler/norms.hpp>
#include <finsler/tensor.hpp>

namespace finsler {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// |X|_y = sqrt(X^T g(y) X). g is homogeneous of degree zero in y, so the
/// result is unchanged by scaling y onto the unit level set; no explicit
/// normalization is needed.
inline double relative_length(const MinkowskiNorm& f, std::span<const double> x,
                              std::span<const double> y) {
    const FundamentalTensor t = fundamental_tensor(f, y);
    return std::sqrt(std::max(0.0, t.g.quad(x)));
}

/// E_X(y) = (1/2) X^T g(y) X.
inline double relative_energy(const MinkowskiNorm& f, std::span<const double> x,
                              std::span<const double> y) {
    const FundamentalTensor t = fundamental_tensor(f, y);
    return 0.5 * t.g.quad(x);
}

/// E_X sampled over a uniform angle grid on [0, 2pi). By zero-homogeneity
/// the values at circle points equal the values at the corresponding unit
/// level-set points, so the profile is evaluated on the circle directly.
struct EnergyProfile {
    Vector x;
    Vector angles;
    Vector values;
    std::string metric_id;
};

inline EnergyProfile energy_profile(const MinkowskiNorm& f, std::span<const double> x,
                                    int n_angles) {
    if (f.dimension() != 2)
        throw std::invalid_argument("energy_profile requires a 2D norm");
    if (n_angles < 256)
        throw std::invalid_argument("energy_profile needs at least 256 angles");
    if (is_zero_vector(x))
        throw std::invalid_argument("energy_profile needs X != 0");

    EnergyProfile profile;
    profile.x.assign(x.begin(), x.end());
    profile.metric_id = f.description();
    profile.angles.resize(static_cast<std::size_t>(n_angles));
    profile.values.resize(static_cast<std::size_t>(n_angles));
    for (int k = 0; k < n_angles; ++k) {
        const double theta = kTwoPi * k / n_angles;
        const std::array<double, 2> y{std::cos(theta), std::sin(theta)};
        profile.angles[static_cast<std::size_t>(k)] = theta;
        profile.values[static_cast<std::size_t>(k)] = relative_energy(f, x, y);
    }
    return profile;
}

/// File format: header `theta,energy`, one row per grid point, floats with
/// 17 significant digits.
inline void write_csv(const EnergyProfile& profile, std::ostream& out) {
    out << "theta,energy\n";
    char row[96];
    for (std::size_t k = 0; k < profile.angles.size(); ++k) {
        std::snprintf(row, sizeof row, "%.17g,%.17g\n", profile.angles[k], profile.values[k]);
        out << row;
    }
}

enum class CriticalKind { local_min, local_max, inflection };

inline const char* to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::local_min: return "local_min";
        case CriticalKind::local_max: return "local_max";
        case CriticalKind::inflection: return "inflection";
    }
    return "inflection";
}

/// A refined critical point of E_X on the unit level set.
struct CriticalPoint {
    double theta = 0.0;
    std::array<double, 2> y{0.0, 0.0}; // scaled so F(y) = 1
    double energy = 0.0;
    CriticalKind kind = CriticalKind::inflection;
    double derivative_residual = 0.0;
    /// Cross product of the numerator-polynomial gradient with the
    /// level-set constraint gradient; only defined for table-backed metrics.
    std::optional<double> lagrange_residual;
};

namespace detail {

/// dE_X/dtheta by five-point central differences with base step h.
/// The fourth-order stencil keeps the residual floor at inflection points
/// (where the second-order error term ~ E''' h^2 / 6 would dominate) below
/// every tolerance used here. Grouping as differences first makes the
/// stencil vanish exactly at symmetry angles where E(theta+t) and
/// E(theta-t) agree bitwise, instead of leaving an ulp of cancellation
/// residue.
template <class EnergyFn>
double profile_derivative(const EnergyFn& energy, double theta, double h) {
    const double d1 = energy(theta + h) - energy(theta - h);
    const double d2 = energy(theta + 2.0 * h) - energy(theta - 2.0 * h);
    return (8.0 * d1 - d2) / (12.0 * h);
}

struct PeriodicRoot {
    double theta = 0.0;
    double residual = 0.0;
};

/// Locates roots of a smooth 2pi-periodic function from a uniform grid scan:
/// sign changes are bisected; grid nodes where |fn| dips to a local minimum
/// without a sign change (even-multiplicity roots) are refined by golden-
/// section minimization of |fn| and accepted only if the refined value is
/// consistent with zero. Roots closer than merge_tol are merged.
template <class Fn>
std::vector<PeriodicRoot> find_periodic_roots(const Fn& fn, int n_grid, double merge_tol,
                                              double accept_residual) {
    const double spacing = kTwoPi / n_grid;
    std::vector<double> samples(static_cast<std::size_t>(n_grid));
    double max_abs = 0.0;
    for (int k = 0; k < n_grid; ++k) {
        samples[static_cast<std::size_t>(k)] = fn(kTwoPi * k / n_grid);
        max_abs = std::max(max_abs, std::abs(samples[static_cast<std::size_t>(k)]));
    }

    std::vector<PeriodicRoot> roots;
    const auto bisect = [&](double lo, double hi, double flo) {
        double fmid = 0.0;
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            fmid = fn(mid);
            if (fmid == 0.0) { lo = hi = mid; break; }
            if ((flo < 0.0) != (fmid < 0.0)) {
                hi = mid;
            } else {
                lo = mid;
                flo = fmid;
            }
        }
        const double mid = 0.5 * (lo + hi);
        roots.push_back({mid, std::abs(fn(mid))});
    };

    for (int k = 0; k < n_grid; ++k) {
        const int next = (k + 1) % n_grid;
        const double a = samples[static_cast<std::size_t>(k)];
        const double b = samples[static_cast<std::size_t>(next)];
        const double lo = kTwoPi * k / n_grid;
        if (a == 0.0) {
            roots.push_back({lo, 0.0});
        } else if ((a < 0.0) != (b < 0.0)) {
            bisect(lo, lo + spacing, a);
        }
    }

    // Even-multiplicity roots: |fn| dips toward zero without crossing. The
    // candidate threshold scales with both the sample magnitude and the grid
    // spacing, since the dip seen at the nearest node grows like
    // |fn''| (spacing/2)^2 / 2 as the grid coarsens.
    const double candidate_tol =
        std::max(1e-6, max_abs * spacing * spacing);
    for (int k = 0; k < n_grid; ++k) {
        const int prev = (k + n_grid - 1) % n_grid;
        const int next = (k + 1) % n_grid;
        const double here = std::abs(samples[static_cast<std::size_t>(k)]);
        if (here == 0.0 || here >= candidate_tol) continue;
        if (here > std::abs(samples[static_cast<std::size_t>(prev)]) ||
            here > std::abs(samples[static_cast<std::size_t>(next)]))
            continue;
        // golden-section minimization of |fn| over the surrounding cell pair
        const double gr = 0.6180339887498949;
        double lo = kTwoPi * k / n_grid - spacing;
        double hi = kTwoPi * k / n_grid + spacing;
        double c = hi - gr * (hi - lo);
        double d = lo + gr * (hi - lo);
        double fc = std::abs(fn(c));
        double fd = std::abs(fn(d));
        while (hi - lo > 1e-12) {
            if (fc < fd) {
                hi = d; d = c; fd = fc;
                c = hi - gr * (hi - lo);
                fc = std::abs(fn(c));
            } else {
                lo = c; c = d; fc = fd;
                d = lo + gr * (hi - lo);
                fd = std::abs(fn(d));
            }
        }
        const double mid = 0.5 * (lo + hi);
        const double res = std::abs(fn(mid));
        if (res <= accept_residual) roots.push_back({mid, res});
    }

    // merge duplicates modulo 2pi, keeping the smaller residual
    std::sort(roots.begin(), roots.end(),
              [](const PeriodicRoot& a, const PeriodicRoot& b) { return a.theta < b.theta; });
    std::vector<PeriodicRoot> merged;
    for (const PeriodicRoot& r : roots) {
        if (!merged.empty() && r.theta - merged.back().theta < merge_tol) {
            if (r.residual < merged.back().residual) merged.back() = r;
            continue;
        }
        merged.push_back(r);
    }
    if (merged.size() > 1 &&
        kTwoPi - merged.back().theta + merged.front().theta < merge_tol) {
        if (merged.back().residual < merged.front().residual)
            merged.front() = {merged.back().theta - kTwoPi, merged.back().residual};
        merged.pop_back();
    }
    for (PeriodicRoot& r : merged) {
        if (r.theta < 0.0) r.theta += kTwoPi;
        if (r.theta >= kTwoPi) r.theta -= kTwoPi;
    }
    std::sort(merged.begin(), merged.end(),
              [](const PeriodicRoot& a, const PeriodicRoot& b) { return a.theta < b.theta; });
    return merged;
}

} // namespace detail

/// Signed cross product of the gradient of the energy numerator polynomial
/// with the gradient of the degree-m constraint polynomial P, evaluated at
/// y scaled to the unit circle (the quantity is homogeneous in y, so scaling
/// only fixes its magnitude). Vanishes exactly at critical points of E_X on
/// the unit level set.
///
/// For F = P^(1/m), E_X = N_X / (m P^(2 - 2/m)) with the polynomial
/// numerator N_X = (1/2) [ P * (X^T Hess(P) X) + ((2-m)/m) (grad P . X)^2 ],
/// which for the c = 3 quartic reproduces the classical sextic numerator
/// with integer coefficients. All derivatives below are exact table
/// derivatives pushed through the jet engine.
inline double lagrange_cross(const MinkowskiNorm& f, std::span<const double> x,
                             std::span<const double> y) {
    const MthRootMetric* metric = f.mth_root_form();
    if (!metric)
        throw std::invalid_argument("lagrange residual needs a table-backed m-th-root metric");
    if (f.dimension() != 2)
        throw std::invalid_argument("lagrange residual is defined for 2D norms");
    if (is_zero_vector(y))
        throw std::invalid_argument("lagrange residual needs y != 0");

    const double len = euclidean_length(y);
    const std::array<double, 2> u{y[0] / len, y[1] / len};

    const Polynomial& p = metric->polynomial();
    const double m = metric->root_degree();
    const double beta = (2.0 - m) / m;

    const auto jet_of = [&u](const Polynomial& poly) {
        return second_order_jet(
            [&poly](std::span<const HyperDual> v) { return poly(v); },
            std::span<const double>(u));
    };

    const SecondOrderJet jp = jet_of(p);
    const SecondOrderJet jq1 = jet_of(p.partial(0));
    const SecondOrderJet jq2 = jet_of(p.partial(1));

    const double quad_p = jp.hess(0, 0) * x[0] * x[0] + 2.0 * jp.hess(0, 1) * x[0] * x[1] +
                          jp.hess(1, 1) * x[1] * x[1];
    const double grad_p_dot_x = jp.grad[0] * x[0] + jp.grad[1] * x[1];

    const auto numerator_partial = [&](const SecondOrderJet& jq, int k) {
        const double quad_qk = jq.hess(0, 0) * x[0] * x[0] + 2.0 * jq.hess(0, 1) * x[0] * x[1] +
                               jq.hess(1, 1) * x[1] * x[1];
        const double hess_p_x_k = jp.hess(k, 0) * x[0] + jp.hess(k, 1) * x[1];
        return 0.5 * (jq.value * quad_p + jp.value * quad_qk +
                      beta * 2.0 * grad_p_dot_x * hess_p_x_k);
    };

    const double n1 = numerator_partial(jq1, 0);
    const double n2 = numerator_partial(jq2, 1);
    return n1 * jp.grad[1] - n2 * jp.grad[0];
}

inline double lagrange_residual(const MinkowskiNorm& f, std::span<const double> x,
                                std::span<const double> y) {
    return std::abs(lagrange_cross(f, x, y));
}

/// The factored critical-point condition hard-coded for the c = 3 quartic:
///   y1 y2 (y1 - y2)(y1 + y2)(y1^2 + y2^2)(X1 y2 - X2 y1)^2
/// Zero exactly on the union of the axes, the diagonals and the ray of X.
inline double crit_condition_residual(std::span<const double> x, std::span<const double> y) {
    const double y1 = y[0], y2 = y[1];
    return y1 * y2 * (y1 - y2) * (y1 + y2) * (y1 * y1 + y2 * y2) *
           (x[0] * y2 - x[1] * y1) * (x[0] * y2 - x[1] * y1);
}

/// Enumerates the critical points of E_X along the unit level set.
///
/// The derivative of the profile is scanned on an n_angles grid, sign
/// changes are bisected down, near-zero dips without a sign change (the
/// horizontal-tangent inflections that occur at multiples of X) are refined
/// by minimizing |dE/dtheta|, near-duplicates are merged, and each survivor
/// is classified from the derivative signs on its two flanks.
///
/// Throws ResolutionFailure for constant profiles (Riemannian input), where
/// every direction is critical and enumeration is meaningless.
inline std::vector<CriticalPoint> find_critical_points(const MinkowskiNorm& f,
                                                       std::span<const double> x,
                                                       int n_angles = 4096) {
    if (f.dimension() != 2)
        throw std::invalid_argument("find_critical_points requires a 2D norm");
    if (is_zero_vector(x))
        throw std::invalid_argument("find_critical_points needs X != 0");
    if (n_angles < 256)
        throw std::invalid_argument("find_critical_points needs at least 256 angles");

    const Vector xv(x.begin(), x.end());
    const auto energy_at = [&f, &xv](double theta) {
        const std::array<double, 2> y{std::cos(theta), std::sin(theta)};
        return relative_energy(f, xv, y);
    };

    // Constant profile: report the degenerate case instead of emitting
    // thousands of spurious "roots".
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < n_angles; ++k) {
        const double e = energy_at(kTwoPi * k / n_angles);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(hi)))
        throw ResolutionFailure("energy profile is constant; every direction is critical");

    const double h = kTwoPi / (8.0 * n_angles);
    const auto derivative = [&](double theta) {
        return detail::profile_derivative(energy_at, theta, h);
    };

    const double accept_residual = 1e-8 * std::max(1.0, hi - lo);
    const std::vector<detail::PeriodicRoot> roots =
        detail::find_periodic_roots(derivative, n_angles, 1e-6, accept_residual);
    if (roots.empty())
        throw ResolutionFailure("no critical points resolved on a non-constant profile");

    const double flank = kTwoPi / n_angles / 2.0;
    std::vector<CriticalPoint> points;
    points.reserve(roots.size());
    for (const detail::PeriodicRoot& r : roots) {
        CriticalPoint cp;
        cp.theta = r.theta;
        cp.derivative_residual = r.residual;
        const std::array<double, 2> dir{std::cos(r.theta), std::sin(r.theta)};
        const double radius = indicatrix_radius(f, r.theta);
        cp.y = {radius * dir[0], radius * dir[1]};
        cp.energy = relative_energy(f, xv, dir);
        const double left = derivative(r.theta - flank);
        const double right = derivative(r.theta + flank);
        if (left < 0.0 && right > 0.0) {
            cp.kind = CriticalKind::local_min;
        } else if (left > 0.0 && right < 0.0) {
            cp.kind = CriticalKind::local_max;
        } else {
            cp.kind = CriticalKind::inflection;
        }
        if (f.mth_root_form()) cp.lagrange_residual = lagrange_residual(f, xv, cp.y);
        points.push_back(cp);
    }
    return points;
}

inline nlohmann::ordered_json to_json(const CriticalPoint& cp) {
    nlohmann::ordered_json j;
    j["theta"] = cp.theta;
    j["y"] = cp.y;
    j["energy"] = cp.energy;
    j["kind"] = to_string(cp.kind);
    j["derivative_residual"] = cp.derivative_residual;
    if (cp.lagrange_residual) {
        j["lagrange_residual"] = *cp.lagrange_residual;
    } else {
        j["lagrange_residual"] = nullptr;
    }
    return j;
}

inline nlohmann::ordered_json to_json(const std::vector<CriticalPoint>& points) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CriticalPoint& cp : points) arr.push_back(to_json(cp));
    return arr;
}

} // namespace finsler
