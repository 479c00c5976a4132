#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include <finsler/calculus.hpp>
#include <finsler/linalg.hpp>
#include <finsler/norms.hpp>

namespace finsler {

/// Positive-definiteness margin: a strict inequality needs numerical room,
/// and well-behaved metrics keep their smallest eigenvalue far above this.
inline constexpr double kConvexityEigenvalueFloor = 1e-9;

/// g(y) = (1/2) Hessian(F^2)(y), with the direction it was evaluated at and
/// the derived scalars the convexity checks consume.
struct FundamentalTensor {
    Vector at;
    SymMat g;
    double trace = 0.0;
    double det = 0.0;
    double min_eigenvalue = 0.0;

    explicit FundamentalTensor(int n) : g(n) {}
};

inline FundamentalTensor fundamental_tensor(const MinkowskiNorm& f, std::span<const double> y) {
    const SecondOrderJet jet = jet_of_norm_squared(f, y);
    FundamentalTensor t(f.dimension());
    t.at.assign(y.begin(), y.end());
    for (int i = 0; i < f.dimension(); ++i)
        for (int j = i; j < f.dimension(); ++j) t.g.set(i, j, 0.5 * jet.hess(i, j));
    t.trace = t.g.trace();
    t.det = t.g.det();
    t.min_eigenvalue = t.g.min_eigenvalue();
    return t;
}

// Closed forms for the c = 3 quartic, used as an independent cross-check of
// the propagated tensor:
//   trace(g) = 5 (y1^2 + y2^2)^3 / (2 (y1^4 + 3 y1^2 y2^2 + y2^4)^(3/2))
//   det(g)   = 3 (2 y1^4 + y1^2 y2^2 + 2 y2^4) / (4 (y1^4 + 3 y1^2 y2^2 + y2^4))
inline double quartic3_trace(std::span<const double> y) {
    const double y1 = y[0], y2 = y[1];
    const double p = y1 * y1 * y1 * y1 + 3.0 * y1 * y1 * y2 * y2 + y2 * y2 * y2 * y2;
    const double r2 = y1 * y1 + y2 * y2;
    return 5.0 * r2 * r2 * r2 / (2.0 * std::pow(p, 1.5));
}

inline double quartic3_det(std::span<const double> y) {
    const double y1 = y[0], y2 = y[1];
    const double p = y1 * y1 * y1 * y1 + 3.0 * y1 * y1 * y2 * y2 + y2 * y2 * y2 * y2;
    return 3.0 * (2.0 * y1 * y1 * y1 * y1 + y1 * y1 * y2 * y2 + 2.0 * y2 * y2 * y2 * y2) /
           (4.0 * p);
}

struct ConvexityReport {
    bool pass = false;
    double min_eigenvalue = 0.0;
    double argmin_angle = 0.0;
    int n_angles = 0;
    /// Filled for the c = 3 quartic only: worst relative deviation of the
    /// sampled trace/det from their closed forms.
    std::optional<double> max_trace_rel_error;
    std::optional<double> max_det_rel_error;
};

/// Scans g over n_angles directions of the unit circle. Zero-homogeneity of
/// g makes the circle a complete sample of all nonzero directions.
inline ConvexityReport check_strong_convexity(const MinkowskiNorm& f, int n_angles,
                                              double eigenvalue_floor = kConvexityEigenvalueFloor) {
    if (f.dimension() != 2)
        throw std::invalid_argument("check_strong_convexity requires a 2D norm");
    if (n_angles < 64)
        throw std::invalid_argument("check_strong_convexity needs at least 64 angles");

    const bool reference_quartic = matches_quartic(f, 3.0);
    ConvexityReport report;
    report.n_angles = n_angles;
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    double trace_err = 0.0, det_err = 0.0;

    const double two_pi = 2.0 * std::acos(-1.0);
    for (int k = 0; k < n_angles; ++k) {
        const double theta = two_pi * k / n_angles;
        const std::array<double, 2> y{std::cos(theta), std::sin(theta)};
        const FundamentalTensor t = fundamental_tensor(f, y);
        if (t.min_eigenvalue < report.min_eigenvalue) {
            report.min_eigenvalue = t.min_eigenvalue;
            report.argmin_angle = theta;
        }
        if (reference_quartic) {
            trace_err = std::max(trace_err,
                                 std::abs(t.trace - quartic3_trace(y)) / std::abs(quartic3_trace(y)));
            det_err = std::max(det_err,
                               std::abs(t.det - quartic3_det(y)) / std::abs(quartic3_det(y)));
        }
    }
    report.pass = report.min_eigenvalue > eigenvalue_floor;
    if (reference_quartic) {
        report.max_trace_rel_error = trace_err;
        report.max_det_rel_error = det_err;
    }
    return report;
}

inline nlohmann::ordered_json to_json(const ConvexityReport& r) {
    nlohmann::ordered_json j;
    j["pass"] = r.pass;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["argmin_angle"] = r.argmin_angle;
    j["n_angles"] = r.n_angles;
    return j;
}

} // namespace finsler
