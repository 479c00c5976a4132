#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include <finsler/errors.hpp>
#include <finsler/hyperdual.hpp>
#include <finsler/linalg.hpp>
#include <finsler/polynomial.hpp>

namespace finsler {

enum class FamilyTag { mth_root_polynomial, riemannian, custom };

inline const char* to_string(FamilyTag t) {
    switch (t) {
        case FamilyTag::mth_root_polynomial: return "mth_root_polynomial";
        case FamilyTag::riemannian: return "riemannian";
        case FamilyTag::custom: return "custom";
    }
    return "custom";
}

/// F(y) = P(y)^(1/m) for a homogeneous degree-m polynomial P with even m.
/// Odd m is rejected: the unit level set of an odd-degree root metric is
/// never convex or even compact, so it cannot define a Minkowski norm.
class MthRootMetric {
public:
    MthRootMetric(int root_degree, Polynomial p)
        : m_(root_degree), p_(std::move(p)) {
        if (m_ <= 0 || m_ % 2 != 0)
            throw InvalidMetric("root degree m must be a positive even integer");
        if (p_.terms().empty())
            throw InvalidMetric("coefficient table is empty");
        if (!p_.homogeneous_of_degree(m_))
            throw InvalidMetric("every multi-index must sum to the root degree m");
    }

    int dimension() const { return p_.dimension(); }
    int root_degree() const { return m_; }
    const Polynomial& polynomial() const { return p_; }

    /// F(y). Throws NonPositiveArgument where P(y) <= 0.
    double value(std::span<const double> y) const {
        return std::pow(positive_p(y), 1.0 / m_);
    }

    /// F^2 propagated through the table and t -> t^(2/m). The base is checked
    /// on the value part before the fractional power is applied.
    HyperDual squared(std::span<const HyperDual> y) const {
        HyperDual p = p_(y);
        if (!(p.re > 0.0))
            throw NonPositiveArgument("m-th-root polynomial is not positive in this direction");
        return pow(p, 2.0 / m_);
    }

    double squared(std::span<const double> y) const {
        return std::pow(positive_p(y), 2.0 / m_);
    }

    /// Samples P over directions and throws on the first non-positive value.
    /// In 2D the sample is a uniform angular grid; in higher dimensions a
    /// fixed-seed set of random unit vectors.
    void check_positivity(int n_samples = 1024) const {
        const int n = dimension();
        std::vector<double> y(static_cast<std::size_t>(n));
        if (n == 2) {
            for (int k = 0; k < n_samples; ++k) {
                const double th = 2.0 * std::acos(-1.0) * k / n_samples;
                y[0] = std::cos(th);
                y[1] = std::sin(th);
                (void)positive_p(y);
            }
            return;
        }
        std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int k = 0; k < n_samples; ++k) {
            double norm2 = 0.0;
            for (double& yi : y) {
                yi = gauss(rng);
                norm2 += yi * yi;
            }
            if (norm2 == 0.0) continue;
            for (double& yi : y) yi /= std::sqrt(norm2);
            (void)positive_p(y);
        }
    }

    bool operator==(const MthRootMetric& o) const {
        return m_ == o.m_ && p_ == o.p_;
    }

private:
    double positive_p(std::span<const double> y) const {
        const double p = p_(y);
        if (!(p > 0.0))
            throw NonPositiveArgument("m-th-root polynomial is not positive in this direction");
        return p;
    }

    int m_;
    Polynomial p_;
};

template <class Fn>
concept NormEvaluator =
    requires(const Fn& f, std::span<const double> yd, std::span<const HyperDual> yh) {
        { f(yd) } -> std::convertible_to<double>;
        { f(yh) } -> std::convertible_to<HyperDual>;
    };

/// A Minkowski norm: an immutable, positively 1-homogeneous, positive
/// evaluator on R^n \ {0} plus a metadata record. F(0) is defined as 0 by
/// continuity; all differential operations require y != 0.
///
/// Instances are immutable after construction and evaluation is pure, so a
/// norm may be shared freely across threads.
class MinkowskiNorm {
public:
    static MinkowskiNorm mth_root(MthRootMetric metric, std::string description) {
        MinkowskiNorm n;
        n.dim_ = metric.dimension();
        n.tag_ = metric.root_degree() == 2 ? FamilyTag::riemannian
                                           : FamilyTag::mth_root_polynomial;
        n.desc_ = std::move(description);
        n.table_ = std::make_shared<const MthRootMetric>(std::move(metric));
        return n;
    }

    /// Wraps an arbitrary evaluator that is generic over the scalar type.
    /// The second-order path squares the evaluator's output, so the wrapped
    /// callable must compute F itself, not F^2.
    template <NormEvaluator Fn>
    static MinkowskiNorm custom(int dimension, std::string description, Fn f) {
        MinkowskiNorm n;
        n.dim_ = dimension;
        n.tag_ = FamilyTag::custom;
        n.desc_ = std::move(description);
        n.custom_value_ = [f](std::span<const double> y) -> double { return f(y); };
        n.custom_squared_ = [f](std::span<const HyperDual> y) -> HyperDual {
            HyperDual v = f(y);
            return v * v;
        };
        return n;
    }

    int dimension() const { return dim_; }
    FamilyTag family() const { return tag_; }
    const std::string& description() const { return desc_; }

    /// The backing coefficient table, or nullptr for custom evaluators.
    const MthRootMetric* mth_root_form() const { return table_.get(); }

    /// F(y); returns 0 at y = 0 by continuity.
    double operator()(std::span<const double> y) const {
        require_dimension(y.size());
        if (is_zero_vector(y)) return 0.0;
        return table_ ? table_->value(y) : custom_value_(y);
    }

    /// F^2 with second-order Taylor propagation. y != 0 required.
    HyperDual squared(std::span<const HyperDual> y) const {
        return table_ ? table_->squared(y) : custom_squared_(y);
    }

    double squared(std::span<const double> y) const {
        require_dimension(y.size());
        if (table_) return table_->squared(y);
        const double v = custom_value_(y);
        return v * v;
    }

private:
    MinkowskiNorm() = default;

    void require_dimension(std::size_t n) const {
        if (static_cast<int>(n) != dim_)
            throw std::invalid_argument("vector length does not match norm dimension");
    }

    int dim_ = 0;
    FamilyTag tag_ = FamilyTag::custom;
    std::string desc_;
    std::shared_ptr<const MthRootMetric> table_;
    std::function<double(std::span<const double>)> custom_value_;
    std::function<HyperDual(std::span<const HyperDual>)> custom_squared_;
};

/// Norm value at y (0 at the origin by continuity).
inline double eval_norm(const MinkowskiNorm& f, std::span<const double> y) { return f(y); }

/// F_c(y) = (y1^4 + c y1^2 y2^2 + y2^4)^(1/4). c = 2 degenerates to the
/// Euclidean norm; construction never fails, positivity failures surface at
/// evaluation time.
inline MinkowskiNorm make_quartic_family(double c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "quartic family c=%g", c);
    Polynomial p(2, {{{4, 0}, 1.0}, {{2, 2}, c}, {{0, 4}, 1.0}});
    return MinkowskiNorm::mth_root(MthRootMetric(4, std::move(p)), buf);
}

/// sqrt(sum y_i^2) as an m = 2 root metric.
inline MinkowskiNorm euclidean_norm(int dimension) {
    std::vector<Polynomial::Term> terms;
    for (int i = 0; i < dimension; ++i) {
        std::vector<int> powers(static_cast<std::size_t>(dimension), 0);
        powers[static_cast<std::size_t>(i)] = 2;
        terms.push_back({std::move(powers), 1.0});
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "euclidean norm dim=%d", dimension);
    return MinkowskiNorm::mth_root(MthRootMetric(2, Polynomial(dimension, std::move(terms))), buf);
}

/// True when the norm is backed by exactly the quartic-family table with
/// parameter c. Used to switch on closed-form cross-checks.
inline bool matches_quartic(const MinkowskiNorm& f, double c) {
    const MthRootMetric* m = f.mth_root_form();
    if (!m || m->dimension() != 2 || m->root_degree() != 4) return false;
    const Polynomial expected(2, {{{4, 0}, 1.0}, {{2, 2}, c}, {{0, 4}, 1.0}});
    return m->polynomial() == expected;
}

/// r(theta) = 1/F(cos theta, sin theta): the ray scaling that lands on the
/// unit level set {F = 1}.
inline double indicatrix_radius(const MinkowskiNorm& f, double theta) {
    if (f.dimension() != 2)
        throw std::invalid_argument("indicatrix_radius requires a 2D norm");
    const std::array<double, 2> y{std::cos(theta), std::sin(theta)};
    return 1.0 / f(y);
}

// --- metric definition files ----------------------------------------------
//
// {
//   "dimension": 2,
//   "m": 4,
//   "coeffs": [ { "powers": [4,0], "value": 1.0 }, ... ]
// }
//
// Exponent rows are emitted in lexicographic order; duplicates are an error.

inline MinkowskiNorm load_metric(const nlohmann::json& j, std::string description = {}) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("m") || !j.contains("coeffs"))
        throw InvalidMetric("metric definition needs 'dimension', 'm' and 'coeffs'");
    if (!j["dimension"].is_number_integer() || !j["m"].is_number_integer() ||
        !j["coeffs"].is_array())
        throw InvalidMetric("malformed metric definition");
    const int dim = j["dimension"].get<int>();
    const int m = j["m"].get<int>();
    std::vector<Polynomial::Term> terms;
    for (const auto& e : j["coeffs"]) {
        if (!e.is_object() || !e.contains("powers") || !e.contains("value") ||
            !e["powers"].is_array() || !e["value"].is_number())
            throw InvalidMetric("each coefficient needs 'powers' and 'value'");
        Polynomial::Term t;
        for (const auto& p : e["powers"]) {
            if (!p.is_number_integer()) throw InvalidMetric("exponents must be integers");
            t.powers.push_back(p.get<int>());
        }
        t.coeff = e["value"].get<double>();
        terms.push_back(std::move(t));
    }
    MthRootMetric metric(m, Polynomial(dim, std::move(terms)));
    // Files are validated for positivity up front so a bad table fails at
    // load, not deep inside a scan.
    metric.check_positivity();
    if (description.empty()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "m-th-root metric (m=%d, dim=%d)", m, dim);
        description = buf;
    }
    return MinkowskiNorm::mth_root(std::move(metric), std::move(description));
}

/// The definition object for polynomial-backed norms; empty for custom ones.
inline std::optional<nlohmann::ordered_json> metric_definition(const MinkowskiNorm& f) {
    const MthRootMetric* m = f.mth_root_form();
    if (!m) return std::nullopt;
    nlohmann::ordered_json j;
    j["dimension"] = m->dimension();
    j["m"] = m->root_degree();
    j["coeffs"] = nlohmann::ordered_json::array();
    for (const Polynomial::Term& t : m->polynomial().terms()) {
        nlohmann::ordered_json e;
        e["powers"] = t.powers;
        e["value"] = t.coeff;
        j["coeffs"].push_back(std::move(e));
    }
    return j;
}

} // namespace finsler
