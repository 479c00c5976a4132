#pragma once

#include <cmath>

namespace finsler {

/// Truncated second-order Taylor number with two nilpotent units:
///
///   x = re + e1*u1 + e2*u2 + e12*u1*u2,   u1^2 = u2^2 = 0.
///
/// Seeding u1 along coordinate i and u2 along coordinate j and pushing the
/// number through a computation leaves d2f/dyi dyj in e12, exact to machine
/// precision (no truncation error, unlike finite differences).
struct HyperDual {
    double re = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double e12 = 0.0;

    constexpr HyperDual() = default;
    constexpr HyperDual(double value) : re(value) {} // NOLINT: implicit by design
    constexpr HyperDual(double value, double d1, double d2, double d12)
        : re(value), e1(d1), e2(d2), e12(d12) {}

    constexpr HyperDual operator-() const { return {-re, -e1, -e2, -e12}; }

    constexpr HyperDual& operator+=(const HyperDual& o) {
        re += o.re; e1 += o.e1; e2 += o.e2; e12 += o.e12;
        return *this;
    }
    constexpr HyperDual& operator-=(const HyperDual& o) {
        re -= o.re; e1 -= o.e1; e2 -= o.e2; e12 -= o.e12;
        return *this;
    }
    constexpr HyperDual& operator*=(const HyperDual& o) {
        const double r = re * o.re;
        const double d1 = re * o.e1 + e1 * o.re;
        const double d2 = re * o.e2 + e2 * o.re;
        const double d12 = re * o.e12 + e12 * o.re + e1 * o.e2 + e2 * o.e1;
        re = r; e1 = d1; e2 = d2; e12 = d12;
        return *this;
    }
    constexpr HyperDual& operator/=(const HyperDual& o) { return *this *= reciprocal(o); }

    /// Chain rule for a scalar function applied to this number:
    /// carries f, f' and f'' evaluated at re.
    constexpr HyperDual lift(double f, double fp, double fpp) const {
        return {f, fp * e1, fp * e2, fp * e12 + fpp * e1 * e2};
    }

    static constexpr HyperDual reciprocal(const HyperDual& x) {
        const double inv = 1.0 / x.re;
        return x.lift(inv, -inv * inv, 2.0 * inv * inv * inv);
    }
};

constexpr HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
constexpr HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
constexpr HyperDual operator*(HyperDual a, const HyperDual& b) { return a *= b; }
constexpr HyperDual operator/(HyperDual a, const HyperDual& b) { return a /= b; }

/// x^p for real p; the base must be positive (callers guard the domain).
inline HyperDual pow(const HyperDual& x, double p) {
    const double f = std::pow(x.re, p);
    const double fp = p * std::pow(x.re, p - 1.0);
    const double fpp = p * (p - 1.0) * std::pow(x.re, p - 2.0);
    return x.lift(f, fp, fpp);
}

inline HyperDual sqrt(const HyperDual& x) {
    const double r = std::sqrt(x.re);
    return x.lift(r, 0.5 / r, -0.25 / (r * x.re));
}

} // namespace finsler
