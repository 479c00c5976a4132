#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <unistd.h>

#include <finsler/linalg.hpp>

namespace testutil {

inline std::array<double, 2> v2(double a, double b) { return {a, b}; }

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

inline double wrap_distance(double a, double b) {
    const double two_pi = 6.283185307179586476925286766559;
    double d = std::abs(a - b);
    d = std::fmod(d, two_pi);
    return std::min(d, two_pi - d);
}

// Closed forms for the c = 3 quartic, transcribed from the displayed tensor
// and energy expressions. These are the independent oracle route: they never
// touch the jet engine.
inline finsler::SymMat closed_form_g3(std::span<const double> y) {
    const double y1 = y[0], y2 = y[1];
    const double p = y1 * y1 * y1 * y1 + 3.0 * y1 * y1 * y2 * y2 + y2 * y2 * y2 * y2;
    const double denom = 2.0 * std::pow(p, 1.5);
    const double y1_2 = y1 * y1, y2_2 = y2 * y2;
    const double y1_4 = y1_2 * y1_2, y2_4 = y2_2 * y2_2;
    const double y1_6 = y1_4 * y1_2, y2_6 = y2_4 * y2_2;
    finsler::SymMat g(2);
    g.set(0, 0, (2.0 * y1_6 + 9.0 * y1_4 * y2_2 + 6.0 * y1_2 * y2_4 + 3.0 * y2_6) / denom);
    g.set(0, 1, 5.0 * y1_2 * y1 * y2_2 * y2 / denom);
    g.set(1, 1, (3.0 * y1_6 + 6.0 * y1_4 * y2_2 + 9.0 * y1_2 * y2_4 + 2.0 * y2_6) / denom);
    return g;
}

inline double closed_form_energy3(std::span<const double> x, std::span<const double> y) {
    const double x1 = x[0], x2 = x[1];
    const double y1 = y[0], y2 = y[1];
    const double y1_2 = y1 * y1, y2_2 = y2 * y2;
    const double y1_4 = y1_2 * y1_2, y2_4 = y2_2 * y2_2;
    const double y1_6 = y1_4 * y1_2, y2_6 = y2_4 * y2_2;
    const double p = y1_4 + 3.0 * y1_2 * y2_2 + y2_4;
    const double num = (2.0 * x1 * x1 + 3.0 * x2 * x2) * y1_6 +
                       (9.0 * x1 * x1 + 6.0 * x2 * x2) * y1_4 * y2_2 +
                       10.0 * x1 * x2 * y1_2 * y1 * y2_2 * y2 +
                       (6.0 * x1 * x1 + 9.0 * x2 * x2) * y1_2 * y2_4 +
                       (3.0 * x1 * x1 + 2.0 * x2 * x2) * y2_6;
    return num / (4.0 * std::pow(p, 1.5));
}

/// Scratch directory that cleans up after itself.
class TempDir {
public:
    explicit TempDir(const std::string& stem) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                (stem + "_" + std::to_string(++counter) + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::array<double, 2> random_direction(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    const double t = angle(rng);
    return {std::cos(t), std::sin(t)};
}

inline std::array<double, 2> random_nonzero(std::mt19937_64& rng, double lo = 0.1,
                                            double hi = 10.0) {
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    std::uniform_real_distribution<double> radius(lo, hi);
    const double t = angle(rng);
    const double r = radius(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

} // namespace testutil
