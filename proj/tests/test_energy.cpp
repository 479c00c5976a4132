#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <finsler/energy.hpp>

#include "helpers.hpp"

using namespace finsler;
using testutil::closed_form_energy3;
using testutil::rel_err;
using testutil::v2;
using testutil::wrap_distance;

namespace {

const double kPi = std::acos(-1.0);
const double kSqrt5 = std::sqrt(5.0);

// test-local derivative of E along the circle, independent of the library's
// refinement machinery
double energy_slope(const MinkowskiNorm& f, std::span<const double> x, double theta) {
    const double h = 1e-5;
    const auto e = [&](double t) {
        const std::array<double, 2> y{std::cos(t), std::sin(t)};
        return relative_energy(f, x, y);
    };
    return (8.0 * (e(theta + h) - e(theta - h)) - (e(theta + 2 * h) - e(theta - 2 * h))) /
           (12.0 * h);
}

} // namespace

TEST_CASE("relative length identities", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);

    // X on the unit level set measured against itself
    CHECK(rel_err(relative_length(f, v2(1, 0), v2(1, 0)), 1.0) < 1e-12);

    // |X|_{X/F(X)} = F(X), with the unnormalized X usable directly
    CHECK(rel_err(relative_length(f, v2(1, 3), v2(1, 3)), std::pow(109.0, 0.25)) < 1e-12);

    CHECK(rel_err(relative_length(make_quartic_family(2.0), v2(3, 4), v2(0.2, 0.9)), 5.0) < 1e-12);
}

TEST_CASE("relative energy reference values", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);
    CHECK(rel_err(relative_energy(f, v2(1, 0), v2(1, 0)), 0.5) < 1e-12);
    CHECK(rel_err(relative_energy(f, v2(1, 0), v2(0, 1)), 0.75) < 1e-12);
    CHECK(rel_err(relative_energy(f, v2(1, 3), v2(1, 1)), 23.0 / (2.0 * kSqrt5)) < 1e-12);
}

TEST_CASE("relative energy agrees with the closed-form expression", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);
    std::mt19937_64 rng(404);
    for (int i = 0; i < 200; ++i) {
        const auto x = testutil::random_nonzero(rng);
        const auto y = testutil::random_nonzero(rng);
        CHECK(rel_err(relative_energy(f, x, y), closed_form_energy3(x, y)) < 1e-11);
    }
}

TEST_CASE("energy profiles", "[energy]") {
    SECTION("euclidean profiles are constant at half the squared length") {
        const EnergyProfile p = energy_profile(make_quartic_family(2.0), v2(1, 1), 256);
        for (double v : p.values) CHECK(rel_err(v, 1.0) < 1e-12);
    }
    SECTION("quartic profile for X=(1,0) dips to 1/sqrt(5) on the diagonal") {
        const EnergyProfile p = energy_profile(make_quartic_family(3.0), v2(1, 0), 1024);
        const double min_v = *std::min_element(p.values.begin(), p.values.end());
        CHECK(rel_err(min_v, 1.0 / kSqrt5) < 1e-12); // pi/4 is a grid node
        const std::size_t arg =
            static_cast<std::size_t>(std::min_element(p.values.begin(), p.values.end()) -
                                     p.values.begin());
        double to_diagonal = 10.0;
        for (int q = 0; q < 4; ++q)
            to_diagonal = std::min(to_diagonal,
                                   wrap_distance(p.angles[arg], kPi / 4.0 + q * kPi / 2.0));
        CHECK(to_diagonal < 2.0 * kPi / 1024 + 1e-12);
    }
    SECTION("profile symmetry for an axis-aligned X") {
        const EnergyProfile p = energy_profile(make_quartic_family(3.0), v2(1, 0), 1024);
        for (std::size_t k = 1; k < p.values.size(); ++k) {
            const std::size_t mirror = p.values.size() - k; // theta -> 2pi - theta
            CHECK(std::abs(p.values[k] - p.values[mirror]) < 1e-12);
            const std::size_t half = (p.values.size() / 2 + mirror) % p.values.size();
            CHECK(std::abs(p.values[k] - p.values[half]) < 1e-12); // theta -> pi - theta
        }
    }
    SECTION("profile is periodic and strictly positive") {
        const MinkowskiNorm f = make_quartic_family(3.0);
        const EnergyProfile p = energy_profile(f, v2(1, 3), 512);
        for (double v : p.values) CHECK(v > 0.0);
        const std::array<double, 2> wrap{std::cos(2.0 * kPi), std::sin(2.0 * kPi)};
        CHECK(std::abs(p.values.front() - relative_energy(f, v2(1, 3), wrap)) < 1e-12);
    }
    SECTION("preconditions") {
        const MinkowskiNorm f = make_quartic_family(3.0);
        CHECK_THROWS_AS(energy_profile(f, v2(0, 0), 512), std::invalid_argument);
        CHECK_THROWS_AS(energy_profile(f, v2(1, 0), 128), std::invalid_argument);
        CHECK_THROWS_AS(energy_profile(euclidean_norm(3), v2(1, 0), 512), std::invalid_argument);
    }
}

TEST_CASE("profile CSV format", "[energy]") {
    const EnergyProfile p = energy_profile(make_quartic_family(3.0), v2(1, 0), 256);
    std::ostringstream ss;
    write_csv(p, ss);
    std::istringstream in(ss.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta,energy");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 256);
}

TEST_CASE("critical points for X=(1,0): the eight universal loci", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);
    const std::vector<CriticalPoint> points = find_critical_points(f, v2(1, 0), 4096);
    REQUIRE(points.size() == 8);

    const struct {
        double theta;
        double energy;
        CriticalKind kind;
    } expected[] = {
        {0.0, 0.5, CriticalKind::local_max},
        {kPi / 4.0, 1.0 / kSqrt5, CriticalKind::local_min},
        {kPi / 2.0, 0.75, CriticalKind::local_max},
        {3.0 * kPi / 4.0, 1.0 / kSqrt5, CriticalKind::local_min},
        {kPi, 0.5, CriticalKind::local_max},
        {5.0 * kPi / 4.0, 1.0 / kSqrt5, CriticalKind::local_min},
        {3.0 * kPi / 2.0, 0.75, CriticalKind::local_max},
        {7.0 * kPi / 4.0, 1.0 / kSqrt5, CriticalKind::local_min},
    };
    for (const auto& e : expected) {
        const auto it = std::find_if(points.begin(), points.end(), [&](const CriticalPoint& cp) {
            return wrap_distance(cp.theta, e.theta) < 1e-6;
        });
        REQUIRE(it != points.end());
        CHECK(rel_err(it->energy, e.energy) < 1e-9);
        CHECK(it->kind == e.kind);
        CHECK(it->derivative_residual <= 1e-8);
        CHECK(std::abs(make_quartic_family(3.0)(it->y) - 1.0) < 1e-12);
    }
}

TEST_CASE("critical points for X=(1,3): inflections at multiples of X", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);
    const std::array<double, 2> x{1.0, 3.0};
    const std::vector<CriticalPoint> points = find_critical_points(f, x, 4096);
    REQUIRE(points.size() == 10);

    const double atan3 = std::atan(3.0);
    const struct {
        double theta;
        double energy;
        CriticalKind kind;
    } expected[] = {
        {0.0, 29.0 / 4.0, CriticalKind::local_max},
        {kPi / 4.0, 23.0 / (2.0 * kSqrt5), CriticalKind::local_min},
        {atan3, std::sqrt(109.0) / 2.0, CriticalKind::inflection},
        {kPi / 2.0, 21.0 / 4.0, CriticalKind::local_max},
        {3.0 * kPi / 4.0, 17.0 / (2.0 * kSqrt5), CriticalKind::local_min},
        {kPi, 29.0 / 4.0, CriticalKind::local_max},
        {5.0 * kPi / 4.0, 23.0 / (2.0 * kSqrt5), CriticalKind::local_min},
        {atan3 + kPi, std::sqrt(109.0) / 2.0, CriticalKind::inflection},
        {3.0 * kPi / 2.0, 21.0 / 4.0, CriticalKind::local_max},
        {7.0 * kPi / 4.0, 17.0 / (2.0 * kSqrt5), CriticalKind::local_min},
    };
    for (const auto& e : expected) {
        const auto it = std::find_if(points.begin(), points.end(), [&](const CriticalPoint& cp) {
            return wrap_distance(cp.theta, e.theta) < 1e-6;
        });
        REQUIRE(it != points.end());
        CHECK(rel_err(it->energy, e.energy) < 1e-9);
        CHECK(it->kind == e.kind);
        CHECK(it->derivative_residual <= 1e-8);
        REQUIRE(it->lagrange_residual.has_value());
        CHECK(*it->lagrange_residual <= 1e-8);
    }
}

TEST_CASE("constant profiles are a reported degenerate case", "[energy]") {
    CHECK_THROWS_AS(find_critical_points(make_quartic_family(2.0), v2(0.3, 0.8), 1024),
                    ResolutionFailure);
}

TEST_CASE("every critical point satisfies the factored condition", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);
    for (const auto& x : {v2(1, 0), v2(1, 3)}) {
        for (const CriticalPoint& cp : find_critical_points(f, x, 4096)) {
            const double len = euclidean_length(cp.y);
            const std::array<double, 2> unit{cp.y[0] / len, cp.y[1] / len};
            CHECK(std::abs(crit_condition_residual(x, unit)) <= 1e-8);
        }
    }
}

TEST_CASE("factored condition reference values", "[energy]") {
    CHECK(crit_condition_residual(v2(1, 3), v2(1, 3)) == 0.0);
    CHECK(crit_condition_residual(v2(2, 7), v2(1, 1)) == 0.0);
    // product of the factors: 1*2 * (-1) * 3 * 5 * 2^2
    CHECK(crit_condition_residual(v2(1, 0), v2(1, 2)) == -120.0);
}

TEST_CASE("lagrange residual vanishes exactly on critical loci", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);
    CHECK(lagrange_residual(f, v2(1, 0), v2(1, 1)) <= 1e-9);
    CHECK(lagrange_residual(f, v2(1, 3), v2(1, 3)) <= 1e-9);
    CHECK(lagrange_residual(f, v2(1, 0), v2(1, 2)) > 1.0);
}

TEST_CASE("lagrange cross equals 60x the factored condition", "[energy]") {
    // the generic polynomial route and the hard-coded factorization are
    // proportional on the reference quartic; the constant is 60
    const MinkowskiNorm f = make_quartic_family(3.0);
    std::mt19937_64 rng(606);
    for (int i = 0; i < 100; ++i) {
        const auto x = testutil::random_nonzero(rng, 0.2, 3.0);
        const auto y = testutil::random_direction(rng);
        const double generic = lagrange_cross(f, x, y);
        const double factored = 60.0 * crit_condition_residual(x, y);
        CHECK(std::abs(generic - factored) <= 1e-9 * std::max(1.0, std::abs(factored)));
    }
}

TEST_CASE("lagrange residual requires a table-backed 2D metric", "[energy]") {
    const auto euclid = [](auto y) { return sqrt(y[0] * y[0] + y[1] * y[1]); };
    const MinkowskiNorm f = MinkowskiNorm::custom(2, "custom", euclid);
    CHECK_THROWS_AS(lagrange_residual(f, v2(1, 0), v2(1, 1)), std::invalid_argument);
}

TEST_CASE("a scaled copy of X is always critical", "[energy]") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> c_dist(0.5, 5.5);
    for (int i = 0; i < 25; ++i) {
        const MinkowskiNorm f = make_quartic_family(c_dist(rng));
        const auto x = testutil::random_nonzero(rng, 0.3, 4.0);
        const double theta = std::atan2(x[1], x[0]);
        CHECK(std::abs(energy_slope(f, x, theta)) <= 1e-8);
    }
}

TEST_CASE("energy homogeneity properties", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> lambda(0.1, 8.0);
    for (int i = 0; i < 200; ++i) {
        const auto x = testutil::random_nonzero(rng);
        const auto y = testutil::random_nonzero(rng);
        const double l = lambda(rng);

        const std::array<double, 2> lx{l * x[0], l * x[1]};
        CHECK(rel_err(relative_energy(f, lx, y), l * l * relative_energy(f, x, y)) < 1e-12);

        const std::array<double, 2> ly{l * y[0], l * y[1]};
        CHECK(rel_err(relative_energy(f, x, ly), relative_energy(f, x, y)) < 1e-10);

        // self value: E_X at the ray of X is F^2(X)/2
        const double fx = f(x);
        CHECK(rel_err(relative_energy(f, x, x), 0.5 * fx * fx) < 1e-10);
    }
}

TEST_CASE("critical point JSON shape", "[energy]") {
    const MinkowskiNorm f = make_quartic_family(3.0);
    const auto points = find_critical_points(f, v2(1, 0), 4096);
    const nlohmann::ordered_json arr = to_json(points);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == points.size());
    for (const auto& j : arr) {
        CHECK(j.contains("theta"));
        CHECK(j.contains("y"));
        CHECK(j.contains("energy"));
        CHECK(j.contains("kind"));
        CHECK(j.contains("derivative_residual"));
        CHECK(j.contains("lagrange_residual"));
        CHECK_FALSE(j["lagrange_residual"].is_null()); // table-backed metric
    }

    const auto blend = [](auto y) {
        // non-Riemannian: proportional to the c = 1 quartic
        auto a = y[0] * y[0], b = y[1] * y[1];
        auto s = a + b;
        return pow(a * a + b * b + s * s, 0.25);
    };
    const MinkowskiNorm custom = MinkowskiNorm::custom(2, "custom quartic blend", blend);
    const auto cpoints = find_critical_points(custom, v2(1, 0), 4096);
    REQUIRE(!cpoints.empty());
    CHECK_FALSE(cpoints.front().lagrange_residual.has_value());
    CHECK(to_json(cpoints.front())["lagrange_residual"].is_null());
}
