#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <finsler/energy.hpp>
#include <finsler/norms.hpp>
#include <finsler/tensor.hpp>

namespace finsler {

/// Refutation margin threshold. True refutations sit orders of magnitude
/// above this; anything below is indistinguishable from grid noise.
inline constexpr double kRefutationTolerance = 1e-8;

enum class Verdict { holds_numerically, refuted };

inline const char* to_string(Verdict v) {
    return v == Verdict::refuted ? "refuted" : "holds_numerically";
}

/// Everything a third party needs to re-verify a refutation from scratch:
/// the metric definition, the vector X, and a witness on the unit level set
/// whose relative energy undercuts the self energy by the stated margin.
struct CounterexampleCertificate {
    std::optional<nlohmann::ordered_json> metric;
    std::string metric_id;
    Vector x;
    Vector witness_y;
    double witness_energy = 0.0;
    double self_energy = 0.0;
    double margin = 0.0;
};

struct ConjectureReport {
    std::string metric_id;
    Vector x;
    double self_energy = 0.0;
    double global_min = 0.0;
    double global_min_theta = 0.0;
    Vector global_min_y;
    Verdict verdict = Verdict::holds_numerically;
    double margin = 0.0;
    bool convexity_pass = false;
    /// Constant profile: the minimum over the unit level set is attained
    /// everywhere, so no critical enumeration was possible.
    bool degenerate_profile = false;
    std::vector<CriticalPoint> critical_points;
    std::optional<CounterexampleCertificate> certificate;
};

/// Tests whether E_X attains its global minimum at X/F(X), i.e. whether
/// F(X) <= |X|_y over the whole unit level set. The minimum estimate is the
/// least of the refined critical values and the raw profile grid, which
/// guards against a missed bracket. The verdict is named holds_numerically
/// on purpose: a sampled check is evidence, not a proof.
inline ConjectureReport test_conjecture(const MinkowskiNorm& f, std::span<const double> x,
                                        int n_angles = 4096,
                                        double margin_tolerance = kRefutationTolerance) {
    if (f.dimension() != 2)
        throw std::invalid_argument("test_conjecture requires a 2D norm");
    if (is_zero_vector(x))
        throw std::invalid_argument("test_conjecture needs X != 0");
    if (n_angles < 256)
        throw std::invalid_argument("test_conjecture needs at least 256 angles");

    ConjectureReport report;
    report.metric_id = f.description();
    report.x.assign(x.begin(), x.end());
    const double fx = f(x);
    report.self_energy = 0.5 * fx * fx;

    report.convexity_pass = check_strong_convexity(f, n_angles).pass;

    const EnergyProfile profile = energy_profile(f, x, n_angles);
    try {
        report.critical_points = find_critical_points(f, x, n_angles);
    } catch (const ResolutionFailure&) {
        report.degenerate_profile = true;
    }

    report.global_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < profile.values.size(); ++k) {
        if (profile.values[k] < report.global_min) {
            report.global_min = profile.values[k];
            report.global_min_theta = profile.angles[k];
        }
    }
    for (const CriticalPoint& cp : report.critical_points) {
        if (cp.energy < report.global_min) {
            report.global_min = cp.energy;
            report.global_min_theta = cp.theta;
        }
    }
    const double radius = indicatrix_radius(f, report.global_min_theta);
    report.global_min_y = {radius * std::cos(report.global_min_theta),
                           radius * std::sin(report.global_min_theta)};

    report.margin = report.self_energy - report.global_min;
    report.verdict = report.margin > margin_tolerance * std::max(1.0, report.self_energy)
                         ? Verdict::refuted
                         : Verdict::holds_numerically;

    if (report.verdict == Verdict::refuted) {
        CounterexampleCertificate cert;
        cert.metric = metric_definition(f);
        cert.metric_id = report.metric_id;
        cert.x = report.x;
        cert.witness_y = report.global_min_y;
        cert.witness_energy = report.global_min;
        cert.self_energy = report.self_energy;
        cert.margin = report.margin;
        report.certificate = std::move(cert);
    }
    return report;
}

/// Re-verifies a certificate from scratch: the metric is rebuilt from the
/// embedded definition, the witness is checked to lie on the unit level set,
/// and both energies are recomputed along a fresh evaluation path.
inline bool verify_certificate(const CounterexampleCertificate& cert,
                               double tolerance = 1e-10) {
    if (!cert.metric) return false;
    const MinkowskiNorm f = load_metric(*cert.metric);
    if (std::abs(f(cert.witness_y) - 1.0) > tolerance) return false;
    const double fx = f(cert.x);
    const double self_energy = 0.5 * fx * fx;
    const double witness_energy = relative_energy(f, cert.x, cert.witness_y);
    if (!(witness_energy < self_energy)) return false;
    const double scale = std::max(1.0, std::abs(self_energy));
    if (std::abs(self_energy - cert.self_energy) > tolerance * scale) return false;
    if (std::abs(witness_energy - cert.witness_energy) > tolerance * scale) return false;
    return std::abs((self_energy - witness_energy) - cert.margin) <= tolerance * scale;
}

/// Runs the tester for X on n_dirs uniformly spaced unit-circle directions.
inline std::vector<ConjectureReport> sweep_vectors(const MinkowskiNorm& f, int n_dirs,
                                                   int n_angles = 4096) {
    if (n_dirs < 4) throw std::invalid_argument("sweep_vectors needs at least 4 directions");
    std::vector<ConjectureReport> reports;
    reports.reserve(static_cast<std::size_t>(n_dirs));
    for (int j = 0; j < n_dirs; ++j) {
        const double phi = kTwoPi * j / n_dirs;
        const std::array<double, 2> x{std::cos(phi), std::sin(phi)};
        reports.push_back(test_conjecture(f, x, n_angles));
    }
    return reports;
}

inline int count_refuted(const std::vector<ConjectureReport>& reports) {
    int n = 0;
    for (const ConjectureReport& r : reports)
        if (r.verdict == Verdict::refuted) ++n;
    return n;
}

struct FamilySweepEntry {
    double c = 0.0;
    bool convexity_pass = false;
    int n_refuted = 0;
    double refutation_fraction = 0.0;
};

struct FamilySweepSummary {
    int n_dirs = 0;
    std::vector<FamilySweepEntry> entries;
};

/// Maps where refutations live in the one-parameter quartic family.
/// Convexity failures are recorded per entry, never raised.
inline FamilySweepSummary sweep_family(std::span<const double> c_values, int n_dirs,
                                       int n_angles = 4096) {
    if (c_values.empty()) throw std::invalid_argument("sweep_family needs at least one c value");
    FamilySweepSummary summary;
    summary.n_dirs = n_dirs;
    for (double c : c_values) {
        const MinkowskiNorm f = make_quartic_family(c);
        FamilySweepEntry entry;
        entry.c = c;
        entry.convexity_pass = check_strong_convexity(f, n_angles).pass;
        const std::vector<ConjectureReport> reports = sweep_vectors(f, n_dirs, n_angles);
        entry.n_refuted = count_refuted(reports);
        entry.refutation_fraction = static_cast<double>(entry.n_refuted) / n_dirs;
        summary.entries.push_back(entry);
    }
    return summary;
}

inline nlohmann::ordered_json to_json(const CounterexampleCertificate& cert) {
    nlohmann::ordered_json j;
    j["metric"] = cert.metric ? *cert.metric : nlohmann::ordered_json(nullptr);
    j["metric_id"] = cert.metric_id;
    j["x"] = cert.x;
    j["witness_y"] = cert.witness_y;
    j["witness_energy"] = cert.witness_energy;
    j["self_energy"] = cert.self_energy;
    j["margin"] = cert.margin;
    return j;
}

inline CounterexampleCertificate certificate_from_json(const nlohmann::json& j) {
    CounterexampleCertificate cert;
    if (j.contains("metric") && !j["metric"].is_null())
        cert.metric = nlohmann::ordered_json(j["metric"]);
    cert.metric_id = j.value("metric_id", std::string{});
    cert.x = j.at("x").get<Vector>();
    cert.witness_y = j.at("witness_y").get<Vector>();
    cert.witness_energy = j.at("witness_energy").get<double>();
    cert.self_energy = j.at("self_energy").get<double>();
    cert.margin = j.at("margin").get<double>();
    return cert;
}

inline nlohmann::ordered_json to_json(const ConjectureReport& r) {
    nlohmann::ordered_json j;
    j["metric_id"] = r.metric_id;
    j["x"] = r.x;
    j["self_energy"] = r.self_energy;
    j["global_min"] = r.global_min;
    j["global_min_location"] = {{"theta", r.global_min_theta}, {"y", r.global_min_y}};
    j["verdict"] = to_string(r.verdict);
    j["margin"] = r.margin;
    j["convexity_pass"] = r.convexity_pass;
    j["degenerate_profile"] = r.degenerate_profile;
    j["critical_points"] = to_json(r.critical_points);
    if (r.certificate) j["certificate"] = to_json(*r.certificate);
    return j;
}

inline nlohmann::ordered_json to_json(const FamilySweepSummary& s) {
    nlohmann::ordered_json j;
    j["n_dirs"] = s.n_dirs;
    j["entries"] = nlohmann::ordered_json::array();
    for (const FamilySweepEntry& e : s.entries) {
        nlohmann::ordered_json entry;
        entry["c"] = e.c;
        entry["convexity_pass"] = e.convexity_pass;
        entry["n_refuted"] = e.n_refuted;
        entry["refutation_fraction"] = e.refutation_fraction;
        j["entries"].push_back(std::move(entry));
    }
    return j;
}

} // namespace finsler
