#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <finsler/conjecture.hpp>
#include <finsler/energy.hpp>
#include <finsler/norms.hpp>
#include <finsler/tensor.hpp>

namespace finsler::cli {

// Exit codes: 0 success / conjecture holds, 1 golden mismatch or internal
// error, 2 invalid input, 3 conjecture refuted.
inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitRefuted = 3;

namespace detail {

inline std::string fmt(double v, int significant = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, v);
    return buf;
}

struct MetricChoice {
    bool builtin = false;
    std::optional<double> family_c;
    std::string json_path;
};

inline MinkowskiNorm resolve_metric(const MetricChoice& choice) {
    const int sources = static_cast<int>(choice.builtin) +
                        static_cast<int>(choice.family_c.has_value()) +
                        static_cast<int>(!choice.json_path.empty());
    if (sources != 1)
        throw std::invalid_argument(
            "exactly one metric source required: --paper-metric, --family-c or --metric");
    if (choice.builtin) return make_quartic_family(3.0);
    if (choice.family_c) return make_quartic_family(*choice.family_c);
    std::ifstream in(choice.json_path);
    if (!in) throw std::invalid_argument("cannot open metric file: " + choice.json_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidMetric(std::string("metric file is not valid JSON: ") + e.what());
    }
    return load_metric(j);
}

inline void add_metric_options(CLI::App* cmd, MetricChoice& choice) {
    cmd->add_flag("--paper-metric", choice.builtin,
                  "built-in quartic metric (y1^4 + 3 y1^2 y2^2 + y2^4)^(1/4)");
    cmd->add_option("--family-c", choice.family_c,
                    "quartic family parameter c in (y1^4 + c y1^2 y2^2 + y2^4)^(1/4)");
    cmd->add_option("--metric", choice.json_path, "path to a metric definition JSON file");
}

inline std::array<double, 2> require_vec2(const std::vector<double>& v, const char* what) {
    if (v.size() != 2)
        throw std::invalid_argument(std::string(what) + " needs exactly two components");
    return {v[0], v[1]};
}

inline std::vector<double> parse_double_list(const std::string& raw, const char* what) {
    std::vector<double> values;
    std::stringstream ss(raw);
    std::string token;
    while (std::getline(ss, token, ',')) {
        std::size_t consumed = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &consumed);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": bad number '" + token + "'");
        }
        if (consumed != token.size())
            throw std::invalid_argument(std::string(what) + ": bad number '" + token + "'");
        values.push_back(v);
    }
    if (values.empty())
        throw std::invalid_argument(std::string(what) + " must not be empty");
    return values;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

/// Angles in [0, 2pi] where the ray of X (and of -X) meets the level set;
/// the 2pi wrap copy is included when the first mark sits at 0 so plots of a
/// full period show every crossing.
inline std::vector<double> scalar_multiple_marks(std::span<const double> x) {
    double a = std::atan2(x[1], x[0]);
    if (a < 0.0) a += kTwoPi;
    double b = a + kTwoPi / 2.0;
    if (b >= kTwoPi) b -= kTwoPi;
    std::vector<double> marks{std::min(a, b), std::max(a, b)};
    if (marks.front() == 0.0) marks.push_back(kTwoPi);
    return marks;
}

inline std::string profile_csv(const EnergyProfile& profile) {
    std::ostringstream ss;
    write_csv(profile, ss);
    return ss.str();
}

inline nlohmann::ordered_json profile_json(const EnergyProfile& profile) {
    nlohmann::ordered_json j;
    j["metric_id"] = profile.metric_id;
    j["x"] = profile.x;
    j["theta"] = profile.angles;
    j["energy"] = profile.values;
    j["scalar_multiple_thetas"] = scalar_multiple_marks(profile.x);
    return j;
}

struct GoldenCheck {
    std::string name;
    std::string got;
    std::string want;
    bool ok = false;
};

class GoldenSet {
public:
    explicit GoldenSet(double rel_tol) : tol_(rel_tol) {}

    void value(const std::string& name, double got, double want) {
        GoldenCheck c;
        c.name = name;
        c.got = fmt(got, 12);
        c.want = fmt(want, 12);
        c.ok = std::abs(got - want) <= tol_ * std::abs(want);
        checks_.push_back(std::move(c));
    }

    void label(const std::string& name, const std::string& got, const std::string& want) {
        checks_.push_back({name, got, want, got == want});
    }

    bool all_ok() const {
        return std::all_of(checks_.begin(), checks_.end(),
                           [](const GoldenCheck& c) { return c.ok; });
    }

    void report_failures(std::ostream& out) const {
        for (const GoldenCheck& c : checks_)
            if (!c.ok)
                out << "[MISMATCH] " << c.name << ": got " << c.got << ", want " << c.want
                    << "\n";
    }

private:
    double tol_;
    std::vector<GoldenCheck> checks_;
};

inline const CriticalPoint* point_near(const std::vector<CriticalPoint>& points, double theta,
                                       double tol = 1e-6) {
    for (const CriticalPoint& cp : points) {
        double d = std::abs(cp.theta - theta);
        d = std::min(d, kTwoPi - d);
        if (d <= tol) return &cp;
    }
    return nullptr;
}

inline void print_critical_table(std::ostream& out, const std::vector<CriticalPoint>& points) {
    out << "  theta         E_X           kind\n";
    for (const CriticalPoint& cp : points)
        out << "  " << fmt(cp.theta) << std::string(14 - std::min<std::size_t>(13, fmt(cp.theta).size()), ' ')
            << fmt(cp.energy) << std::string(14 - std::min<std::size_t>(13, fmt(cp.energy).size()), ' ')
            << to_string(cp.kind) << "\n";
}

} // namespace detail

/// reproduce-paper: recompute the two worked critical-value tables for the
/// built-in quartic metric, write both profile CSV files, print the
/// convexity report and the conjecture verdicts, and compare every value
/// against its exact expression. Nonzero exit on any mismatch.
inline int cmd_reproduce_paper(std::ostream& out, std::ostream& err,
                               const std::string& output_dir, int n_angles, double rel_tol) {
    namespace fs = std::filesystem;
    const MinkowskiNorm metric = make_quartic_family(3.0);
    const fs::path dir = output_dir.empty() ? fs::path(".") : fs::path(output_dir);
    fs::create_directories(dir);

    detail::GoldenSet golden(rel_tol);

    const ConvexityReport conv = check_strong_convexity(metric, n_angles);
    out << "metric: " << metric.description() << "\n";
    out << "convexity: " << (conv.pass ? "pass" : "FAIL")
        << "  min eigenvalue " << detail::fmt(conv.min_eigenvalue) << " over " << conv.n_angles
        << " angles\n";
    if (conv.max_trace_rel_error && conv.max_det_rel_error)
        out << "closed-form check: trace rel err " << detail::fmt(*conv.max_trace_rel_error)
            << ", det rel err " << detail::fmt(*conv.max_det_rel_error) << "\n";
    golden.label("convexity verdict", conv.pass ? "pass" : "fail", "pass");

    const double pi = kTwoPi / 2.0;
    const double sqrt5 = std::sqrt(5.0);

    struct LocusCheck {
        std::string name;
        double theta;
        double expected;
    };

    struct ExampleSpec {
        std::string title;
        std::array<double, 2> x;
        std::string csv_name;
        std::vector<LocusCheck> loci;
        double expected_margin;
        std::vector<double> inflection_thetas;
    };

    const std::vector<ExampleSpec> examples{
        {"X = (1, 0)",
         {1.0, 0.0},
         "example1.csv",
         {{"E at theta=0 (multiple of X)", 0.0, 0.5},
          {"E at theta=pi/4", pi / 4.0, 1.0 / sqrt5},
          {"E at theta=pi/2", pi / 2.0, 0.75},
          {"E at theta=3pi/4", 3.0 * pi / 4.0, 1.0 / sqrt5}},
         0.5 - 1.0 / sqrt5,
         {}},
        {"X = (1, 3)",
         {1.0, 3.0},
         "example2.csv",
         {{"E at theta=atan(3) (multiple of X)", std::atan(3.0), std::sqrt(109.0) / 2.0},
          {"E at theta=0", 0.0, 29.0 / 4.0},
          {"E at theta=pi/2", pi / 2.0, 21.0 / 4.0},
          {"E at theta=pi/4", pi / 4.0, 23.0 / (2.0 * sqrt5)},
          {"E at theta=3pi/4", 3.0 * pi / 4.0, 17.0 / (2.0 * sqrt5)}},
         std::sqrt(109.0) / 2.0 - 17.0 / (2.0 * sqrt5),
         {std::atan(3.0), std::atan(3.0) + pi}},
    };

    for (const ExampleSpec& ex : examples) {
        out << "\n" << ex.title << "\n";
        const std::vector<CriticalPoint> points =
            find_critical_points(metric, ex.x, n_angles);
        detail::print_critical_table(out, points);

        for (const LocusCheck& locus : ex.loci) {
            const CriticalPoint* cp = detail::point_near(points, locus.theta);
            if (!cp) {
                golden.label(locus.name, "missing", detail::fmt(locus.expected, 12));
                continue;
            }
            golden.value(locus.name, cp->energy, locus.expected);
        }
        for (double theta : ex.inflection_thetas) {
            const CriticalPoint* cp = detail::point_near(points, theta);
            golden.label("kind at theta=" + detail::fmt(theta),
                         cp ? to_string(cp->kind) : "missing", "inflection");
        }

        const ConjectureReport report = test_conjecture(metric, ex.x, n_angles);
        out << "verdict: " << to_string(report.verdict)
            << "  self-energy " << detail::fmt(report.self_energy) << "  global min "
            << detail::fmt(report.global_min) << " at theta "
            << detail::fmt(report.global_min_theta) << "  margin "
            << detail::fmt(report.margin) << "\n";
        golden.label("verdict for " + ex.title, to_string(report.verdict), "refuted");
        golden.value("margin for " + ex.title, report.margin, ex.expected_margin);

        const EnergyProfile profile = energy_profile(metric, ex.x, n_angles);
        detail::write_text_file(dir / ex.csv_name, detail::profile_csv(profile));
        out << "wrote " << (dir / ex.csv_name).string() << "\n";
    }

    if (!golden.all_ok()) {
        golden.report_failures(err);
        return kExitMismatch;
    }
    out << "\nall golden values matched within relative tolerance " << detail::fmt(rel_tol)
        << "\n";
    return kExitOk;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"numerical analysis of Minkowski norms: fundamental tensor, "
                 "relative energy, critical points, and conjecture testing"};
    app.require_subcommand(1);

    // --- reproduce-paper ---
    auto* reproduce = app.add_subcommand(
        "reproduce-paper", "recompute the reference tables and figure data for the "
                           "built-in quartic metric and verify them against exact values");
    std::string rp_output;
    int rp_n = 4096;
    double rp_tol = 1e-9;
    reproduce->add_option("-o,--output", rp_output, "directory for example1.csv/example2.csv");
    reproduce->add_option("--n", rp_n, "angle-grid resolution")->capture_default_str();
    reproduce->add_option("--tol", rp_tol, "relative tolerance for the golden comparison")
        ->capture_default_str();

    // --- profile ---
    auto* profile = app.add_subcommand("profile", "sample E_X along the unit level set");
    detail::MetricChoice prof_metric;
    detail::add_metric_options(profile, prof_metric);
    std::vector<double> prof_x;
    profile->add_option("--x", prof_x, "components of X, e.g. --x 1,0")
        ->delimiter(',')
        ->required();
    int prof_n = 4096;
    profile->add_option("--n", prof_n, "number of grid angles")->capture_default_str();
    std::string prof_output;
    profile->add_option("-o,--output", prof_output, "output file (stdout when omitted)");
    std::string prof_format = "csv";
    profile->add_option("--format", prof_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // --- conjecture ---
    auto* conjecture = app.add_subcommand(
        "conjecture", "test whether E_X attains its global minimum at X/F(X)");
    detail::MetricChoice conj_metric;
    detail::add_metric_options(conjecture, conj_metric);
    std::vector<double> conj_x;
    conjecture->add_option("--x", conj_x, "components of X")->delimiter(',')->required();
    int conj_n = 4096;
    conjecture->add_option("--n", conj_n, "number of grid angles")->capture_default_str();
    double conj_tol = kRefutationTolerance;
    conjecture->add_option("--tol", conj_tol, "refutation margin threshold")
        ->capture_default_str();
    std::string conj_output = "certificate.json";
    conjecture->add_option("-o,--output", conj_output, "certificate file written when refuted")
        ->capture_default_str();
    std::string conj_format = "text";
    conjecture->add_option("--format", conj_format, "text or json report")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    // --- sweep ---
    auto* sweep = app.add_subcommand("sweep", "map refutations across the quartic family");
    std::string sweep_c_raw;
    sweep->add_option("--c-list", sweep_c_raw, "comma-separated family parameters")->required();
    int sweep_dirs = 8;
    sweep->add_option("--dirs", sweep_dirs, "number of X directions per parameter")
        ->capture_default_str();
    int sweep_n = 4096;
    sweep->add_option("--n", sweep_n, "number of grid angles")->capture_default_str();
    std::string sweep_output = "sweep.json";
    sweep->add_option("-o,--output", sweep_output, "summary file")->capture_default_str();

    // --- convexity ---
    auto* convexity =
        app.add_subcommand("convexity", "check positive definiteness of the fundamental tensor");
    detail::MetricChoice convex_metric;
    detail::add_metric_options(convexity, convex_metric);
    int convex_n = 4096;
    convexity->add_option("--n", convex_n, "number of sample angles")->capture_default_str();
    double convex_tol = kConvexityEigenvalueFloor;
    convexity->add_option("--tol", convex_tol, "minimum-eigenvalue pass threshold")
        ->capture_default_str();
    std::string convex_output;
    convexity->add_option("-o,--output", convex_output, "report file (stdout when omitted)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitInvalid;
    }

    try {
        if (reproduce->parsed())
            return cmd_reproduce_paper(out, err, rp_output, rp_n, rp_tol);

        if (profile->parsed()) {
            const MinkowskiNorm metric = detail::resolve_metric(prof_metric);
            const std::array<double, 2> x = detail::require_vec2(prof_x, "--x");
            const EnergyProfile prof = energy_profile(metric, x, prof_n);
            if (prof_format == "json") {
                const std::string body = detail::profile_json(prof).dump(2) + "\n";
                if (prof_output.empty()) {
                    out << body;
                } else {
                    detail::write_text_file(prof_output, body);
                }
            } else {
                const std::string body = detail::profile_csv(prof);
                if (prof_output.empty()) {
                    out << body;
                } else {
                    detail::write_text_file(prof_output, body);
                    nlohmann::ordered_json marks;
                    marks["x"] = prof.x;
                    marks["scalar_multiple_thetas"] = detail::scalar_multiple_marks(prof.x);
                    std::filesystem::path marks_path(prof_output);
                    marks_path.replace_extension(".marks.json");
                    detail::write_text_file(marks_path, marks.dump(2) + "\n");
                }
            }
            return kExitOk;
        }

        if (conjecture->parsed()) {
            const MinkowskiNorm metric = detail::resolve_metric(conj_metric);
            const std::array<double, 2> x = detail::require_vec2(conj_x, "--x");
            const ConjectureReport report = test_conjecture(metric, x, conj_n, conj_tol);
            if (conj_format == "json") {
                out << to_json(report).dump(2) << "\n";
            } else {
                out << "metric: " << report.metric_id << "\n"
                    << "X: (" << detail::fmt(x[0]) << ", " << detail::fmt(x[1]) << ")\n"
                    << "self-energy: " << detail::fmt(report.self_energy) << "\n"
                    << "global min:  " << detail::fmt(report.global_min) << " at theta "
                    << detail::fmt(report.global_min_theta) << "\n"
                    << "margin: " << detail::fmt(report.margin) << "\n"
                    << "convexity: " << (report.convexity_pass ? "pass" : "fail") << "\n";
                if (report.degenerate_profile)
                    out << "note: constant profile (Riemannian); every direction is critical\n";
                out << "verdict: " << to_string(report.verdict) << "\n";
            }
            if (report.verdict == Verdict::refuted && report.certificate) {
                detail::write_text_file(conj_output, to_json(*report.certificate).dump(2) + "\n");
                out << "certificate written to " << conj_output << "\n";
            }
            return report.verdict == Verdict::refuted ? kExitRefuted : kExitOk;
        }

        if (sweep->parsed()) {
            const std::vector<double> sweep_c = detail::parse_double_list(sweep_c_raw, "--c-list");
            const FamilySweepSummary summary = sweep_family(sweep_c, sweep_dirs, sweep_n);
            out << "c        convexity  refuted\n";
            for (const FamilySweepEntry& e : summary.entries)
                out << detail::fmt(e.c) << std::string(9 - std::min<std::size_t>(8, detail::fmt(e.c).size()), ' ')
                    << (e.convexity_pass ? "pass" : "fail") << "       " << e.n_refuted << "/"
                    << summary.n_dirs << "\n";
            detail::write_text_file(sweep_output, to_json(summary).dump(2) + "\n");
            out << "wrote " << sweep_output << "\n";
            return kExitOk;
        }

        if (convexity->parsed()) {
            const MinkowskiNorm metric = detail::resolve_metric(convex_metric);
            const ConvexityReport report = check_strong_convexity(metric, convex_n, convex_tol);
            const std::string body = to_json(report).dump(2) + "\n";
            if (convex_output.empty()) {
                out << body;
            } else {
                detail::write_text_file(convex_output, body);
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) { // includes InvalidMetric
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NonPositiveArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitMismatch;
    }
    return kExitInvalid;
}

} // namespace finsler::cli
