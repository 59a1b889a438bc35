// Command-line surface: constants, envelope tables, the verification suite,
// extremal-law emission and the tensorization/ridge demos. All output is
// machine readable (JSON or RFC-4180 CSV) and deterministic given the full
// flag set including the seed.
//
// Exit codes: 0 success, 1 mathematical check failure, 2 usage/input error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cxorder/cxorder.hpp"
#include "cxorder/serialize.hpp"

namespace {

using nlohmann::ordered_json;
using namespace cxorder;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string kind = "gaussian";
    int digits = 9;
    double u_max = 5.0;
    std::size_t points = 201;
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    double scale = 1.0;
    std::string format;  // empty means the command default
    std::string out_path;
};

EnvelopeKind parse_kind(const std::string& kind) {
    if (kind == "gaussian") return EnvelopeKind::SubGaussian;
    if (kind == "exponential") return EnvelopeKind::SubExponential;
    throw CLI::ValidationError("--kind", "expected 'gaussian' or 'exponential'");
}

int write_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return kExitOk;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        std::cerr << "cannot open output file: " << out_path << "\n";
        return kExitUsage;
    }
    file << content;
    return kExitOk;
}

double rounded(double x, int digits) { return round_sig(x, digits); }

// ---------------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------------

int cmd_constants(CommonOptions opt) {
    if (opt.format.empty()) opt.format = "json";
    std::vector<std::pair<std::string, double>> values;
    if (parse_kind(opt.kind) == EnvelopeKind::SubGaussian) {
        GaussianComparison g = compute_gaussian_comparison();
        values = {{"a", g.sol.knee},
                  {"p0", g.sol.tail_at_knee},
                  {"z", g.tail_quantile},
                  {"c0", g.sharp_scale},
                  {"c0_squared", g.sharp_scale_squared}};
    } else {
        ExponentialComparison e = compute_exponential_comparison();
        values = {{"aE", e.sol.knee},
                  {"pE", e.sol.tail_at_knee},
                  {"wE", e.tail_quantile},
                  {"cE", e.sharp_scale}};
    }
    if (opt.format == "csv") {
        std::vector<std::string> header, row;
        for (const auto& [key, value] : values) {
            header.push_back(key);
            row.push_back(format_number(value, opt.digits));
        }
        return write_output(csv_line(header) + csv_line(row), opt.out_path);
    }
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = opt.kind;
    for (const auto& [key, value] : values) j[key] = rounded(value, opt.digits);
    return write_output(j.dump(2) + "\n", opt.out_path);
}

// ---------------------------------------------------------------------------
// envelope
// ---------------------------------------------------------------------------

int cmd_envelope(CommonOptions opt, bool check_dominance) {
    if (opt.format.empty()) opt.format = "csv";
    EnvelopeKind kind = parse_kind(opt.kind);
    TailEnvelope env(kind);
    EnvelopeSolution sol = solve_envelope(env);
    double sharp = sharp_scale(kind);
    double c = opt.scale * sharp;
    double quantile = kind == EnvelopeKind::SubGaussian
                          ? inverse_gaussian_tail(Probability(sol.tail_at_knee))
                          : std::log(1.0 / (2.0 * sol.tail_at_knee));

    std::vector<double> grid;
    for (std::size_t i = 0; i < opt.points; ++i)
        grid.push_back(opt.u_max * static_cast<double>(i) /
                       static_cast<double>(opt.points - 1));
    grid.push_back(c * quantile);
    std::sort(grid.begin(), grid.end());

    std::string csv = csv_line({"u", "envelope", "comparator", "gap"});
    ordered_json rows = ordered_json::array();
    double min_gap = std::numeric_limits<double>::infinity();
    for (double u : grid) {
        double envelope_value = stop_loss_envelope(env, sol, u);
        double comparator = kind == EnvelopeKind::SubGaussian ? gaussian_stop_loss(c, u)
                                                              : laplace_stop_loss(c, u);
        double gap = comparator - envelope_value;
        min_gap = std::min(min_gap, gap);
        if (opt.format == "csv") {
            csv += csv_line({format_number(u, opt.digits),
                             format_number(envelope_value, opt.digits),
                             format_number(comparator, opt.digits),
                             format_number(gap, opt.digits)});
        } else {
            ordered_json row;
            row["u"] = rounded(u, opt.digits);
            row["envelope"] = rounded(envelope_value, opt.digits);
            row["comparator"] = rounded(comparator, opt.digits);
            row["gap"] = rounded(gap, opt.digits);
            rows.push_back(row);
        }
    }
    std::string payload = csv;
    if (opt.format != "csv") {
        ordered_json j;
        j["schema_version"] = 1;
        j["kind"] = opt.kind;
        j["scale"] = rounded(c, opt.digits);
        j["rows"] = rows;
        payload = j.dump(2) + "\n";
    }
    int rc = write_output(payload, opt.out_path);
    if (rc != kExitOk) return rc;
    if (check_dominance && min_gap < -1e-12) {
        std::cerr << "dominance assertion failed: min gap " << min_gap << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct CheckRecord {
    std::string name;
    std::string kind;
    bool pass;
    ordered_json detail;
};

void run_dominance_check(EnvelopeKind kind, double scale, int digits,
                         std::vector<CheckRecord>& records) {
    double sharp = sharp_scale(kind);
    double c = scale * sharp;
    DominanceReport report = dominance_report(kind, c, DominanceGrid{});
    bool pass = report.min_gap >= -1e-12;
    ordered_json detail;
    detail["scale"] = rounded(c, digits);
    detail["min_gap"] = rounded(report.min_gap, digits);
    detail["argmin_u"] = rounded(report.argmin_u, digits);
    detail["tangency_u"] = rounded(report.tangency_u, digits);
    if (scale == 1.0) {
        TailEnvelope env(kind);
        EnvelopeSolution sol = solve_envelope(env);
        double comparator = kind == EnvelopeKind::SubGaussian
                                ? gaussian_stop_loss(c, report.tangency_u)
                                : laplace_stop_loss(c, report.tangency_u);
        double tangency_gap = comparator - stop_loss_envelope(env, sol, report.tangency_u);
        detail["tangency_gap"] = rounded(tangency_gap, digits);
        pass = pass && std::abs(tangency_gap) < 1e-9;
    }
    records.push_back({"dominance", to_string(kind), pass, detail});
}

void run_sharpness_check(EnvelopeKind kind, int digits, std::vector<CheckRecord>& records) {
    double sharp = sharp_scale(kind);
    const double multipliers[] = {0.9, 0.99, 1.0, 1.01};
    bool pass = true;
    ordered_json witnesses = ordered_json::array();
    for (double m : multipliers) {
        double w = sharpness_witness(kind, m * sharp);
        witnesses.push_back(rounded(w, digits));
        if (m < 1.0) pass = pass && w > 0.0;
        if (m == 1.0) pass = pass && std::abs(w) <= 1e-10;
        if (m > 1.0) pass = pass && w < 0.0;
    }
    ordered_json detail;
    detail["multipliers"] = {0.9, 0.99, 1.0, 1.01};
    detail["witnesses"] = witnesses;
    records.push_back({"sharpness", to_string(kind), pass, detail});
}

void run_extremal_mc_check(EnvelopeKind kind, std::size_t n, std::uint64_t seed, int digits,
                           std::vector<CheckRecord>& records) {
    ExtremalDistribution dist(kind);
    std::vector<double> samples = dist.sample(n, seed);
    bool pass = true;
    ordered_json points = ordered_json::array();
    const double probes[] = {0.0, 1.0, dist.solution().knee, 3.0};
    for (double u : probes) {
        HingeEstimate est = empirical_stop_loss(samples, u);
        double analytic = dist.stop_loss(u);
        bool ok = std::abs(est.value - analytic) <= 4.0 * est.stderr_mean;
        pass = pass && ok;
        ordered_json p;
        p["u"] = rounded(u, digits);
        p["empirical"] = rounded(est.value, digits);
        p["analytic"] = rounded(analytic, digits);
        p["stderr"] = rounded(est.stderr_mean, digits);
        p["pass"] = ok;
        points.push_back(p);
    }
    MeanEstimate mean = sample_mean(samples);
    bool mean_ok = std::abs(mean.mean) <= 4.0 * mean.stderr_mean;
    pass = pass && mean_ok;
    DkwBandResult dkw = dkw_band_check(
        samples, [&](double x) { return dist.cdf(x).value(); }, Probability(1.0 - 1e-6));
    pass = pass && dkw.inside;
    ordered_json detail;
    detail["n"] = n;
    detail["stop_loss_points"] = points;
    detail["mean"] = rounded(mean.mean, digits);
    detail["mean_pass"] = mean_ok;
    detail["dkw_statistic"] = rounded(dkw.ks_statistic, digits);
    detail["dkw_band"] = rounded(dkw.band, digits);
    records.push_back({"extremal_mc", to_string(kind), pass, detail});
}

void run_tail_constraint_check(EnvelopeKind kind, std::size_t n, std::uint64_t seed, int digits,
                               std::vector<CheckRecord>& records) {
    ExtremalDistribution dist(kind);
    std::vector<double> samples = dist.sample(n, seed);
    TailConstraintReport report =
        check_tail_constraint(samples, dist.envelope(), Probability(0.999999));
    ordered_json detail;
    detail["n"] = n;
    detail["dkw_margin"] = rounded(report.dkw_margin, digits);
    detail["exceedances"] = report.exceedances.size();
    records.push_back({"tail_constraint", to_string(kind), report.pass, detail});
}

void run_crude_bounds_check(int digits, std::vector<CheckRecord>& records) {
    GaussianComparison g = compute_gaussian_comparison();
    double root2 = std::numbers::sqrt2;
    bool bounds = g.sol.knee > root2 && g.sharp_scale > root2 &&
                  g.sol.tail_at_knee < 0.5 && g.tail_quantile > 0.0;
    bool mills = true;
    for (int i = 1; i <= 1000; ++i) {
        double x = 0.01 * static_cast<double>(i);
        if (gaussian_pdf(x) / gaussian_tail(x).value() > x + 1.0 / x + 1e-12) {
            mills = false;
            break;
        }
    }
    ordered_json detail;
    detail["knee"] = rounded(g.sol.knee, digits);
    detail["scale"] = rounded(g.sharp_scale, digits);
    detail["tail_at_knee"] = rounded(g.sol.tail_at_knee, digits);
    detail["tail_quantile"] = rounded(g.tail_quantile, digits);
    detail["mills_ratio_grid"] = mills;
    records.push_back({"crude_bounds", "gaussian", bounds && mills, detail});
}

int cmd_verify(CommonOptions opt) {
    if (opt.format.empty()) opt.format = "json";
    std::vector<CheckRecord> records;
    for (EnvelopeKind kind : {EnvelopeKind::SubGaussian, EnvelopeKind::SubExponential}) {
        run_dominance_check(kind, opt.scale, opt.digits, records);
        run_sharpness_check(kind, opt.digits, records);
        run_extremal_mc_check(kind, opt.n, opt.seed, opt.digits, records);
        run_tail_constraint_check(kind, opt.n, opt.seed, opt.digits, records);
    }
    run_crude_bounds_check(opt.digits, records);

    bool all_pass = true;
    std::string csv = csv_line({"name", "kind", "pass"});
    ordered_json checks = ordered_json::array();
    for (const CheckRecord& rec : records) {
        ordered_json j;
        j["name"] = rec.name;
        j["kind"] = rec.kind;
        j["pass"] = rec.pass;
        j["detail"] = rec.detail;
        checks.push_back(j);
        csv += csv_line({rec.name, rec.kind, rec.pass ? "true" : "false"});
        all_pass = all_pass && rec.pass;
    }
    std::string payload = csv;
    if (opt.format != "csv") {
        ordered_json j;
        j["schema_version"] = 1;
        j["scale"] = opt.scale;
        j["n"] = opt.n;
        j["seed"] = opt.seed;
        j["checks"] = checks;
        j["pass"] = all_pass;
        payload = j.dump(2) + "\n";
    }
    int rc = write_output(payload, opt.out_path);
    if (rc != kExitOk) return rc;
    if (!all_pass) {
        for (const CheckRecord& rec : records)
            if (!rec.pass) std::cerr << "check failed: " << rec.name << " (" << rec.kind << ")\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// extremal
// ---------------------------------------------------------------------------

int cmd_extremal(CommonOptions opt, bool emit_cdf, std::size_t sample_count, bool u_max_set) {
    if (opt.format.empty()) opt.format = "csv";
    EnvelopeKind kind = parse_kind(opt.kind);
    ExtremalDistribution dist(kind);
    if (emit_cdf) {
        if (opt.points < 2) {
            std::cerr << "--points must be >= 2 for a CDF table\n";
            return kExitUsage;
        }
        double x_lo = -dist.solution().knee;
        double x_hi = u_max_set ? opt.u_max : dist.quantile(Probability(0.999));
        if (!(x_hi > x_lo)) {
            std::cerr << "--umax must exceed the lower support edge " << x_lo << "\n";
            return kExitUsage;
        }
        std::string csv = csv_line({"x", "cdf"});
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < opt.points; ++i) {
            double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) /
                                   static_cast<double>(opt.points - 1);
            if (opt.format == "csv") {
                csv += csv_line({format_number(x, opt.digits),
                                 format_number(dist.cdf(x).value(), opt.digits)});
            } else {
                ordered_json row;
                row["x"] = rounded(x, opt.digits);
                row["cdf"] = rounded(dist.cdf(x).value(), opt.digits);
                rows.push_back(row);
            }
        }
        if (opt.format == "csv") return write_output(csv, opt.out_path);
        ordered_json j;
        j["schema_version"] = 1;
        j["kind"] = opt.kind;
        j["rows"] = rows;
        return write_output(j.dump(2) + "\n", opt.out_path);
    }
    std::vector<double> samples = dist.sample(sample_count, opt.seed);
    if (opt.format == "csv") {
        std::string csv = csv_line({"value"});
        for (double x : samples) csv += csv_line({format_number(x, 17)});
        return write_output(csv, opt.out_path);
    }
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = opt.kind;
    j["seed"] = opt.seed;
    j["values"] = samples;
    return write_output(j.dump(2) + "\n", opt.out_path);
}

// ---------------------------------------------------------------------------
// tensorize
// ---------------------------------------------------------------------------

int cmd_tensorize_random(std::size_t count, std::size_t depth, const CommonOptions& opt) {
    std::vector<CatalogFunction> catalog = default_catalog();
    std::size_t failures = 0;
    ordered_json failed = ordered_json::array();
    for (std::size_t i = 0; i < count; ++i) {
        RandomInstance instance = random_dominated_instance(depth, opt.seed + i);
        TensorizationReport report =
            tensorization_check(instance.tree, instance.comps, catalog, 1, opt.seed);
        if (!report.hypothesis_ok || !report.pass) {
            ++failures;
            ordered_json f;
            f["instance"] = i;
            f["report"] = tensorization_report_to_json(report, opt.digits);
            failed.push_back(f);
        }
    }
    ordered_json j;
    j["schema_version"] = 1;
    j["mode"] = "random";
    j["instances"] = count;
    j["depth"] = depth;
    j["seed"] = opt.seed;
    j["failures"] = failures;
    j["failed_instances"] = failed;
    j["pass"] = failures == 0;
    int rc = write_output(j.dump(2) + "\n", opt.out_path);
    if (rc != kExitOk) return rc;
    return failures == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_tensorize_file(const std::string& path, const CommonOptions& opt) {
    std::ifstream file(path);
    if (!file) {
        std::cerr << "cannot open tree document: " << path << "\n";
        return kExitUsage;
    }
    nlohmann::json doc;
    try {
        file >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "malformed tree document: " << e.what() << "\n";
        return kExitUsage;
    }
    RandomInstance instance = instance_from_json(doc);
    TensorizationReport report = tensorization_check(instance.tree, instance.comps,
                                                     default_catalog(), opt.n, opt.seed);
    ordered_json j;
    j["schema_version"] = 1;
    j["mode"] = "file";
    j["file"] = path;
    j["report"] = tensorization_report_to_json(report, opt.digits);
    j["pass"] = report.hypothesis_ok && report.pass;
    int rc = write_output(j.dump(2) + "\n", opt.out_path);
    if (rc != kExitOk) return rc;
    if (!report.hypothesis_ok) {
        std::cerr << "conditional dominance fails at level " << report.hypothesis.level
                  << " node path [";
        for (std::size_t i = 0; i < report.hypothesis.node_path.size(); ++i)
            std::cerr << (i ? "," : "") << report.hypothesis.node_path[i];
        std::cerr << "]\n";
        return kExitCheckFailed;
    }
    return report.pass ? kExitOk : kExitCheckFailed;
}

int cmd_tensorize_ridge(std::size_t dim, const CommonOptions& opt) {
    if (dim == 0) {
        std::cerr << "--dim must be >= 1\n";
        return kExitUsage;
    }
    std::vector<double> direction(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    std::vector<RidgeDemoCase> cases = standard_ridge_demo(direction);

    ExtremalDistribution dist(EnvelopeKind::SubGaussian);
    GaussianComparison g = compute_gaussian_comparison();
    bool variance_ok = dist.second_moment() <= g.sharp_scale_squared;

    bool all_pass = variance_ok;
    ordered_json entries = ordered_json::array();
    for (const RidgeDemoCase& demo : cases) {
        RidgeReport report = ridge_mc_check(direction, demo.f, opt.n, opt.seed);
        ordered_json e;
        e["name"] = demo.name;
        e.update(ridge_report_to_json(report, opt.digits));
        entries.push_back(e);
        all_pass = all_pass && report.pass;
    }
    ordered_json j;
    j["schema_version"] = 1;
    j["mode"] = "ridge";
    j["dim"] = dim;
    j["n"] = opt.n;
    j["seed"] = opt.seed;
    j["second_moment"] = rounded(dist.second_moment(), opt.digits);
    j["second_moment_bound"] = rounded(g.sharp_scale_squared, opt.digits);
    j["second_moment_pass"] = variance_ok;
    j["cases"] = entries;
    j["pass"] = all_pass;
    int rc = write_output(j.dump(2) + "\n", opt.out_path);
    if (rc != kExitOk) return rc;
    return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sharp convex-order comparison constants for tail envelopes"};
    app.require_subcommand(1);

    CommonOptions opt;
    auto add_common = [&](CLI::App* cmd, bool with_seed = true) {
        cmd->add_option("--kind", opt.kind, "Envelope kind")
            ->check(CLI::IsMember({"gaussian", "exponential"}));
        cmd->add_option("--digits", opt.digits, "Significant digits in output")
            ->check(CLI::Range(3, 12));
        cmd->add_option("--format", opt.format, "Output format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", opt.out_path, "Output path (default stdout)");
        if (with_seed) cmd->add_option("--seed", opt.seed, "Deterministic stream seed");
    };

    CLI::App* constants = app.add_subcommand("constants", "Print the sharp comparison constants");
    add_common(constants, false);

    CLI::App* envelope = app.add_subcommand("envelope", "Emit (u, envelope, comparator, gap) CSV");
    add_common(envelope, false);
    bool check_dominance = false;
    envelope->add_option("--umax", opt.u_max, "Upper end of the u grid")->check(CLI::PositiveNumber);
    envelope->add_option("--points", opt.points, "Grid points")->check(CLI::Range(2, 100000000));
    envelope->add_option("--scale", opt.scale, "Comparator scale multiplier")
        ->check(CLI::PositiveNumber);
    envelope->add_flag("--check", check_dominance, "Exit 1 if any gap is below -1e-12");

    CLI::App* verify = app.add_subcommand("verify", "Run the full verification suite");
    add_common(verify);
    verify->add_option("--scale", opt.scale, "Comparator scale multiplier")
        ->check(CLI::PositiveNumber);
    verify->add_option("--n", opt.n, "Monte Carlo sample count")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));

    CLI::App* extremal = app.add_subcommand("extremal", "Emit the extremal law (CDF or samples)");
    add_common(extremal);
    bool emit_cdf = false;
    std::size_t sample_count = 0;
    auto* cdf_flag = extremal->add_flag("--cdf", emit_cdf, "Emit a CDF table");
    auto* sample_opt = extremal->add_option("--sample", sample_count, "Emit this many samples")
                           ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    cdf_flag->excludes(sample_opt);
    auto* umax_opt =
        extremal->add_option("--umax", opt.u_max, "Upper end of the CDF x grid");
    extremal->add_option("--points", opt.points, "CDF table rows")
        ->check(CLI::Range(2, 100000000));

    CLI::App* tensorize = app.add_subcommand("tensorize", "Tensorization and ridge checks");
    add_common(tensorize);
    std::size_t random_count = 0;
    std::size_t depth = 2;
    std::size_t dim = 8;
    std::string tree_file;
    bool ridge = false;
    auto* random_opt = tensorize->add_option("--random", random_count,
                                             "Run this many seeded random instances");
    tensorize->add_option("--depth", depth, "Tree depth for random instances")
        ->check(CLI::Range(std::size_t{1}, std::size_t{6}));
    auto* file_opt = tensorize->add_option("--file", tree_file, "Tree document to check");
    auto* ridge_flag = tensorize->add_flag("--ridge", ridge, "Run the rank-one ridge demo");
    tensorize->add_option("--dim", dim, "Ambient dimension for the ridge demo")
        ->check(CLI::Range(std::size_t{1}, std::size_t{64}));
    tensorize->add_option("--n", opt.n, "Monte Carlo sample count")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    random_opt->excludes(file_opt);
    random_opt->excludes(ridge_flag);
    file_opt->excludes(ridge_flag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (constants->parsed()) return cmd_constants(opt);
        if (envelope->parsed()) return cmd_envelope(opt, check_dominance);
        if (verify->parsed()) return cmd_verify(opt);
        if (extremal->parsed()) {
            if (!emit_cdf && sample_count == 0) {
                std::cerr << "extremal: one of --cdf or --sample is required\n";
                return kExitUsage;
            }
            return cmd_extremal(opt, emit_cdf, sample_count, umax_opt->count() > 0);
        }
        if (tensorize->parsed()) {
            if (opt.format == "csv") {
                std::cerr << "tensorize reports are nested; only --format json is supported\n";
                return kExitUsage;
            }
            if (ridge) return cmd_tensorize_ridge(dim, opt);
            if (!tree_file.empty()) return cmd_tensorize_file(tree_file, opt);
            if (random_count > 0) return cmd_tensorize_random(random_count, depth, opt);
            std::cerr << "tensorize: one of --random, --file or --ridge is required\n";
            return kExitUsage;
        }
    } catch (const tree_validation_error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
