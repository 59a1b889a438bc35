#pragma once

// JSON document format for martingale-tree instances and small formatting
// helpers shared by the CLI: significant-digit rounding and RFC-4180 CSV
// lines (CRLF terminated, '.' decimal separator).

#include <cstdio>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxorder/tensorize.hpp"

namespace cxorder {

// Nearest double with the given number of significant decimal digits.
inline double round_sig(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return std::strtod(buf, nullptr);
}

inline std::string format_number(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += fields[i];
    }
    line += "\r\n";
    return line;
}

// ---------------------------------------------------------------------------
// Report and curve serialization
// ---------------------------------------------------------------------------

// Stop-loss curve over a grid as CSV rows (u, value, stderr).
inline std::string curve_to_csv(const StopLossCurve& curve, std::span<const double> grid,
                                int digits = 9) {
    std::string csv = csv_line({"u", "value", "stderr"});
    for (double u : grid)
        csv += csv_line({format_number(u, digits), format_number(curve.evaluate(u), digits),
                         format_number(curve.stderr_at(u), digits)});
    return csv;
}

// Dominance gaps as CSV rows (u, gap).
inline std::string dominance_to_csv(const DominanceReport& report, int digits = 9) {
    std::string csv = csv_line({"u", "gap"});
    for (std::size_t i = 0; i < report.grid.size(); ++i)
        csv += csv_line(
            {format_number(report.grid[i], digits), format_number(report.gaps[i], digits)});
    return csv;
}

inline nlohmann::ordered_json dominance_summary_json(const DominanceReport& report,
                                                     int digits = 9) {
    nlohmann::ordered_json j;
    j["points"] = report.grid.size();
    j["min_gap"] = round_sig(report.min_gap, digits);
    j["argmin_u"] = round_sig(report.argmin_u, digits);
    j["tangency_u"] = round_sig(report.tangency_u, digits);
    return j;
}

inline nlohmann::ordered_json order_check_to_json(const OrderCheckResult& result, int digits = 9) {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(result.verdict);
    j["mean_gap"] = round_sig(result.mean_gap, digits);
    if (result.worst_u)
        j["worst_u"] = round_sig(*result.worst_u, digits);
    else
        j["worst_u"] = nullptr;
    j["worst_violation"] = round_sig(result.worst_violation, digits);
    j["tolerance"] = result.tolerance;
    return j;
}

inline nlohmann::ordered_json tail_report_to_json(const TailConstraintReport& report,
                                                  int digits = 9) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["dkw_margin"] = round_sig(report.dkw_margin, digits);
    nlohmann::ordered_json exceedances = nlohmann::ordered_json::array();
    for (const TailExceedance& exc : report.exceedances) {
        nlohmann::ordered_json e;
        e["t"] = round_sig(exc.t, digits);
        e["empirical"] = round_sig(exc.empirical, digits);
        e["bound"] = round_sig(exc.bound, digits);
        exceedances.push_back(e);
    }
    j["exceedances"] = exceedances;
    j["pass"] = report.pass;
    return j;
}

inline nlohmann::ordered_json tensorization_report_to_json(const TensorizationReport& report,
                                                           int digits = 9) {
    nlohmann::ordered_json j;
    j["hypothesis_ok"] = report.hypothesis_ok;
    if (!report.hypothesis_ok) {
        nlohmann::ordered_json witness;
        witness["level"] = report.hypothesis.level;
        witness["node_path"] = report.hypothesis.node_path;
        witness["mean_mismatch"] = report.hypothesis.witness.mean_mismatch;
        witness["u"] = round_sig(report.hypothesis.witness.u, digits);
        witness["gap"] = round_sig(report.hypothesis.witness.gap, digits);
        j["witness"] = witness;
    }
    j["skipped"] = report.skipped;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const TensorizationEntry& entry : report.entries) {
        nlohmann::ordered_json e;
        e["f"] = entry.f_name;
        e["lhs"] = round_sig(entry.lhs, digits);
        e["rhs"] = round_sig(entry.rhs, digits);
        e["rhs_stderr"] = round_sig(entry.rhs_stderr, digits);
        e["pass"] = entry.pass;
        entries.push_back(e);
    }
    j["entries"] = entries;
    j["pass"] = report.pass;
    return j;
}

inline nlohmann::ordered_json ridge_report_to_json(const RidgeReport& report, int digits = 9) {
    nlohmann::ordered_json j;
    j["normalized_input"] = report.normalized_input;
    j["lhs"] = round_sig(report.lhs, digits);
    j["rhs"] = round_sig(report.rhs, digits);
    j["lhs_stderr"] = round_sig(report.lhs_stderr, digits);
    j["rhs_stderr"] = round_sig(report.rhs_stderr, digits);
    j["pass"] = report.pass;
    return j;
}

// ---------------------------------------------------------------------------
// Tree document schema: {schema_version, depth, comparators, root}
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json comparator_to_json(const Comparator& comp) {
    nlohmann::ordered_json j;
    switch (comp.kind()) {
        case Comparator::Kind::Discrete:
            j["type"] = "discrete";
            j["support"] = comp.law().support;
            j["probs"] = comp.law().probs;
            break;
        case Comparator::Kind::ScaledGaussian:
            j["type"] = "gaussian";
            j["scale"] = comp.scale();
            break;
        default:
            j["type"] = "laplace";
            j["scale"] = comp.scale();
            break;
    }
    return j;
}

inline nlohmann::ordered_json node_to_json(const TreeNode& node) {
    nlohmann::ordered_json j;
    j["support"] = node.support;
    j["probs"] = node.probs;
    if (!node.children.empty()) {
        nlohmann::ordered_json children = nlohmann::ordered_json::array();
        for (const TreeNode& child : node.children) children.push_back(node_to_json(child));
        j["children"] = children;
    }
    return j;
}

inline nlohmann::ordered_json instance_to_json(const DiscreteMartingaleTree& tree,
                                               const ComparatorList& comps) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["depth"] = tree.depth;
    nlohmann::ordered_json comparators = nlohmann::ordered_json::array();
    for (const Comparator& comp : comps) comparators.push_back(comparator_to_json(comp));
    j["comparators"] = comparators;
    j["root"] = node_to_json(tree.root);
    return j;
}

namespace detail {

inline std::vector<double> json_doubles(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_array())
        throw tree_validation_error(std::string("tree document: missing array field '") + field +
                                    "'");
    std::vector<double> out;
    for (const auto& v : j[field]) {
        if (!v.is_number()) throw tree_validation_error("tree document: non-numeric entry");
        out.push_back(v.get<double>());
    }
    return out;
}

inline TreeNode node_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw tree_validation_error("tree document: node must be an object");
    TreeNode node;
    node.support = json_doubles(j, "support");
    node.probs = json_doubles(j, "probs");
    if (j.contains("children")) {
        if (!j["children"].is_array())
            throw tree_validation_error("tree document: children must be an array");
        for (const auto& child : j["children"]) node.children.push_back(node_from_json(child));
    }
    return node;
}

inline Comparator comparator_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw tree_validation_error("tree document: comparator needs a string 'type'");
    std::string type = j["type"].get<std::string>();
    if (type == "discrete") {
        DiscreteLaw law;
        law.support = json_doubles(j, "support");
        law.probs = json_doubles(j, "probs");
        return Comparator::discrete(std::move(law));
    }
    if (!j.contains("scale") || !j["scale"].is_number())
        throw tree_validation_error("tree document: comparator needs a numeric 'scale'");
    double scale = j["scale"].get<double>();
    if (type == "gaussian") return Comparator::scaled_gaussian(scale);
    if (type == "laplace") return Comparator::scaled_laplace(scale);
    throw tree_validation_error("tree document: unknown comparator type '" + type + "'");
}

}  // namespace detail

// Parses and validates a full instance document; throws tree_validation_error
// on any malformed content.
inline RandomInstance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw tree_validation_error("tree document: root must be an object");
    if (!j.contains("depth") || !j["depth"].is_number_unsigned())
        throw tree_validation_error("tree document: missing unsigned 'depth'");
    if (!j.contains("root")) throw tree_validation_error("tree document: missing 'root'");
    if (!j.contains("comparators") || !j["comparators"].is_array())
        throw tree_validation_error("tree document: missing 'comparators' array");

    RandomInstance instance;
    instance.tree.depth = j["depth"].get<std::size_t>();
    instance.tree.root = detail::node_from_json(j["root"]);
    for (const auto& comp : j["comparators"])
        instance.comps.push_back(detail::comparator_from_json(comp));
    if (instance.comps.size() != instance.tree.depth)
        throw tree_validation_error("tree document: comparator count must equal depth");
    validate_tree(instance.tree);
    return instance;
}

}  // namespace cxorder
