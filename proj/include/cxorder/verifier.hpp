#pragma once

// Stop-loss curves (analytic and empirical), the convex-order decision
// procedure, tail-constraint checking against an envelope with a DKW margin,
// and Monte Carlo hinge-gap estimation with explicit error control.

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cxorder/comparison.hpp"
#include "cxorder/extremal.hpp"

namespace cxorder {

struct HingeEstimate {
    double value = 0.0;
    double stderr_mean = 0.0;
};

// (1/n) sum of (x_i - u)_+ with its standard error; pairwise accumulation.
inline HingeEstimate empirical_stop_loss(std::span<const double> samples, double u) {
    if (samples.empty()) throw std::invalid_argument("empirical_stop_loss: empty sample");
    MeanEstimate est =
        transformed_mean(samples, [u](double x) { return x > u ? x - u : 0.0; });
    return HingeEstimate{est.mean, est.stderr_mean};
}

enum class CurveSource { Analytic, Empirical };
enum class OrderVerdict { Dominated, Violated, Inconclusive };

inline const char* to_string(OrderVerdict v) {
    switch (v) {
        case OrderVerdict::Dominated: return "dominated";
        case OrderVerdict::Violated: return "violated";
        default: return "inconclusive";
    }
}

// A stop-loss transform u -> E[(X-u)_+] on the whole real line, with the
// law's mean and (for empirical curves) standard errors.
struct StopLossCurve {
    CurveSource source = CurveSource::Analytic;
    std::function<double(double)> evaluate;
    std::function<double(double)> stderr_at;  // identically 0 for analytic curves
    double mean = 0.0;
    double mean_stderr = 0.0;
    std::optional<std::size_t> n_samples;
    std::string label;
};

namespace detail {
inline std::function<double(double)> zero_stderr() {
    return [](double) { return 0.0; };
}
}  // namespace detail

// Scaled Gaussian comparator; the closed form is valid on the whole line and
// coincides with the symmetric reflection identity g(-v) = g(v) + v.
inline StopLossCurve gaussian_comparator_curve(double c) {
    if (!(c > 0.0)) throw std::domain_error("gaussian_comparator_curve: c must be > 0");
    StopLossCurve curve;
    curve.evaluate = [c](double u) { return gaussian_stop_loss(c, u); };
    curve.stderr_at = detail::zero_stderr();
    curve.label = "gaussian_comparator";
    return curve;
}

// Scaled Laplace comparator; negative u through the reflection identity.
inline StopLossCurve laplace_comparator_curve(double c) {
    if (!(c > 0.0)) throw std::domain_error("laplace_comparator_curve: c must be > 0");
    StopLossCurve curve;
    curve.evaluate = [c](double u) {
        return u >= 0.0 ? laplace_stop_loss(c, u) : laplace_stop_loss(c, -u) + (-u);
    };
    curve.stderr_at = detail::zero_stderr();
    curve.label = "laplace_comparator";
    return curve;
}

inline StopLossCurve extremal_curve(const ExtremalDistribution& dist) {
    StopLossCurve curve;
    curve.evaluate = [dist](double u) { return dist.stop_loss_extended(u); };
    curve.stderr_at = detail::zero_stderr();
    curve.label = std::string("extremal_") + to_string(dist.envelope().kind());
    return curve;
}

// Finite discrete law as an analytic curve (its stop-loss is an exact sum).
inline StopLossCurve discrete_curve(std::vector<double> support, std::vector<double> probs) {
    if (support.size() != probs.size() || support.empty())
        throw std::invalid_argument("discrete_curve: support/probs mismatch");
    auto pts = std::make_shared<const std::vector<double>>(std::move(support));
    auto wts = std::make_shared<const std::vector<double>>(std::move(probs));
    StopLossCurve curve;
    double mean = 0.0;
    for (std::size_t i = 0; i < pts->size(); ++i) mean += (*wts)[i] * (*pts)[i];
    curve.mean = mean;
    curve.evaluate = [pts, wts](double u) {
        double acc = 0.0;
        for (std::size_t i = 0; i < pts->size(); ++i)
            if ((*pts)[i] > u) acc += (*wts)[i] * ((*pts)[i] - u);
        return acc;
    };
    curve.stderr_at = detail::zero_stderr();
    curve.label = "discrete";
    return curve;
}

inline StopLossCurve empirical_curve(std::vector<double> samples, std::string label = "empirical") {
    if (samples.empty()) throw std::invalid_argument("empirical_curve: empty sample");
    auto data = std::make_shared<const std::vector<double>>(std::move(samples));
    MeanEstimate mean = sample_mean(*data);
    StopLossCurve curve;
    curve.source = CurveSource::Empirical;
    curve.mean = mean.mean;
    curve.mean_stderr = mean.stderr_mean;
    curve.n_samples = data->size();
    curve.evaluate = [data](double u) { return empirical_stop_loss(*data, u).value; };
    curve.stderr_at = [data](double u) { return empirical_stop_loss(*data, u).stderr_mean; };
    curve.label = std::move(label);
    return curve;
}

struct OrderCheckResult {
    double mean_gap = 0.0;                // mean(Y) - mean(X)
    std::optional<double> worst_u;        // grid point of the most negative gap
    double worst_violation = 0.0;         // most negative stop-loss gap, 0 if none
    OrderVerdict verdict = OrderVerdict::Dominated;
    double tolerance = 0.0;
};

// Checks X ⪯cx Y over the grid: mean equality first, then pointwise
// stop-loss dominance. Empirical curves get a 4-standard-error band; a
// negative gap inside the band yields Inconclusive, never Dominated.
inline OrderCheckResult convex_order_check(const StopLossCurve& curve_x,
                                           const StopLossCurve& curve_y,
                                           std::span<const double> grid, double tolerance) {
    if (grid.empty()) throw std::invalid_argument("convex_order_check: empty grid");
    OrderCheckResult result;
    result.tolerance = tolerance;
    result.mean_gap = curve_y.mean - curve_x.mean;

    bool both_analytic =
        curve_x.source == CurveSource::Analytic && curve_y.source == CurveSource::Analytic;
    double mean_band = 4.0 * std::sqrt(curve_x.mean_stderr * curve_x.mean_stderr +
                                       curve_y.mean_stderr * curve_y.mean_stderr);
    double mean_tol = both_analytic ? 1e-10 : mean_band;
    if (std::abs(result.mean_gap) > mean_tol) {
        result.verdict = OrderVerdict::Violated;
        result.worst_u = std::nullopt;
        return result;
    }

    bool beyond_band = false;
    bool straddles = false;
    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_at = grid.front();
    for (double u : grid) {
        double gap = curve_y.evaluate(u) - curve_x.evaluate(u);
        if (gap < worst_gap) {
            worst_gap = gap;
            worst_at = u;
        }
        if (gap < 0.0) {
            double sx = curve_x.stderr_at(u);
            double sy = curve_y.stderr_at(u);
            double band = 4.0 * std::sqrt(sx * sx + sy * sy);
            if (gap < -(tolerance + band))
                beyond_band = true;
            else if (gap < -tolerance)
                straddles = true;
        }
    }
    result.worst_u = worst_at;
    result.worst_violation = worst_gap < 0.0 ? worst_gap : 0.0;
    if (beyond_band)
        result.verdict = OrderVerdict::Violated;
    else if (straddles)
        result.verdict = OrderVerdict::Inconclusive;  // only reachable with empirical bands
    else
        result.verdict = OrderVerdict::Dominated;
    return result;
}

struct TailExceedance {
    double t;
    double empirical;
    double bound;  // s(t) + DKW margin
};

struct TailConstraintReport {
    std::size_t n = 0;
    double dkw_margin = 0.0;
    std::vector<TailExceedance> exceedances;
    bool pass = true;
};

// Compares the empirical two-sided tail against s(t) plus the DKW margin
// sqrt(log(2/alpha) / (2n)) on a t grid; every exceedance is reported.
inline TailConstraintReport check_tail_constraint(std::span<const double> samples,
                                                  const TailEnvelope& env, Probability confidence,
                                                  std::span<const double> t_grid = {}) {
    if (samples.empty()) throw std::invalid_argument("check_tail_constraint: empty sample");
    double alpha = 1.0 - confidence.value();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("check_tail_constraint: confidence must lie in (0,1)");

    std::vector<double> magnitudes(samples.begin(), samples.end());
    for (double& x : magnitudes) x = std::abs(x);
    std::sort(magnitudes.begin(), magnitudes.end());

    std::vector<double> default_grid;
    if (t_grid.empty()) {
        double t_max = env.inverse(1e-9);
        default_grid.resize(400);
        for (std::size_t i = 0; i < default_grid.size(); ++i)
            default_grid[i] = t_max * static_cast<double>(i) /
                              static_cast<double>(default_grid.size() - 1);
        t_grid = default_grid;
    }

    TailConstraintReport report;
    report.n = samples.size();
    report.dkw_margin = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(report.n)));
    for (double t : t_grid) {
        auto above = magnitudes.end() -
                     std::upper_bound(magnitudes.begin(), magnitudes.end(), t);
        double empirical = static_cast<double>(above) / static_cast<double>(report.n);
        double bound = env.value(t) + report.dkw_margin;
        if (empirical > bound) report.exceedances.push_back({t, empirical, bound});
    }
    report.pass = report.exceedances.empty();
    return report;
}

struct GapEstimate {
    double gap = 0.0;     // empirical E[(X-u)_+] minus analytic E[(cG-u)_+]
    double stderr_mean = 0.0;  // Monte Carlo error of the sample term only
};

inline GapEstimate hinge_gap_estimate(std::span<const double> samples, double c, double u) {
    HingeEstimate hinge = empirical_stop_loss(samples, u);
    return GapEstimate{hinge.value - gaussian_stop_loss(c, u), hinge.stderr_mean};
}

inline GapEstimate hinge_gap_estimate(const ExtremalDistribution& dist, double c, double u,
                                      std::uint64_t seed, std::size_t n) {
    if (n == 0) throw std::invalid_argument("hinge_gap_estimate: n must be >= 1");
    std::vector<double> samples = dist.sample(n, seed);
    return hinge_gap_estimate(samples, c, u);
}

struct DkwBandResult {
    double ks_statistic = 0.0;
    double band = 0.0;
    bool inside = true;
};

// Kolmogorov-Smirnov distance of the empirical CDF from cdf, against the
// DKW band at the given confidence.
inline DkwBandResult dkw_band_check(std::span<const double> samples,
                                    const std::function<double(double)>& cdf,
                                    Probability confidence) {
    if (samples.empty()) throw std::invalid_argument("dkw_band_check: empty sample");
    double alpha = 1.0 - confidence.value();
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double n = static_cast<double>(sorted.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double f = cdf(sorted[i]);
        sup = std::max(sup, std::abs(f - static_cast<double>(i + 1) / n));
        sup = std::max(sup, std::abs(f - static_cast<double>(i) / n));
    }
    DkwBandResult result;
    result.ks_statistic = sup;
    result.band = std::sqrt(std::log(2.0 / alpha) / (2.0 * n));
    result.inside = sup <= result.band;
    return result;
}

}  // namespace cxorder
