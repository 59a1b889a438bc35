#pragma once

// Sharp comparison constants for the two envelope families, the comparator
// stop-loss transforms (scaled Gaussian, scaled Laplace), grid dominance
// reports and the analytic sharpness witness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cxorder/envelope.hpp"

namespace cxorder {

// E[(cG - u)_+] = c phi(u/c) - u Phibar(u/c); convex on the whole line with
// derivative -Phibar(u/c).
inline double gaussian_stop_loss(double c, double u) {
    if (!(c > 0.0)) throw std::domain_error("gaussian_stop_loss: c must be > 0");
    detail::require_finite(u, "gaussian_stop_loss");
    double x = u / c;
    return c * gaussian_pdf(x) - u * gaussian_tail(x).value();
}

// E[(cL - u)_+] = (c/2) e^{-u/c} for u >= 0, L standard Laplace.
inline double laplace_stop_loss(double c, double u) {
    if (!(c > 0.0)) throw std::domain_error("laplace_stop_loss: c must be > 0");
    if (!(u >= 0.0)) throw std::domain_error("laplace_stop_loss: formula requires u >= 0");
    return 0.5 * c * std::exp(-u / c);
}

// Sharp Gaussian comparison: the scale is half_mass / phi(tail_quantile)
// where the tail quantile solves Phibar(z) = tail_at_knee.
struct GaussianComparison {
    EnvelopeSolution sol;
    double tail_quantile;        // z
    double sharp_scale;          // c0
    double sharp_scale_squared;  // c0^2, the repository constant
};

// Sharp Laplace comparison: tail_quantile is the standard-Laplace upper
// quantile at tail_at_knee, i.e. log(1/(2 p)); the scale is
// half_mass / (p (1 + tail_quantile)).
struct ExponentialComparison {
    EnvelopeSolution sol;
    double tail_quantile;  // w_E
    double sharp_scale;    // c_E
};

inline GaussianComparison compute_gaussian_comparison() {
    TailEnvelope env(EnvelopeKind::SubGaussian);
    EnvelopeSolution sol = solve_envelope(env);
    double z = inverse_gaussian_tail(Probability(sol.tail_at_knee));
    double c0 = sol.half_mass / gaussian_pdf(z);
    return GaussianComparison{sol, z, c0, c0 * c0};
}

inline ExponentialComparison compute_exponential_comparison() {
    TailEnvelope env(EnvelopeKind::SubExponential);
    EnvelopeSolution sol = solve_envelope(env);
    double w = std::log(1.0 / (2.0 * sol.tail_at_knee));
    double c = sol.half_mass / (sol.tail_at_knee * (1.0 + w));
    return ExponentialComparison{sol, w, c};
}

// Sharp comparator scale for a kind, as a plain number.
inline double sharp_scale(EnvelopeKind kind) {
    return kind == EnvelopeKind::SubGaussian ? compute_gaussian_comparison().sharp_scale
                                             : compute_exponential_comparison().sharp_scale;
}

// Mixed linear/log evaluation grid for dominance checks: uniform steps up to
// the cutoff (tangency point and knee both live below 3), log-spaced beyond.
struct DominanceGrid {
    double u_max = 40.0;
    double linear_cutoff = 10.0;
    double linear_step = 5e-4;
    std::size_t log_points = 500;
};

struct DominanceReport {
    std::vector<double> grid;
    std::vector<double> gaps;  // comparator stop-loss minus envelope
    double min_gap;
    double argmin_u;
    double tangency_u;  // scale times the comparator tail quantile
};

inline DominanceReport dominance_report(EnvelopeKind kind, double c, const DominanceGrid& grid_cfg) {
    if (!(c > 0.0)) throw std::domain_error("dominance_report: c must be > 0");
    if (!(grid_cfg.u_max >= 40.0) || !(grid_cfg.linear_step > 0.0) ||
        !(grid_cfg.linear_cutoff > 0.0 && grid_cfg.linear_cutoff < grid_cfg.u_max) || grid_cfg.log_points < 2)
        throw std::invalid_argument("dominance_report: grid must cover [0, u_max] with u_max >= 40");

    TailEnvelope env(kind);
    EnvelopeSolution sol = solve_envelope(env);
    double quantile = kind == EnvelopeKind::SubGaussian
                          ? inverse_gaussian_tail(Probability(sol.tail_at_knee))
                          : std::log(1.0 / (2.0 * sol.tail_at_knee));

    DominanceReport report;
    report.tangency_u = c * quantile;

    auto n_linear = static_cast<std::size_t>(grid_cfg.linear_cutoff / grid_cfg.linear_step);
    report.grid.reserve(n_linear + grid_cfg.log_points + 2);
    for (std::size_t i = 0; i <= n_linear; ++i)
        report.grid.push_back(static_cast<double>(i) * grid_cfg.linear_step);
    double log_lo = std::log(grid_cfg.linear_cutoff);
    double log_hi = std::log(grid_cfg.u_max);
    for (std::size_t i = 1; i <= grid_cfg.log_points; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(grid_cfg.log_points);
        report.grid.push_back(std::exp(log_lo + t * (log_hi - log_lo)));
    }
    report.grid.push_back(report.tangency_u);
    std::sort(report.grid.begin(), report.grid.end());

    report.gaps.resize(report.grid.size());
    report.min_gap = std::numeric_limits<double>::infinity();
    report.argmin_u = 0.0;
    for (std::size_t i = 0; i < report.grid.size(); ++i) {
        double u = report.grid[i];
        double comparator = kind == EnvelopeKind::SubGaussian ? gaussian_stop_loss(c, u)
                                                              : laplace_stop_loss(c, u);
        double gap = comparator - stop_loss_envelope(env, sol, u);
        report.gaps[i] = gap;
        if (gap < report.min_gap) {
            report.min_gap = gap;
            report.argmin_u = u;
        }
    }
    return report;
}

// The ratio R(u) of the monotone-ratio principle. Gaussian kind:
// Phibar(u/c) / (2 e^{-u^2/2}) on [knee, ∞), evaluated in log space so the
// result stays finite until it genuinely overflows; exponential kind:
// (1/4) e^{u (1 - 1/c)} on [0, ∞).
inline double monotone_ratio(EnvelopeKind kind, double c, double u) {
    if (!(c > 0.0)) throw std::domain_error("monotone_ratio: c must be > 0");
    if (kind == EnvelopeKind::SubExponential) {
        if (!(u >= 0.0)) throw std::domain_error("monotone_ratio: u must be >= 0");
        return 0.25 * std::exp(u * (1.0 - 1.0 / c));
    }
    EnvelopeSolution sol = solve_envelope(TailEnvelope(kind));
    if (!(u >= sol.knee))
        throw std::domain_error("monotone_ratio: Gaussian ratio is defined for u >= knee");
    double log_tail = std::log(gaussian_tail(u / c).value());
    return std::exp(log_tail + 0.5 * u * u - std::log(2.0));
}

// Analytic lower bound on the stop-loss gap at the would-be tangency point:
// half_mass - c phi(z) (Gaussian) or half_mass - c p (1 + w) (exponential).
// Affine and strictly decreasing in c; zero exactly at the sharp scale, so a
// positive value certifies that convex domination fails for this c.
inline double sharpness_witness(EnvelopeKind kind, double c) {
    if (!(c > 0.0)) throw std::domain_error("sharpness_witness: c must be > 0");
    if (kind == EnvelopeKind::SubGaussian) {
        GaussianComparison g = compute_gaussian_comparison();
        return g.sol.half_mass - c * gaussian_pdf(g.tail_quantile);
    }
    ExponentialComparison e = compute_exponential_comparison();
    return e.sol.half_mass - c * e.sol.tail_at_knee * (1.0 + e.tail_quantile);
}

}  // namespace cxorder
