#pragma once

// The tail-saturating extremal distribution: mass 1-p0 on [-a, -t0], mass p0
// on [a, ∞), nothing in between, atom-free. It saturates the two-sided tail
// constraint exactly and attains the stop-loss envelope at every u >= 0.

#include <cstdint>
#include <vector>

#include "cxorder/envelope.hpp"
#include "cxorder/random.hpp"

namespace cxorder {

class ExtremalDistribution {
public:
    explicit ExtremalDistribution(EnvelopeKind kind)
        : env_(kind), sol_(solve_envelope(env_)) {}
    ExtremalDistribution(TailEnvelope env, EnvelopeSolution sol)
        : env_(env), sol_(sol) {}

    const TailEnvelope& envelope() const { return env_; }
    const EnvelopeSolution& solution() const { return sol_; }

    // Four-branch CDF; continuous and nondecreasing on the whole line.
    Probability cdf(double x) const {
        detail::require_finite(x, "ExtremalDistribution::cdf");
        double a = sol_.knee;
        double t0 = env_.plateau_edge();
        double p0 = sol_.tail_at_knee;
        if (x <= -a) return Probability(0.0);
        if (x <= -t0) {
            double v = env_.value(-x) - p0;
            return Probability(v > 0.0 ? v : 0.0);
        }
        if (x < a) return Probability(1.0 - p0);
        return Probability(1.0 - env_.value(x));
    }

    // Generalized inverse of the CDF. At the plateau probability 1-p0 the
    // left edge -t0 is returned, keeping the map nondecreasing; the uniform
    // stream hits that value with probability zero.
    double quantile(Probability p) const {
        double pv = p.value();
        if (!(pv > 0.0 && pv < 1.0))
            throw std::domain_error("ExtremalDistribution::quantile: p must lie in (0,1)");
        double p0 = sol_.tail_at_knee;
        if (pv <= 1.0 - p0) {
            double y = pv + p0;
            return -env_.inverse(y < 1.0 ? y : 1.0);
        }
        return env_.inverse(1.0 - pv);
    }

    // n i.i.d. draws by inverse transform over a counter-based uniform
    // stream; bit-identical for identical (n, seed).
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
        CounterRng rng(seed);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = quantile(Probability(rng.uniform(i)));
        return out;
    }

    // E[(X - u)_+] for u >= 0: identical to the stop-loss envelope.
    double stop_loss(double u) const {
        if (!(u >= 0.0)) throw std::domain_error("ExtremalDistribution::stop_loss: u must be >= 0");
        return stop_loss_envelope(env_, sol_, u);
    }

    // E[(X - u)_+] on the whole line. For u < 0 the hinge identity
    // (x + v)_+ = (-x - v)_+ + x + v reduces the value to the stop-loss of
    // the mirrored law, which has its own closed-form branches.
    double stop_loss_extended(double u) const {
        if (u >= 0.0) return stop_loss(u);
        return mirror_stop_loss(-u) + (-u);
    }

    // Stop-loss of -X at v >= 0 (the mirrored law carries the 1-p0 mass).
    double mirror_stop_loss(double v) const {
        if (!(v >= 0.0))
            throw std::domain_error("ExtremalDistribution::mirror_stop_loss: v must be >= 0");
        double a = sol_.knee;
        double t0 = env_.plateau_edge();
        double p0 = sol_.tail_at_knee;
        if (v >= a) return 0.0;
        double above_plateau = (env_.tail_integral(v > t0 ? v : t0) - env_.tail_integral(a)) -
                               p0 * (a - (v > t0 ? v : t0));
        if (v >= t0) return above_plateau;
        return (1.0 - p0) * (t0 - v) + above_plateau;
    }

    // E[X] by closed-form branch integration: the positive part carries mass
    // knee*p0 + ∫_a^∞ s and the negative part total_mass minus that.
    double mean() const {
        double positive_part = sol_.knee * sol_.tail_at_knee + env_.tail_integral(sol_.knee);
        double negative_part = sol_.total_mass - positive_part;
        return positive_part - negative_part;
    }

    // E[X^2] = 2 ∫_0^∞ t s(t) dt, closed form per envelope kind.
    double second_moment() const {
        double t0 = env_.plateau_edge();
        if (env_.kind() == EnvelopeKind::SubGaussian)
            return t0 * t0 + 4.0 * std::exp(-0.5 * t0 * t0);
        return t0 * t0 + 4.0 * (t0 + 1.0) * std::exp(-t0);
    }

private:
    TailEnvelope env_;
    EnvelopeSolution sol_;
};

}  // namespace cxorder
