#pragma once

// Two-sided tail envelopes s(t) and the sharp stop-loss envelope built from
// them: a plateau at 1 up to t0, a strictly decreasing integrable tail
// beyond. Both supported envelopes are closed-form objects (value, inverse
// and tail integral are all analytic), so no quadrature appears anywhere.

#include <cmath>
#include <stdexcept>

#include "cxorder/numerics.hpp"

namespace cxorder {

enum class EnvelopeKind { SubGaussian, SubExponential };

inline const char* to_string(EnvelopeKind kind) {
    return kind == EnvelopeKind::SubGaussian ? "gaussian" : "exponential";
}

class TailEnvelope {
public:
    explicit TailEnvelope(EnvelopeKind kind)
        : kind_(kind),
          t0_(kind == EnvelopeKind::SubGaussian ? std::sqrt(2.0 * std::log(2.0))
                                                : std::log(2.0)) {}

    EnvelopeKind kind() const { return kind_; }

    // Edge of the plateau where s first descends from 1.
    double plateau_edge() const { return t0_; }

    // s(t) for t >= 0.
    double value(double t) const {
        if (!(t >= 0.0)) throw std::domain_error("TailEnvelope::value: t must be >= 0");
        double tail = kind_ == EnvelopeKind::SubGaussian ? 2.0 * std::exp(-0.5 * t * t)
                                                         : 2.0 * std::exp(-t);
        return tail < 1.0 ? tail : 1.0;
    }

    // Inverse of s on (0, 1]; maps 1 to the plateau edge.
    double inverse(double y) const {
        if (!(y > 0.0 && y <= 1.0))
            throw std::domain_error("TailEnvelope::inverse: y must lie in (0,1]");
        return kind_ == EnvelopeKind::SubGaussian ? std::sqrt(2.0 * std::log(2.0 / y))
                                                  : std::log(2.0 / y);
    }

    // Closed form of  ∫_x^∞ s(t) dt  for x >= 0.
    double tail_integral(double x) const {
        if (!(x >= 0.0)) throw std::domain_error("TailEnvelope::tail_integral: x must be >= 0");
        if (kind_ == EnvelopeKind::SubGaussian) {
            if (x >= t0_) return 2.0 * gaussian_upper_integral(x);
            return (t0_ - x) + 2.0 * gaussian_upper_integral(t0_);
        }
        if (x >= t0_) return 2.0 * std::exp(-x);
        return (t0_ - x) + 2.0 * std::exp(-t0_);
    }

private:
    EnvelopeKind kind_;
    double t0_;
};

inline TailEnvelope make_envelope(EnvelopeKind kind) { return TailEnvelope(kind); }

// The derived envelope quantities: total mass, half mass, the knee
// where the linear piece hands off to the tail integral, and the envelope
// value there. Computed once and reused everywhere downstream.
struct EnvelopeSolution {
    double total_mass;    // ∫_0^∞ s
    double half_mass;     // total_mass / 2
    double knee;          // unique a > t0 with knee_function(a) = half_mass
    double tail_at_knee;  // s(knee), in (0,1)
};

// Total and half mass of the envelope.
inline std::pair<double, double> mass_constants(const TailEnvelope& env) {
    double total = env.tail_integral(0.0);
    return {total, 0.5 * total};
}

// x s(x) plus the tail integral beyond x, defined on [t0, ∞); strictly
// decreasing from the total mass down to 0.
inline double knee_function(const TailEnvelope& env, double x) {
    if (!(x >= env.plateau_edge()))
        throw std::domain_error("knee_function: x must be >= plateau edge");
    return x * env.value(x) + env.tail_integral(x);
}

inline EnvelopeSolution solve_envelope(const TailEnvelope& env) {
    auto [total, half] = mass_constants(env);
    BracketedRoot bracket{env.plateau_edge() + 1e-9, 50.0};
    double knee =
        solve_decreasing_level([&](double x) { return knee_function(env, x); }, half, bracket);
    return EnvelopeSolution{total, half, knee, env.value(knee)};
}

// The sharp stop-loss envelope: linear down to the knee, then the
// plain tail integral. The tail piece is evaluated directly rather than as
// half_mass minus accumulated mass, which would cancel badly for large u.
inline double stop_loss_envelope(const TailEnvelope& env, const EnvelopeSolution& sol, double u) {
    if (!(u >= 0.0)) throw std::domain_error("stop_loss_envelope: u must be >= 0");
    if (u <= sol.knee) return sol.half_mass - sol.tail_at_knee * u;
    return env.tail_integral(u);
}

}  // namespace cxorder
