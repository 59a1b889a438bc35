#pragma once

// Deterministic special-function and root-finding primitives shared by every
// other header. All functions are pure; results depend only on the arguments.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace cxorder {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
inline constexpr double kSqrt2Pi = 2.5066282746310005024;      // sqrt(2*pi)

struct bracket_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A probability value, checked to lie in [0, 1] on construction.
class Probability {
public:
    explicit Probability(double v) : value_(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("Probability outside [0,1]: " + std::to_string(v));
    }
    double value() const { return value_; }
    operator double() const { return value_; }

private:
    double value_;
};

namespace detail {
inline void require_finite(double x, const char* where) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(where) + ": non-finite argument");
}
}  // namespace detail

// Standard normal density.
inline double gaussian_pdf(double x) {
    detail::require_finite(x, "gaussian_pdf");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Upper tail of the standard normal, evaluated through erfc so the deep tail
// keeps full relative accuracy (no 1 - Phi cancellation).
inline Probability gaussian_tail(double x) {
    detail::require_finite(x, "gaussian_tail");
    return Probability(0.5 * std::erfc(x / std::numbers::sqrt2));
}

// Integral of exp(-t^2/2) from x to infinity; exact identity, no quadrature.
inline double gaussian_upper_integral(double x) {
    detail::require_finite(x, "gaussian_upper_integral");
    return kSqrt2Pi * gaussian_tail(x).value();
}

// Bracket for a monotone level crossing. The target function must pass
// through the level between lo and hi.
struct BracketedRoot {
    double lo;
    double hi;
    double tol = 1e-13;  // absolute, on the argument
    int max_iter = 200;
};

// Solves f(x) = level for a continuous nonincreasing f on the bracket.
// Bisection with secant refinement on alternating iterations; fully
// deterministic (identical bits across runs).
template <class F>
double solve_decreasing_level(F&& f, double level, const BracketedRoot& bracket) {
    if (!(bracket.lo < bracket.hi) || !(bracket.tol > 0.0) || bracket.max_iter <= 0)
        throw std::invalid_argument("solve_decreasing_level: malformed bracket");
    double lo = bracket.lo;
    double hi = bracket.hi;
    double flo = f(lo) - level;
    double fhi = f(hi) - level;
    if (flo < 0.0 || fhi > 0.0)
        throw bracket_error("solve_decreasing_level: bracket does not straddle level");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    for (int iter = 0; iter < bracket.max_iter; ++iter) {
        if (hi - lo <= bracket.tol) return 0.5 * (lo + hi);
        double x = 0.5 * (lo + hi);
        if (iter % 2 == 1 && flo > fhi) {
            double secant = lo + (hi - lo) * flo / (flo - fhi);
            double margin = 0.01 * (hi - lo);
            if (secant > lo + margin && secant < hi - margin) x = secant;
        }
        double fx = f(x) - level;
        if (fx == 0.0) return x;
        if (fx > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    throw convergence_error("solve_decreasing_level: max_iter exceeded");
}

// Inverse of gaussian_tail on (0, 1). Bisection to a coarse bracket, then
// Newton polish so |gaussian_tail(x) - p| is limited only by evaluation
// rounding (well under 1e-14 for non-extreme p).
inline double inverse_gaussian_tail(Probability p) {
    double pv = p.value();
    if (!(pv > 0.0 && pv < 1.0))
        throw std::domain_error("inverse_gaussian_tail: p must lie strictly in (0,1)");
    double x = solve_decreasing_level([](double t) { return gaussian_tail(t).value(); }, pv,
                                      BracketedRoot{-40.0, 40.0, 1e-9, 300});
    for (int i = 0; i < 3; ++i) {
        double density = gaussian_pdf(x);
        if (density < 1e-300) break;
        x += (gaussian_tail(x).value() - pv) / density;
    }
    return x;
}

}  // namespace cxorder
