#pragma once

// Counter-based deterministic random streams. Every variate is a pure
// function of (seed, stream, index), so Monte Carlo results do not depend on
// thread scheduling or chunk order. Also holds the pairwise-summation
// accumulators used by every estimator.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace cxorder {

namespace detail {
// splitmix64 finalizer
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}  // namespace detail

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(detail::mix64(detail::mix64(seed + detail::kGolden) ^
                             (stream * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL))) {}

    std::uint64_t bits(std::uint64_t index) const {
        return detail::mix64(key_ + index * detail::kGolden);
    }

    // Uniform draw in the open interval (0, 1).
    double uniform(std::uint64_t index) const {
        return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes uniform slots 2*index, 2*index+1.
    double normal(std::uint64_t index) const {
        double u1 = uniform(2 * index);
        double u2 = uniform(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Standard Laplace (density e^{-|x|}/2) by inverse transform; one slot.
    double laplace(std::uint64_t index) const {
        double u = uniform(index);
        return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
    }

private:
    std::uint64_t key_;
};

// Pairwise (cascade) summation; deterministic and chunk-order independent.
template <class Fn>
double pairwise_transform_sum(std::span<const double> v, Fn&& fn) {
    if (v.size() <= 64) {
        double acc = 0.0;
        for (double x : v) acc += fn(x);
        return acc;
    }
    std::size_t half = v.size() / 2;
    return pairwise_transform_sum(v.first(half), fn) +
           pairwise_transform_sum(v.subspan(half), fn);
}

inline double pairwise_sum(std::span<const double> v) {
    return pairwise_transform_sum(v, [](double x) { return x; });
}

struct MeanEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;  // sample standard deviation / sqrt(n)
    std::size_t n = 0;
};

// Two-pass mean and standard error with pairwise accumulation.
template <class Fn>
MeanEstimate transformed_mean(std::span<const double> v, Fn&& fn) {
    MeanEstimate out;
    out.n = v.size();
    if (v.empty()) return out;
    out.mean = pairwise_transform_sum(v, fn) / static_cast<double>(v.size());
    if (v.size() < 2) return out;
    double m = out.mean;
    double ss = pairwise_transform_sum(v, [&](double x) {
        double d = fn(x) - m;
        return d * d;
    });
    double var = ss / static_cast<double>(v.size() - 1);
    out.stderr_mean = std::sqrt(var / static_cast<double>(v.size()));
    return out;
}

inline MeanEstimate sample_mean(std::span<const double> v) {
    return transformed_mean(v, [](double x) { return x; });
}

}  // namespace cxorder
