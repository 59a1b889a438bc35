#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cxorder/extremal.hpp"
#include "oracles.hpp"

using namespace cxorder;

TEST_CASE("extremal CDF branch values") {
    ExtremalDistribution dist(EnvelopeKind::SubGaussian);
    double a = dist.solution().knee;
    double t0 = dist.envelope().plateau_edge();
    double p0 = dist.solution().tail_at_knee;

    CHECK(dist.cdf(-a).value() == 0.0);
    CHECK(dist.cdf(-a - 1.0).value() == 0.0);
    CHECK(dist.cdf(0.0).value() == Catch::Approx(oracle::ref::cdf_at_zero_g).margin(1e-12));
    CHECK(dist.cdf(a).value() == Catch::Approx(1.0 - p0).margin(1e-15));
    CHECK(dist.cdf(-t0).value() == Catch::Approx(1.0 - p0).margin(1e-15));

    // continuity at the branch joints
    for (double x0 : {-a, -t0, a}) {
        double below = dist.cdf(x0 - 1e-9).value();
        double above = dist.cdf(x0 + 1e-9).value();
        CHECK(std::abs(above - below) < 1e-8);
    }
}

TEST_CASE("extremal CDF is nondecreasing") {
    for (EnvelopeKind kind : {EnvelopeKind::SubGaussian, EnvelopeKind::SubExponential}) {
        ExtremalDistribution dist(kind);
        double prev = 0.0;
        for (double x = -5.0; x <= 8.0; x += 0.01) {
            double cur = dist.cdf(x).value();
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("extremal quantile closed forms") {
    ExtremalDistribution dist(EnvelopeKind::SubGaussian);
    double t0 = dist.envelope().plateau_edge();
    double p0 = dist.solution().tail_at_knee;

    CHECK(dist.quantile(Probability(1.0 - p0)) == Catch::Approx(-t0).margin(1e-12));
    CHECK(dist.quantile(Probability(0.2)) ==
          Catch::Approx(oracle::ref::quantile_02_g).margin(1e-12));
    CHECK(dist.quantile(Probability(0.999)) ==
          Catch::Approx(oracle::ref::quantile_0999_g).margin(1e-12));
    CHECK_THROWS_AS(dist.quantile(Probability(0.0)), std::domain_error);
    CHECK_THROWS_AS(dist.quantile(Probability(1.0)), std::domain_error);

    double prev = dist.quantile(Probability(1e-6));
    for (double p = 0.001; p < 1.0; p += 0.0011) {
        double cur = dist.quantile(Probability(p));
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("quantile and CDF are consistent off the plateau") {
    for (EnvelopeKind kind : {EnvelopeKind::SubGaussian, EnvelopeKind::SubExponential}) {
        ExtremalDistribution dist(kind);
        double plateau = 1.0 - dist.solution().tail_at_knee;
        for (int i = 1; i < 1000; ++i) {
            double p = static_cast<double>(i) / 1000.0;
            if (std::abs(p - plateau) < 2e-3) continue;
            CHECK(dist.cdf(dist.quantile(Probability(p))).value() ==
                  Catch::Approx(p).margin(1e-10));
        }
    }
}

TEST_CASE("tail saturation is exact in closed form") {
    for (EnvelopeKind kind : {EnvelopeKind::SubGaussian, EnvelopeKind::SubExponential}) {
        ExtremalDistribution dist(kind);
        for (int i = 0; i < 200; ++i) {
            double t = 6.0 * static_cast<double>(i) / 199.0;
            double two_sided = (1.0 - dist.cdf(t).value()) + dist.cdf(-t).value();
            CHECK(std::abs(two_sided - dist.envelope().value(t)) <= 1e-12);
        }
    }
}

TEST_CASE("mean is zero by branch integration") {
    CHECK(std::abs(ExtremalDistribution(EnvelopeKind::SubGaussian).mean()) <= 1e-10);
    CHECK(std::abs(ExtremalDistribution(EnvelopeKind::SubExponential).mean()) <= 1e-10);
}

TEST_CASE("second moment closed form matches quadrature") {
    ExtremalDistribution g(EnvelopeKind::SubGaussian);
    CHECK(g.second_moment() == Catch::Approx(oracle::ref::second_moment_g).margin(1e-13));
    ExtremalDistribution e(EnvelopeKind::SubExponential);
    CHECK(e.second_moment() == Catch::Approx(oracle::ref::second_moment_e).margin(1e-13));

    for (const ExtremalDistribution* dist : {&g, &e}) {
        double t0 = dist->envelope().plateau_edge();
        auto integrand = [&](double t) { return 2.0 * t * dist->envelope().value(t); };
        double quad = oracle::adaptive_quadrature(integrand, 0.0, t0, 1e-12) +
                      oracle::adaptive_quadrature(integrand, t0, 60.0, 1e-12);
        CHECK(dist->second_moment() == Catch::Approx(quad).margin(1e-9));
    }
}

TEST_CASE("sampling is deterministic and respects the support gap") {
    ExtremalDistribution dist(EnvelopeKind::SubGaussian);
    auto first = dist.sample(5000, 42);
    auto second = dist.sample(5000, 42);
    CHECK(first == second);
    CHECK(dist.sample(0, 1).empty());

    double a = dist.solution().knee;
    double t0 = dist.envelope().plateau_edge();
    for (double x : first) {
        bool in_gap = x > -t0 && x < a;
        CHECK_FALSE(in_gap);
    }
}

TEST_CASE("large sample mean and support saturation") {
    ExtremalDistribution dist(EnvelopeKind::SubGaussian);
    auto samples = dist.sample(1000000, 1);
    MeanEstimate mean = sample_mean(samples);
    CHECK(std::abs(mean.mean) <= 3.0 * mean.stderr_mean);

    double t0 = dist.envelope().plateau_edge();
    std::size_t beyond = 0;
    for (double x : samples)
        if (std::abs(x) >= t0) ++beyond;
    CHECK(beyond == samples.size());  // P(|X| > t) = 1 below the plateau edge
}

TEST_CASE("analytic stop-loss equals the envelope") {
    ExtremalDistribution dist(EnvelopeKind::SubGaussian);
    const EnvelopeSolution& sol = dist.solution();
    CHECK(dist.stop_loss(0.0) == sol.half_mass);
    CHECK(dist.stop_loss(sol.knee) ==
          Catch::Approx(oracle::ref::envelope_at_knee_g).margin(1e-12));
    for (double u : {0.1, 0.7, 1.5, 2.5, 6.0})
        CHECK(dist.stop_loss(u) == stop_loss_envelope(dist.envelope(), sol, u));
    CHECK_THROWS_AS(dist.stop_loss(-1.0), std::domain_error);
}

TEST_CASE("Monte Carlo hinge means match the analytic stop-loss") {
    ExtremalDistribution dist(EnvelopeKind::SubGaussian);
    auto samples = dist.sample(1000000, 1);
    for (double u : {0.0, 1.0, dist.solution().knee, 3.0}) {
        MeanEstimate est = transformed_mean(
            samples, [u](double x) { return x > u ? x - u : 0.0; });
        CHECK(std::abs(est.mean - dist.stop_loss(u)) <= 4.0 * est.stderr_mean);
    }
}

TEST_CASE("extended stop-loss covers negative thresholds") {
    ExtremalDistribution dist(EnvelopeKind::SubGaussian);
    auto samples = dist.sample(1000000, 7);
    for (double u : {-2.5, -1.0, -0.3}) {
        MeanEstimate est = transformed_mean(
            samples, [u](double x) { return x > u ? x - u : 0.0; });
        CHECK(std::abs(est.mean - dist.stop_loss_extended(u)) <= 4.0 * est.stderr_mean);
    }
    // continuity across 0 and agreement with the nonnegative branch
    CHECK(dist.stop_loss_extended(0.0) == dist.stop_loss(0.0));
    CHECK(std::abs(dist.stop_loss_extended(-1e-9) - dist.stop_loss(0.0)) < 1e-8);
}

TEST_CASE("empirical CDF stays inside the DKW band") {
    for (EnvelopeKind kind : {EnvelopeKind::SubGaussian, EnvelopeKind::SubExponential}) {
        ExtremalDistribution dist(kind);
        auto samples = dist.sample(1000000, 3);
        std::vector<double> sorted(samples);
        std::sort(sorted.begin(), sorted.end());
        double n = static_cast<double>(sorted.size());
        double sup = 0.0;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            double f = dist.cdf(sorted[i]).value();
            sup = std::max(sup, std::abs(f - static_cast<double>(i + 1) / n));
            sup = std::max(sup, std::abs(f - static_cast<double>(i) / n));
        }
        double band = std::sqrt(std::log(2.0 / 1e-6) / (2.0 * n));
        CHECK(sup <= band);
    }
}
