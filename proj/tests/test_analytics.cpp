#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "rigsim/analytics.hpp"
#include "rigsim/error.hpp"
#include "rigsim/experiments.hpp"
#include "rigsim/geometry.hpp"
#include "rigsim/stats.hpp"

using namespace rigsim;

namespace {

constexpr double kPi = std::numbers::pi;

// lambda * integral over the plane of (1 - exp(-mu f(|y|))), jittered-stratified
// samples uniform on the disk of radius R (equal-area rings times equal angles).
template <class F>
double disk_oracle(F f, double lambda, double mu, double R, int rings, int sectors, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double sum = 0.0;
    for (int i = 0; i < rings; ++i) {
        for (int j = 0; j < sectors; ++j) {
            const double r = R * std::sqrt((i + u(eng)) / rings);
            const double a = 2 * kPi * (j + u(eng)) / sectors;
            const double x = r * std::cos(a);
            const double y = r * std::sin(a);
            sum += -std::expm1(-mu * f(std::hypot(x, y)));
        }
    }
    return lambda * kPi * R * R * sum / (static_cast<double>(rings) * sectors);
}

}  // namespace

TEST_CASE("connection probability") {
    const auto b = self_convolve(KernelSpec::boolean(1.0, 2));
    CHECK(connection_probability(b, 3.0, 2.5) == 0.0);
    const auto tab = KernelSpec::tabulated({10.0}, {1.0}, 2);
    // A flat kernel has f(0) = area of the disk; scale mu so that mu f = ln 2.
    const auto ft = self_convolve(tab);
    CHECK(connection_probability(ft, std::log(2.0) / ft(0.0), 0.0) == doctest::Approx(0.5));
    const auto g = self_convolve(KernelSpec::normalized(KernelSpec::gaussian(1.0, 1.0, 2)));
    const double t = 1.5;
    CHECK(connection_probability(g, 1000.0 / g(t), t) >= 1.0 - std::exp(-999.0));
    CHECK(connection_probability(g, 0.0, t) == 0.0);
    for (double mu : {0.1, 1.0, 10.0}) {
        for (double s = 0.0; s < 6.0; s += 0.5) {
            const double p = connection_probability(g, mu, s);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            CHECK(p == doctest::Approx(1.0 - std::exp(-mu * g(s))));
        }
    }
}

TEST_CASE("expected degree basics") {
    const auto g = self_convolve(KernelSpec::normalized(KernelSpec::gaussian(1.0, 1.0, 2)));
    CHECK(expected_degree(g, 0.0, 2.0) == 0.0);
    CHECK(expected_degree(g, 2.0, 0.0) == 0.0);
    CHECK(expected_degree(g, 2.0, 2.0) <= 2.0 * 2.0 * 1.0);
    // Small mu: E[D] ~ lambda mu ||g||^2.
    CHECK(expected_degree(g, 1.0, 1e-6) == doctest::Approx(1e-6).epsilon(1e-5));
    CHECK_THROWS_AS(expected_degree(g, -1.0, 1.0), DomainError);
}

TEST_CASE("expected degree against a stratified disk oracle") {
    const double mu = 2.0;
    const double lambda = 2.0;
    const double s2 = 1.0;
    const auto g = self_convolve(KernelSpec::normalized(KernelSpec::gaussian(1.0, 1.0, 2)));
    auto f_closed = [&](double t) { return std::exp(-t * t / (4 * s2)) / (4 * kPi * s2); };
    const double quad = expected_degree(g, lambda, mu);
    const double oracle = disk_oracle(f_closed, lambda, mu, 14.0, 1000, 1000, 8);
    CHECK(std::abs(quad - oracle) / oracle < 1e-3);

    const auto b = self_convolve(KernelSpec::boolean(1.0, 2));
    auto lens = [](double t) {
        return t >= 2 ? 0.0 : 2 * std::acos(t / 2) - 0.5 * t * std::sqrt(4 - t * t);
    };
    const double qb = expected_degree(b, 1.0, 0.5);
    CHECK(std::abs(qb - disk_oracle(lens, 1.0, 0.5, 2.0, 1000, 1000, 9)) / qb < 1e-3);
}

TEST_CASE("expected degree in other dimensions") {
    // d = 1 Boolean: f(t) = (2 - t)_+, E[D] = 2 lambda int_0^2 (1 - exp(-mu (2 - t))) dt.
    const auto f = self_convolve(KernelSpec::boolean(1.0, 1));
    const double lambda = 1.5;
    const double mu = 0.8;
    const double exact = 2 * lambda * (2.0 - (1.0 - std::exp(-2 * mu)) / mu);
    CHECK(expected_degree(f, lambda, mu) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("degree bounds") {
    const auto b = self_convolve(KernelSpec::boolean(1.0, 2));
    const auto bb = degree_bounds(b, 1.5, 2.0);
    CHECK(bb.bracket_high == doctest::Approx(4 * kPi * 1.5).epsilon(1e-6));
    CHECK(bb.upper_simple == doctest::Approx(1.5 * 2.0 * kPi * kPi));
    const double ed = expected_degree(b, 1.5, 2.0);
    CHECK(bb.bracket_low <= ed);
    CHECK(ed <= bb.bracket_high);
    CHECK(ed <= bb.upper_simple);

    const auto g = self_convolve(KernelSpec::normalized(KernelSpec::gaussian(1.0, 1.0, 2)));
    CHECK(std::isinf(degree_bounds(g, 1.0, 1.0).bracket_high));
    double prev = 0.0;
    for (double mu : {20.0, 100.0, 1e3, 1e5, 1e8}) {
        const double low = degree_bounds(g, 1.0, mu).bracket_low;
        CHECK(low > prev);
        prev = low;
    }
    CHECK(prev > 100.0);
    // 1/mu >= f(0): r_{1/mu} = 0.
    CHECK(degree_bounds(g, 1.0, 1.0 / g(0.0)).bracket_low == 0.0);
    CHECK(degree_bounds(g, 1.0, 0.5 / g(0.0)).bracket_low == 0.0);
}

TEST_CASE("property: bounds hold across kernels and intensities") {
    std::vector<KernelSpec> specs{KernelSpec::boolean(1.0, 2), KernelSpec::boolean(0.7, 1, 0.5),
                                  KernelSpec::normalized(KernelSpec::gaussian(1.0, 1.0, 2)),
                                  KernelSpec::gaussian(0.5, 1.0, 3), KernelSpec::power_law(3.0, 1.0, 2),
                                  KernelSpec::tabulated({0.5, 1.0, 2.0}, {0.9, 0.5, 0.1}, 2)};
    for (const auto& spec : specs) {
        const auto f = self_convolve(spec);
        for (double lambda : {0.3, 2.0}) {
            for (double mu : {0.1, 1.0, 5.0, 40.0}) {
                const double ed = expected_degree(f, lambda, mu);
                const auto b = degree_bounds(f, lambda, mu);
                CHECK(ed <= b.upper_simple * (1 + 1e-9));
                CHECK(ed >= b.bracket_low * (1 - 1e-9));
                CHECK(ed <= b.bracket_high * (1 + 1e-9));
            }
        }
    }
}

TEST_CASE("offspring mean and isolation bound") {
    const auto a = offspring_mean(0.5, 0.5, 1.0);
    CHECK(a.value == 0.25);
    CHECK(a.subcritical);
    const auto b = offspring_mean(2.0, 2.0, 1.0);
    CHECK(b.value == 4.0);
    CHECK_FALSE(b.subcritical);
    CHECK(isolated_probability_bound(0.0, 1.0) == 1.0);
    CHECK(isolated_probability_bound(1.0, 1.0) == doctest::Approx(0.3679).epsilon(1e-4));
}

TEST_CASE("dominating compound Poisson sampler") {
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_dominating_degree(3.0, 0.0, 1.0, rng) == 0);
    }
    const double lambda = 1.5;
    const double mu = 2.0;
    const double norm = 1.0;
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += static_cast<double>(sample_dominating_degree(lambda, mu, norm, rng));
    }
    const double m = lambda * mu * norm * norm;
    const double var = mu * norm * (lambda * norm + lambda * norm * lambda * norm);
    CHECK(std::abs(sum / n - m) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("isolated fraction respects the bound") {
    ExperimentConfig c;
    c.kind = ExperimentKind::Degree;
    c.kernel = KernelSpec::normalized(KernelSpec::gaussian(1.0, 1.0, 2));
    c.torus = {2, false, 2000.0};
    c.lambda = 2.0;
    c.mu = 2.0;
    c.replicates = 10;
    c.seed = 31;
    const auto r = run_degree_experiment(c);
    const double n = static_cast<double>(r.histogram.node_count);
    const double p = r.isolated_fraction;
    CHECK(p >= isolated_probability_bound(2.0, 1.0) - 3.0 * std::sqrt(p * (1 - p) / n));
}
