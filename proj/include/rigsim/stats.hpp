#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace rigsim::stats {

enum class Outcome { Pass, Fail, Inconclusive };

const char* to_string(Outcome outcome) noexcept;

/// Result of a pre-registered check: pass iff lower <= statistic <= upper.
struct TestVerdict {
    std::string name;
    double statistic = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    Outcome outcome = Outcome::Inconclusive;
    std::size_t sample_size = 0;

    bool passed() const noexcept { return outcome == Outcome::Pass; }
};

/// Builds a verdict from a statistic and its acceptance band.
TestVerdict make_verdict(std::string name, double statistic, double lower, double upper, std::size_t n);

/// Standard normal quantile (Acklam's rational approximation, one Halley step).
double normal_quantile(double p);

/// Chi-square quantile by the Wilson-Hilferty cube approximation.
double chi_square_quantile(double p, double dof);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double confidence);

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    double variance = 0.0;  ///< unbiased sample variance
    std::size_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> samples);

/// Index-of-dispersion test: (n-1) s^2 / mean against the two-sided
/// chi-square(n-1) band at level alpha. Requires >= 30 samples; a zero mean
/// gives an inconclusive verdict.
TestVerdict poisson_dispersion_test(std::span<const std::int64_t> samples, double alpha);

/// |observed - expected| <= k * sigma, reported as the standardized deviation.
TestVerdict within_sigma(std::string name, double observed, double expected, double sigma, double k,
                         std::size_t n);

}  // namespace rigsim::stats
