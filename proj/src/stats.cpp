#include "rigsim/stats.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "rigsim/error.hpp"

namespace rigsim::stats {

const char* to_string(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::Pass:
            return "pass";
        case Outcome::Fail:
            return "fail";
        case Outcome::Inconclusive:
            return "inconclusive";
    }
    return "unknown";
}

TestVerdict make_verdict(std::string name, double statistic, double lower, double upper, std::size_t n) {
    const bool ok = lower <= statistic && statistic <= upper;
    return {std::move(name), statistic, lower, upper, ok ? Outcome::Pass : Outcome::Fail, n};
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile: p must lie in (0, 1)");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double e[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
    }
    // Halley refinement against the exact CDF.
    const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double chi_square_quantile(double p, double dof) {
    if (!(dof > 0.0)) {
        throw DomainError("chi_square_quantile: degrees of freedom must be positive");
    }
    const double z = normal_quantile(p);
    const double h = 2.0 / (9.0 * dof);
    const double cube = 1.0 - h + z * std::sqrt(h);
    return cube <= 0.0 ? 0.0 : dof * cube * cube * cube;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double confidence) {
    if (trials < 1) {
        throw DomainError("wilson_interval: trials must be >= 1");
    }
    if (successes < 0 || successes > trials) {
        throw DomainError("wilson_interval: successes must lie in [0, trials]");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw DomainError("wilson_interval: confidence must lie in (0, 1)");
    }
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z = normal_quantile(0.5 + 0.5 * confidence);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    Interval iv{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) {
        iv.lo = 0.0;
    }
    if (successes == trials) {
        iv.hi = 1.0;
    }
    return iv;
}

MeanStderr mean_stderr(std::span<const double> samples) {
    if (samples.size() < 2) {
        throw DomainError("mean_stderr: need at least 2 samples");
    }
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) {
        mean += x;
    }
    mean /= n;
    double ss = 0.0;
    for (double x : samples) {
        ss += (x - mean) * (x - mean);
    }
    const double var = ss / (n - 1.0);
    return {mean, std::sqrt(var / n), var, samples.size()};
}

TestVerdict poisson_dispersion_test(std::span<const std::int64_t> samples, double alpha) {
    if (samples.size() < 30) {
        throw DomainError("poisson_dispersion_test: need at least 30 samples");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("poisson_dispersion_test: alpha must lie in (0, 1)");
    }
    std::vector<double> xs(samples.begin(), samples.end());
    const auto ms = mean_stderr(xs);
    const double dof = static_cast<double>(samples.size() - 1);
    const double lo = chi_square_quantile(0.5 * alpha, dof);
    const double hi = chi_square_quantile(1.0 - 0.5 * alpha, dof);
    if (ms.mean == 0.0) {
        return {"poisson_dispersion", 0.0, lo, hi, Outcome::Inconclusive, samples.size()};
    }
    const double stat = dof * ms.variance / ms.mean;
    return make_verdict("poisson_dispersion", stat, lo, hi, samples.size());
}

TestVerdict within_sigma(std::string name, double observed, double expected, double sigma, double k,
                         std::size_t n) {
    if (sigma <= 0.0) {
        // Degenerate law: only an exact match passes.
        const bool ok = observed == expected;
        return {std::move(name), observed - expected, 0.0, 0.0, ok ? Outcome::Pass : Outcome::Fail, n};
    }
    return make_verdict(std::move(name), (observed - expected) / sigma, -k, k, n);
}

}  // namespace rigsim::stats
