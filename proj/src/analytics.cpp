#include "rigsim/analytics.hpp"

#include <cmath>
#include <limits>

#include "rigsim/error.hpp"
#include "rigsim/geometry.hpp"
#include "rigsim/quadrature.hpp"

namespace rigsim {
namespace {

void check_intensity(double x, const char* what) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + " must be finite and >= 0");
    }
}

}  // namespace

double connection_probability(const ConvolutionProfile& profile, double mu, double t) {
    check_intensity(mu, "mu");
    return -std::expm1(-mu * profile(t));
}

double expected_degree(const ConvolutionProfile& profile, double lambda, double mu, double tol) {
    check_intensity(lambda, "lambda");
    check_intensity(mu, "mu");
    if (lambda == 0.0 || mu == 0.0) {
        return 0.0;
    }
    const int d = profile.dimension();
    auto integrand = [&](double t) { return -std::expm1(-mu * profile(t)) * std::pow(t, d - 1); };
    const double upper = profile.support_end();
    const auto cuts = profile.breakpoints();
    const double scale = profile.kernel().family() == KernelFamily::Gaussian ? 2.0 * profile.kernel().scale() : 1.0;
    // Relative stopping on the radial integral; its size is known up to a factor
    // from the simple upper bound.
    const double bound = mu * profile.norm_g() * profile.norm_g() / sphere_area(d);
    const quad::Options opt{tol * bound, tol, 12, 3};
    const auto r = quad::integrate_piecewise(integrand, 0.0, upper, cuts, opt, scale);
    const double value = lambda * sphere_area(d) * r.value;
    if (!r.converged) {
        throw ConvergenceError("expected_degree: quadrature did not converge", value,
                               lambda * sphere_area(d) * r.error);
    }
    return value;
}

DegreeBounds degree_bounds(const ConvolutionProfile& profile, double lambda, double mu) {
    check_intensity(lambda, "lambda");
    check_intensity(mu, "mu");
    const int d = profile.dimension();
    DegreeBounds b;
    b.upper_simple = lambda * mu * profile.norm_g() * profile.norm_g();
    const double r_low = mu > 0.0 ? radius_level(profile, 1.0 / mu) : 0.0;
    b.bracket_low = lambda * ball_volume(d, r_low) * (1.0 - std::exp(-1.0));
    const double r0 = profile.support_end();
    b.bracket_high = std::isfinite(r0) ? lambda * ball_volume(d, r0) : std::numeric_limits<double>::infinity();
    return b;
}

OffspringMean offspring_mean(double lambda, double mu, double norm_g) {
    check_intensity(lambda, "lambda");
    check_intensity(mu, "mu");
    check_intensity(norm_g, "norm_g");
    const double v = lambda * mu * norm_g * norm_g;
    return {v, v < 1.0};
}

std::int64_t sample_dominating_degree(double lambda, double mu, double norm_g, Rng& rng) {
    check_intensity(lambda, "lambda");
    check_intensity(mu, "mu");
    check_intensity(norm_g, "norm_g");
    const std::int64_t groups = rng.poisson(mu * norm_g);
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < groups; ++i) {
        total += rng.poisson(lambda * norm_g);
    }
    return total;
}

double isolated_probability_bound(double mu, double norm_g) {
    check_intensity(mu, "mu");
    check_intensity(norm_g, "norm_g");
    return std::exp(-mu * norm_g);
}

}  // namespace rigsim
