#pragma once

#include <cstdint>

#include "rigsim/kernels.hpp"
#include "rigsim/rng.hpp"

namespace rigsim {

/// Probability that vertices at distance t share at least one group:
/// 1 - exp(-mu f(t)).
double connection_probability(const ConvolutionProfile& profile, double mu, double t);

/// Expected degree of the typical vertex,
///   lambda * S_{d-1} * int_0^inf (1 - exp(-mu f(t))) t^{d-1} dt,
/// by piecewise double-exponential quadrature. Throws ConvergenceError
/// (carrying the best estimate) if the tolerance is not met.
double expected_degree(const ConvolutionProfile& profile, double lambda, double mu, double tol = 1e-9);

struct DegreeBounds {
    double upper_simple = 0.0;  ///< lambda mu ||g||^2
    double bracket_low = 0.0;   ///< lambda l(r_{1/mu}) (1 - 1/e)
    double bracket_high = 0.0;  ///< lambda l(r_0); +inf without bounded support
};

DegreeBounds degree_bounds(const ConvolutionProfile& profile, double lambda, double mu);

struct OffspringMean {
    double value = 0.0;
    bool subcritical = false;  ///< value < 1: the origin component is a.s. finite
};

OffspringMean offspring_mean(double lambda, double mu, double norm_g);

/// One draw of sum_{i<=N} X_i with N ~ Poisson(mu ||g||) and X_i ~ Poisson(lambda ||g||),
/// the compound-Poisson variable that stochastically dominates the degree.
std::int64_t sample_dominating_degree(double lambda, double mu, double norm_g, Rng& rng);

/// exp(-mu ||g||): probability the typical vertex joins no group, a lower
/// bound on P(D = 0).
double isolated_probability_bound(double mu, double norm_g);

}  // namespace rigsim
