#pragma once

#include <functional>
#include <span>

namespace rigsim::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;  ///< |difference| between the last two refinement levels
    bool converged = false;
    int levels = 0;
    long evaluations = 0;
};

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_level = 10;
    int min_level = 3;
};

using Integrand = std::function<double(double)>;

/// Double-exponential (tanh-sinh) rule on [a, b]: the trapezoid rule applied in
/// the transformed variable with dyadic step halving, stopped when two
/// successive levels differ by less than max(abs_tol, rel_tol*|I|).
/// Integrable endpoint singularities and kinks placed at the endpoints are
/// handled without loss of the geometric convergence rate; the integrand is
/// never evaluated at the endpoints themselves.
Result integrate(const Integrand& f, double a, double b, const Options& opt = {});

/// Integral over [a, inf) through x = a + scale*u/(1-u).
Result integrate_to_infinity(const Integrand& f, double a, double scale, const Options& opt = {});

/// Integral over [a, b] split at the given interior breakpoints (any order,
/// points outside (a, b) ignored). `b` may be +infinity. The tolerance is
/// shared evenly between the pieces.
Result integrate_piecewise(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                           const Options& opt = {}, double tail_scale = 1.0);

}  // namespace rigsim::quad
