#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rigsim/error.hpp"

namespace rigsim {

enum class KernelFamily { Boolean, Gaussian, PowerLaw, Tabulated };

const char* to_string(KernelFamily family) noexcept;

/// amplitude * 1{t < radius}
struct BooleanParams {
    double radius = 1.0;
    double amplitude = 1.0;
};

/// amplitude * exp(-t^2 / (2 sigma^2))
struct GaussianParams {
    double sigma = 1.0;
    double amplitude = 1.0;
};

/// amplitude * min(1, t^(-d*alpha))
struct PowerLawParams {
    double alpha = 2.0;
    double amplitude = 1.0;
};

/// Linear interpolation between (radii[i], values[i]); values[0] below the
/// first radius, 0 beyond the last.
struct TabulatedParams {
    std::vector<double> radii;
    std::vector<double> values;
};

using KernelParams = std::variant<BooleanParams, GaussianParams, PowerLawParams, TabulatedParams>;

/// A radial, non-increasing connection function g : [0, inf) -> [0, 1] on R^d.
/// Construction validates the parameters; a PowerLaw with alpha <= 1 is
/// rejected because its norm diverges.
class KernelSpec {
public:
    KernelSpec(KernelParams params, int d);

    static KernelSpec boolean(double radius, int d, double amplitude = 1.0);
    static KernelSpec gaussian(double sigma, double amplitude, int d);
    static KernelSpec power_law(double alpha, double amplitude, int d);
    static KernelSpec tabulated(std::vector<double> radii, std::vector<double> values, int d);

    /// Same family and shape with the amplitude solved so that ||g|| = target.
    /// Throws ConfigError when the required amplitude exceeds 1.
    static KernelSpec normalized(const KernelSpec& shape, double target_norm = 1.0);

    KernelFamily family() const noexcept;
    int dimension() const noexcept { return d_; }
    const KernelParams& params() const noexcept { return params_; }

    double operator()(double t) const noexcept;

    /// Radii where g is not smooth (jumps, kinks, knots).
    std::vector<double> breakpoints() const;
    /// Length scale used for default grids and quadrature maps.
    double scale() const;
    bool bounded_support() const noexcept;

private:
    KernelParams params_;
    int d_;
};

double eval_kernel(const KernelSpec& spec, double t);

/// ||g|| = integral of g over R^d.
double kernel_norm(const KernelSpec& spec);

/// eps_tail = 0: the exact support radius s_max (infinite for unbounded kernels).
/// eps_tail > 0: smallest R whose exterior carries at most eps_tail * ||g||.
double support_radius(const KernelSpec& spec, double eps_tail);

struct ConvolveOptions {
    std::size_t n_radii = 1024;
    double t_max = 0.0;  ///< 0 selects default_profile_extent(spec)
    double tol = 1e-6;
    bool force_quadrature = false;
    int max_level = 9;
};

/// Radial self-convolution f = g * g.
class ConvolutionProfile {
public:
    enum class Kind { ClosedForm, Tabulated };

    /// Closed form; only valid for Gaussian (any d) and Boolean (d = 2).
    explicit ConvolutionProfile(KernelSpec kernel);
    /// Tabulated at equispaced radii 0 .. t_max; evaluated by monotone cubic
    /// Hermite interpolation.
    ConvolutionProfile(KernelSpec kernel, double t_max, std::vector<double> values, double max_abs_error);

    Kind kind() const noexcept { return kind_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }
    double norm_g() const noexcept { return norm_g_; }
    int dimension() const noexcept { return kernel_.dimension(); }

    double operator()(double t) const;
    double at_zero() const { return (*this)(0.0); }

    /// 2 * s_max, or +infinity.
    double support_end() const noexcept { return support_end_; }

    double t_max() const noexcept { return t_max_; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double> radii() const;
    double max_abs_error() const noexcept { return max_abs_error_; }

    /// Radii where f may fail to be smooth; used to split integrals.
    std::vector<double> breakpoints() const;

private:
    double eval_tabulated(double t) const;

    KernelSpec kernel_;
    Kind kind_;
    double norm_g_;
    double support_end_;
    double t_max_ = 0.0;
    std::vector<double> values_;
    std::vector<double> slopes_;  ///< monotone cubic Hermite derivatives at the knots
    double max_abs_error_ = 0.0;
};

/// Thrown by self_convolve when some radius misses the tolerance; carries the
/// best profile obtained.
class ProfileConvergenceError : public ConvergenceError {
public:
    ProfileConvergenceError(const std::string& what, ConvolutionProfile best);
    const ConvolutionProfile& best_profile() const noexcept { return *best_; }

private:
    std::shared_ptr<const ConvolutionProfile> best_;
};

/// Direct quadrature of f(t) at one radius; returns {value, error estimate, converged}.
struct ConvolutionPoint {
    double value;
    double error;
    bool converged;
};
ConvolutionPoint convolve_at(const KernelSpec& spec, double t, double tol, int max_level = 9);

/// Default table extent: 2 s_max for bounded kernels, otherwise a multiple
/// of the kernel scale large enough for the tail model to take over.
double default_profile_extent(const KernelSpec& spec);

ConvolutionProfile self_convolve(const KernelSpec& spec, const ConvolveOptions& options = {});

double eval_f(const ConvolutionProfile& profile, double t);

/// r_s = sup{ t : f(t) > s }, 0 when s >= f(0).
double radius_level(const ConvolutionProfile& profile, double s);

/// Area of the intersection of two disks of radius r at centre distance t.
double lens_area(double r, double t);

}  // namespace rigsim
