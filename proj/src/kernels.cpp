#include "rigsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "rigsim/geometry.hpp"
#include "rigsim/quadrature.hpp"

namespace rigsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_amplitude(double a) {
    if (!(a > 0.0 && a <= 1.0)) {
        throw ConfigError("kernel amplitude must lie in (0, 1]");
    }
}

void validate(const KernelParams& params, int d) {
    if (d < 1) {
        throw ConfigError("kernel dimension must be >= 1");
    }
    std::visit(overloaded{
                   [](const BooleanParams& p) {
                       if (!(p.radius > 0.0) || !std::isfinite(p.radius)) {
                           throw ConfigError("Boolean kernel radius must be positive");
                       }
                       check_amplitude(p.amplitude);
                   },
                   [](const GaussianParams& p) {
                       if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
                           throw ConfigError("Gaussian kernel sigma must be positive");
                       }
                       check_amplitude(p.amplitude);
                   },
                   [](const PowerLawParams& p) {
                       if (!(p.alpha > 1.0)) {
                           throw DivergentNormError("power-law kernel needs alpha > 1 for a finite norm");
                       }
                       check_amplitude(p.amplitude);
                   },
                   [](const TabulatedParams& p) {
                       if (p.radii.empty() || p.radii.size() != p.values.size()) {
                           throw ConfigError("tabulated kernel needs equally many radii and values");
                       }
                       if (p.radii.front() < 0.0) {
                           throw ConfigError("tabulated kernel radii must be >= 0");
                       }
                       for (std::size_t i = 0; i < p.radii.size(); ++i) {
                           if (!(p.values[i] >= 0.0 && p.values[i] <= 1.0)) {
                               throw ConfigError("tabulated kernel values must be probabilities");
                           }
                           if (i > 0 && !(p.radii[i] > p.radii[i - 1])) {
                               throw ConfigError("tabulated kernel radii must be strictly ascending");
                           }
                           if (i > 0 && p.values[i] > p.values[i - 1]) {
                               throw ConfigError("tabulated kernel values must be non-increasing");
                           }
                       }
                   },
               },
               params);
}

double tabulated_eval(const TabulatedParams& p, double t) {
    if (t <= p.radii.front()) {
        return p.values.front();
    }
    if (t > p.radii.back()) {
        return 0.0;
    }
    const auto it = std::lower_bound(p.radii.begin(), p.radii.end(), t);
    const auto k = static_cast<std::size_t>(it - p.radii.begin());
    const double r0 = p.radii[k - 1];
    const double r1 = p.radii[k];
    const double w = (t - r0) / (r1 - r0);
    return p.values[k - 1] + w * (p.values[k] - p.values[k - 1]);
}

// Mass of g outside radius R, by radial quadrature.
double tabulated_tail(const KernelSpec& spec, const TabulatedParams& p, double R) {
    const int d = spec.dimension();
    auto integrand = [&](double t) { return spec(t) * std::pow(t, d - 1); };
    const double end = p.radii.back();
    if (R >= end) {
        return 0.0;
    }
    auto r = quad::integrate_piecewise(integrand, R, end, p.radii, {1e-14, 1e-12, 12, 2});
    return sphere_area(d) * r.value;
}

}  // namespace

const char* to_string(KernelFamily family) noexcept {
    switch (family) {
        case KernelFamily::Boolean:
            return "boolean";
        case KernelFamily::Gaussian:
            return "gaussian";
        case KernelFamily::PowerLaw:
            return "power_law";
        case KernelFamily::Tabulated:
            return "tabulated";
    }
    return "unknown";
}

KernelSpec::KernelSpec(KernelParams params, int d) : params_(std::move(params)), d_(d) { validate(params_, d_); }

KernelSpec KernelSpec::boolean(double radius, int d, double amplitude) {
    return KernelSpec(BooleanParams{radius, amplitude}, d);
}

KernelSpec KernelSpec::gaussian(double sigma, double amplitude, int d) {
    return KernelSpec(GaussianParams{sigma, amplitude}, d);
}

KernelSpec KernelSpec::power_law(double alpha, double amplitude, int d) {
    return KernelSpec(PowerLawParams{alpha, amplitude}, d);
}

KernelSpec KernelSpec::tabulated(std::vector<double> radii, std::vector<double> values, int d) {
    return KernelSpec(TabulatedParams{std::move(radii), std::move(values)}, d);
}

KernelSpec KernelSpec::normalized(const KernelSpec& shape, double target_norm) {
    if (!(target_norm > 0.0) || !std::isfinite(target_norm)) {
        throw ConfigError("normalization target must be positive and finite");
    }
    const double factor = target_norm / kernel_norm(shape);
    auto scaled = std::visit(overloaded{
                                 [&](BooleanParams p) -> KernelParams {
                                     p.amplitude *= factor;
                                     return p;
                                 },
                                 [&](GaussianParams p) -> KernelParams {
                                     p.amplitude *= factor;
                                     return p;
                                 },
                                 [&](PowerLawParams p) -> KernelParams {
                                     p.amplitude *= factor;
                                     return p;
                                 },
                                 [&](TabulatedParams p) -> KernelParams {
                                     for (double& v : p.values) {
                                         v *= factor;
                                     }
                                     return p;
                                 },
                             },
                             shape.params_);
    try {
        return KernelSpec(std::move(scaled), shape.d_);
    } catch (const ConfigError&) {
        throw ConfigError("normalizing to the requested norm needs values above 1");
    }
}

KernelFamily KernelSpec::family() const noexcept { return static_cast<KernelFamily>(params_.index()); }

double KernelSpec::operator()(double t) const noexcept {
    return std::visit(overloaded{
                          [&](const BooleanParams& p) { return t < p.radius ? p.amplitude : 0.0; },
                          [&](const GaussianParams& p) {
                              return p.amplitude * std::exp(-t * t / (2.0 * p.sigma * p.sigma));
                          },
                          [&](const PowerLawParams& p) {
                              return t <= 1.0 ? p.amplitude : p.amplitude * std::pow(t, -d_ * p.alpha);
                          },
                          [&](const TabulatedParams& p) { return tabulated_eval(p, t); },
                      },
                      params_);
}

std::vector<double> KernelSpec::breakpoints() const {
    return std::visit(overloaded{
                          [](const BooleanParams& p) { return std::vector<double>{p.radius}; },
                          [](const GaussianParams&) { return std::vector<double>{}; },
                          [](const PowerLawParams&) { return std::vector<double>{1.0}; },
                          [](const TabulatedParams& p) { return p.radii; },
                      },
                      params_);
}

double KernelSpec::scale() const {
    return std::visit(overloaded{
                          [](const BooleanParams& p) { return p.radius; },
                          [](const GaussianParams& p) { return p.sigma; },
                          [this](const PowerLawParams&) { return support_radius(*this, 1e-2); },
                          [](const TabulatedParams& p) { return std::max(p.radii.back(), 1e-12); },
                      },
                      params_);
}

bool KernelSpec::bounded_support() const noexcept {
    const auto f = family();
    return f == KernelFamily::Boolean || f == KernelFamily::Tabulated;
}

double eval_kernel(const KernelSpec& spec, double t) {
    if (!(t >= 0.0)) {
        throw DomainError("eval_kernel: radial distance must be >= 0");
    }
    return spec(t);
}

double kernel_norm(const KernelSpec& spec) {
    const int d = spec.dimension();
    const double norm = std::visit(
        overloaded{
            [&](const BooleanParams& p) { return p.amplitude * ball_volume(d, p.radius); },
            [&](const GaussianParams& p) {
                return p.amplitude * std::pow(2.0 * std::numbers::pi * p.sigma * p.sigma, 0.5 * d);
            },
            [&](const PowerLawParams& p) { return p.amplitude * ball_volume(d, 1.0) * p.alpha / (p.alpha - 1.0); },
            [&](const TabulatedParams& p) {
                return p.values.front() * ball_volume(d, p.radii.front()) + tabulated_tail(spec, p, p.radii.front());
            },
        },
        spec.params());
    if (!(norm > 0.0)) {
        throw ConfigError("kernel norm must be positive");
    }
    if (!std::isfinite(norm)) {
        throw DivergentNormError("kernel norm is infinite");
    }
    return norm;
}

double support_radius(const KernelSpec& spec, double eps_tail) {
    if (!(eps_tail >= 0.0 && eps_tail < 1.0)) {
        throw DomainError("support_radius: eps_tail must lie in [0, 1)");
    }
    const int d = spec.dimension();
    if (eps_tail == 0.0) {
        return std::visit(overloaded{
                              [](const BooleanParams& p) { return p.radius; },
                              [](const GaussianParams&) { return kInf; },
                              [](const PowerLawParams&) { return kInf; },
                              [](const TabulatedParams& p) {
                                  std::size_t last = p.values.size();
                                  while (last > 0 && p.values[last - 1] <= 0.0) {
                                      --last;
                                  }
                                  if (last == 0) {
                                      return 0.0;
                                  }
                                  return last == p.values.size() ? p.radii.back() : p.radii[last];
                              },
                          },
                          spec.params());
    }
    return std::visit(
        overloaded{
            // tail fraction (r^d - R^d) / r^d
            [&](const BooleanParams& p) { return p.radius * std::pow(1.0 - eps_tail, 1.0 / d); },
            // tail fraction Q(d/2, R^2 / 2 sigma^2)
            [&](const GaussianParams& p) {
                return p.sigma * std::sqrt(2.0 * boost::math::gamma_q_inv(0.5 * d, eps_tail));
            },
            // tail fraction R^{-d(alpha-1)} / alpha for R >= 1, ((1-R^d)(alpha-1) + 1) / alpha below
            [&](const PowerLawParams& p) {
                const double a = p.alpha;
                if (a * eps_tail <= 1.0) {
                    return std::pow(a * eps_tail, -1.0 / (d * (a - 1.0)));
                }
                return std::pow(1.0 - (a * eps_tail - 1.0) / (a - 1.0), 1.0 / d);
            },
            [&](const TabulatedParams& p) {
                const double target = eps_tail * kernel_norm(spec);
                double lo = 0.0;
                double hi = support_radius(spec, 0.0);
                for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (tabulated_tail(spec, p, mid) <= target) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return hi;
            },
        },
        spec.params());
}

double lens_area(double r, double t) {
    if (t >= 2.0 * r) {
        return 0.0;
    }
    const double h = t / (2.0 * r);
    return 2.0 * r * r * std::acos(h) - 0.5 * t * std::sqrt(4.0 * r * r - t * t);
}

// ---------------------------------------------------------------------------
// Self-convolution by quadrature.
//
// d = 1:  f(t) = 2 * int_{t/2}^inf g(|x|) g(|x - t|) dx
// d >= 2: f(t) = S_{d-2} int_0^inf g(rho) rho^{d-1}
//                  int_0^pi g(|rho e - t e_1|) sin^{d-2}(phi) dphi drho
// with both integrals split wherever a distance crosses a kernel breakpoint,
// so every piece is smooth and the tanh-sinh rule converges geometrically.

ConvolutionPoint convolve_at(const KernelSpec& spec, double t, double tol, int max_level) {
    if (!(t >= 0.0)) {
        throw DomainError("convolve_at: radius must be >= 0");
    }
    const int d = spec.dimension();
    const double norm = kernel_norm(spec);
    const std::vector<double> knots = spec.breakpoints();
    const double s_max = support_radius(spec, 0.0);
    const double tail_scale = spec.family() == KernelFamily::Gaussian ? spec.scale() : 1.0;

    if (d == 1) {
        std::vector<double> cuts{t};
        for (double b : knots) {
            cuts.insert(cuts.end(), {b, t + b, std::abs(t - b)});
        }
        auto integrand = [&](double x) { return spec(std::abs(x)) * spec(std::abs(x - t)); };
        const double upper = std::isfinite(s_max) ? s_max : kInf;
        if (upper <= 0.5 * t) {
            return {0.0, 0.0, true};
        }
        auto r = quad::integrate_piecewise(integrand, 0.5 * t, upper, cuts, {0.5 * tol, 0.0, max_level, 3},
                                           tail_scale);
        return {2.0 * r.value, 2.0 * r.error, r.converged};
    }

    const double s_inner = sphere_area(d - 1);  // S_{d-2}: measure of the unit sphere in R^{d-1}
    const double angular_total = sphere_area(d) / s_inner;
    const double inner_tol = 0.25 * tol * angular_total / std::max(norm, 1e-300);
    bool inner_ok = true;
    double inner_err_max = 0.0;

    auto angular = [&](double rho) {
        // One radius negligible against the other: the distance is constant over the sphere.
        if (rho <= 1e-9 * t || t <= 1e-9 * rho) {
            return spec(std::max(rho, t)) * angular_total;
        }
        std::vector<double> splits;
        for (double b : knots) {
            const double c = (rho * rho + t * t - b * b) / (2.0 * rho * t);
            if (c > -1.0 && c < 1.0) {
                splits.push_back(std::acos(c));
            }
        }
        const double gap = (rho - t) * (rho - t);
        auto integrand = [&](double phi) {
            const double s = std::sin(0.5 * phi);
            const double delta = std::sqrt(gap + 4.0 * rho * t * s * s);
            const double w = d == 2 ? 1.0 : std::pow(std::sin(phi), d - 2);
            return spec(delta) * w;
        };
        auto r = quad::integrate_piecewise(integrand, 0.0, std::numbers::pi, splits,
                                           {inner_tol, 0.0, max_level + 1, 2});
        inner_ok = inner_ok && r.converged;
        inner_err_max = std::max(inner_err_max, r.error);
        return r.value;
    };
    auto radial = [&](double rho) {
        const double g = spec(rho);
        if (g == 0.0) {
            return 0.0;
        }
        return s_inner * g * std::pow(rho, d - 1) * angular(rho);
    };

    std::vector<double> cuts{t};
    for (double b : knots) {
        cuts.insert(cuts.end(), {b, t + b, std::abs(t - b)});
    }
    const double upper = std::isfinite(s_max) ? s_max : kInf;
    auto r = quad::integrate_piecewise(radial, 0.0, upper, cuts, {0.5 * tol, 0.0, max_level, 3}, tail_scale);
    const double err = r.error + inner_err_max * norm / angular_total;
    return {r.value, err, r.converged && inner_ok};
}

ConvolutionProfile::ConvolutionProfile(KernelSpec kernel)
    : kernel_(std::move(kernel)), kind_(Kind::ClosedForm), norm_g_(kernel_norm(kernel_)) {
    const auto fam = kernel_.family();
    if (!(fam == KernelFamily::Gaussian || (fam == KernelFamily::Boolean && kernel_.dimension() == 2))) {
        throw DomainError("no closed-form self-convolution for this kernel");
    }
    support_end_ = kernel_.bounded_support() ? 2.0 * support_radius(kernel_, 0.0) : kInf;
}

ConvolutionProfile::ConvolutionProfile(KernelSpec kernel, double t_max, std::vector<double> values,
                                       double max_abs_error)
    : kernel_(std::move(kernel)),
      kind_(Kind::Tabulated),
      norm_g_(kernel_norm(kernel_)),
      t_max_(t_max),
      values_(std::move(values)),
      max_abs_error_(max_abs_error) {
    if (values_.size() < 2 || !(t_max_ > 0.0)) {
        throw DomainError("tabulated profile needs >= 2 values and t_max > 0");
    }
    support_end_ = kernel_.bounded_support() ? 2.0 * support_radius(kernel_, 0.0) : kInf;

    // Fritsch-Butland slopes: weighted harmonic mean of neighbouring secants,
    // zero at local extrema, so the interpolant stays monotone.
    const std::size_t n = values_.size();
    const double h = t_max_ / static_cast<double>(n - 1);
    std::vector<double> secant(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        secant[k] = (values_[k + 1] - values_[k]) / h;
    }
    slopes_.assign(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double a = secant[k - 1];
        const double b = secant[k];
        if (a * b > 0.0) {
            const double ma = std::abs(a);
            const double mb = std::abs(b);
            slopes_[k] = std::copysign(3.0 * ma * mb / (2.0 * std::max(ma, mb) + std::min(ma, mb)), a);
        }
    }
    auto edge = [](double d0, double d1) {
        double m = 0.5 * (3.0 * d0 - d1);
        if (m * d0 <= 0.0) {
            return 0.0;
        }
        if (d0 * d1 <= 0.0 && std::abs(m) > 3.0 * std::abs(d0)) {
            m = 3.0 * d0;
        }
        return m;
    };
    if (n > 2) {
        slopes_[0] = edge(secant[0], secant[1]);
        slopes_[n - 1] = edge(secant[n - 2], secant[n - 3]);
    } else {
        slopes_[0] = slopes_[1] = secant[0];
    }
}

double ConvolutionProfile::eval_tabulated(double t) const {
    const double step = t_max_ / static_cast<double>(values_.size() - 1);
    if (t <= t_max_) {
        const double pos = t / step;
        auto k = static_cast<std::size_t>(pos);
        if (k >= values_.size() - 1) {
            return values_.back();
        }
        const double w = pos - static_cast<double>(k);
        const double w2 = w * w;
        const double w3 = w2 * w;
        return (2.0 * w3 - 3.0 * w2 + 1.0) * values_[k] + (w3 - 2.0 * w2 + w) * step * slopes_[k] +
               (-2.0 * w3 + 3.0 * w2) * values_[k + 1] + (w3 - w2) * step * slopes_[k + 1];
    }
    // Unbounded support past the table: f(t) ~ f(t_max) g(t) / g(t_max).
    const double g_end = kernel_(t_max_);
    if (g_end <= 0.0) {
        return 0.0;
    }
    return values_.back() * kernel_(t) / g_end;
}

double ConvolutionProfile::operator()(double t) const {
    if (!(t >= 0.0)) {
        throw DomainError("eval_f: radial distance must be >= 0");
    }
    if (t >= support_end_) {
        return 0.0;
    }
    if (kind_ == Kind::Tabulated) {
        return eval_tabulated(t);
    }
    if (const auto* p = std::get_if<GaussianParams>(&kernel_.params())) {
        const double s2 = p->sigma * p->sigma;
        return p->amplitude * p->amplitude * std::pow(std::numbers::pi * s2, 0.5 * dimension()) *
               std::exp(-t * t / (4.0 * s2));
    }
    const auto& b = std::get<BooleanParams>(kernel_.params());
    return b.amplitude * b.amplitude * lens_area(b.radius, t);
}

std::vector<double> ConvolutionProfile::radii() const {
    std::vector<double> out(values_.size());
    const double step = values_.empty() ? 0.0 : t_max_ / static_cast<double>(values_.size() - 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = static_cast<double>(k) * step;
    }
    return out;
}

std::vector<double> ConvolutionProfile::breakpoints() const {
    std::vector<double> out;
    if (kind_ == Kind::Tabulated) {
        out = radii();
    }
    if (std::isfinite(support_end_)) {
        out.push_back(support_end_);
    }
    return out;
}

ProfileConvergenceError::ProfileConvergenceError(const std::string& what, ConvolutionProfile best)
    : ConvergenceError(what, best.at_zero(), best.max_abs_error()),
      best_(std::make_shared<const ConvolutionProfile>(std::move(best))) {}

double default_profile_extent(const KernelSpec& spec) {
    if (spec.bounded_support()) {
        return 2.0 * support_radius(spec, 0.0);
    }
    // f of a Gaussian is Gaussian with twice the variance; 8 sigma leaves e^-16 of f(0).
    if (spec.family() == KernelFamily::Gaussian) {
        return 8.0 * spec.scale();
    }
    return 4.0 * spec.scale();
}

ConvolutionProfile self_convolve(const KernelSpec& spec, const ConvolveOptions& options) {
    const auto fam = spec.family();
    const bool closed = fam == KernelFamily::Gaussian || (fam == KernelFamily::Boolean && spec.dimension() == 2);
    if (closed && !options.force_quadrature) {
        return ConvolutionProfile(spec);
    }
    if (options.n_radii < 2) {
        throw DomainError("self_convolve: n_radii must be >= 2");
    }
    if (!(options.tol > 0.0)) {
        throw DomainError("self_convolve: tol must be positive");
    }
    const double norm = kernel_norm(spec);
    const double s_max = support_radius(spec, 0.0);
    const double support_end = std::isfinite(s_max) ? 2.0 * s_max : kInf;

    double t_max = options.t_max > 0.0 ? options.t_max : default_profile_extent(spec);
    if (std::isfinite(support_end)) {
        t_max = std::max(t_max, support_end);
    }

    const std::size_t n = options.n_radii;
    std::vector<double> values(n, 0.0);
    double err = 0.0;
    bool converged = true;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
        if (t >= support_end) {
            continue;
        }
        auto point = convolve_at(spec, t, options.tol, options.max_level);
        if (!point.converged) {
            // Nearly coincident breakpoints; a few more halvings usually settle it.
            point = convolve_at(spec, t, options.tol, options.max_level + 3);
        }
        values[k] = point.value;
        err = std::max(err, point.error);
        converged = converged && point.converged;
    }
    for (std::size_t k = 0; k < n; ++k) {
        double v = std::clamp(values[k], 0.0, norm);
        if (k > 0) {
            v = std::min(v, values[k - 1]);
        }
        err = std::max(err, std::abs(v - values[k]));
        values[k] = v;
    }
    ConvolutionProfile profile(spec, t_max, std::move(values), err);
    if (!converged || err > options.tol) {
        throw ProfileConvergenceError("self_convolve: tolerance not reached within the refinement budget",
                                      std::move(profile));
    }
    return profile;
}

double eval_f(const ConvolutionProfile& profile, double t) { return profile(t); }

double radius_level(const ConvolutionProfile& profile, double s) {
    if (!(s > 0.0)) {
        throw DomainError("radius_level: level must be positive");
    }
    const double f0 = profile.at_zero();
    if (s >= f0) {
        return 0.0;
    }
    if (profile.kind() == ConvolutionProfile::Kind::ClosedForm) {
        if (const auto* p = std::get_if<GaussianParams>(&profile.kernel().params())) {
            return 2.0 * p->sigma * std::sqrt(std::log(f0 / s));
        }
    }
    double lo = 0.0;
    double hi = profile.support_end();
    if (!std::isfinite(hi)) {
        hi = std::max(profile.t_max(), profile.kernel().scale());
        while (profile(hi) > s) {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi)) {
                return kInf;
            }
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (profile(mid) > s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace rigsim
