#include "rigsim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace rigsim::quad {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Beyond |tau| = 3.5 the node complements drop below 1e-22 and the weights
// are negligible for any integrand we feed in.
constexpr double kTauMax = 3.5;

// Integrates h(y, 1+y, 1-y) over y in [-1, 1]; the complements are passed
// explicitly so callers can place nodes next to an endpoint without
// cancellation.
template <typename H>
Result tanh_sinh_unit(const H& h, const Options& opt) {
    Result res;
    auto node_sum = [&](double tau) {
        const double s = kHalfPi * std::sinh(tau);
        const double c = std::cosh(s);
        const double w = kHalfPi * std::cosh(tau) / (c * c);
        // complement 1 - tanh(|s|) = 2 / (exp(2|s|) + 1)
        const double comp = 2.0 / (std::exp(2.0 * std::abs(s)) + 1.0);
        if (comp <= 0.0 || w == 0.0) {
            return 0.0;
        }
        const double y = std::copysign(1.0 - comp, s);
        double sum = 0.0;
        if (tau == 0.0) {
            sum = h(0.0, 1.0, 1.0);
        } else if (s > 0) {
            sum = h(y, 2.0 - comp, comp);
        } else {
            sum = h(y, comp, 2.0 - comp);
        }
        res.evaluations += 1;
        return w * sum;
    };

    double step = 1.0;
    double total = node_sum(0.0);
    for (int k = 1; k * step <= kTauMax; ++k) {
        total += node_sum(k * step) + node_sum(-k * step);
    }
    double estimate = total * step;
    res.value = estimate;
    res.error = std::numeric_limits<double>::infinity();

    for (int level = 1; level <= opt.max_level; ++level) {
        step /= 2.0;
        double added = 0.0;
        for (int k = 1; k * step <= kTauMax; k += 2) {
            added += node_sum(k * step) + node_sum(-k * step);
        }
        total += added;
        const double next = total * step;
        res.error = std::abs(next - estimate);
        res.value = next;
        res.levels = level;
        estimate = next;
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(next));
        if (level >= opt.min_level && res.error <= target) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const Options& opt) {
    if (a == b) {
        return Result{0.0, 0.0, true, 0, 0};
    }
    if (b < a) {
        Result r = integrate(f, b, a, opt);
        r.value = -r.value;
        return r;
    }
    const double half = 0.5 * (b - a);
    auto h = [&](double y, double one_plus, double one_minus) {
        const double x = y <= 0.0 ? a + half * one_plus : b - half * one_minus;
        return f(x);
    };
    Result r = tanh_sinh_unit(h, Options{opt.abs_tol / half, opt.rel_tol, opt.max_level, opt.min_level});
    r.value *= half;
    r.error *= half;
    return r;
}

Result integrate_to_infinity(const Integrand& f, double a, double scale, const Options& opt) {
    // u = (1+y)/2 in [0,1); x = a + scale*u/(1-u); dx/dy = scale / (2 (1-u)^2)
    auto h = [&](double, double one_plus, double one_minus) {
        const double u = 0.5 * one_plus;
        const double v = 0.5 * one_minus;  // 1 - u
        const double x = a + scale * u / v;
        if (!std::isfinite(x)) {
            return 0.0;
        }
        const double fx = f(x);
        if (fx == 0.0) {
            return 0.0;
        }
        return fx * scale / (2.0 * v * v);
    };
    return tanh_sinh_unit(h, opt);
}

Result integrate_piecewise(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                           const Options& opt, double tail_scale) {
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b && std::isfinite(p)) {
            cuts.push_back(p);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(b);

    const std::size_t pieces = cuts.size() - 1;
    Options piece_opt = opt;
    piece_opt.abs_tol = opt.abs_tol / static_cast<double>(pieces);

    Result total;
    total.converged = true;
    for (std::size_t i = 0; i < pieces; ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (hi - lo <= 0.0) {
            continue;
        }
        Result r = std::isinf(hi) ? integrate_to_infinity(f, lo, tail_scale, piece_opt)
                                  : integrate(f, lo, hi, piece_opt);
        total.value += r.value;
        total.error += r.error;
        total.converged = total.converged && r.converged;
        total.levels = std::max(total.levels, r.levels);
        total.evaluations += r.evaluations;
    }
    return total;
}

}  // namespace rigsim::quad
