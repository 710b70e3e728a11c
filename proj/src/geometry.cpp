#include "rigsim/geometry.hpp"

#include <cmath>
#include <numbers>

#include "rigsim/error.hpp"

namespace rigsim {

double ball_volume(int d, double r) {
    if (d < 1) {
        throw DomainError("ball_volume: dimension must be >= 1");
    }
    if (r < 0.0) {
        throw DomainError("ball_volume: radius must be >= 0");
    }
    const double half = 0.5 * d;
    return std::pow(std::numbers::pi, half) * std::pow(r, d) / std::tgamma(half + 1.0);
}

double sphere_area(int d) {
    if (d < 1) {
        throw DomainError("sphere_area: dimension must be >= 1");
    }
    return d * ball_volume(d, 1.0);
}

Torus::Torus(int d, double side) : d_(d), side_(side) {
    if (d < 1) {
        throw DomainError("torus dimension must be >= 1");
    }
    if (!(side > 0.0) || !std::isfinite(side)) {
        throw DomainError("torus side must be positive and finite");
    }
}

Torus Torus::from_volume(int d, double volume) {
    if (!(volume > 0.0)) {
        throw DomainError("torus volume must be positive");
    }
    return Torus(d, std::pow(volume, 1.0 / d));
}

double Torus::volume() const noexcept { return std::pow(side_, d_); }

double Torus::wrap(double x) const noexcept {
    double w = std::fmod(x, side_);
    if (w < 0.0) {
        w += side_;
    }
    return w < side_ ? w : 0.0;
}

void Torus::displacement(std::span<const double> a, std::span<const double> b, std::span<double> out) const {
    if (a.size() != static_cast<std::size_t>(d_) || b.size() != a.size() || out.size() != a.size()) {
        throw DomainError("torus displacement: dimension mismatch");
    }
    const double half = 0.5 * side_;
    for (int k = 0; k < d_; ++k) {
        double delta = b[k] - a[k];
        if (delta > half) {
            delta -= side_;
        } else if (delta < -half) {
            delta += side_;
        }
        out[k] = delta;
    }
}

double Torus::distance_squared(const double* a, const double* b) const noexcept {
    double sum = 0.0;
    for (int k = 0; k < d_; ++k) {
        double delta = std::abs(a[k] - b[k]);
        if (delta > 0.5 * side_) {
            delta = side_ - delta;
        }
        sum += delta * delta;
    }
    return sum;
}

double Torus::distance(std::span<const double> a, std::span<const double> b) const {
    if (a.size() != static_cast<std::size_t>(d_) || b.size() != a.size()) {
        throw DomainError("torus distance: dimension mismatch");
    }
    return std::sqrt(distance_squared(a.data(), b.data()));
}

double torus_distance(const Torus& torus, std::span<const double> a, std::span<const double> b) {
    return torus.distance(a, b);
}

const char* to_string(Role role) noexcept { return role == Role::Vertex ? "vertex" : "group"; }

PointCloud::PointCloud(Role role, int d, std::vector<double> coords, double intensity, std::uint64_t seed)
    : role_(role), d_(d), coords_(std::move(coords)), intensity_(intensity), seed_(seed) {
    if (d < 1) {
        throw DomainError("point cloud dimension must be >= 1");
    }
    if (coords_.size() % static_cast<std::size_t>(d) != 0) {
        throw DomainError("point cloud coordinate count is not a multiple of the dimension");
    }
}

PointCloud PointCloud::with_prepended(std::span<const double> points) const {
    if (points.size() % static_cast<std::size_t>(d_) != 0) {
        throw DomainError("prepended points do not match the cloud dimension");
    }
    std::vector<double> merged(points.begin(), points.end());
    merged.insert(merged.end(), coords_.begin(), coords_.end());
    PointCloud out(role_, d_, std::move(merged), intensity_, seed_);
    if (origin_) {
        out.origin_ = *origin_ + points.size() / static_cast<std::size_t>(d_);
    }
    return out;
}

PointCloud sample_poisson(const Torus& torus, double intensity, Rng& rng, Role role) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
        throw DomainError("sample_poisson: intensity must be finite and >= 0");
    }
    const auto n = static_cast<std::size_t>(rng.poisson(intensity * torus.volume()));
    const int d = torus.dimension();
    std::vector<double> coords(n * static_cast<std::size_t>(d));
    for (double& c : coords) {
        c = rng.uniform(torus.side());
    }
    return PointCloud(role, d, std::move(coords), intensity, rng.seed());
}

PointCloud palm_insert(const PointCloud& cloud) {
    if (cloud.role() != Role::Vertex) {
        throw DomainError("palm_insert: only vertex clouds carry a typical point");
    }
    std::vector<double> origin(static_cast<std::size_t>(cloud.dimension()), 0.0);
    PointCloud out = cloud.with_prepended(origin);
    out.origin_ = 0;
    return out;
}

}  // namespace rigsim
