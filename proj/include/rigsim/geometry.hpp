#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rigsim/rng.hpp"

namespace rigsim {

/// Volume of the d-dimensional ball of radius r.
double ball_volume(int d, double r);

/// Surface measure of the unit sphere in R^d (2 for d = 1, 2*pi for d = 2).
double sphere_area(int d);

/// Flat torus [0, L)^d with periodic identification of opposite faces.
class Torus {
public:
    Torus(int d, double side);
    static Torus from_volume(int d, double volume);

    int dimension() const noexcept { return d_; }
    double side() const noexcept { return side_; }
    double volume() const noexcept;

    /// Minimum-image displacement b - a, each component in [-L/2, L/2].
    void displacement(std::span<const double> a, std::span<const double> b, std::span<double> out) const;
    double distance(std::span<const double> a, std::span<const double> b) const;
    double distance_squared(const double* a, const double* b) const noexcept;

    /// Wraps a coordinate into [0, L).
    double wrap(double x) const noexcept;

private:
    int d_;
    double side_;
};

double torus_distance(const Torus& torus, std::span<const double> a, std::span<const double> b);

enum class Role { Vertex, Group };

const char* to_string(Role role) noexcept;

/// A sampled configuration of vertices or groups. Coordinates are stored
/// row-major (point i occupies [i*d, (i+1)*d)).
class PointCloud {
public:
    PointCloud(Role role, int d, std::vector<double> coords, double intensity, std::uint64_t seed);

    Role role() const noexcept { return role_; }
    int dimension() const noexcept { return d_; }
    std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(d_); }
    bool empty() const noexcept { return coords_.empty(); }
    double intensity() const noexcept { return intensity_; }
    std::uint64_t seed() const noexcept { return seed_; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
    }
    const std::vector<double>& coords() const noexcept { return coords_; }

    /// Index of the planted origin point, set by palm_insert.
    std::optional<std::size_t> origin_index() const noexcept { return origin_; }

    /// Copy with extra points prepended (indices 0..k-1); used for planted probes.
    PointCloud with_prepended(std::span<const double> points) const;

private:
    friend PointCloud palm_insert(const PointCloud& cloud);

    Role role_;
    int d_;
    std::vector<double> coords_;
    double intensity_;
    std::uint64_t seed_;
    std::optional<std::size_t> origin_;
};

/// Homogeneous Poisson configuration on the torus: N ~ Poisson(intensity * L^d),
/// then N i.i.d. uniform positions.
PointCloud sample_poisson(const Torus& torus, double intensity, Rng& rng, Role role = Role::Vertex);

/// Palm version of a vertex cloud: the origin is prepended at index 0.
PointCloud palm_insert(const PointCloud& cloud);

}  // namespace rigsim
