#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rigsim {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a base seed and a tuple of indices
/// (e.g. sweep cell and replicate). The result does not depend on the order in
/// which tasks are scheduled.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded random stream. The seed is kept so that every artifact can record it.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [0, upper).
    double uniform(double upper);
    std::int64_t poisson(double mean);
    double normal();

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace rigsim
