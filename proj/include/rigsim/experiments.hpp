#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigsim/config.hpp"
#include "rigsim/geometry.hpp"
#include "rigsim/graph.hpp"
#include "rigsim/kernels.hpp"
#include "rigsim/stats.hpp"

namespace rigsim {

struct RunOptions {
    std::size_t threads = 0;  ///< 0: available parallelism
};

/// One sampled configuration: V, U and the membership graph.
struct Instance {
    PointCloud vertices;
    PointCloud groups;
    BipartiteGraph graph;
};

/// Streams: vertices derive_seed(seed, {0}), groups {1}, memberships {2}.
Instance sample_instance(const KernelSpec& spec, const Torus& torus, double lambda, double mu,
                         const BuildOptions& build, std::uint64_t seed);

/// Degree of a vertex planted at the origin of the torus. The origin's
/// memberships are drawn first; background vertices are then tested only
/// against those groups, which is all the degree depends on.
std::size_t sample_palm_degree(const KernelSpec& spec, const Torus& torus, double lambda, double mu, Rng& rng);

struct DegreeResult {
    DegreeHistogram histogram;          ///< all replicates merged
    std::vector<double> replicate_means;
    double empirical_mean = 0.0;
    double empirical_stderr = 0.0;      ///< across replicates; 0 for a single replicate
    double theoretical_mean = 0.0;
    bool theoretical_converged = true;
    double isolated_fraction = 0.0;
};

DegreeResult run_degree_experiment(const ExperimentConfig& config, const RunOptions& run = {});

struct PhaseGrid {
    std::vector<double> lambda_values;
    std::vector<double> mu_values;
    std::vector<double> mean;    ///< row-major, lambda by mu
    std::vector<double> stderr_;
    std::vector<std::size_t> completed;  ///< successful replicates per cell
    std::vector<std::string> errors;     ///< empty when the cell succeeded
    std::size_t replicates = 0;

    std::size_t rows() const noexcept { return lambda_values.size(); }
    std::size_t cols() const noexcept { return mu_values.size(); }
    double mean_at(std::size_t i, std::size_t j) const { return mean[i * cols() + j]; }
    double stderr_at(std::size_t i, std::size_t j) const { return stderr_[i * cols() + j]; }
};

/// Task (i, j, r) uses seed derive_seed(config.seed, {i, j, r}).
PhaseGrid run_phase_sweep(const ExperimentConfig& config, const RunOptions& run = {});

struct ValidationReport {
    std::string kind;
    std::vector<stats::TestVerdict> verdicts;
    nlohmann::json details = nlohmann::json::object();

    bool all_passed() const;
};

struct SharedGroupProbe {
    double distance = 0.0;
    double expected_mean = 0.0;  ///< mu f(t)
    double mean = 0.0;
    double variance = 0.0;
    std::vector<std::int64_t> counts;
};

/// Vertices planted at the origin and at (t, 0, ...) on top of a background of
/// intensity config.lambda; records how many groups both join.
ValidationReport run_joint_groups_check(const ExperimentConfig& config, const RunOptions& run = {},
                                        std::vector<SharedGroupProbe>* probes = nullptr);

struct ConnectionProbe {
    double distance = 0.0;
    double mu = 0.0;
    double expected = 0.0;
    std::int64_t successes = 0;
    std::int64_t trials = 0;
    stats::Interval interval;
};

/// Probes every distance at config.mu, or at each of config.mu_values.
ValidationReport run_connection_check(const ExperimentConfig& config, const RunOptions& run = {},
                                      std::vector<ConnectionProbe>* probes = nullptr);

struct Scene {
    Torus torus;
    Instance instance;
    IntersectionGraph projection;
    std::vector<double> edge_lengths;  ///< minimum-image lengths of G_V edges
};

/// d = 2 only.
Scene export_visualization(const ExperimentConfig& config);

}  // namespace rigsim
