#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigsim/geometry.hpp"
#include "rigsim/graph.hpp"
#include "rigsim/kernels.hpp"

namespace rigsim {

enum class ExperimentKind { Degree, Phase, JointGroups, ConnectionCheck, Visualize };

const char* to_string(ExperimentKind kind) noexcept;

/// Torus size as written in a config: either the side length or the
/// d-dimensional volume ("area" in the plane).
struct TorusConfig {
    int d = 2;
    bool value_is_side = false;
    double value = 1000.0;

    Torus torus() const;
};

/// One experiment, as parsed from the JSON config document.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Degree;
    KernelSpec kernel = KernelSpec::gaussian(1.0, 1.0, 2);
    TorusConfig torus;
    double lambda = 0.0;
    double mu = 0.0;
    std::vector<double> lambda_values;
    std::vector<double> mu_values;
    std::vector<double> probe_distances;
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    BuildOptions build;
    ConvolveOptions profile;
    double alpha = 0.01;        ///< dispersion-test level
    double confidence = 0.99;   ///< Wilson interval level
    std::string output_dir;
};

nlohmann::json kernel_to_json(const KernelSpec& spec);
/// Accepts {"family", "params", "d"} plus an optional "norm" that rescales
/// the amplitude to the requested L1 norm.
KernelSpec kernel_from_json(const nlohmann::json& j);

/// Throws ConfigError with a path-qualified message on schema violations.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
/// Fully resolved config (defaults filled in), suitable for a manifest.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace rigsim
