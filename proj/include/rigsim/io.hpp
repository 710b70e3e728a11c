#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rigsim/experiments.hpp"

namespace rigsim::io {

void write_file(const std::filesystem::path& path, const std::string& content);

std::string histogram_csv(const DegreeHistogram& histogram);
/// Matrix of cell means: first row "lambda\mu" then the mu grid, one row per lambda.
std::string phase_csv(const PhaseGrid& grid);
std::string phase_stderr_csv(const PhaseGrid& grid);
nlohmann::json phase_json(const PhaseGrid& grid);
std::string profile_csv(const ConvolutionProfile& profile, std::size_t points);
std::string points_csv(const PointCloud& vertices, const PointCloud& groups);
std::string memberships_csv(const BipartiteGraph& graph);
std::string edges_csv(const IntersectionGraph& graph);
nlohmann::json verdict_json(const stats::TestVerdict& verdict);
nlohmann::json report_json(const ValidationReport& report);
nlohmann::json degree_json(const DegreeResult& result);

/// Vertices as black dots, groups as red crosses, G_V edges in grey; an edge
/// that wraps around the torus is drawn as two segments leaving opposite sides.
std::string scene_svg(const Scene& scene, double pixels = 800.0);

/// Shortest round-trip decimal form, the single number format used in all outputs.
std::string num(double x);

}  // namespace rigsim::io
