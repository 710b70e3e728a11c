#include "rigsim/io.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include <fmt/core.h>

#include "rigsim/error.hpp"

namespace rigsim::io {

std::string num(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    return fmt::format("{}", x);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

std::string histogram_csv(const DegreeHistogram& histogram) {
    std::string s = "degree,count\n";
    for (std::size_t k = 0; k < histogram.counts.size(); ++k) {
        s += fmt::format("{},{}\n", k, histogram.counts[k]);
    }
    return s;
}

namespace {

std::string matrix_csv(const PhaseGrid& grid, const std::vector<double>& values) {
    std::string s = "lambda\\mu";
    for (double m : grid.mu_values) {
        s += "," + num(m);
    }
    s += "\n";
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        s += num(grid.lambda_values[i]);
        for (std::size_t j = 0; j < grid.cols(); ++j) {
            s += "," + num(values[i * grid.cols() + j]);
        }
        s += "\n";
    }
    return s;
}

}  // namespace

std::string phase_csv(const PhaseGrid& grid) { return matrix_csv(grid, grid.mean); }

std::string phase_stderr_csv(const PhaseGrid& grid) { return matrix_csv(grid, grid.stderr_); }

nlohmann::json phase_json(const PhaseGrid& grid) {
    nlohmann::json failures = nlohmann::json::array();
    for (std::size_t c = 0; c < grid.errors.size(); ++c) {
        if (!grid.errors[c].empty()) {
            failures.push_back({{"lambda", grid.lambda_values[c / grid.cols()]},
                                {"mu", grid.mu_values[c % grid.cols()]},
                                {"completed", grid.completed[c]},
                                {"error", grid.errors[c]}});
        }
    }
    return {{"lambda_values", grid.lambda_values},
            {"mu_values", grid.mu_values},
            {"replicates", grid.replicates},
            {"statistic", "largest_component_fraction"},
            {"failed_cells", failures}};
}

std::string profile_csv(const ConvolutionProfile& profile, std::size_t points) {
    const double end = std::isfinite(profile.support_end()) ? profile.support_end() : profile.t_max();
    std::string s = "radius,f\n";
    const std::size_t n = std::max<std::size_t>(points, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = end * static_cast<double>(i) / static_cast<double>(n - 1);
        s += num(t) + "," + num(profile(t)) + "\n";
    }
    return s;
}

std::string points_csv(const PointCloud& vertices, const PointCloud& groups) {
    const int d = vertices.dimension();
    std::string s = "role,index";
    for (int k = 0; k < d; ++k) {
        s += fmt::format(",x{}", k);
    }
    s += "\n";
    for (const PointCloud* cloud : {&vertices, &groups}) {
        for (std::size_t i = 0; i < cloud->size(); ++i) {
            s += fmt::format("{},{}", to_string(cloud->role()), i);
            for (double x : cloud->point(i)) {
                s += "," + num(x);
            }
            s += "\n";
        }
    }
    return s;
}

std::string memberships_csv(const BipartiteGraph& graph) {
    std::string s = "vertex,group\n";
    for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
        for (NodeIndex u : graph.memberships(v)) {
            s += fmt::format("{},{}\n", v, u);
        }
    }
    return s;
}

std::string edges_csv(const IntersectionGraph& graph) {
    std::string s = "a,b,shared_count\n";
    for (std::size_t a = 0; a < graph.node_count(); ++a) {
        const auto nb = graph.neighbors(a);
        const auto sc = graph.shared_counts(a);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            if (a < nb[k]) {
                s += fmt::format("{},{},{}\n", a, nb[k], sc[k]);
            }
        }
    }
    return s;
}

nlohmann::json verdict_json(const stats::TestVerdict& v) {
    auto finite_or_null = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    return {{"name", v.name},
            {"statistic", finite_or_null(v.statistic)},
            {"lower", finite_or_null(v.lower)},
            {"upper", finite_or_null(v.upper)},
            {"outcome", stats::to_string(v.outcome)},
            {"pass", v.passed()},
            {"sample_size", v.sample_size}};
}

nlohmann::json report_json(const ValidationReport& report) {
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : report.verdicts) {
        verdicts.push_back(verdict_json(v));
    }
    return {{"kind", report.kind}, {"all_passed", report.all_passed()}, {"verdicts", verdicts},
            {"details", report.details}};
}

nlohmann::json degree_json(const DegreeResult& r) {
    return {{"empirical_mean", r.empirical_mean},
            {"empirical_stderr", r.empirical_stderr},
            {"replicate_means", r.replicate_means},
            {"theoretical_mean", r.theoretical_mean},
            {"theoretical_converged", r.theoretical_converged},
            {"isolated_fraction", r.isolated_fraction},
            {"node_count", r.histogram.node_count}};
}

std::string scene_svg(const Scene& scene, double pixels) {
    const double side = scene.torus.side();
    const double k = pixels / side;
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n"
        "<defs><clipPath id=\"torus\"><rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\"/></clipPath></defs>\n"
        "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\" fill=\"white\" stroke=\"black\"/>\n"
        "<g clip-path=\"url(#torus)\">\n",
        num(pixels));

    const auto& V = scene.instance.vertices;
    const auto& U = scene.instance.groups;
    auto line = [&](double x0, double y0, double x1, double y1, const char* style) {
        s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {}/>\n", num(x0 * k), num(y0 * k), num(x1 * k),
                         num(y1 * k), style);
    };

    s += "<g class=\"edges\">\n";
    const char* edge_style = "stroke=\"#888888\" stroke-width=\"0.8\"";
    std::array<double, 2> disp{};
    for (std::size_t a = 0; a < scene.projection.node_count(); ++a) {
        for (NodeIndex b : scene.projection.neighbors(a)) {
            if (b <= a) {
                continue;
            }
            const auto pa = V.point(a);
            const auto pb = V.point(b);
            scene.torus.displacement(pa, pb, disp);
            const double ex = pa[0] + disp[0];
            const double ey = pa[1] + disp[1];
            line(pa[0], pa[1], ex, ey, edge_style);
            if (ex < 0.0 || ex >= side || ey < 0.0 || ey >= side) {
                // Wrapped edge: the second half enters from the opposite side.
                line(pb[0], pb[1], pb[0] - disp[0], pb[1] - disp[1], edge_style);
            }
        }
    }
    s += "</g>\n<g class=\"groups\">\n";
    const double arm = 3.0;
    for (std::size_t i = 0; i < U.size(); ++i) {
        const double x = U.point(i)[0] * k;
        const double y = U.point(i)[1] * k;
        s += fmt::format(
            "<path d=\"M{} {} L{} {} M{} {} L{} {}\" stroke=\"red\" stroke-width=\"1.2\"/>\n", num(x - arm),
            num(y - arm), num(x + arm), num(y + arm), num(x - arm), num(y + arm), num(x + arm), num(y - arm));
    }
    s += "</g>\n<g class=\"vertices\">\n";
    for (std::size_t i = 0; i < V.size(); ++i) {
        s += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"black\"/>\n", num(V.point(i)[0] * k),
                         num(V.point(i)[1] * k));
    }
    s += "</g>\n</g>\n</svg>\n";
    return s;
}

}  // namespace rigsim::io
