#include "rigsim/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "rigsim/analytics.hpp"
#include "rigsim/config.hpp"
#include "rigsim/error.hpp"
#include "rigsim/experiments.hpp"
#include "rigsim/io.hpp"

#ifndef RIGSIM_VERSION
#define RIGSIM_VERSION "0.0.0"
#endif

namespace rigsim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Invocation {
    std::string subcommand;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    std::optional<std::string> output;
    std::size_t threads = 0;
    std::string quantity;
    std::optional<double> distance;
    std::size_t profile_points = 512;
};

fs::path output_dir(const Invocation& inv, const ExperimentConfig& config) {
    if (inv.output) {
        return *inv.output;
    }
    if (!config.output_dir.empty()) {
        return config.output_dir;
    }
    if (const char* env = std::getenv("RIGSIM_OUTPUT_DIR"); env && *env) {
        return env;
    }
    return "rigsim-out";
}

class Session {
public:
    Session(const Invocation& inv, ExperimentConfig config)
        : inv_(inv), config_(std::move(config)), dir_(output_dir(inv, config_)) {}

    const ExperimentConfig& config() const { return config_; }
    RunOptions run_options() const { return {inv_.threads}; }

    void write(const std::string& name, const std::string& content) {
        io::write_file(dir_ / name, content);
        outputs_.push_back(name);
    }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    void finish(const std::string& status, const std::string& error = {}) {
        json m;
        m["tool"] = "rigsim";
        m["version"] = RIGSIM_VERSION;
        m["subcommand"] = inv_.subcommand;
        m["status"] = status;
        m["seed"] = config_.seed;
        m["config"] = to_json(config_);
        m["outputs"] = outputs_;
        if (!error.empty()) {
            m["error"] = error;
        }
        io::write_file(dir_ / "manifest.json", m.dump(2) + "\n");
    }

private:
    const Invocation& inv_;
    ExperimentConfig config_;
    fs::path dir_;
    std::vector<std::string> outputs_;
};

void cmd_sample(Session& s) {
    const auto& c = s.config();
    const Instance inst = sample_instance(c.kernel, c.torus.torus(), c.lambda, c.mu, c.build, c.seed);
    const IntersectionGraph gv = project_onto_vertices(inst.graph);
    s.write("points.csv", io::points_csv(inst.vertices, inst.groups));
    s.write("memberships.csv", io::memberships_csv(inst.graph));
    s.write("edges.csv", io::edges_csv(gv));
    std::cout << fmt::format("{} vertices, {} groups, {} memberships, {} edges\n", inst.vertices.size(),
                             inst.groups.size(), inst.graph.edge_count(), gv.edge_count());
}

void cmd_degrees(Session& s) {
    const DegreeResult r = run_degree_experiment(s.config(), s.run_options());
    s.write("histogram.csv", io::histogram_csv(r.histogram));
    s.write_json("degrees.json", io::degree_json(r));
    std::cout << fmt::format("empirical mean {} (stderr {}), theoretical {}{}, isolated fraction {}\n",
                             r.empirical_mean, r.empirical_stderr, r.theoretical_mean,
                             r.theoretical_converged ? "" : " (not converged)", r.isolated_fraction);
    if (!r.theoretical_converged) {
        throw ConvergenceError("expected degree quadrature did not converge", r.theoretical_mean, 0.0);
    }
}

void cmd_phase(Session& s) {
    const PhaseGrid g = run_phase_sweep(s.config(), s.run_options());
    s.write("phase.csv", io::phase_csv(g));
    s.write("phase_stderr.csv", io::phase_stderr_csv(g));
    s.write_json("phase.json", io::phase_json(g));
    std::cout << fmt::format("{}x{} grid, {} replicates per cell\n", g.rows(), g.cols(), g.replicates);
}

void cmd_validate(Session& s) {
    ValidationReport report;
    switch (s.config().kind) {
        case ExperimentKind::JointGroups:
            report = run_joint_groups_check(s.config(), s.run_options());
            break;
        case ExperimentKind::ConnectionCheck:
            report = run_connection_check(s.config(), s.run_options());
            break;
        default:
            throw ConfigError("validate needs a joint_groups or connection_check config");
    }
    s.write_json("report.json", io::report_json(report));
    for (const auto& v : report.verdicts) {
        std::cout << fmt::format("{} {}\n", v.passed() ? "PASS" : stats::to_string(v.outcome), v.name);
    }
}

void cmd_visualize(Session& s) {
    ExperimentConfig c = s.config();
    c.kind = ExperimentKind::Visualize;
    const Scene scene = export_visualization(c);
    s.write("scene.svg", io::scene_svg(scene));
    s.write("points.csv", io::points_csv(scene.instance.vertices, scene.instance.groups));
    s.write("edges.csv", io::edges_csv(scene.projection));
}

void cmd_analytics(Session& s, const Invocation& inv) {
    const auto& c = s.config();
    json out;
    out["quantity"] = inv.quantity;
    const double norm = kernel_norm(c.kernel);
    if (inv.quantity == "norm") {
        out["value"] = norm;
    } else if (inv.quantity == "offspring-mean") {
        const auto om = offspring_mean(c.lambda, c.mu, norm);
        out["value"] = om.value;
        out["subcritical"] = om.subcritical;
    } else if (inv.quantity == "isolated-bound") {
        out["value"] = isolated_probability_bound(c.mu, norm);
    } else {
        const ConvolutionProfile profile = self_convolve(c.kernel, c.profile);
        if (inv.quantity == "expected-degree") {
            out["value"] = expected_degree(profile, c.lambda, c.mu);
        } else if (inv.quantity == "degree-bounds") {
            const auto b = degree_bounds(profile, c.lambda, c.mu);
            out["upper_simple"] = b.upper_simple;
            out["bracket_low"] = b.bracket_low;
            out["bracket_high"] = std::isfinite(b.bracket_high) ? json(b.bracket_high) : json(nullptr);
        } else if (inv.quantity == "connection-probability") {
            if (!inv.distance) {
                throw ConfigError("--distance is required for connection-probability");
            }
            out["distance"] = *inv.distance;
            out["value"] = connection_probability(profile, c.mu, *inv.distance);
        } else if (inv.quantity == "profile") {
            out["f0"] = profile.at_zero();
            out["support_end"] = std::isfinite(profile.support_end()) ? json(profile.support_end()) : json(nullptr);
            out["max_abs_error"] = profile.max_abs_error();
            s.write("profile.csv", io::profile_csv(profile, inv.profile_points));
        }
    }
    s.write_json("analytics.json", out);
    std::cout << out.dump() << "\n";
}

void report_error(const char* kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Simulator and analytics for geometric random intersection graphs", "rigsim"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", RIGSIM_VERSION);
    Invocation inv;

    auto add_common = [&inv](CLI::App* sub) {
        sub->add_option("-c,--config", inv.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", inv.seed, "override the base seed");
        sub->add_option("--replicates", inv.replicates, "override the replicate count")->check(CLI::PositiveNumber);
        sub->add_option("-o,--output", inv.output, "output directory");
        sub->add_option("--threads", inv.threads, "worker threads (0: available parallelism)");
    };
    add_common(app.add_subcommand("sample", "sample one instance and export points, memberships and edges"));
    add_common(app.add_subcommand("degrees", "degree histogram against the expected degree"));
    add_common(app.add_subcommand("phase", "largest-component fraction over a (lambda, mu) grid"));
    add_common(app.add_subcommand("validate", "planted-pair validation suite; writes report.json"));
    add_common(app.add_subcommand("visualize", "SVG scene of one planar instance"));
    auto* analytics = app.add_subcommand("analytics", "closed-form and quadrature quantities");
    add_common(analytics);
    analytics->add_option("--quantity", inv.quantity, "quantity to compute")
        ->required()
        ->check(CLI::IsMember({"expected-degree", "degree-bounds", "offspring-mean", "isolated-bound",
                               "connection-probability", "norm", "profile"}));
    analytics->add_option("--distance", inv.distance, "distance for connection-probability")
        ->check(CLI::NonNegativeNumber);
    analytics->add_option("--points", inv.profile_points, "radii written by --quantity profile");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return 2;
    }
    inv.subcommand = app.get_subcommands().front()->get_name();

    std::optional<Session> session;
    try {
        ExperimentConfig config = load_config(inv.config_path);
        if (inv.seed) config.seed = *inv.seed;
        if (inv.replicates) config.replicates = *inv.replicates;
        session.emplace(inv, std::move(config));
        const ExperimentKind kind = session->config().kind;
        if ((inv.subcommand == "degrees" && kind != ExperimentKind::Degree) ||
            (inv.subcommand == "phase" && kind != ExperimentKind::Phase)) {
            throw ConfigError(fmt::format("subcommand '{}' does not accept a '{}' config", inv.subcommand,
                                          to_string(kind)));
        }
    } catch (const ConfigError& e) {
        report_error("config", e.what());
        return 2;
    }

    try {
        if (inv.subcommand == "sample") cmd_sample(*session);
        else if (inv.subcommand == "degrees") cmd_degrees(*session);
        else if (inv.subcommand == "phase") cmd_phase(*session);
        else if (inv.subcommand == "validate") cmd_validate(*session);
        else if (inv.subcommand == "visualize") cmd_visualize(*session);
        else cmd_analytics(*session, inv);
        session->finish("ok");
        return 0;
    } catch (const ConfigError& e) {
        report_error("config", e.what());
        session->finish("error", e.what());
        return 2;
    } catch (const std::exception& e) {
        report_error("runtime", e.what());
        try {
            session->finish("error", e.what());
        } catch (const std::exception&) {
        }
        return 1;
    }
}

}  // namespace rigsim::cli
