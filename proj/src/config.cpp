#include "rigsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rigsim/error.hpp"

namespace rigsim {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) {
        fail(path, "missing required field '" + key + "'");
    }
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        fail(path, "expected a number");
    }
    return j.get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& path) {
    return j.contains(key) ? number(j.at(key), path + "." + key) : fallback;
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) {
        fail(path, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

void check_grid(const std::vector<double>& grid, const std::string& path) {
    if (grid.empty()) {
        fail(path, "grid must not be empty");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
            fail(path, "grid values must be strictly positive");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            fail(path, "grid values must be strictly ascending");
        }
    }
}

std::vector<double> grid_from(const json& j, const std::string& path) {
    // Either an explicit list or {"start", "stop", "count"} (inclusive, equispaced).
    if (j.is_object()) {
        const double start = number(require(j, "start", path), path + ".start");
        const double stop = number(require(j, "stop", path), path + ".stop");
        const json& c = require(j, "count", path);
        if (!c.is_number_integer() || c.get<long>() < 1) {
            fail(path + ".count", "expected a positive integer");
        }
        const auto n = c.get<std::size_t>();
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = n == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        check_grid(out, path);
        return out;
    }
    auto out = number_list(j, path);
    check_grid(out, path);
    return out;
}

ExperimentKind kind_from(const std::string& s, const std::string& path) {
    if (s == "degree") return ExperimentKind::Degree;
    if (s == "phase") return ExperimentKind::Phase;
    if (s == "joint_groups") return ExperimentKind::JointGroups;
    if (s == "connection_check") return ExperimentKind::ConnectionCheck;
    if (s == "visualize") return ExperimentKind::Visualize;
    fail(path, "unknown kind '" + s + "' (degree, phase, joint_groups, connection_check, visualize)");
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
    switch (kind) {
        case ExperimentKind::Degree:
            return "degree";
        case ExperimentKind::Phase:
            return "phase";
        case ExperimentKind::JointGroups:
            return "joint_groups";
        case ExperimentKind::ConnectionCheck:
            return "connection_check";
        case ExperimentKind::Visualize:
            return "visualize";
    }
    return "unknown";
}

Torus TorusConfig::torus() const { return value_is_side ? Torus(d, value) : Torus::from_volume(d, value); }

json kernel_to_json(const KernelSpec& spec) {
    json params;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, BooleanParams>) {
                params = {{"radius", p.radius}, {"amplitude", p.amplitude}};
            } else if constexpr (std::is_same_v<P, GaussianParams>) {
                params = {{"sigma", p.sigma}, {"amplitude", p.amplitude}};
            } else if constexpr (std::is_same_v<P, PowerLawParams>) {
                params = {{"alpha", p.alpha}, {"amplitude", p.amplitude}};
            } else {
                params = {{"radii", p.radii}, {"values", p.values}};
            }
        },
        spec.params());
    return {{"family", to_string(spec.family())}, {"params", params}, {"d", spec.dimension()}};
}

KernelSpec kernel_from_json(const json& j) {
    const std::string path = "kernel";
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    const json& fam = require(j, "family", path);
    if (!fam.is_string()) {
        fail(path + ".family", "expected a string");
    }
    const json& d_json = require(j, "d", path);
    if (!d_json.is_number_integer() || d_json.get<int>() < 1) {
        fail(path + ".d", "expected an integer >= 1");
    }
    const int d = d_json.get<int>();
    const json params = j.contains("params") ? j.at("params") : json::object();
    const std::string pp = path + ".params";
    const std::string family = fam.get<std::string>();

    const bool normalize = j.contains("norm");
    const double default_amp = 1.0;
    try {
        KernelSpec spec = [&]() -> KernelSpec {
            if (family == "boolean") {
                const double r = params.contains("radius") ? number(params.at("radius"), pp + ".radius")
                                                           : number(require(params, "r", pp), pp + ".r");
                return KernelSpec::boolean(r, d, number_or(params, "amplitude", default_amp, pp));
            }
            if (family == "gaussian") {
                const double sigma = number(require(params, "sigma", pp), pp + ".sigma");
                return KernelSpec::gaussian(sigma, number_or(params, "amplitude", default_amp, pp), d);
            }
            if (family == "power_law") {
                const double alpha = number(require(params, "alpha", pp), pp + ".alpha");
                return KernelSpec::power_law(alpha, number_or(params, "amplitude", default_amp, pp), d);
            }
            if (family == "tabulated") {
                return KernelSpec::tabulated(number_list(require(params, "radii", pp), pp + ".radii"),
                                             number_list(require(params, "values", pp), pp + ".values"), d);
            }
            fail(path + ".family", "unknown family '" + family + "' (boolean, gaussian, power_law, tabulated)");
        }();
        if (normalize) {
            spec = KernelSpec::normalized(spec, number(j.at("norm"), path + ".norm"));
        }
        return spec;
    } catch (const DivergentNormError& e) {
        fail(path, e.what());
    } catch (const DomainError& e) {
        fail(path, e.what());
    }
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) {
        fail("config", "expected a JSON object");
    }
    ExperimentConfig c;
    const json& kind = require(j, "kind", "config");
    if (!kind.is_string()) {
        fail("kind", "expected a string");
    }
    c.kind = kind_from(kind.get<std::string>(), "kind");
    c.kernel = kernel_from_json(require(j, "kernel", "config"));

    const json& t = require(j, "torus", "config");
    const json& td = require(t, "d", "torus");
    if (!td.is_number_integer() || td.get<int>() < 1) {
        fail("torus.d", "expected an integer >= 1");
    }
    c.torus.d = td.get<int>();
    const json& measure = require(t, "measure", "torus");
    if (!measure.is_string()) {
        fail("torus.measure", "expected \"area\", \"volume\" or \"side\"");
    }
    const auto m = measure.get<std::string>();
    if (m == "side") {
        c.torus.value_is_side = true;
    } else if (m == "area" || m == "volume") {
        c.torus.value_is_side = false;
    } else {
        fail("torus.measure", "expected \"area\", \"volume\" or \"side\"");
    }
    c.torus.value = number(require(t, "value", "torus"), "torus.value");
    if (!(c.torus.value > 0.0)) {
        fail("torus.value", "must be positive");
    }
    if (c.torus.d != c.kernel.dimension()) {
        fail("kernel.d", "kernel dimension differs from torus.d");
    }

    c.lambda = number_or(j, "lambda", 0.0, "config");
    c.mu = number_or(j, "mu", 0.0, "config");
    if (!(c.lambda >= 0.0) || !(c.mu >= 0.0)) {
        fail("config", "lambda and mu must be >= 0");
    }
    if (j.contains("lambda_values")) {
        c.lambda_values = grid_from(j.at("lambda_values"), "lambda_values");
    }
    if (j.contains("mu_values")) {
        c.mu_values = grid_from(j.at("mu_values"), "mu_values");
    }
    if (j.contains("probe_distances")) {
        c.probe_distances = number_list(j.at("probe_distances"), "probe_distances");
        for (double x : c.probe_distances) {
            if (!(x >= 0.0)) {
                fail("probe_distances", "distances must be >= 0");
            }
        }
    }
    if (j.contains("replicates")) {
        const json& r = j.at("replicates");
        if (!r.is_number_integer() || r.get<long>() < 1) {
            fail("replicates", "expected an integer >= 1");
        }
        c.replicates = r.get<std::size_t>();
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)) {
            fail("seed", "expected a non-negative integer");
        }
        c.seed = s.get<std::uint64_t>();
    }
    if (j.contains("build")) {
        const json& b = j.at("build");
        if (b.contains("mode")) {
            const auto mode = b.at("mode").get<std::string>();
            if (mode == "exact") c.build.mode = BuildMode::Exact;
            else if (mode == "truncated") c.build.mode = BuildMode::Truncated;
            else if (mode == "auto") c.build.mode = BuildMode::Auto;
            else fail("build.mode", "expected exact, truncated or auto");
        }
        c.build.eps_tail = number_or(b, "eps_tail", c.build.eps_tail, "build");
        if (!(c.build.eps_tail >= 0.0 && c.build.eps_tail < 1.0)) {
            fail("build.eps_tail", "must lie in [0, 1)");
        }
        if (b.contains("exact_pair_limit")) {
            c.build.exact_pair_limit = b.at("exact_pair_limit").get<std::size_t>();
        }
    }
    if (j.contains("profile")) {
        const json& p = j.at("profile");
        if (p.contains("n_radii")) {
            c.profile.n_radii = p.at("n_radii").get<std::size_t>();
            if (c.profile.n_radii < 2) {
                fail("profile.n_radii", "must be >= 2");
            }
        }
        c.profile.t_max = number_or(p, "t_max", c.profile.t_max, "profile");
        c.profile.tol = number_or(p, "tol", c.profile.tol, "profile");
        if (!(c.profile.tol > 0.0)) {
            fail("profile.tol", "must be positive");
        }
    }
    c.alpha = number_or(j, "alpha", c.alpha, "config");
    c.confidence = number_or(j, "confidence", c.confidence, "config");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
        fail("alpha", "must lie in (0, 1)");
    }
    if (!(c.confidence > 0.0 && c.confidence < 1.0)) {
        fail("confidence", "must lie in (0, 1)");
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) {
            fail("output_dir", "expected a string");
        }
        c.output_dir = j.at("output_dir").get<std::string>();
    }

    switch (c.kind) {
        case ExperimentKind::Phase:
            if (c.lambda_values.empty() || c.mu_values.empty()) {
                fail("config", "phase sweeps need lambda_values and mu_values");
            }
            break;
        case ExperimentKind::JointGroups:
        case ExperimentKind::ConnectionCheck:
            if (c.probe_distances.empty()) {
                fail("probe_distances", "validation runs need at least one probe distance");
            }
            for (double x : c.probe_distances) {
                if (x > 0.5 * c.torus.torus().side()) {
                    fail("probe_distances", "probe distances must not exceed half the torus side");
                }
            }
            break;
        default:
            break;
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open config file");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["kind"] = to_string(c.kind);
    j["kernel"] = kernel_to_json(c.kernel);
    j["torus"] = {{"d", c.torus.d}, {"measure", c.torus.value_is_side ? "side" : "area"}, {"value", c.torus.value}};
    j["lambda"] = c.lambda;
    j["mu"] = c.mu;
    if (!c.lambda_values.empty()) j["lambda_values"] = c.lambda_values;
    if (!c.mu_values.empty()) j["mu_values"] = c.mu_values;
    if (!c.probe_distances.empty()) j["probe_distances"] = c.probe_distances;
    j["replicates"] = c.replicates;
    j["seed"] = c.seed;
    j["build"] = {{"mode", to_string(c.build.mode)},
                  {"eps_tail", c.build.eps_tail},
                  {"exact_pair_limit", c.build.exact_pair_limit}};
    j["profile"] = {{"n_radii", c.profile.n_radii}, {"t_max", c.profile.t_max}, {"tol", c.profile.tol}};
    j["alpha"] = c.alpha;
    j["confidence"] = c.confidence;
    j["output_dir"] = c.output_dir;
    return j;
}

}  // namespace rigsim
