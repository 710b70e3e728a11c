#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rigsim/analytics.hpp"
#include "rigsim/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("rigsim_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = std::string(RIGSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
    const auto p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

json gaussian() { return json::parse(R"({"family":"gaussian","params":{"sigma":1.0},"d":2,"norm":1.0})"); }

json phase_config() {
    return {{"kind", "phase"},
            {"kernel", gaussian()},
            {"torus", {{"d", 2}, {"measure", "area"}, {"value", 1000}}},
            {"lambda_values", {{"start", 0.25}, {"stop", 4.0}, {"count", 16}}},
            {"mu_values", {{"start", 0.25}, {"stop", 4.0}, {"count", 16}}},
            {"replicates", 10},
            {"seed", 7}};
}

}  // namespace

TEST_CASE("analytics passes the expected degree through") {
    const auto dir = scratch("analytics");
    const json cfg = {{"kind", "degree"},
                      {"kernel", gaussian()},
                      {"torus", {{"d", 2}, {"measure", "area"}, {"value", 2000}}},
                      {"lambda", 2.0},
                      {"mu", 2.0}};
    const auto path = write_config(dir, "c.json", cfg);
    REQUIRE(run("analytics --config " + path.string() + " --quantity expected-degree -o " + (dir / "out").string()) ==
            0);
    const auto out = json::parse(slurp(dir / "out" / "analytics.json"));
    const auto c = rigsim::parse_config(cfg);
    CHECK(out["value"].get<double>() == rigsim::expected_degree(rigsim::self_convolve(c.kernel), 2.0, 2.0));
    const auto manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["config"]["lambda"] == 2.0);
    CHECK(manifest.contains("version"));

    CHECK(run("analytics --config " + path.string() + " --quantity connection-probability -o " +
              (dir / "o2").string()) == 2);
    CHECK(run("analytics --config " + path.string() + " --quantity nonsense") == 2);
}

TEST_CASE("phase with the default grid; thread count does not change outputs") {
    const auto dir = scratch("phase");
    const auto path = write_config(dir, "phase.json", phase_config());
    REQUIRE(run("phase -c " + path.string() + " --threads 1 -o " + (dir / "a").string()) == 0);
    REQUIRE(run("phase -c " + path.string() + " --threads 3 -o " + (dir / "b").string()) == 0);
    const auto csv = slurp(dir / "a" / "phase.csv");
    CHECK(csv == slurp(dir / "b" / "phase.csv"));
    CHECK(slurp(dir / "a" / "phase_stderr.csv") == slurp(dir / "b" / "phase_stderr.csv"));
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("lambda\\mu,0.25,", 0) == 0);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        int cols = 0;
        while (std::getline(cells, cell, ',')) {
            ++cols;
            const double v = std::stod(cell);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(cols == 16);
    }
    CHECK(rows == 16);
}

TEST_CASE("validate writes a report") {
    const auto dir = scratch("validate");
    const json cfg = {{"kind", "joint_groups"},
                      {"kernel", gaussian()},
                      {"torus", {{"d", 2}, {"measure", "side"}, {"value", 16}}},
                      {"mu", 2.0},
                      {"probe_distances", {0.0, 1.0}},
                      {"replicates", 200},
                      {"seed", 3}};
    const auto path = write_config(dir, "jg.json", cfg);
    REQUIRE(run("validate -c " + path.string() + " -o " + (dir / "out").string()) == 0);
    const auto report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["kind"] == "joint_groups");
    CHECK(report["verdicts"].size() == 6);
    for (const auto& v : report["verdicts"]) {
        CHECK(v.contains("statistic"));
        CHECK(v.contains("pass"));
    }
    // Replay is byte-identical, including the manifest.
    REQUIRE(run("validate -c " + path.string() + " -o " + (dir / "again").string()) == 0);
    CHECK(slurp(dir / "out" / "report.json") == slurp(dir / "again" / "report.json"));
    CHECK(slurp(dir / "out" / "manifest.json") == slurp(dir / "again" / "manifest.json"));
}

TEST_CASE("overrides and output directory precedence") {
    const auto dir = scratch("overrides");
    json cfg = {{"kind", "degree"},
                {"kernel", gaussian()},
                {"torus", {{"d", 2}, {"measure", "area"}, {"value", 300}}},
                {"lambda", 1.0},
                {"mu", 1.0},
                {"output_dir", (dir / "from_config").string()}};
    const auto path = write_config(dir, "d.json", cfg);
    REQUIRE(run("degrees -c " + path.string() + " --seed 99 --replicates 2") == 0);
    const auto manifest = json::parse(slurp(dir / "from_config" / "manifest.json"));
    CHECK(manifest["seed"] == 99);
    CHECK(manifest["config"]["replicates"] == 2);
    CHECK(fs::exists(dir / "from_config" / "histogram.csv"));

    REQUIRE(run("degrees -c " + path.string() + " -o " + (dir / "flag").string()) == 0);
    CHECK(fs::exists(dir / "flag" / "histogram.csv"));

    cfg.erase("output_dir");
    const auto p2 = write_config(dir, "d2.json", cfg);
    const std::string env = "RIGSIM_OUTPUT_DIR=" + (dir / "env").string() + " ";
    const int status = std::system((env + RIGSIM_CLI_PATH + " degrees -c " + p2.string() + " >/dev/null").c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir / "env" / "histogram.csv"));
}

TEST_CASE("sample and visualize") {
    const auto dir = scratch("visual");
    const json cfg = {{"kind", "visualize"},
                      {"kernel", json::parse(R"({"family":"boolean","params":{"radius":1.0},"d":2})")},
                      {"torus", {{"d", 2}, {"measure", "area"}, {"value", 300}}},
                      {"lambda", 2.0},
                      {"mu", 1.0}};
    const auto path = write_config(dir, "v.json", cfg);
    REQUIRE(run("visualize -c " + path.string() + " -o " + (dir / "v").string()) == 0);
    CHECK(slurp(dir / "v" / "scene.svg").find("<svg") == 0);
    CHECK(fs::exists(dir / "v" / "points.csv"));
    CHECK(fs::exists(dir / "v" / "edges.csv"));
    REQUIRE(run("sample -c " + path.string() + " -o " + (dir / "s").string()) == 0);
    CHECK(slurp(dir / "s" / "memberships.csv").rfind("vertex,group\n", 0) == 0);
    CHECK(slurp(dir / "s" / "points.csv") == slurp(dir / "v" / "points.csv"));
}

TEST_CASE("error exits") {
    const auto dir = scratch("errors");
    CHECK(run("") == 2);
    CHECK(run("phase") == 2);
    CHECK(run("phase -c " + (dir / "missing.json").string()) == 2);

    std::ofstream(dir / "bad.json") << R"({"kind": "phase", "kernel": {"family": "power_law", "params": {"alpha": 0.5}, "d": 2}})";
    CHECK(run("phase -c " + (dir / "bad.json").string() + " -o " + (dir / "o").string()) == 2);

    json deg = {{"kind", "degree"},
                {"kernel", gaussian()},
                {"torus", {{"d", 2}, {"measure", "area"}, {"value", 300}}},
                {"lambda", 1.0},
                {"mu", 1.0}};
    const auto path = write_config(dir, "deg.json", deg);
    CHECK(run("phase -c " + path.string() + " -o " + (dir / "o").string()) == 2);

    // Runtime failure: an output file is blocked by a directory of the same name.
    fs::create_directories(dir / "blocked" / "histogram.csv");
    CHECK(run("degrees -c " + path.string() + " -o " + (dir / "blocked").string()) == 1);
    const auto manifest = json::parse(slurp(dir / "blocked" / "manifest.json"));
    CHECK(manifest["status"] == "error");
    CHECK(manifest.contains("error"));
}
