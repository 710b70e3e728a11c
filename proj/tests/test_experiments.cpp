#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rigsim/analytics.hpp"
#include "rigsim/error.hpp"
#include "rigsim/experiments.hpp"
#include "rigsim/io.hpp"

using namespace rigsim;

namespace {

ExperimentConfig make(ExperimentKind kind, KernelSpec kernel, double area) {
    ExperimentConfig c;
    c.kind = kind;
    c.torus = {kernel.dimension(), false, area};
    c.kernel = std::move(kernel);
    c.seed = 20231;
    return c;
}

KernelSpec gaussian_norm(double norm) { return KernelSpec::normalized(KernelSpec::gaussian(1.0, 1.0, 2), norm); }

}  // namespace

TEST_CASE("degree experiment matches the expected degree") {
    auto c = make(ExperimentKind::Degree, gaussian_norm(1.0), 2000.0);
    c.lambda = 2.0;
    c.mu = 2.0;
    c.replicates = 5;
    const auto r = run_degree_experiment(c);
    CHECK(r.theoretical_converged);
    CHECK(std::abs(r.empirical_mean - r.theoretical_mean) / r.theoretical_mean < 0.05);
    CHECK(r.replicate_means.size() == 5);
    CHECK(r.empirical_stderr > 0.0);
    std::size_t total = 0;
    for (auto k : r.histogram.counts) total += k;
    CHECK(total == r.histogram.node_count);

    auto wide = c;
    wide.kernel = gaussian_norm(4.0);
    CHECK(run_degree_experiment(wide).empirical_mean > r.empirical_mean);
}

TEST_CASE("fewer groups isolate more vertices") {
    auto a = make(ExperimentKind::Degree, gaussian_norm(1.0), 2000.0);
    a.lambda = 5.0;
    a.mu = 1.0;
    auto b = a;
    b.lambda = 1.0;
    b.mu = 5.0;
    CHECK(run_degree_experiment(a).isolated_fraction > run_degree_experiment(b).isolated_fraction);
}

TEST_CASE("runners check the config kind") {
    auto c = make(ExperimentKind::Degree, gaussian_norm(1.0), 100.0);
    CHECK_THROWS_AS(run_phase_sweep(c), ConfigError);
    CHECK_THROWS_AS(run_joint_groups_check(c), ConfigError);
    CHECK_THROWS_AS(export_visualization(c), ConfigError);
}

TEST_CASE("phase sweep grid") {
    auto c = make(ExperimentKind::Phase, gaussian_norm(1.0), 300.0);
    c.lambda_values = {0.25, 1.0, 3.0};
    c.mu_values = {0.25, 3.0};
    c.replicates = 4;
    const auto g = run_phase_sweep(c, {2});
    REQUIRE(g.rows() == 3);
    REQUIRE(g.cols() == 2);
    CHECK(g.mean.size() == 6);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(g.mean_at(i, j) >= 0.0);
            CHECK(g.mean_at(i, j) <= 1.0);
            CHECK(g.stderr_at(i, j) >= 0.0);
            CHECK(g.completed[i * 2 + j] == 4);
            CHECK(g.errors[i * 2 + j].empty());
        }
    }
    CHECK(g.mean_at(2, 1) > g.mean_at(0, 0));

    // Cell values are recomputable from the documented per-task seeds.
    std::vector<double> fr;
    for (std::uint64_t r = 0; r < 4; ++r) {
        const auto inst = sample_instance(c.kernel, c.torus.torus(), 1.0, 3.0, c.build, derive_seed(c.seed, {1, 1, r}));
        fr.push_back(largest_component_fraction(project_onto_vertices(inst.graph)));
    }
    const auto ms = stats::mean_stderr(fr);
    CHECK(g.mean_at(1, 1) == ms.mean);
    CHECK(g.stderr_at(1, 1) == ms.stderr_);
}

TEST_CASE("subcritical offspring mean keeps components small") {
    auto c = make(ExperimentKind::Phase, gaussian_norm(1.0), 1000.0);
    c.lambda_values = {0.25, 0.5, 0.75};
    c.mu_values = {0.25, 0.5, 0.75};
    c.replicates = 3;
    const auto g = run_phase_sweep(c);
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) {
            REQUIRE(offspring_mean(g.lambda_values[i], g.mu_values[j], 1.0).subcritical);
            CHECK(g.mean_at(i, j) < 0.05);
        }
    }
}

TEST_CASE("outputs do not depend on the thread count") {
    auto c = make(ExperimentKind::Phase, gaussian_norm(1.0), 200.0);
    c.lambda_values = {0.5, 2.0};
    c.mu_values = {0.5, 1.0, 2.0};
    c.replicates = 3;
    CHECK(io::phase_csv(run_phase_sweep(c, {1})) == io::phase_csv(run_phase_sweep(c, {3})));

    auto d = make(ExperimentKind::Degree, gaussian_norm(1.0), 300.0);
    d.lambda = 1.0;
    d.mu = 1.0;
    d.replicates = 4;
    CHECK(io::histogram_csv(run_degree_experiment(d, {1}).histogram) ==
          io::histogram_csv(run_degree_experiment(d, {4}).histogram));
}

TEST_CASE("joint groups: disjoint supports never share") {
    auto c = make(ExperimentKind::JointGroups, KernelSpec::boolean(1.0, 2), 400.0);
    c.mu = 3.0;
    c.probe_distances = {3.0};
    c.replicates = 500;
    std::vector<SharedGroupProbe> probes;
    const auto rep = run_joint_groups_check(c, {}, &probes);
    REQUIRE(probes.size() == 1);
    CHECK(std::all_of(probes[0].counts.begin(), probes[0].counts.end(), [](auto k) { return k == 0; }));
    CHECK(rep.all_passed());
    CHECK(rep.verdicts.size() == 1);
}

TEST_CASE("joint groups: Gaussian shared counts are Poisson(mu f(t))") {
    auto c = make(ExperimentKind::JointGroups, gaussian_norm(1.0), 256.0);
    c.mu = 2.0;
    c.lambda = 0.5;
    c.probe_distances = {0.0, 1.0};
    c.replicates = 10000;
    std::vector<SharedGroupProbe> probes;
    const auto rep = run_joint_groups_check(c, {}, &probes);
    CHECK(probes[0].expected_mean == doctest::Approx(2.0 / (4 * std::numbers::pi)));
    for (const auto& v : rep.verdicts) {
        INFO(v.name, " ", v.statistic);
        CHECK(v.outcome != stats::Outcome::Inconclusive);
    }
    CHECK(rep.verdicts.size() == 6);
    CHECK(std::abs(probes[0].mean - probes[0].expected_mean) < 3 * std::sqrt(probes[0].expected_mean / 1e4));
    CHECK(probes[0].variance / probes[0].mean == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("connection check") {
    auto c = make(ExperimentKind::ConnectionCheck, KernelSpec::boolean(1.0, 2), 200.0);
    c.mu = 1.0;
    c.probe_distances = {0.5, 1.5, 2.0, 2.5, 4.0};
    c.replicates = 1500;
    std::vector<ConnectionProbe> probes;
    const auto rep = run_connection_check(c, {}, &probes);
    REQUIRE(probes.size() == 5);
    for (const auto& p : probes) {
        if (p.distance >= 2.0) {
            CHECK(p.successes == 0);
        }
    }
    std::size_t exact = 0;
    for (const auto& v : rep.verdicts) {
        exact += v.name.find("exactly zero") != std::string::npos ? 1 : 0;
    }
    CHECK(exact == 3);

    auto g = make(ExperimentKind::ConnectionCheck, gaussian_norm(1.0), 200.0);
    g.mu_values = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};
    g.probe_distances = {1.0};
    g.replicates = 600;
    const auto rg = run_connection_check(g, {}, &probes);
    REQUIRE(probes.size() == 8);
    CHECK(probes.back().successes > probes.front().successes);
    CHECK(static_cast<double>(probes.back().successes) / probes.back().trials > 0.99);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        CHECK(probes[k].expected == doctest::Approx(connection_probability(self_convolve(g.kernel), probes[k].mu, 1.0)));
    }
    bool has_monotone = false;
    for (const auto& v : rg.verdicts) {
        if (v.name.find("increasing") != std::string::npos) {
            has_monotone = true;
            CHECK(v.passed());
        }
    }
    CHECK(has_monotone);
}

TEST_CASE("visualization") {
    auto c = make(ExperimentKind::Visualize, KernelSpec::boolean(1.0, 2), 300.0);
    SUBCASE("empty clouds") {
        const auto s = export_visualization(c);
        CHECK(s.instance.vertices.empty());
        const auto svg = io::scene_svg(s);
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(svg.find("<circle") == std::string::npos);
        CHECK(svg.find("<line") == std::string::npos);
    }
    SUBCASE("Boolean edges are short") {
        c.lambda = 2.0;
        c.mu = 1.0;
        const auto s = export_visualization(c);
        CHECK(s.instance.vertices.size() > 400);
        CHECK_FALSE(s.edge_lengths.empty());
        CHECK(*std::max_element(s.edge_lengths.begin(), s.edge_lengths.end()) <= 2.0);
        const auto svg = io::scene_svg(s);
        CHECK(static_cast<std::size_t>(std::count(svg.begin(), svg.end(), '\n')) > s.instance.vertices.size());
    }
    SUBCASE("power-law scenes reach further than Gaussian ones") {
        c.lambda = 2.0;
        c.mu = 1.0;
        c.kernel = gaussian_norm(1.0);
        auto gl = export_visualization(c).edge_lengths;
        std::sort(gl.begin(), gl.end());
        const double q99 = gl[static_cast<std::size_t>(0.99 * static_cast<double>(gl.size() - 1))];
        c.kernel = KernelSpec::power_law(1.5, 1.0 / (3 * std::numbers::pi), 2);
        const auto pl = export_visualization(c).edge_lengths;
        CHECK(*std::max_element(pl.begin(), pl.end()) > q99);
    }
    SUBCASE("d = 3 is rejected") {
        c.kernel = KernelSpec::boolean(1.0, 3);
        c.torus.d = 3;
        CHECK_THROWS_AS(export_visualization(c), ConfigError);
    }
}

TEST_CASE("writers") {
    DegreeHistogram h;
    h.counts = {2, 0, 1};
    h.node_count = 3;
    CHECK(io::histogram_csv(h) == "degree,count\n0,2\n1,0\n2,1\n");

    PhaseGrid g;
    g.lambda_values = {0.5, 1.0};
    g.mu_values = {2.0};
    g.mean = {0.25, 0.75};
    g.stderr_ = {0.0, 0.1};
    CHECK(io::phase_csv(g) == "lambda\\mu,2\n0.5,0.25\n1,0.75\n");

    const auto e = IntersectionGraph::from_edges(Side::Vertices, 3, {{2, 0, 4}});
    CHECK(io::edges_csv(e) == "a,b,shared_count\n0,2,4\n");
    CHECK(io::num(0.1) == "0.1");
    CHECK(io::num(1e-20) == "1e-20");
}

TEST_CASE("Palm origin degree matches a uniformly chosen vertex") {
    const auto spec = gaussian_norm(1.0);
    const Torus torus = Torus::from_volume(2, 100.0);
    const int reps = 3000;
    std::vector<double> origin;
    std::vector<double> typical;
    for (int r = 0; r < reps; ++r) {
        const auto seed = derive_seed(404, {static_cast<std::uint64_t>(r)});
        Rng rv(derive_seed(seed, {0}));
        Rng ru(derive_seed(seed, {1}));
        Rng rb(derive_seed(seed, {2}));
        const auto V = palm_insert(sample_poisson(torus, 1.0, rv));
        const auto U = sample_poisson(torus, 1.0, ru, Role::Group);
        const auto g = project_onto_vertices(build_bipartite(V, U, spec, torus, {}, rb));
        origin.push_back(static_cast<double>(g.degree(0)));

        const auto inst = sample_instance(spec, torus, 1.0, 1.0, {}, derive_seed(seed, {3}));
        if (inst.vertices.size() > 0) {
            Rng pick(derive_seed(seed, {4}));
            const auto gv = project_onto_vertices(inst.graph);
            const auto v = static_cast<std::size_t>(pick.uniform(static_cast<double>(gv.node_count())));
            typical.push_back(static_cast<double>(gv.degree(v)));
        }
    }
    const auto a = stats::mean_stderr(origin);
    const auto b = stats::mean_stderr(typical);
    CHECK(std::abs(a.mean - b.mean) < 3.0 * std::hypot(a.stderr_, b.stderr_));
}

TEST_CASE("Palm degree sampler matches the expected degree") {
    const auto spec = gaussian_norm(1.0);
    const Torus torus(2, 20.0);
    const auto f = self_convolve(spec);
    const double expected = expected_degree(f, 2.0, 2.0);
    Rng rng(8);
    std::vector<double> d(20000);
    for (auto& x : d) x = static_cast<double>(sample_palm_degree(spec, torus, 2.0, 2.0, rng));
    const auto ms = stats::mean_stderr(d);
    CHECK(std::abs(ms.mean - expected) < 3.0 * ms.stderr_);
}
