#include "rigsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include <fmt/core.h>

#include "rigsim/analytics.hpp"
#include "rigsim/error.hpp"
#include "rigsim/parallel.hpp"
#include "rigsim/rng.hpp"

namespace rigsim {
namespace {

void require_kind(const ExperimentConfig& config, ExperimentKind kind) {
    if (config.kind != kind) {
        throw ConfigError(fmt::format("expected a '{}' config, got '{}'", to_string(kind), to_string(config.kind)));
    }
}

// Profile with the best available table when the quadrature misses its tolerance.
ConvolutionProfile profile_for(const ExperimentConfig& config, bool* converged = nullptr) {
    try {
        auto p = self_convolve(config.kernel, config.profile);
        if (converged) *converged = true;
        return p;
    } catch (const ProfileConvergenceError& e) {
        if (converged) *converged = false;
        return e.best_profile();
    }
}

std::size_t shared_groups(const BipartiteGraph& bi, std::size_t a, std::size_t b) {
    const auto ma = bi.memberships(a);
    const auto mb = bi.memberships(b);
    std::size_t count = 0;
    auto i = ma.begin();
    auto j = mb.begin();
    while (i != ma.end() && j != mb.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

// Background of intensity lambda with vertices 0 and 1 planted at the origin and (t, 0, ...).
BipartiteGraph planted_pair(const ExperimentConfig& config, const Torus& torus, double mu, double t,
                            std::uint64_t seed) {
    Rng v_rng(derive_seed(seed, {0}));
    Rng u_rng(derive_seed(seed, {1}));
    Rng b_rng(derive_seed(seed, {2}));
    const auto d = static_cast<std::size_t>(torus.dimension());
    std::vector<double> planted(2 * d, 0.0);
    planted[d] = torus.wrap(t);
    const PointCloud background = sample_poisson(torus, config.lambda, v_rng, Role::Vertex);
    const PointCloud vertices = background.with_prepended(planted);
    const PointCloud groups = sample_poisson(torus, mu, u_rng, Role::Group);
    return build_bipartite(vertices, groups, config.kernel, torus, config.build, b_rng);
}

std::string probe_label(double t) { return fmt::format("t={}", t); }

}  // namespace

Instance sample_instance(const KernelSpec& spec, const Torus& torus, double lambda, double mu,
                         const BuildOptions& build, std::uint64_t seed) {
    Rng v_rng(derive_seed(seed, {0}));
    Rng u_rng(derive_seed(seed, {1}));
    Rng b_rng(derive_seed(seed, {2}));
    PointCloud vertices = sample_poisson(torus, lambda, v_rng, Role::Vertex);
    PointCloud groups = sample_poisson(torus, mu, u_rng, Role::Group);
    BipartiteGraph graph = build_bipartite(vertices, groups, spec, torus, build, b_rng);
    return {std::move(vertices), std::move(groups), std::move(graph)};
}

std::size_t sample_palm_degree(const KernelSpec& spec, const Torus& torus, double lambda, double mu, Rng& rng) {
    const PointCloud groups = sample_poisson(torus, mu, rng, Role::Group);
    const std::vector<double> origin(static_cast<std::size_t>(torus.dimension()), 0.0);
    std::vector<std::size_t> joined;
    for (std::size_t u = 0; u < groups.size(); ++u) {
        const double p = spec(torus.distance(origin, groups.point(u)));
        if (p > 0.0 && (p >= 1.0 || rng.uniform() < p)) {
            joined.push_back(u);
        }
    }
    const PointCloud vertices = sample_poisson(torus, lambda, rng, Role::Vertex);
    if (joined.empty()) {
        return 0;
    }
    std::size_t degree = 0;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        for (std::size_t u : joined) {
            const double p = spec(torus.distance(vertices.point(v), groups.point(u)));
            if (p > 0.0 && (p >= 1.0 || rng.uniform() < p)) {
                ++degree;
                break;
            }
        }
    }
    return degree;
}

DegreeResult run_degree_experiment(const ExperimentConfig& config, const RunOptions& run) {
    require_kind(config, ExperimentKind::Degree);
    const Torus torus = config.torus.torus();
    const std::size_t reps = config.replicates;

    std::vector<DegreeHistogram> per_rep(reps);
    parallel_for(reps, run.threads, [&](std::size_t r) {
        const Instance inst =
            sample_instance(config.kernel, torus, config.lambda, config.mu, config.build, derive_seed(config.seed, {r}));
        per_rep[r] = degree_histogram(project_onto_vertices(inst.graph));
    });

    DegreeResult out;
    for (const auto& h : per_rep) {
        out.histogram.merge(h);
        out.replicate_means.push_back(h.mean);
    }
    out.empirical_mean = out.histogram.mean;
    if (reps >= 2) {
        out.empirical_stderr = stats::mean_stderr(out.replicate_means).stderr_;
    }
    if (out.histogram.node_count > 0 && !out.histogram.counts.empty()) {
        out.isolated_fraction =
            static_cast<double>(out.histogram.counts[0]) / static_cast<double>(out.histogram.node_count);
    }

    bool profile_ok = true;
    const ConvolutionProfile profile = profile_for(config, &profile_ok);
    try {
        out.theoretical_mean = expected_degree(profile, config.lambda, config.mu);
        out.theoretical_converged = profile_ok;
    } catch (const ConvergenceError& e) {
        out.theoretical_mean = e.best_estimate();
        out.theoretical_converged = false;
    }
    return out;
}

PhaseGrid run_phase_sweep(const ExperimentConfig& config, const RunOptions& run) {
    require_kind(config, ExperimentKind::Phase);
    const Torus torus = config.torus.torus();
    PhaseGrid grid;
    grid.lambda_values = config.lambda_values;
    grid.mu_values = config.mu_values;
    grid.replicates = config.replicates;
    const std::size_t nl = grid.rows();
    const std::size_t nm = grid.cols();
    const std::size_t reps = config.replicates;
    const std::size_t cells = nl * nm;

    std::vector<double> fraction(cells * reps, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> failure(cells * reps);
    parallel_for(cells * reps, run.threads, [&](std::size_t task) {
        const std::size_t cell = task / reps;
        const std::size_t r = task % reps;
        const std::size_t i = cell / nm;
        const std::size_t j = cell % nm;
        try {
            const Instance inst = sample_instance(config.kernel, torus, grid.lambda_values[i], grid.mu_values[j],
                                                  config.build, derive_seed(config.seed, {i, j, r}));
            const IntersectionGraph gv = project_onto_vertices(inst.graph);
            fraction[task] = gv.node_count() == 0 ? 0.0 : largest_component_fraction(gv);
        } catch (const std::exception& e) {
            failure[task] = e.what();
        }
    });

    grid.mean.assign(cells, std::numeric_limits<double>::quiet_NaN());
    grid.stderr_.assign(cells, std::numeric_limits<double>::quiet_NaN());
    grid.completed.assign(cells, 0);
    grid.errors.assign(cells, {});
    for (std::size_t c = 0; c < cells; ++c) {
        std::vector<double> ok;
        for (std::size_t r = 0; r < reps; ++r) {
            const std::size_t task = c * reps + r;
            if (failure[task].empty()) {
                ok.push_back(fraction[task]);
            } else if (grid.errors[c].empty()) {
                grid.errors[c] = failure[task];
            }
        }
        grid.completed[c] = ok.size();
        if (ok.size() >= 2) {
            const auto ms = stats::mean_stderr(ok);
            grid.mean[c] = ms.mean;
            grid.stderr_[c] = ms.stderr_;
        } else if (ok.size() == 1) {
            grid.mean[c] = ok[0];
            grid.stderr_[c] = 0.0;
        }
    }
    return grid;
}

bool ValidationReport::all_passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.passed(); });
}

ValidationReport run_joint_groups_check(const ExperimentConfig& config, const RunOptions& run,
                                        std::vector<SharedGroupProbe>* probes_out) {
    require_kind(config, ExperimentKind::JointGroups);
    const Torus torus = config.torus.torus();
    const auto& distances = config.probe_distances;
    const std::size_t reps = config.replicates;
    for (double t : distances) {
        if (t < 0.0 || t > 0.5 * torus.side()) {
            throw ConfigError(fmt::format("probe distance {} outside [0, L/2]", t));
        }
    }

    std::vector<std::int64_t> counts(distances.size() * reps, 0);
    parallel_for(counts.size(), run.threads, [&](std::size_t task) {
        const std::size_t p = task / reps;
        const std::size_t r = task % reps;
        const BipartiteGraph bi = planted_pair(config, torus, config.mu, distances[p], derive_seed(config.seed, {p, r}));
        counts[task] = static_cast<std::int64_t>(shared_groups(bi, 0, 1));
    });

    bool profile_ok = true;
    const ConvolutionProfile profile = profile_for(config, &profile_ok);
    ValidationReport report;
    report.kind = to_string(config.kind);
    report.details["profile_converged"] = profile_ok;
    report.details["probes"] = nlohmann::json::array();
    std::vector<SharedGroupProbe> probes;
    const double n = static_cast<double>(reps);
    for (std::size_t p = 0; p < distances.size(); ++p) {
        SharedGroupProbe probe;
        probe.distance = distances[p];
        probe.expected_mean = config.mu * eval_f(profile, probe.distance);
        probe.counts.assign(counts.begin() + static_cast<std::ptrdiff_t>(p * reps),
                            counts.begin() + static_cast<std::ptrdiff_t>((p + 1) * reps));
        std::vector<double> as_double(probe.counts.begin(), probe.counts.end());
        if (reps >= 2) {
            const auto ms = stats::mean_stderr(as_double);
            probe.mean = ms.mean;
            probe.variance = ms.variance;
        } else {
            probe.mean = as_double.empty() ? 0.0 : as_double[0];
        }
        const std::string label = probe_label(probe.distance);
        const double m = probe.expected_mean;
        if (m == 0.0) {
            const auto peak = *std::max_element(probe.counts.begin(), probe.counts.end());
            report.verdicts.push_back(
                stats::make_verdict(label + " all zero", static_cast<double>(peak), 0.0, 0.0, reps));
        } else {
            report.verdicts.push_back(stats::within_sigma(label + " mean", probe.mean, m, std::sqrt(m / n), 3.0, reps));
            if (reps >= 2) {
                const double var_sigma = std::sqrt((m + 2.0 * m * m * n / (n - 1.0)) / n);
                report.verdicts.push_back(
                    stats::within_sigma(label + " variance", probe.variance, m, var_sigma, 3.0, reps));
            }
            if (reps >= 30) {
                auto v = stats::poisson_dispersion_test(probe.counts, config.alpha);
                v.name = label + " dispersion";
                report.verdicts.push_back(std::move(v));
            }
        }
        report.details["probes"].push_back({{"distance", probe.distance},
                                            {"expected_mean", probe.expected_mean},
                                            {"mean", probe.mean},
                                            {"variance", probe.variance},
                                            {"replicates", reps}});
        probes.push_back(std::move(probe));
    }
    if (probes_out) {
        *probes_out = std::move(probes);
    }
    return report;
}

ValidationReport run_connection_check(const ExperimentConfig& config, const RunOptions& run,
                                      std::vector<ConnectionProbe>* probes_out) {
    require_kind(config, ExperimentKind::ConnectionCheck);
    const Torus torus = config.torus.torus();
    const auto& distances = config.probe_distances;
    const std::vector<double> mus = config.mu_values.empty() ? std::vector<double>{config.mu} : config.mu_values;
    const std::size_t reps = config.replicates;
    for (double t : distances) {
        if (t < 0.0 || t > 0.5 * torus.side()) {
            throw ConfigError(fmt::format("probe distance {} outside [0, L/2]", t));
        }
    }
    const std::size_t np = distances.size();

    std::vector<std::uint8_t> linked(mus.size() * np * reps, 0);
    parallel_for(linked.size(), run.threads, [&](std::size_t task) {
        const std::size_t k = task / (np * reps);
        const std::size_t p = (task / reps) % np;
        const std::size_t r = task % reps;
        const BipartiteGraph bi = planted_pair(config, torus, mus[k], distances[p], derive_seed(config.seed, {k, p, r}));
        linked[task] = shared_groups(bi, 0, 1) > 0 ? 1 : 0;
    });

    bool profile_ok = true;
    const ConvolutionProfile profile = profile_for(config, &profile_ok);
    ValidationReport report;
    report.kind = to_string(config.kind);
    report.details["profile_converged"] = profile_ok;
    report.details["confidence"] = config.confidence;
    report.details["probes"] = nlohmann::json::array();
    std::vector<ConnectionProbe> probes;
    std::size_t covered = 0;
    std::size_t interval_checks = 0;
    for (std::size_t k = 0; k < mus.size(); ++k) {
        for (std::size_t p = 0; p < np; ++p) {
            ConnectionProbe probe;
            probe.distance = distances[p];
            probe.mu = mus[k];
            probe.expected = connection_probability(profile, probe.mu, probe.distance);
            probe.trials = static_cast<std::int64_t>(reps);
            const auto first = linked.begin() + static_cast<std::ptrdiff_t>((k * np + p) * reps);
            probe.successes = std::count(first, first + static_cast<std::ptrdiff_t>(reps), std::uint8_t{1});
            probe.interval = stats::wilson_interval(probe.successes, probe.trials, config.confidence);
            const double freq = static_cast<double>(probe.successes) / static_cast<double>(probe.trials);
            const std::string label = fmt::format("mu={} {}", probe.mu, probe_label(probe.distance));
            if (eval_f(profile, probe.distance) == 0.0) {
                report.verdicts.push_back(stats::make_verdict(label + " exactly zero", freq, 0.0, 0.0, reps));
            } else {
                auto v = stats::make_verdict(label + " wilson", probe.expected, probe.interval.lo, probe.interval.hi,
                                             reps);
                ++interval_checks;
                covered += v.passed() ? 1 : 0;
                report.verdicts.push_back(std::move(v));
            }
            report.details["probes"].push_back({{"distance", probe.distance},
                                                {"mu", probe.mu},
                                                {"expected", probe.expected},
                                                {"frequency", freq},
                                                {"successes", probe.successes},
                                                {"trials", probe.trials},
                                                {"lo", probe.interval.lo},
                                                {"hi", probe.interval.hi}});
            probes.push_back(probe);
        }
    }
    if (interval_checks > 0) {
        report.verdicts.push_back(stats::make_verdict(
            "coverage", static_cast<double>(covered) / static_cast<double>(interval_checks), 0.95, 1.0,
            interval_checks));
    }
    if (mus.size() >= 2) {
        // Frequencies should grow with mu: count significant drops between consecutive mu values.
        for (std::size_t p = 0; p < np; ++p) {
            if (eval_f(profile, distances[p]) == 0.0) {
                continue;
            }
            std::size_t drops = 0;
            for (std::size_t k = 1; k < mus.size(); ++k) {
                if (probes[k * np + p].interval.hi < probes[(k - 1) * np + p].interval.lo) {
                    ++drops;
                }
            }
            report.verdicts.push_back(stats::make_verdict(probe_label(distances[p]) + " increasing in mu",
                                                          static_cast<double>(drops), 0.0, 0.0, mus.size()));
        }
    }
    if (probes_out) {
        *probes_out = std::move(probes);
    }
    return report;
}

Scene export_visualization(const ExperimentConfig& config) {
    require_kind(config, ExperimentKind::Visualize);
    const Torus torus = config.torus.torus();
    if (torus.dimension() != 2) {
        throw ConfigError("visualization requires d = 2");
    }
    Instance inst = sample_instance(config.kernel, torus, config.lambda, config.mu, config.build, config.seed);
    IntersectionGraph gv = project_onto_vertices(inst.graph);
    std::vector<double> lengths;
    for (std::size_t a = 0; a < gv.node_count(); ++a) {
        for (NodeIndex b : gv.neighbors(a)) {
            if (a < b) {
                lengths.push_back(torus.distance(inst.vertices.point(a), inst.vertices.point(b)));
            }
        }
    }
    return Scene{torus, std::move(inst), std::move(gv), std::move(lengths)};
}

}  // namespace rigsim
