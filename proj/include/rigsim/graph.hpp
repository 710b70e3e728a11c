#pragma once

#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "rigsim/geometry.hpp"
#include "rigsim/kernels.hpp"
#include "rigsim/rng.hpp"

namespace rigsim {

using NodeIndex = std::uint32_t;

enum class BuildMode { Exact, Truncated, Auto };

const char* to_string(BuildMode mode) noexcept;

struct BuildOptions {
    BuildMode mode = BuildMode::Auto;
    double eps_tail = 1e-3;
    /// Auto picks Exact while |V|*|U| stays at or below this.
    std::size_t exact_pair_limit = 100'000;
};

/// What a build actually did.
struct BuildRecord {
    BuildMode mode = BuildMode::Exact;
    double eps_tail = 0.0;
    double cutoff = 0.0;  ///< truncation radius; +inf for Exact
    std::uint64_t seed = 0;
};

/// Compressed adjacency: row i is items[offsets[i] .. offsets[i+1]).
struct Csr {
    std::vector<std::size_t> offsets{0};
    std::vector<NodeIndex> items;

    std::size_t rows() const noexcept { return offsets.size() - 1; }
    std::span<const NodeIndex> row(std::size_t i) const {
        return {items.data() + offsets[i], offsets[i + 1] - offsets[i]};
    }
};

/// Transpose of a CSR with `columns` columns; rows of the result are sorted.
Csr transpose(const Csr& m, std::size_t columns);

/// Membership graph between vertices V and groups U.
class BipartiteGraph {
public:
    BipartiteGraph(std::size_t group_count, Csr memberships, BuildRecord record = {});
    static BipartiteGraph from_lists(std::size_t group_count, const std::vector<std::vector<NodeIndex>>& lists);

    std::size_t vertex_count() const noexcept { return memberships_.rows(); }
    std::size_t group_count() const noexcept { return group_count_; }
    std::span<const NodeIndex> memberships(std::size_t v) const { return memberships_.row(v); }
    const Csr& membership_table() const noexcept { return memberships_; }
    /// Member vertices of every group (sorted).
    Csr group_members() const { return transpose(memberships_, group_count_); }
    std::size_t edge_count() const noexcept { return memberships_.items.size(); }
    const BuildRecord& record() const noexcept { return record_; }

private:
    std::size_t group_count_;
    Csr memberships_;
    BuildRecord record_;
};

/// Step (i) of the construction: each (v, u) joins independently with
/// probability g(torus distance). Exact visits pairs vertex-major, group-minor;
/// Truncated restricts to a cell grid of side >= support_radius(spec, eps_tail).
BipartiteGraph build_bipartite(const PointCloud& vertices, const PointCloud& groups, const KernelSpec& spec,
                               const Torus& torus, const BuildOptions& options, Rng& rng);

enum class Side { Vertices, Groups };

/// One-mode projection with per-edge multiplicities.
class IntersectionGraph {
public:
    IntersectionGraph(Side side, Csr adjacency, std::vector<std::uint32_t> shared_counts);
    /// From an undirected edge list (a, b, shared); duplicates are merged by summing.
    static IntersectionGraph from_edges(Side side, std::size_t node_count,
                                        const std::vector<std::tuple<NodeIndex, NodeIndex, std::uint32_t>>& edges);

    Side side() const noexcept { return side_; }
    std::size_t node_count() const noexcept { return adjacency_.rows(); }
    std::size_t edge_count() const noexcept { return adjacency_.items.size() / 2; }
    std::span<const NodeIndex> neighbors(std::size_t i) const { return adjacency_.row(i); }
    std::span<const std::uint32_t> shared_counts(std::size_t i) const {
        return {shared_.data() + adjacency_.offsets[i], adjacency_.offsets[i + 1] - adjacency_.offsets[i]};
    }
    std::size_t degree(std::size_t i) const { return adjacency_.offsets[i + 1] - adjacency_.offsets[i]; }
    /// Shared count of the pair, 0 when not adjacent.
    std::uint32_t shared_count(NodeIndex a, NodeIndex b) const;

private:
    Side side_;
    Csr adjacency_;
    std::vector<std::uint32_t> shared_;
};

IntersectionGraph project_onto_vertices(const BipartiteGraph& bi);
IntersectionGraph project_onto_groups(const BipartiteGraph& bi);

/// Connected components; ids are dense and ordered by each component's
/// smallest node index.
struct ComponentPartition {
    std::vector<std::uint32_t> component_id;
    std::vector<std::size_t> sizes;

    std::size_t node_count() const noexcept { return component_id.size(); }
    std::size_t component_count() const noexcept { return sizes.size(); }
    std::size_t largest() const noexcept;

    /// Partition induced on nodes [first, first + count), relabelled canonically.
    ComponentPartition restrict_to(std::size_t first, std::size_t count) const;
};

/// Canonical partition from arbitrary labels.
ComponentPartition canonical_partition(std::span<const std::size_t> labels);

ComponentPartition components(const IntersectionGraph& graph);

/// Components of the bipartite graph on V u U; vertex v is node v and group u
/// is node vertex_count + u.
ComponentPartition bipartite_components(const BipartiteGraph& bi);

double largest_component_fraction(const IntersectionGraph& graph);

struct DegreeHistogram {
    std::vector<std::size_t> counts;  ///< counts[k] = number of nodes of degree k
    std::size_t node_count = 0;
    double mean = 0.0;

    /// Adds another histogram's counts; the mean is recomputed.
    void merge(const DegreeHistogram& other);
};

DegreeHistogram degree_histogram(const IntersectionGraph& graph);

}  // namespace rigsim
