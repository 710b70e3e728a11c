#include "rigsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rigsim/error.hpp"

namespace rigsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (size_[a] < size_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

// Buckets points into an m^d grid of cells of side L/m >= cutoff.
class CellGrid {
public:
    CellGrid(const PointCloud& points, const Torus& torus, double cutoff)
        : d_(torus.dimension()), side_(torus.side()) {
        const double per_axis = std::floor(side_ / cutoff);
        m_ = per_axis < 1.0 ? 1 : static_cast<std::size_t>(std::min(per_axis, 1024.0));
        std::size_t cells = 1;
        for (int k = 0; k < d_; ++k) {
            cells *= m_;
        }
        std::vector<std::size_t> cell_of(points.size());
        Csr table;
        table.offsets.assign(cells + 1, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            cell_of[i] = cell_index(points.point(i));
            ++table.offsets[cell_of[i] + 1];
        }
        std::partial_sum(table.offsets.begin(), table.offsets.end(), table.offsets.begin());
        table.items.resize(points.size());
        std::vector<std::size_t> cursor(table.offsets.begin(), table.offsets.end() - 1);
        for (std::size_t i = 0; i < points.size(); ++i) {
            table.items[cursor[cell_of[i]]++] = static_cast<NodeIndex>(i);
        }
        table_ = std::move(table);

        // Offsets in {-1,0,1}^d, deduplicated once the grid is narrower than 3 cells.
        const std::size_t span = std::min<std::size_t>(m_, 3);
        std::size_t combos = 1;
        for (int k = 0; k < d_; ++k) {
            combos *= span;
        }
        for (std::size_t c = 0; c < combos; ++c) {
            std::vector<long> off(static_cast<std::size_t>(d_));
            std::size_t rest = c;
            for (int k = 0; k < d_; ++k) {
                off[static_cast<std::size_t>(k)] = static_cast<long>(rest % span) - (span == 3 ? 1 : 0);
                rest /= span;
            }
            stencil_.push_back(std::move(off));
        }
    }

    std::size_t cell_index(std::span<const double> x) const {
        std::size_t idx = 0;
        for (int k = d_ - 1; k >= 0; --k) {
            auto c = static_cast<std::size_t>(x[static_cast<std::size_t>(k)] / side_ * static_cast<double>(m_));
            idx = idx * m_ + std::min(c, m_ - 1);
        }
        return idx;
    }

    template <typename Visit>
    void for_each_near(std::span<const double> x, Visit&& visit) const {
        std::vector<long> home(static_cast<std::size_t>(d_));
        for (int k = 0; k < d_; ++k) {
            auto c = static_cast<long>(x[static_cast<std::size_t>(k)] / side_ * static_cast<double>(m_));
            home[static_cast<std::size_t>(k)] = std::min<long>(c, static_cast<long>(m_) - 1);
        }
        const auto m = static_cast<long>(m_);
        for (const auto& off : stencil_) {
            std::size_t idx = 0;
            for (int k = d_ - 1; k >= 0; --k) {
                long c = (home[static_cast<std::size_t>(k)] + off[static_cast<std::size_t>(k)] + m) % m;
                idx = idx * m_ + static_cast<std::size_t>(c);
            }
            for (NodeIndex j : table_.row(idx)) {
                visit(j);
            }
        }
    }

private:
    int d_;
    double side_;
    std::size_t m_ = 1;
    Csr table_;
    std::vector<std::vector<long>> stencil_;
};

void check_lists(const Csr& m, std::size_t columns) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row[k] >= columns) {
                throw DomainError("membership index out of range");
            }
            if (k > 0 && row[k] <= row[k - 1]) {
                throw DomainError("membership lists must be sorted and duplicate-free");
            }
        }
    }
}

// For each node, counts the hubs it shares with every other node:
// node -> hubs -> nodes of those hubs.
IntersectionGraph project(Side side, const Csr& node_to_hub, const Csr& hub_to_node) {
    const std::size_t n = node_to_hub.rows();
    std::vector<std::uint32_t> tally(n, 0);
    std::vector<NodeIndex> touched;
    Csr adjacency;
    adjacency.offsets.reserve(n + 1);
    std::vector<std::uint32_t> shared;
    for (std::size_t v = 0; v < n; ++v) {
        touched.clear();
        for (NodeIndex hub : node_to_hub.row(v)) {
            for (NodeIndex w : hub_to_node.row(hub)) {
                if (w == v) {
                    continue;
                }
                if (tally[w]++ == 0) {
                    touched.push_back(w);
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (NodeIndex w : touched) {
            adjacency.items.push_back(w);
            shared.push_back(tally[w]);
            tally[w] = 0;
        }
        adjacency.offsets.push_back(adjacency.items.size());
    }
    return IntersectionGraph(side, std::move(adjacency), std::move(shared));
}

}  // namespace

const char* to_string(BuildMode mode) noexcept {
    switch (mode) {
        case BuildMode::Exact:
            return "exact";
        case BuildMode::Truncated:
            return "truncated";
        case BuildMode::Auto:
            return "auto";
    }
    return "unknown";
}

Csr transpose(const Csr& m, std::size_t columns) {
    Csr out;
    out.offsets.assign(columns + 1, 0);
    for (NodeIndex c : m.items) {
        ++out.offsets[c + 1];
    }
    std::partial_sum(out.offsets.begin(), out.offsets.end(), out.offsets.begin());
    out.items.resize(m.items.size());
    std::vector<std::size_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (NodeIndex c : m.row(r)) {
            out.items[cursor[c]++] = static_cast<NodeIndex>(r);
        }
    }
    return out;
}

BipartiteGraph::BipartiteGraph(std::size_t group_count, Csr memberships, BuildRecord record)
    : group_count_(group_count), memberships_(std::move(memberships)), record_(record) {
    check_lists(memberships_, group_count_);
}

BipartiteGraph BipartiteGraph::from_lists(std::size_t group_count,
                                          const std::vector<std::vector<NodeIndex>>& lists) {
    Csr m;
    for (const auto& l : lists) {
        m.items.insert(m.items.end(), l.begin(), l.end());
        m.offsets.push_back(m.items.size());
    }
    return BipartiteGraph(group_count, std::move(m));
}

BipartiteGraph build_bipartite(const PointCloud& vertices, const PointCloud& groups, const KernelSpec& spec,
                               const Torus& torus, const BuildOptions& options, Rng& rng) {
    if (vertices.role() != Role::Vertex || groups.role() != Role::Group) {
        throw DomainError("build_bipartite: expected a vertex cloud and a group cloud");
    }
    const int d = torus.dimension();
    if (vertices.dimension() != d || groups.dimension() != d || spec.dimension() != d) {
        throw DomainError("build_bipartite: dimension mismatch between clouds, kernel and torus");
    }
    if (groups.size() > std::numeric_limits<NodeIndex>::max() ||
        vertices.size() > std::numeric_limits<NodeIndex>::max()) {
        throw DomainError("build_bipartite: too many points");
    }

    BuildMode mode = options.mode;
    const bool unbounded = !spec.bounded_support();
    if (mode == BuildMode::Truncated && options.eps_tail == 0.0 && unbounded) {
        throw ConfigError("truncated build needs eps_tail > 0 for a kernel with unbounded support");
    }
    if (mode == BuildMode::Auto) {
        const double pairs = static_cast<double>(vertices.size()) * static_cast<double>(groups.size());
        const bool small = pairs <= static_cast<double>(options.exact_pair_limit);
        mode = (small || (options.eps_tail == 0.0 && unbounded)) ? BuildMode::Exact : BuildMode::Truncated;
    }

    BuildRecord record{mode, mode == BuildMode::Truncated ? options.eps_tail : 0.0, kInf, rng.seed()};
    Csr memberships;
    memberships.offsets.reserve(vertices.size() + 1);

    auto consider = [&](const double* x, NodeIndex u, double cutoff2) {
        const double r2 = torus.distance_squared(x, groups.point(u).data());
        if (r2 > cutoff2) {
            return;
        }
        const double p = spec(std::sqrt(r2));
        if (p <= 0.0) {
            return;
        }
        if (p >= 1.0 || rng.uniform() < p) {
            memberships.items.push_back(u);
        }
    };

    if (mode == BuildMode::Exact) {
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            const double* x = vertices.point(v).data();
            for (std::size_t u = 0; u < groups.size(); ++u) {
                consider(x, static_cast<NodeIndex>(u), kInf);
            }
            memberships.offsets.push_back(memberships.items.size());
        }
    } else {
        const double cutoff = support_radius(spec, options.eps_tail);
        record.cutoff = cutoff;
        const double cutoff2 = cutoff * cutoff;
        if (cutoff > 0.0) {
            CellGrid grid(groups, torus, cutoff);
            for (std::size_t v = 0; v < vertices.size(); ++v) {
                const auto start = memberships.items.size();
                const double* x = vertices.point(v).data();
                grid.for_each_near(vertices.point(v), [&](NodeIndex u) { consider(x, u, cutoff2); });
                std::sort(memberships.items.begin() + static_cast<std::ptrdiff_t>(start), memberships.items.end());
                memberships.offsets.push_back(memberships.items.size());
            }
        } else {
            memberships.offsets.resize(vertices.size() + 1, 0);
        }
    }
    return BipartiteGraph(groups.size(), std::move(memberships), record);
}

IntersectionGraph::IntersectionGraph(Side side, Csr adjacency, std::vector<std::uint32_t> shared_counts)
    : side_(side), adjacency_(std::move(adjacency)), shared_(std::move(shared_counts)) {
    if (shared_.size() != adjacency_.items.size()) {
        throw DomainError("intersection graph: one shared count per adjacency entry required");
    }
}

IntersectionGraph IntersectionGraph::from_edges(
    Side side, std::size_t node_count, const std::vector<std::tuple<NodeIndex, NodeIndex, std::uint32_t>>& edges) {
    std::vector<std::vector<std::pair<NodeIndex, std::uint32_t>>> rows(node_count);
    for (const auto& [a, b, c] : edges) {
        if (a >= node_count || b >= node_count) {
            throw DomainError("edge endpoint out of range");
        }
        if (a == b) {
            throw DomainError("self-loops are not allowed");
        }
        if (c == 0) {
            throw DomainError("shared count must be >= 1");
        }
        rows[a].emplace_back(b, c);
        rows[b].emplace_back(a, c);
    }
    Csr adjacency;
    std::vector<std::uint32_t> shared;
    for (auto& row : rows) {
        std::sort(row.begin(), row.end());
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k > 0 && row[k].first == row[k - 1].first) {
                shared.back() += row[k].second;
                continue;
            }
            adjacency.items.push_back(row[k].first);
            shared.push_back(row[k].second);
        }
        adjacency.offsets.push_back(adjacency.items.size());
    }
    return IntersectionGraph(side, std::move(adjacency), std::move(shared));
}

std::uint32_t IntersectionGraph::shared_count(NodeIndex a, NodeIndex b) const {
    auto row = neighbors(a);
    auto it = std::lower_bound(row.begin(), row.end(), b);
    if (it == row.end() || *it != b) {
        return 0;
    }
    return shared_counts(a)[static_cast<std::size_t>(it - row.begin())];
}

IntersectionGraph project_onto_vertices(const BipartiteGraph& bi) {
    return project(Side::Vertices, bi.membership_table(), bi.group_members());
}

IntersectionGraph project_onto_groups(const BipartiteGraph& bi) {
    return project(Side::Groups, bi.group_members(), bi.membership_table());
}

std::size_t ComponentPartition::largest() const noexcept {
    return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

ComponentPartition canonical_partition(std::span<const std::size_t> labels) {
    ComponentPartition out;
    out.component_id.resize(labels.size());
    std::vector<std::uint32_t> id_of_label;
    const std::size_t max_label = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
    id_of_label.assign(max_label + 1, std::numeric_limits<std::uint32_t>::max());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& id = id_of_label[labels[i]];
        if (id == std::numeric_limits<std::uint32_t>::max()) {
            id = static_cast<std::uint32_t>(out.sizes.size());
            out.sizes.push_back(0);
        }
        out.component_id[i] = id;
        ++out.sizes[id];
    }
    return out;
}

ComponentPartition ComponentPartition::restrict_to(std::size_t first, std::size_t count) const {
    if (first + count > component_id.size()) {
        throw DomainError("restrict_to: range exceeds the partition");
    }
    std::vector<std::size_t> labels(component_id.begin() + static_cast<std::ptrdiff_t>(first),
                                    component_id.begin() + static_cast<std::ptrdiff_t>(first + count));
    return canonical_partition(labels);
}

ComponentPartition components(const IntersectionGraph& graph) {
    const std::size_t n = graph.node_count();
    UnionFind uf(n);
    for (std::size_t v = 0; v < n; ++v) {
        for (NodeIndex w : graph.neighbors(v)) {
            if (w > v) {
                uf.unite(v, w);
            }
        }
    }
    std::vector<std::size_t> roots(n);
    for (std::size_t v = 0; v < n; ++v) {
        roots[v] = uf.find(v);
    }
    return canonical_partition(roots);
}

ComponentPartition bipartite_components(const BipartiteGraph& bi) {
    const std::size_t nv = bi.vertex_count();
    const std::size_t n = nv + bi.group_count();
    UnionFind uf(n);
    for (std::size_t v = 0; v < nv; ++v) {
        for (NodeIndex u : bi.memberships(v)) {
            uf.unite(v, nv + u);
        }
    }
    std::vector<std::size_t> roots(n);
    for (std::size_t i = 0; i < n; ++i) {
        roots[i] = uf.find(i);
    }
    return canonical_partition(roots);
}

double largest_component_fraction(const IntersectionGraph& graph) {
    if (graph.node_count() == 0) {
        throw DomainError("largest_component_fraction: graph has no nodes");
    }
    const auto part = components(graph);
    return static_cast<double>(part.largest()) / static_cast<double>(graph.node_count());
}

void DegreeHistogram::merge(const DegreeHistogram& other) {
    if (other.counts.size() > counts.size()) {
        counts.resize(other.counts.size(), 0);
    }
    for (std::size_t k = 0; k < other.counts.size(); ++k) {
        counts[k] += other.counts[k];
    }
    node_count += other.node_count;
    double total = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        total += static_cast<double>(k) * static_cast<double>(counts[k]);
    }
    mean = node_count == 0 ? 0.0 : total / static_cast<double>(node_count);
}

DegreeHistogram degree_histogram(const IntersectionGraph& graph) {
    DegreeHistogram h;
    h.node_count = graph.node_count();
    h.counts.assign(1, 0);
    for (std::size_t v = 0; v < graph.node_count(); ++v) {
        const std::size_t k = graph.degree(v);
        if (k >= h.counts.size()) {
            h.counts.resize(k + 1, 0);
        }
        ++h.counts[k];
    }
    h.mean = h.node_count == 0 ? 0.0
                               : 2.0 * static_cast<double>(graph.edge_count()) / static_cast<double>(h.node_count);
    return h;
}

}  // namespace rigsim
