#pragma once

// Roadmap graph with lazily validated edges and the lazy shortest-path
// search used by every planner.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "harmony/kinematics.hpp"
#include "harmony/nn_index.hpp"
#include "harmony/regions.hpp"

namespace harmony {

class Scene;

enum class EdgeStatus : std::uint8_t { unchecked = 0, valid = 1, invalid = 2 };

struct RoadmapVertex {
    Configuration q;
    std::vector<double> coords;
    Region tag{Region::base};
    bool goal{false};
    /// Weighted distance to the nearest goal vertex; the search heuristic.
    double to_goal{std::numeric_limits<double>::infinity()};
};

struct RoadmapEdge {
    VertexId u{0};
    VertexId v{0};
    double cost{0.0};
    EdgeStatus status{EdgeStatus::unchecked};

    [[nodiscard]] VertexId other(VertexId w) const noexcept { return w == u ? v : u; }
};

using EdgeId = std::uint32_t;

class Roadmap {
public:
    explicit Roadmap(std::vector<double> weights);

    /// The first vertex added is the start.
    VertexId add_vertex(Configuration q, Region tag, bool goal = false);
    /// Cost is the weighted distance between the endpoints, computed once.
    EdgeId add_edge(VertexId u, VertexId v);
    void mark_goal(VertexId v);
    /// Statuses only move away from unchecked; throws std::logic_error on a
    /// reversal.
    void set_status(EdgeId e, EdgeStatus status);

    [[nodiscard]] const RoadmapVertex& vertex(VertexId v) const { return vertices_[v]; }
    [[nodiscard]] const RoadmapEdge& edge(EdgeId e) const { return edges_[e]; }
    [[nodiscard]] std::span<const EdgeId> incident(VertexId v) const { return adjacency_[v]; }
    [[nodiscard]] std::size_t vertex_count() const noexcept { return vertices_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<VertexId>& goals() const noexcept { return goals_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] static constexpr VertexId start() noexcept { return 0; }
    /// Distances computed to keep `to_goal` current.
    [[nodiscard]] std::int64_t distance_evaluations() const noexcept { return distance_evaluations_; }

private:
    std::vector<double> weights_;
    std::vector<RoadmapVertex> vertices_;
    std::vector<RoadmapEdge> edges_;
    std::vector<std::vector<EdgeId>> adjacency_;
    std::vector<VertexId> goals_;
    std::int64_t distance_evaluations_{0};
};

struct MotionCounters {
    std::int64_t collision_checks{0};
    std::int64_t edges_validated{0};
};

/// Straight-line motion check. Configurations at weighted spacing <= `step`
/// are tested first; every gap between them is then certified by clearance
/// against the displacement bound, bisecting where needed. A motion whose
/// gaps cannot be certified down to a 1e-4 displacement is rejected, so an
/// accepted motion is collision-free everywhere, not only at the samples.
[[nodiscard]] bool motion_valid(const RobotModel& model, const Scene& scene, const Configuration& a,
                                const Configuration& b, double step, MotionCounters* counters = nullptr);

/// Plain pointwise check at weighted spacing <= `step`, endpoints included.
[[nodiscard]] bool motion_valid_pointwise(const RobotModel& model, const Scene& scene, const Configuration& a,
                                          const Configuration& b, double step);

/// Returns whether the edge is valid; the first call resolves and caches.
using EdgeValidator = std::function<bool(const Roadmap&, EdgeId)>;

bool validate_edge(Roadmap& roadmap, EdgeId e, const EdgeValidator& check);
bool validate_edge(Roadmap& roadmap, EdgeId e, const Scene& scene, const RobotModel& model, double step,
                   MotionCounters* counters = nullptr);

struct GraphPath {
    std::vector<VertexId> vertices;
    std::vector<EdgeId> edges;
    double cost{0.0};
};

struct SearchCounters {
    std::int64_t searches{0};
    std::int64_t relaxations{0};
};

/// Shortest start-to-goal path over non-invalid edges, validating its
/// unchecked edges in path order and re-searching after each rejection.
/// Candidates come from A* guided by the weighted distance to the nearest
/// goal, which never overestimates an edge-cost sum. Returns nullopt when no
/// valid candidate remains or `stop` returns true before a candidate search.
[[nodiscard]] std::optional<GraphPath> lazy_shortest_path(Roadmap& roadmap, const EdgeValidator& check,
                                                          SearchCounters* counters = nullptr,
                                                          const std::function<bool()>& stop = {});
[[nodiscard]] std::optional<GraphPath> lazy_shortest_path(Roadmap& roadmap, const Scene& scene,
                                                          const RobotModel& model, double step);

/// Text dump: "v id tag goal coords..." lines, then "e u v status cost".
void write_edge_list(const Roadmap& roadmap, std::ostream& out);

}  // namespace harmony
