#include "harmony/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "harmony/scene.hpp"

namespace harmony {

namespace {

constexpr double kMinCertifiedDisplacement = 1e-4;

}  // namespace

Roadmap::Roadmap(std::vector<double> weights) : weights_(std::move(weights)) {}

VertexId Roadmap::add_vertex(Configuration q, Region tag, bool goal) {
    const auto id = static_cast<VertexId>(vertices_.size());
    RoadmapVertex vertex;
    vertex.coords = flatten(q);
    vertex.q = std::move(q);
    vertex.tag = tag;
    for (const VertexId g : goals_)
        vertex.to_goal = std::min(vertex.to_goal, weighted_distance(vertex.coords, vertices_[g].coords, weights_));
    distance_evaluations_ += static_cast<std::int64_t>(goals_.size());
    vertices_.push_back(std::move(vertex));
    adjacency_.emplace_back();
    if (goal) mark_goal(id);
    return id;
}

EdgeId Roadmap::add_edge(VertexId u, VertexId v) {
    const auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back({u, v, weighted_distance(vertices_[u].coords, vertices_[v].coords, weights_), EdgeStatus::unchecked});
    adjacency_[u].push_back(id);
    if (v != u) adjacency_[v].push_back(id);
    return id;
}

void Roadmap::mark_goal(VertexId v) {
    if (vertices_[v].goal) return;
    vertices_[v].goal = true;
    goals_.push_back(v);
    for (RoadmapVertex& w : vertices_)
        w.to_goal = std::min(w.to_goal, weighted_distance(w.coords, vertices_[v].coords, weights_));
    vertices_[v].to_goal = 0.0;
    distance_evaluations_ += static_cast<std::int64_t>(vertices_.size());
}

void Roadmap::set_status(EdgeId e, EdgeStatus status) {
    EdgeStatus& current = edges_[e].status;
    if (current == status) return;
    if (current != EdgeStatus::unchecked || status == EdgeStatus::unchecked)
        throw std::logic_error("edge status cannot be reversed");
    current = status;
}

bool motion_valid(const RobotModel& model, const Scene& scene, const Configuration& a, const Configuration& b,
                  double step, MotionCounters* counters) {
    std::int64_t checks = 0;
    auto clearance_at = [&](double t) {
        ++checks;
        return robot_clearance(model, interpolate(a, b, t), scene);
    };
    const double length = weighted_distance(model, a, b);
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(length / step)));
    const double total_displacement = displacement_bound(model, a, b) * (1.0 + 1e-9);

    bool ok = true;
    std::vector<double> clearance(n + 1);
    for (std::size_t i = 0; i <= n && ok; ++i) {
        clearance[i] = clearance_at(static_cast<double>(i) / static_cast<double>(n));
        ok = clearance[i] > 0.0;
    }

    struct Gap {
        double t0, c0, t1, c1;
    };
    std::vector<Gap> stack;
    for (std::size_t i = 0; i < n && ok; ++i) {
        stack.push_back({static_cast<double>(i) / static_cast<double>(n), clearance[i],
                         static_cast<double>(i + 1) / static_cast<double>(n), clearance[i + 1]});
        while (!stack.empty() && ok) {
            const Gap g = stack.back();
            stack.pop_back();
            const double moved = (g.t1 - g.t0) * total_displacement;
            if (g.c0 + g.c1 > moved) continue;
            if (moved < kMinCertifiedDisplacement) {
                ok = false;
                break;
            }
            const double tm = 0.5 * (g.t0 + g.t1);
            const double cm = clearance_at(tm);
            if (!(cm > 0.0)) {
                ok = false;
                break;
            }
            stack.push_back({tm, cm, g.t1, g.c1});
            stack.push_back({g.t0, g.c0, tm, cm});
        }
    }
    if (counters) {
        counters->collision_checks += checks;
        ++counters->edges_validated;
    }
    return ok;
}

bool motion_valid_pointwise(const RobotModel& model, const Scene& scene, const Configuration& a,
                            const Configuration& b, double step) {
    const double length = weighted_distance(model, a, b);
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(length / step)));
    for (std::size_t i = 0; i <= n; ++i) {
        if (robot_in_collision(model, interpolate(a, b, static_cast<double>(i) / static_cast<double>(n)), scene))
            return false;
    }
    return true;
}

bool validate_edge(Roadmap& roadmap, EdgeId e, const EdgeValidator& check) {
    const EdgeStatus status = roadmap.edge(e).status;
    if (status != EdgeStatus::unchecked) return status == EdgeStatus::valid;
    const bool ok = check(roadmap, e);
    roadmap.set_status(e, ok ? EdgeStatus::valid : EdgeStatus::invalid);
    return ok;
}

bool validate_edge(Roadmap& roadmap, EdgeId e, const Scene& scene, const RobotModel& model, double step,
                   MotionCounters* counters) {
    return validate_edge(roadmap, e, [&](const Roadmap& g, EdgeId id) {
        const RoadmapEdge& edge = g.edge(id);
        return motion_valid(model, scene, g.vertex(edge.u).q, g.vertex(edge.v).q, step, counters);
    });
}

namespace {

std::optional<GraphPath> shortest_candidate(const Roadmap& g, SearchCounters* counters) {
    const std::size_t n = g.vertex_count();
    if (n == 0 || g.goals().empty()) return std::nullopt;
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr EdgeId none = std::numeric_limits<EdgeId>::max();
    std::vector<double> dist(n, inf);
    std::vector<EdgeId> via(n, none);
    // (f, g, vertex); stale entries are skipped by comparing g. Rounding can
    // break consistency by an ulp, so a vertex may be reopened.
    using Entry = std::tuple<double, double, VertexId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    dist[Roadmap::start()] = 0.0;
    open.push({g.vertex(Roadmap::start()).to_goal, 0.0, Roadmap::start()});
    std::int64_t relaxations = 0;
    VertexId reached = none;
    while (!open.empty()) {
        const auto [f, d, u] = open.top();
        open.pop();
        if (d > dist[u]) continue;
        if (g.vertex(u).goal) {
            reached = u;
            break;
        }
        for (const EdgeId e : g.incident(u)) {
            const RoadmapEdge& edge = g.edge(e);
            if (edge.status == EdgeStatus::invalid) continue;
            const VertexId w = edge.other(u);
            ++relaxations;
            const double nd = d + edge.cost;
            if (nd < dist[w]) {
                dist[w] = nd;
                via[w] = e;
                open.push({nd + g.vertex(w).to_goal, nd, w});
            }
        }
    }
    if (counters) {
        ++counters->searches;
        counters->relaxations += relaxations;
    }
    if (reached == none) return std::nullopt;

    GraphPath path;
    path.cost = dist[reached];
    for (VertexId v = reached;;) {
        path.vertices.push_back(v);
        if (v == Roadmap::start()) break;
        path.edges.push_back(via[v]);
        v = g.edge(via[v]).other(v);
    }
    std::reverse(path.vertices.begin(), path.vertices.end());
    std::reverse(path.edges.begin(), path.edges.end());
    return path;
}

}  // namespace

std::optional<GraphPath> lazy_shortest_path(Roadmap& roadmap, const EdgeValidator& check, SearchCounters* counters,
                                            const std::function<bool()>& stop) {
    for (;;) {
        if (stop && stop()) return std::nullopt;
        auto candidate = shortest_candidate(roadmap, counters);
        if (!candidate) return std::nullopt;
        bool all_valid = true;
        for (const EdgeId e : candidate->edges) {
            if (!validate_edge(roadmap, e, check)) {
                all_valid = false;
                break;
            }
        }
        if (all_valid) return candidate;
    }
}

std::optional<GraphPath> lazy_shortest_path(Roadmap& roadmap, const Scene& scene, const RobotModel& model,
                                            double step) {
    return lazy_shortest_path(roadmap, [&](const Roadmap& g, EdgeId id) {
        const RoadmapEdge& edge = g.edge(id);
        return motion_valid(model, scene, g.vertex(edge.u).q, g.vertex(edge.v).q, step);
    });
}

void write_edge_list(const Roadmap& roadmap, std::ostream& out) {
    static constexpr const char* kStatus[] = {"unchecked", "valid", "invalid"};
    out.precision(17);
    for (VertexId v = 0; v < roadmap.vertex_count(); ++v) {
        const RoadmapVertex& vertex = roadmap.vertex(v);
        out << "v " << v << ' ' << (vertex.tag == Region::manipulation ? "Rm" : "Rb") << ' ' << (vertex.goal ? 1 : 0);
        for (const double c : vertex.coords) out << ' ' << c;
        out << '\n';
    }
    for (EdgeId e = 0; e < roadmap.edge_count(); ++e) {
        const RoadmapEdge& edge = roadmap.edge(e);
        out << "e " << edge.u << ' ' << edge.v << ' ' << kStatus[static_cast<int>(edge.status)] << ' ' << edge.cost
            << '\n';
    }
}

}  // namespace harmony
