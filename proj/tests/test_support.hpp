#pragma once

// Hand-rolled generators for property tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "harmony/geometry.hpp"
#include "harmony/kinematics.hpp"
#include "harmony/roadmap.hpp"
#include "harmony/rng.hpp"
#include "harmony/scene.hpp"

namespace harmony::testing {

inline Point2 random_point(Rng& rng, double lo = -3.0, double hi = 3.0) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline Polygon random_convex_polygon(Rng& rng) {
    const Point2 c = random_point(rng);
    const double r = rng.uniform(0.2, 1.5);
    const int n = 3 + static_cast<int>(rng.below(5));
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(2.0 * std::numbers::pi * (i + rng.uniform(0.1, 0.9)) / n);
    Polygon p;
    for (double a : angles) p.vertices.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    return p;
}

inline Shape random_shape(Rng& rng) {
    switch (rng.below(4)) {
        case 0: return Circle{random_point(rng), rng.uniform(0.05, 1.0)};
        case 1: {
            const Point2 a = random_point(rng);
            return Box{a, {a.x + rng.uniform(0.1, 2.0), a.y + rng.uniform(0.1, 2.0)}};
        }
        case 2: return random_convex_polygon(rng);
        default: return Capsule{random_point(rng), random_point(rng), rng.uniform(0.01, 0.5)};
    }
}

inline Shape translated(const Shape& s, Point2 d) {
    return std::visit(
        [&](auto v) -> Shape {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Circle>) {
                v.center = v.center + d;
            } else if constexpr (std::is_same_v<T, Box>) {
                v.min = v.min + d;
                v.max = v.max + d;
            } else if constexpr (std::is_same_v<T, Polygon>) {
                for (auto& p : v.vertices) p = p + d;
            } else {
                v.a = v.a + d;
                v.b = v.b + d;
            }
            return v;
        },
        s);
}

inline std::vector<double> random_joints(Rng& rng, const RobotModel& model) {
    std::vector<double> j;
    for (const auto& lim : model.joint_limits) j.push_back(rng.uniform(lim.min, lim.max));
    return j;
}

inline Configuration random_configuration(Rng& rng, const RobotModel& model, double lo = 0.0, double hi = 5.0) {
    Configuration q;
    q.base_x = rng.uniform(lo, hi);
    q.base_y = rng.uniform(lo, hi);
    q.base_theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    q.joints = random_joints(rng, model);
    return q;
}

/// Default robot with weights filled in.
inline RobotModel weighted_robot() {
    RobotModel m = default_robot();
    m.weights = compute_weights(m);
    return m;
}

/// Obstacle-free 5 x 4 m scene with the default robot.
inline Scene empty_scene(EndEffectorPose goal = {2.5, 2.0, 0.0}, std::vector<Obstacle> obstacles = {}) {
    RobotModel robot = default_robot();
    Configuration start = make_configuration({0.5, 0.5, 0.0}, robot.predefined_posture);
    return Scene("empty", Box{{0.0, 0.0}, {5.0, 4.0}}, std::move(obstacles), robot, start, goal);
}

struct RandomGraph {
    Roadmap roadmap;
    std::vector<bool> truth;
};

/// Up to `max_vertices` random configurations, each pair joined with
/// probability `density`, each edge truly valid with probability `valid`.
inline RandomGraph random_graph(Rng& rng, const RobotModel& robot, std::size_t max_vertices, double density,
                                double valid) {
    RandomGraph g{Roadmap(robot.weights), {}};
    const std::size_t n = 1 + rng.below(max_vertices);
    for (std::size_t i = 0; i < n; ++i)
        g.roadmap.add_vertex(random_configuration(rng, robot), Region::base, i > 0 && rng.uniform() < 0.2);
    if (rng.uniform() < 0.05) g.roadmap.mark_goal(Roadmap::start());
    if (g.roadmap.goals().empty()) g.roadmap.mark_goal(static_cast<VertexId>(n - 1));
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v = u + 1; v < n; ++v)
            if (rng.uniform() < density) {
                g.roadmap.add_edge(u, v);
                g.truth.push_back(rng.uniform() < valid);
            }
    return g;
}

/// Largest gap between the empirical CDF of `xs` and the uniform CDF on [lo, hi].
inline double ks_uniform(std::vector<double> xs, double lo, double hi) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = (xs[i] - lo) / (hi - lo);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

// Robot with a folded predefined posture and a centred manipulator sphere,
// so the sphere test does not depend on heading.
inline RobotModel folded_robot() {
    RobotModel m = default_robot();
    m.predefined_posture = {0.0, 2.6, -2.6};
    m.sphere_manip = {0.55, {0.0, 0.0}};
    m.weights = compute_weights(m);
    return m;
}

// Large room with two floating walls forming a horizontal corridor whose
// centreline lies on row y = 4.95.
inline Scene corridor_scene(double width) {
    const double lo = 4.95 - width / 2.0;
    const double hi = 4.95 + width / 2.0;
    RobotModel m = folded_robot();
    return Scene("corridor", Box{{0, 0}, {10, 10}}, {Box{{3, 3}, {7, lo}}, Box{{3, hi}, {7, 7}}}, m,
                 make_configuration({1, 1, 0}, m.predefined_posture), EndEffectorPose{9.5, 9.5, 0});
}

}  // namespace harmony::testing
