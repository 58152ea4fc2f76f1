#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmony/roadmap.hpp"
#include "harmony/scene.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace harmony;

namespace {

constexpr double kStep = 0.05;

bool is_goal_path(const Roadmap& g, const GraphPath& p) {
    if (p.vertices.empty() || p.vertices.front() != Roadmap::start()) return false;
    if (!g.vertex(p.vertices.back()).goal) return false;
    if (p.edges.size() + 1 != p.vertices.size()) return false;
    double cost = 0.0;
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        const RoadmapEdge& e = g.edge(p.edges[i]);
        if (e.status != EdgeStatus::valid) return false;
        if (e.other(p.vertices[i]) != p.vertices[i + 1]) return false;
        cost += e.cost;
    }
    return cost == p.cost;
}

Configuration at(double x, double y, double theta = 0.0) {
    return make_configuration({x, y, theta}, default_robot().predefined_posture);
}

}  // namespace

TEST_CASE("edge cost is the weighted distance of its endpoints") {
    const RobotModel robot = testing::weighted_robot();
    Roadmap g(robot.weights);
    const Configuration a = at(1, 1);
    const Configuration b = at(2, 1.5, 0.4);
    g.add_vertex(a, Region::base);
    g.add_vertex(b, Region::manipulation);
    const EdgeId e = g.add_edge(0, 1);
    CHECK(g.edge(e).cost == weighted_distance(robot, a, b));
    CHECK(g.edge(e).status == EdgeStatus::unchecked);
    CHECK(g.incident(0).size() == 1);
    CHECK(g.incident(1).size() == 1);
}

TEST_CASE("edge statuses never reverse") {
    const RobotModel robot = testing::weighted_robot();
    Roadmap g(robot.weights);
    g.add_vertex(at(1, 1), Region::base);
    g.add_vertex(at(2, 1), Region::base);
    const EdgeId e = g.add_edge(0, 1);
    g.set_status(e, EdgeStatus::valid);
    g.set_status(e, EdgeStatus::valid);
    CHECK_THROWS_AS(g.set_status(e, EdgeStatus::invalid), std::logic_error);
    CHECK_THROWS_AS(g.set_status(e, EdgeStatus::unchecked), std::logic_error);
    CHECK(g.edge(e).status == EdgeStatus::valid);
}

TEST_CASE("validate_edge resolves once and caches") {
    const RobotModel robot = testing::weighted_robot();
    Roadmap g(robot.weights);
    g.add_vertex(at(1, 1), Region::base);
    g.add_vertex(at(2, 1), Region::base);
    const EdgeId e = g.add_edge(0, 1);
    int calls = 0;
    const EdgeValidator reject = [&](const Roadmap&, EdgeId) {
        ++calls;
        return false;
    };
    CHECK_FALSE(validate_edge(g, e, reject));
    CHECK_FALSE(validate_edge(g, e, reject));
    CHECK(calls == 1);
    CHECK(g.edge(e).status == EdgeStatus::invalid);
}

TEST_CASE("motion validity examples") {
    const Scene scene = testing::empty_scene({2.5, 2.0, 0.0}, {Circle{{2.5, 2.0}, 0.2}});
    const RobotModel& robot = scene.robot();
    const Configuration free = at(1.0, 2.0);
    REQUIRE_FALSE(robot_in_collision(robot, free, scene));
    CHECK(motion_valid(robot, scene, free, free, kStep));

    const Configuration left = at(1.0, 2.0);
    const Configuration right = at(4.0, 2.0);
    REQUIRE_FALSE(robot_in_collision(robot, right, scene));
    REQUIRE(robot_in_collision(robot, interpolate(left, right, 0.5), scene));
    MotionCounters counters;
    CHECK_FALSE(motion_valid(robot, scene, left, right, kStep, &counters));
    CHECK(counters.collision_checks > 0);
    CHECK(counters.edges_validated == 1);
    CHECK_FALSE(motion_valid_pointwise(robot, scene, left, right, kStep));
}

TEST_CASE("accepted motions pass the ten-times refined check") {
    const Scene scene = resolve_scene("4");
    const RobotModel& robot = scene.robot();
    Rng rng(77);
    int accepted = 0;
    int refuted = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        Configuration a = testing::random_configuration(rng, robot);
        if (robot_in_collision(robot, a, scene)) continue;
        Configuration b = a;
        b.base_x += rng.uniform(-0.6, 0.6);
        b.base_y += rng.uniform(-0.6, 0.6);
        b.base_theta = wrap_angle(b.base_theta + rng.uniform(-0.8, 0.8));
        for (double& j : b.joints) j = std::clamp(j + rng.uniform(-0.8, 0.8), -2.6, 2.6);
        if (robot_in_collision(robot, b, scene)) continue;
        if (!motion_valid(robot, scene, a, b, kStep)) continue;
        ++accepted;
        if (!motion_valid_pointwise(robot, scene, a, b, kStep / 10.0)) ++refuted;
    }
    CHECK(accepted > 50);
    CHECK(refuted == 0);
}

TEST_CASE("start vertex that is a goal gives the empty path") {
    const RobotModel robot = testing::weighted_robot();
    Roadmap g(robot.weights);
    g.add_vertex(at(1, 1), Region::base, true);
    g.add_vertex(at(2, 1), Region::base);
    g.add_edge(0, 1);
    const auto p = lazy_shortest_path(g, [](const Roadmap&, EdgeId) { return true; });
    REQUIRE(p);
    CHECK(p->cost == 0.0);
    CHECK(p->vertices == std::vector<VertexId>{0});
    CHECK(p->edges.empty());
}

TEST_CASE("two-vertex graph with a valid edge") {
    const Scene scene = testing::empty_scene();
    const RobotModel& robot = scene.robot();
    Roadmap g(robot.weights);
    g.add_vertex(at(1, 1), Region::base);
    g.add_vertex(at(1.5, 1.2), Region::base, true);
    g.add_edge(0, 1);
    const auto p = lazy_shortest_path(g, scene, robot, kStep);
    REQUIRE(p);
    CHECK(p->cost == weighted_distance(robot, at(1, 1), at(1.5, 1.2)));
    CHECK(g.edge(0).status == EdgeStatus::valid);
}

TEST_CASE("diamond graph avoids the colliding short side") {
    const Scene scene = testing::empty_scene({2.5, 2.0, 0.0}, {Circle{{1.75, 2.4}, 0.15}});
    const RobotModel& robot = scene.robot();
    Roadmap g(robot.weights);
    const Configuration v0 = at(0.8, 2.0);
    const Configuration v1 = at(2.6, 2.2);
    const Configuration v2 = at(2.6, 0.9);
    const Configuration v3 = at(4.2, 2.0);
    for (const auto& q : {v0, v1, v2, v3}) REQUIRE_FALSE(robot_in_collision(robot, q, scene));
    g.add_vertex(v0, Region::base);
    g.add_vertex(v1, Region::base);
    g.add_vertex(v2, Region::base);
    g.add_vertex(v3, Region::base, true);
    const EdgeId short_a = g.add_edge(0, 1);
    const EdgeId short_b = g.add_edge(1, 3);
    const EdgeId long_a = g.add_edge(0, 2);
    const EdgeId long_b = g.add_edge(2, 3);
    REQUIRE(g.edge(short_a).cost + g.edge(short_b).cost < g.edge(long_a).cost + g.edge(long_b).cost);

    SearchCounters counters;
    const auto p = lazy_shortest_path(
        g,
        [&](const Roadmap& r, EdgeId e) {
            return motion_valid(robot, scene, r.vertex(r.edge(e).u).q, r.vertex(r.edge(e).v).q, kStep);
        },
        &counters);
    REQUIRE(p);
    CHECK(p->vertices == std::vector<VertexId>{0, 2, 3});
    CHECK(g.edge(short_a).status == EdgeStatus::invalid);
    CHECK(g.edge(long_a).status == EdgeStatus::valid);
    CHECK(g.edge(long_b).status == EdgeStatus::valid);
    CHECK(counters.searches == 2);

    const double oracle = oracle::exhaustive_shortest(
        g, [&](EdgeId e) { return motion_valid_pointwise(robot, scene, g.vertex(g.edge(e).u).q, g.vertex(g.edge(e).v).q, kStep / 10.0); });
    CHECK(p->cost == oracle);
}

TEST_CASE("lazy search cost equals the exhaustive optimum on small graphs") {
    const RobotModel robot = testing::weighted_robot();
    Rng rng(5150);
    int mismatches = 0;
    int malformed = 0;
    int solved = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        testing::RandomGraph rg = testing::random_graph(rng, robot, 12, rng.uniform(0.15, 0.6), rng.uniform(0.3, 0.9));
        const double want = oracle::exhaustive_shortest(rg.roadmap, [&](EdgeId e) { return rg.truth[e]; });
        const auto got =
            lazy_shortest_path(rg.roadmap, [&](const Roadmap&, EdgeId e) { return static_cast<bool>(rg.truth[e]); });
        if (got) {
            ++solved;
            if (got->cost != want) ++mismatches;
            if (!is_goal_path(rg.roadmap, *got)) ++malformed;
        } else if (want != std::numeric_limits<double>::infinity()) {
            ++mismatches;
        }
        for (EdgeId e = 0; e < rg.roadmap.edge_count(); ++e) {
            const EdgeStatus s = rg.roadmap.edge(e).status;
            if (s == EdgeStatus::valid && !rg.truth[e]) ++malformed;
            if (s == EdgeStatus::invalid && rg.truth[e]) ++malformed;
        }
    }
    CHECK(mismatches == 0);
    CHECK(malformed == 0);
    CHECK(solved > 300);
}

TEST_CASE("costs never increase as the roadmap grows") {
    const RobotModel robot = testing::weighted_robot();
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        Roadmap g(robot.weights);
        std::vector<bool> truth;
        const EdgeValidator check = [&](const Roadmap&, EdgeId e) { return static_cast<bool>(truth[e]); };
        g.add_vertex(testing::random_configuration(rng, robot), Region::base);
        double best = std::numeric_limits<double>::infinity();
        for (int step = 0; step < 60; ++step) {
            const VertexId v = g.add_vertex(testing::random_configuration(rng, robot), Region::base,
                                            rng.uniform() < 0.1);
            for (int c = 0; c < 3; ++c) {
                g.add_edge(static_cast<VertexId>(rng.below(v)), v);
                truth.push_back(rng.uniform() < 0.6);
            }
            if (const auto p = lazy_shortest_path(g, check)) {
                CHECK(p->cost <= best);
                best = p->cost;
            }
        }
    }
}

TEST_CASE("edge list dump") {
    const RobotModel robot = testing::weighted_robot();
    Roadmap g(robot.weights);
    g.add_vertex(at(1, 1), Region::base);
    g.add_vertex(at(2, 1), Region::manipulation, true);
    g.add_edge(0, 1);
    g.set_status(0, EdgeStatus::invalid);
    std::ostringstream out;
    write_edge_list(g, out);
    std::istringstream in(out.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].rfind("v 0 Rb 0 1 1 0 ", 0) == 0);
    CHECK(lines[1].rfind("v 1 Rm 1 2 1 0 ", 0) == 0);
    CHECK(lines[2] == "e 0 1 invalid 1");
}
