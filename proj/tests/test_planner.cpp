#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "harmony/planner.hpp"
#include "harmony/sampling.hpp"
#include "harmony/scene.hpp"
#include "test_support.hpp"

using namespace harmony;

namespace {

PlannerParams params_with(double budget, std::uint64_t seed) {
    PlannerParams p;
    p.time_budget = budget;
    p.seed = seed;
    return p;
}

bool trace_non_increasing(const PlanResult& r) {
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        if (r.trace[i].cost > r.trace[i - 1].cost || r.trace[i].time < r.trace[i - 1].time) return false;
    return true;
}

void check_solution(const Scene& scene, const PlanResult& r, const PlannerParams& p) {
    REQUIRE(r.status == PlanStatus::solved);
    CHECK(trace_non_increasing(r));
    REQUIRE_FALSE(r.trace.empty());
    CHECK(r.trace.back().cost == r.final_cost);
    CHECK(r.initial_time <= p.time_budget);
    CHECK(check_path(scene, r.path, p.step / 10.0, p.position_tolerance, p.orientation_tolerance).ok());
    if (!std::isnan(r.base_time)) {
        // Decoupled times and costs are summed per phase; the trace runs on the whole-run clock.
        CHECK(r.initial_time == r.base_time + r.arm_time);
        CHECK(r.trace.front().time >= r.initial_time);
        return;
    }
    CHECK(r.trace.front().time == r.initial_time);
    CHECK(path_cost(scene.robot(), r.path) == doctest::Approx(r.final_cost).epsilon(1e-12));
}

}  // namespace

TEST_CASE("parameter validation") {
    PlannerParams p;
    CHECK_NOTHROW(validate(p));
    p.rho_goal = 1.5;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = PlannerParams{};
    p.time_budget = -1.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = PlannerParams{};
    p.cadence = 0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("goal injection") {
    const Scene scene = testing::empty_scene();
    const PlannerParams p;
    const ManipulationRegions regions = planner_regions(scene, p, false);
    REQUIRE_FALSE(regions.reachability.cells.empty());

    SUBCASE("empty reachability never yields a goal") {
        const ReachabilityMap none;
        Rng rng(1);
        for (int i = 0; i < 20; ++i) CHECK_FALSE(add_goal_configuration(scene, regions.grid, none, rng, {}));
    }
    SUBCASE("succeeds more often than not on an open scene and round-trips") {
        Rng rng(2);
        int hits = 0;
        int off_goal = 0;
        for (int i = 0; i < 1000; ++i) {
            const auto q = add_goal_configuration(scene, regions.grid, regions.reachability, rng, {});
            if (!q) continue;
            ++hits;
            if (!within_goal_tolerance(end_effector_pose(scene.robot(), *q), scene.goal_pose(), 1e-3, 1e-2))
                ++off_goal;
            if (robot_in_collision(scene.robot(), *q, scene)) ++off_goal;
        }
        CHECK(hits > 500);
        CHECK(off_goal == 0);
    }
    SUBCASE("duplicates are rejected") {
        Rng rng(3);
        std::optional<Configuration> q;
        while (!q) q = add_goal_configuration(scene, regions.grid, regions.reachability, rng, {});
        int duplicates = 0;
        for (int i = 0; i < 200; ++i) {
            const std::vector<Configuration> existing{*q};
            if (const auto again = add_goal_configuration(scene, regions.grid, regions.reachability, rng, existing))
                duplicates += weighted_distance(scene.robot(), *again, *q) <= 1e-6;
        }
        CHECK(duplicates == 0);
    }
}

TEST_CASE("start already at the goal is solved at zero cost") {
    const RobotModel robot = default_robot();
    const Configuration start = make_configuration({1.5, 1.5, 0.3}, robot.predefined_posture);
    const Scene scene("at-goal", Box{{0, 0}, {5, 4}}, {}, robot, start, end_effector_pose(robot, start));
    const PlannerParams p = params_with(5.0, 1);
    for (const PlanResult& r :
         {plan_harmonious(scene, p, true), plan_harmonious(scene, p, false), plan_coupled(scene, p)}) {
        REQUIRE(r.status == PlanStatus::solved);
        CHECK(r.final_cost == 0.0);
        CHECK(r.path.size() == 1);
        CHECK(r.trace.front().cost == 0.0);
    }
}

TEST_CASE("goal out of reach is unreachable") {
    const Scene scene = testing::empty_scene({4.9, 3.9, 0.0}, {Box{{3.0, 2.6}, {5.0, 4.0}}});
    const PlannerParams p = params_with(2.0, 1);
    CHECK(plan_harmonious(scene, p, true).status == PlanStatus::unreachable);
}

TEST_CASE("problem 1 solves for every planner") {
    const Scene scene = resolve_scene("1");
    PlannerContext ctx;
    ctx.regions = std::make_shared<const ManipulationRegions>(planner_regions(scene, PlannerParams{}, true));
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        CAPTURE(seed);
        const PlannerParams p = params_with(30.0, seed);
        check_solution(scene, plan_harmonious(scene, p, true, ctx), p);
        check_solution(scene, plan_harmonious(scene, p, false, ctx), p);
        check_solution(scene, plan_coupled(scene, p, ctx), p);
        const PlanResult d = plan_decoupled(scene, p, ctx);
        check_solution(scene, d, p);
        CHECK(d.base_time > 0.0);
        CHECK(d.arm_time >= 0.0);
        CHECK(d.failed_phase == FailedPhase::none);
    }
}

TEST_CASE("coupled solves the open scene") {
    const Scene scene = testing::empty_scene();
    const PlannerParams p = params_with(20.0, 4);
    check_solution(scene, plan_coupled(scene, p), p);
}

TEST_CASE("decoupled fails in the base phase on the corridor problem") {
    const Scene scene = resolve_scene("6");
    const PlannerParams p = params_with(30.0, 1);
    const PlanResult r = plan_decoupled(scene, p);
    CHECK(r.status == PlanStatus::timeout);
    CHECK(r.failed_phase == FailedPhase::base);
    CHECK(std::isnan(r.initial_time));
    CHECK(r.path.empty());
}

TEST_CASE("identical seeds give identical results") {
    const Scene scene = resolve_scene("2");
    const PlannerParams p = params_with(10.0, 8);
    const PlanResult a = plan_harmonious(scene, p, true);
    const PlanResult b = plan_harmonious(scene, p, true);
    CHECK(a.status == b.status);
    CHECK(a.trace == b.trace);
    CHECK(a.path == b.path);
    CHECK(a.goals == b.goals);
    CHECK(a.counters.samples == b.counters.samples);
    CHECK(a.counters.collision_checks == b.counters.collision_checks);
}

TEST_CASE("multi-goal set grows and every goal meets the tolerance") {
    const Scene scene = resolve_scene("1");
    PlannerParams p = params_with(20.0, 5);
    p.rho_goal = 0.05;
    const PlanResult r = plan_harmonious(scene, p, true);
    CHECK(r.goals.size() > 1);
    CHECK(static_cast<std::int64_t>(r.goals.size()) == r.counters.goals_injected);
    for (const auto& g : r.goals)
        CHECK(within_goal_tolerance(end_effector_pose(scene.robot(), g), scene.goal_pose(), p.position_tolerance,
                                    p.orientation_tolerance));
    const PlanResult single = plan_harmonious(scene, p, false);
    CHECK(single.goals.size() == 1);
}

TEST_CASE("harmonious sampling keeps uniform coverage of the base space") {
    const Scene scene = testing::empty_scene();
    const PlannerParams p;
    BaseGrid grid = planner_regions(scene, p, true).grid;
    finalize_pmf(grid, scene.robot().weights, scene.robot().joint_limits);
    const HarmoniousSampler sampler(grid, SamplerParams{p.rho_sample, scene.robot().joint_limits, scene.bounds(), 6},
                                    scene.robot().predefined_posture);
    Rng rng(6);
    // Count accepted samples over 1 m interior blocks.
    std::vector<double> blocks(3 * 2, 0.0);
    double accepted = 0.0;
    while (accepted < 100000.0) {
        const Configuration q = sampler.draw(rng);
        if (robot_in_collision(scene.robot(), q, scene)) continue;
        accepted += 1.0;
        const int bx = static_cast<int>(std::floor(q.base_x - 1.0));
        const int by = static_cast<int>(std::floor(q.base_y - 1.0));
        if (bx >= 0 && bx < 3 && by >= 0 && by < 2) blocks[static_cast<std::size_t>(bx * 2 + by)] += 1.0;
    }
    const double uniform_mass = 1.0 / (5.0 * 4.0);
    for (double b : blocks) CHECK(b / accepted >= (1.0 - p.rho_sample) * uniform_mass / 2.0);
}
