#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "harmony/kinematics.hpp"
#include "harmony/scene.hpp"
#include "test_support.hpp"

using namespace harmony;
using harmony::testing::random_configuration;
using harmony::testing::random_joints;
using harmony::testing::weighted_robot;

namespace {

constexpr double kPi = std::numbers::pi;

// Largest displacement of corresponding body points between two configurations.
double sampled_displacement(const RobotModel& m, const Configuration& a, const Configuration& b, std::size_t n) {
    const auto pa = sample_body_points(m, a, n);
    const auto pb = sample_body_points(m, b, n);
    double worst = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, std::hypot(pa[i].x - pb[i].x, pa[i].y - pb[i].y));
    return worst;
}

}  // namespace

TEST_CASE("forward kinematics examples") {
    const RobotModel m = default_robot();
    auto ee = end_effector_pose(m, make_configuration({0, 0, 0}, std::vector<double>{0, 0, 0}));
    CHECK(ee.x == doctest::Approx(1.2));
    CHECK(ee.y == doctest::Approx(0.0));
    CHECK(ee.phi == doctest::Approx(0.0));
    ee = end_effector_pose(m, make_configuration({0, 0, kPi / 2}, std::vector<double>{0, 0, 0}));
    CHECK(ee.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ee.y == doctest::Approx(1.2));
    CHECK(ee.phi == doctest::Approx(kPi / 2));
    ee = end_effector_pose(m, make_configuration({0, 0, 0}, std::vector<double>{kPi / 2, 0, 0}));
    CHECK(ee.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ee.y == doctest::Approx(1.2));
    CHECK(ee.phi == doctest::Approx(kPi / 2));
}

TEST_CASE("forward kinematics is rigid-motion equivariant") {
    const RobotModel m = default_robot();
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        Configuration q = random_configuration(rng, m);
        const FkResult a = forward_kinematics(m, q);
        const double dth = rng.uniform(-kPi, kPi);
        const Point2 shift{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Configuration moved = q;
        const Point2 rb = rotate({q.base_x, q.base_y}, dth) + shift;
        moved.base_x = rb.x;
        moved.base_y = rb.y;
        moved.base_theta = wrap_angle(q.base_theta + dth);
        const FkResult b = forward_kinematics(m, moved);
        auto expect = [&](Point2 p) { return rotate(p, dth) + shift; };
        const Point2 ee = expect({a.end_effector.x, a.end_effector.y});
        CHECK(std::abs(ee.x - b.end_effector.x) <= 1e-9);
        CHECK(std::abs(ee.y - b.end_effector.y) <= 1e-9);
        CHECK(std::abs(angle_diff(wrap_angle(a.end_effector.phi + dth), b.end_effector.phi)) <= 1e-9);
        for (std::size_t l = 0; l < a.body.links.size(); ++l) {
            const Point2 pa = expect(a.body.links[l].a);
            const Point2 pb = expect(a.body.links[l].b);
            CHECK(std::abs(pa.x - b.body.links[l].a.x) <= 1e-9);
            CHECK(std::abs(pa.y - b.body.links[l].a.y) <= 1e-9);
            CHECK(std::abs(pb.x - b.body.links[l].b.x) <= 1e-9);
            CHECK(std::abs(pb.y - b.body.links[l].b.y) <= 1e-9);
        }
    }
}

TEST_CASE("inverse kinematics examples") {
    const RobotModel m = default_robot();
    const auto stretched = inverse_kinematics(m, {0, 0, 0}, {1.2, 0, 0}, 1);
    REQUIRE(stretched);
    const auto ee = end_effector_pose(m, make_configuration({0, 0, 0}, *stretched));
    CHECK(std::hypot(ee.x - 1.2, ee.y) < 1e-6);
    CHECK_FALSE(inverse_kinematics(m, {0, 0, 0}, {5, 0, 0}, 1));

    const EndEffectorPose target{0.9, 0.3, kPi / 4};
    REQUIRE(within_reach_interval(m, {0, 0, 0}, target));
    const auto sol = inverse_kinematics(m, {0, 0, 0}, target, 2);
    REQUIRE(sol);
    const auto got = end_effector_pose(m, make_configuration({0, 0, 0}, *sol));
    CHECK(std::hypot(got.x - target.x, got.y - target.y) < 1e-6);
    CHECK(std::abs(angle_diff(got.phi, target.phi)) < 1e-6);
}

TEST_CASE("inverse kinematics soundness on random reachable targets") {
    const RobotModel m = default_robot();
    Rng rng(11);
    int solved = 0;
    for (int i = 0; i < 1000; ++i) {
        const BasePose base{rng.uniform(0, 5), rng.uniform(0, 4), rng.uniform(-kPi, kPi)};
        const auto joints = random_joints(rng, m);
        const EndEffectorPose target = end_effector_pose(m, make_configuration(base, joints));
        const auto sol = inverse_kinematics(m, base, target, rng());
        if (!sol) continue;
        ++solved;
        const auto got = end_effector_pose(m, make_configuration(base, *sol));
        CHECK(std::hypot(got.x - target.x, got.y - target.y) < 1e-6);
        CHECK(std::abs(angle_diff(got.phi, target.phi)) < 1e-6);
        for (std::size_t j = 0; j < sol->size(); ++j) {
            CHECK((*sol)[j] >= m.joint_limits[j].min);
            CHECK((*sol)[j] <= m.joint_limits[j].max);
        }
    }
    CHECK(solved >= 900);
}

TEST_CASE("inverse kinematics honors the acceptance predicate") {
    const RobotModel m = default_robot();
    const auto sol = inverse_kinematics(m, {0, 0, 0}, {0.6, 0.4, 0.5}, 9, IkOptions{},
                                        [](std::span<const double> q) { return q[1] > 0.0; });
    REQUIRE(sol);
    CHECK((*sol)[1] > 0.0);
}

TEST_CASE("weight examples") {
    RobotModel m = default_robot();
    m.link_radius = 0.0;
    auto w = compute_weights(m);
    REQUIRE(w.size() == 6);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 1.0);
    CHECK(w[2] == doctest::Approx(1.2));
    CHECK(w[3] == doctest::Approx(1.2));
    CHECK(w[4] == doctest::Approx(0.7));
    CHECK(w[5] == doctest::Approx(0.3));

    m.arm_mount_offset = {0.2, 0.0};
    CHECK(compute_weights(m)[2] == doctest::Approx(1.4));

    RobotModel one = default_robot();
    one.link_lengths = {1.0};
    one.link_radius = 0.0;
    one.joint_limits = {{-1, 1}};
    one.predefined_posture = {0.0};
    CHECK(compute_weights(one)[3] == doctest::Approx(1.0));
}

TEST_CASE("weights equal distal chain sums for random link vectors") {
    Rng rng(23);
    for (int i = 0; i < 10; ++i) {
        RobotModel m = default_robot();
        const std::size_t j = 1 + rng.below(5);
        m.link_lengths.clear();
        m.joint_limits.assign(j, {-2.6, 2.6});
        m.predefined_posture.assign(j, 0.0);
        for (std::size_t k = 0; k < j; ++k) m.link_lengths.push_back(rng.uniform(0.05, 1.0));
        const auto w = compute_weights(m);
        double distal = 0.0;
        for (std::size_t k = j; k-- > 0;) {
            distal += m.link_lengths[k];
            CHECK(w[3 + k] == distal + m.link_radius);
        }
        CHECK(w[2] == doctest::Approx(std::max(norm(m.arm_mount_offset) + distal + m.link_radius, m.base_radius)).epsilon(1e-12));
    }
}

TEST_CASE("weighted distance examples") {
    const RobotModel m = weighted_robot();
    Configuration a = make_configuration({1, 1, 0}, std::vector<double>{0, 0, 0});
    CHECK(weighted_distance(m, a, a) == 0.0);
    Configuration b = a;
    b.base_x += 0.3;
    CHECK(weighted_distance(m, a, b) == doctest::Approx(0.3));
    b = a;
    b.joints[0] = 0.5;
    CHECK(weighted_distance(m, a, b) == doctest::Approx(0.5 * m.weights[3]));
    b = a;
    a.base_theta = kPi - 0.05;
    b.base_theta = -kPi + 0.05;
    CHECK(weighted_distance(m, a, b) == doctest::Approx(0.1 * m.weights[2]));
}

TEST_CASE("weighted distance is a metric") {
    const RobotModel m = weighted_robot();
    Rng rng(31);
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_configuration(rng, m);
        const auto b = random_configuration(rng, m);
        const auto c = random_configuration(rng, m);
        const double ab = weighted_distance(m, a, b);
        CHECK(ab >= 0.0);
        CHECK(std::abs(ab - weighted_distance(m, b, a)) <= 1e-9);
        CHECK(weighted_distance(m, a, a) == 0.0);
        CHECK(ab <= weighted_distance(m, a, c) + weighted_distance(m, c, b) + 1e-9);
    }
}

TEST_CASE("displacement bound holds and is tight") {
    const RobotModel m = weighted_robot();
    Rng rng(41);
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_configuration(rng, m);
        auto b = a;
        for (std::size_t d = 0; d < a.dim(); ++d) b[d] = a[d] + rng.uniform(-0.3, 0.3);
        for (std::size_t j = 0; j < b.joints.size(); ++j)
            b.joints[j] = std::clamp(b.joints[j], m.joint_limits[j].min, m.joint_limits[j].max);
        b.base_theta = wrap_angle(b.base_theta);
        CHECK(displacement_upper_bound_check(m, a, b, 200));
        CHECK(sampled_displacement(m, a, b, 200) <= displacement_bound(m, a, b) + 1e-9);
    }

    CHECK(displacement_upper_bound_check(m, make_configuration({1, 1, 0}, m.predefined_posture),
                                         make_configuration({1, 1, 0}, m.predefined_posture), 100));

    Configuration a = make_configuration({1, 1, 0}, m.predefined_posture);
    Configuration b = a;
    b.base_x += 0.5;
    CHECK(sampled_displacement(m, a, b, 500) == doctest::Approx(0.5).epsilon(1e-12));

    // Single-joint moves of the stretched arm attain the per-axis bound.
    for (std::size_t j = 0; j < m.arm_dof(); ++j) {
        const Configuration s = make_configuration({2, 2, 0}, std::vector<double>(m.arm_dof(), 0.0));
        Configuration t = s;
        t.joints[j] = 0.1;
        const double moved = sampled_displacement(m, s, t, 2000);
        const double bound = displacement_bound(m, s, t);
        CHECK(moved <= bound + 1e-9);
        CHECK(moved >= 0.99 * bound);
    }
}

TEST_CASE("robot collision examples") {
    const Scene open = harmony::testing::empty_scene();
    const RobotModel& m = open.robot();
    CHECK_FALSE(robot_in_collision(m, make_configuration({2.5, 2, 0}, m.predefined_posture), open));
    CHECK(robot_in_collision(m, make_configuration({0.1, 2, 0}, m.predefined_posture), open));

    const Scene blocked = harmony::testing::empty_scene({2.5, 2, 0}, {Box{{2, 1.5}, {3, 2.5}}});
    CHECK(robot_in_collision(m, make_configuration({2.5, 2, 0}, m.predefined_posture), blocked));

    // Base clear of a thin wall, stretched arm crossing it.
    const Scene wall = harmony::testing::empty_scene({2.5, 2, 0}, {Box{{2.8, 1.0}, {2.9, 3.0}}});
    const Configuration reach = make_configuration({2.0, 2.0, 0}, std::vector<double>{0, 0, 0});
    CHECK(robot_in_collision(m, reach, wall));
    const FkResult fk = forward_kinematics(m, reach);
    CHECK_FALSE(collides(fk.body.base, to_shape(wall.obstacles()[0])));
    bool any = false;
    for (const Capsule& link : fk.body.links) any = any || collides(link, to_shape(wall.obstacles()[0]));
    CHECK(any);
    CHECK(robot_clearance(m, reach, wall) <= 0.0);
}

TEST_CASE("model validation") {
    CHECK_NOTHROW(validate(default_robot()));
    RobotModel m = default_robot();
    m.link_lengths[1] = 0.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = default_robot();
    m.predefined_posture[0] = 3.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
    m = default_robot();
    m.sphere_manip.radius = 0.1;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
}

TEST_CASE("angle helpers wrap to the half-open interval") {
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(3 * kPi + 0.1) == doctest::Approx(-kPi + 0.1));
    CHECK(angle_diff(kPi - 0.1, -kPi + 0.1) == doctest::Approx(0.2));
}
