#pragma once

// Planar mobile manipulator: a disc base with (x, y, theta) and a serial
// chain of capsule links mounted on it.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "harmony/geometry.hpp"

namespace harmony {

class Scene;

/// Wraps an angle to [-pi, pi).
[[nodiscard]] double wrap_angle(double angle) noexcept;

/// Signed shortest-arc difference b - a, in [-pi, pi].
[[nodiscard]] double angle_diff(double a, double b) noexcept;

/// Number of base coordinates (x, y, theta) that precede the joints.
inline constexpr std::size_t kBaseDof = 3;
/// Index of the wrapped base heading in a flattened configuration.
inline constexpr std::size_t kThetaIndex = 2;

struct Configuration {
    double base_x{0.0};
    double base_y{0.0};
    double base_theta{0.0};
    std::vector<double> joints;

    [[nodiscard]] std::size_t dim() const noexcept { return kBaseDof + joints.size(); }
    [[nodiscard]] double operator[](std::size_t d) const noexcept;
    double& operator[](std::size_t d) noexcept;

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct BasePose {
    double x{0.0};
    double y{0.0};
    double theta{0.0};
    friend bool operator==(const BasePose&, const BasePose&) = default;
};

struct EndEffectorPose {
    double x{0.0};
    double y{0.0};
    double phi{0.0};
    friend bool operator==(const EndEffectorPose&, const EndEffectorPose&) = default;
};

struct JointLimit {
    double min{0.0};
    double max{0.0};
    friend bool operator==(const JointLimit&, const JointLimit&) = default;
};

struct BoundingSphere {
    double radius{0.0};
    Point2 center;  // in the base frame
    friend bool operator==(const BoundingSphere&, const BoundingSphere&) = default;
};

struct RobotModel {
    double base_radius{0.3};
    Point2 arm_mount_offset;
    std::vector<double> link_lengths;
    double link_radius{0.04};
    std::vector<JointLimit> joint_limits;
    std::vector<double> predefined_posture;
    /// Metric weights (x, y, theta, joints...); filled by compute_weights.
    std::vector<double> weights;
    BoundingSphere sphere_base;
    BoundingSphere sphere_manip;

    [[nodiscard]] std::size_t arm_dof() const noexcept { return link_lengths.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return kBaseDof + arm_dof(); }

    friend bool operator==(const RobotModel&, const RobotModel&) = default;
};

/// Desk-scale default: three links [0.5, 0.4, 0.3] m, base radius 0.3 m,
/// joint limits +-2.6 rad.
[[nodiscard]] RobotModel default_robot();

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const RobotModel& model);

struct RobotBody {
    Circle base;
    std::vector<Capsule> links;
};

struct FkResult {
    EndEffectorPose end_effector;
    RobotBody body;
};

[[nodiscard]] FkResult forward_kinematics(const RobotModel& model, const Configuration& q);
[[nodiscard]] EndEffectorPose end_effector_pose(const RobotModel& model, const Configuration& q);

/// Points on the robot body in world coordinates. The same local points are
/// produced for every configuration, so two calls are in correspondence.
[[nodiscard]] std::vector<Point2> sample_body_points(const RobotModel& model, const Configuration& q,
                                                     std::size_t approx_count);

struct IkOptions {
    int restarts{20};
    int iterations{100};
    double damping{0.1};
    double position_tolerance{1e-7};
    double orientation_tolerance{1e-7};
    /// A restart stops early when its squared error has not dropped below
    /// stall_ratio times its value stall_window iterations earlier.
    int stall_window{10};
    double stall_ratio{0.81};
};

/// Extra acceptance test on a converged solution (e.g. collision-free).
using JointPredicate = std::function<bool(std::span<const double>)>;

/// Damped least squares with random restarts. Returns joints whose forward
/// kinematics reproduces `target`, or nullopt when the target is unreachable
/// from `base` within the restart budget.
[[nodiscard]] std::optional<std::vector<double>> inverse_kinematics(
    const RobotModel& model, const BasePose& base, const EndEffectorPose& target, std::uint64_t seed,
    const IkOptions& options = {}, const JointPredicate& accept = {}, std::int64_t* iterations_used = nullptr);

/// Cheap necessary condition for reachability from `base`.
[[nodiscard]] bool within_reach_interval(const RobotModel& model, const BasePose& base, const EndEffectorPose& target);

/// (1, 1, w_theta, w_joint...), each the maximum arc length per radian.
[[nodiscard]] std::vector<double> compute_weights(const RobotModel& model);

[[nodiscard]] double weighted_distance(std::span<const double> a, std::span<const double> b,
                                       std::span<const double> weights) noexcept;
[[nodiscard]] double weighted_distance(const RobotModel& model, const Configuration& a, const Configuration& b);

/// Sum of w_d * |dq_d|: an upper bound on how far any body point moves.
[[nodiscard]] double displacement_bound(const RobotModel& model, const Configuration& a, const Configuration& b);

[[nodiscard]] bool displacement_upper_bound_check(const RobotModel& model, const Configuration& a,
                                                  const Configuration& b, std::size_t n_body_samples);

/// Linear interpolation, heading along the shortest arc.
[[nodiscard]] Configuration interpolate(const Configuration& a, const Configuration& b, double t);

[[nodiscard]] bool robot_in_collision(const RobotModel& model, const Configuration& q, const Scene& scene);

/// Minimum signed clearance of the body against obstacles, bounds and the
/// base disc (for distal links). Non-positive exactly when in collision.
[[nodiscard]] double robot_clearance(const RobotModel& model, const Configuration& q, const Scene& scene);

[[nodiscard]] bool within_goal_tolerance(const EndEffectorPose& a, const EndEffectorPose& b, double position_tol,
                                         double orientation_tol) noexcept;

[[nodiscard]] Configuration make_configuration(const BasePose& base, std::span<const double> joints);
[[nodiscard]] std::vector<double> flatten(const Configuration& q);

}  // namespace harmony
