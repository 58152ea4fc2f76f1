#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "harmony/geometry.hpp"
#include "harmony/kinematics.hpp"

namespace harmony {

/// Malformed scene document.
class SceneParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed document violating a scene invariant.
class SceneValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable planning problem. Robot weights are derived on construction
/// when the model does not carry them.
class Scene {
public:
    Scene(std::string name, Box bounds, std::vector<Obstacle> obstacles, RobotModel robot, Configuration start,
          EndEffectorPose goal_pose);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const Box& bounds() const noexcept { return bounds_; }
    [[nodiscard]] const std::vector<Obstacle>& obstacles() const noexcept { return obstacles_; }
    [[nodiscard]] const std::vector<Shape>& obstacle_shapes() const noexcept { return shapes_; }
    [[nodiscard]] const RobotModel& robot() const noexcept { return robot_; }
    [[nodiscard]] const Configuration& start() const noexcept { return start_; }
    [[nodiscard]] const EndEffectorPose& goal_pose() const noexcept { return goal_pose_; }

    friend bool operator==(const Scene& a, const Scene& b) {
        return a.name_ == b.name_ && a.bounds_ == b.bounds_ && a.obstacles_ == b.obstacles_ &&
               a.robot_ == b.robot_ && a.start_ == b.start_ && a.goal_pose_ == b.goal_pose_;
    }

private:
    std::string name_;
    Box bounds_;
    std::vector<Obstacle> obstacles_;
    std::vector<Shape> shapes_;
    RobotModel robot_;
    Configuration start_;
    EndEffectorPose goal_pose_;
};

/// Throws SceneValidationError naming the first violated invariant.
void validate(const Scene& scene);

/// Parses and validates a scene document (JSON, version 1).
[[nodiscard]] Scene parse_scene(std::string_view text);
[[nodiscard]] Scene load_scene(const std::filesystem::path& path);
[[nodiscard]] std::string serialize_scene(const Scene& scene);

/// The six shipped desk-scale problems, in order 1..6.
[[nodiscard]] std::vector<Scene> builtin_problems();
[[nodiscard]] std::vector<std::string> builtin_problem_names();
/// Accepts "1".."6", a builtin name, or a file path.
[[nodiscard]] Scene resolve_scene(const std::string& name_or_path);

}  // namespace harmony
