#include "harmony/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "embedded_problems.hpp"

namespace harmony {

namespace {

using nlohmann::json;

Point2 read_point(const json& j) {
    if (!j.is_array() || j.size() != 2) throw SceneParseError("expected a [x, y] pair");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json write_point(Point2 p) { return json::array({p.x, p.y}); }

std::vector<double> read_numbers(const json& j) {
    if (!j.is_array()) throw SceneParseError("expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

Obstacle read_obstacle(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "circle") return Circle{read_point(j.at("center")), j.at("radius").get<double>()};
    if (type == "box") return Box{read_point(j.at("min")), read_point(j.at("max"))};
    if (type == "polygon") {
        Polygon p;
        for (const auto& v : j.at("vertices")) p.vertices.push_back(read_point(v));
        return p;
    }
    throw SceneParseError("unknown obstacle type '" + type + "'");
}

json write_obstacle(const Obstacle& obstacle) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return {{"type", "circle"}, {"center", write_point(s.center)}, {"radius", s.radius}};
            } else if constexpr (std::is_same_v<T, Box>) {
                return {{"type", "box"}, {"min", write_point(s.min)}, {"max", write_point(s.max)}};
            } else {
                json verts = json::array();
                for (const Point2& v : s.vertices) verts.push_back(write_point(v));
                return {{"type", "polygon"}, {"vertices", verts}};
            }
        },
        obstacle);
}

BoundingSphere read_sphere(const json& j) {
    BoundingSphere s;
    s.radius = j.at("radius").get<double>();
    if (j.contains("center")) s.center = read_point(j.at("center"));
    return s;
}

RobotModel read_robot(const json& j) {
    RobotModel m;
    m.base_radius = j.at("base_radius").get<double>();
    m.arm_mount_offset = read_point(j.at("arm_mount_offset"));
    m.link_lengths = read_numbers(j.at("link_lengths"));
    m.link_radius = j.at("link_radius").get<double>();
    for (const auto& lim : j.at("joint_limits")) {
        const auto pair = read_numbers(lim);
        if (pair.size() != 2) throw SceneParseError("joint limit must be [min, max]");
        m.joint_limits.push_back({pair[0], pair[1]});
    }
    m.predefined_posture = read_numbers(j.at("predefined_posture"));
    m.sphere_base = read_sphere(j.at("sphere_base"));
    m.sphere_manip = read_sphere(j.at("sphere_manip"));
    return m;
}

Scene read_scene(const json& doc) {
    if (!doc.is_object()) throw SceneParseError("scene document must be a JSON object");
    if (!doc.contains("version")) throw SceneParseError("missing 'version'");
    if (doc.at("version").get<int>() != 1)
        throw SceneParseError("unsupported scene version " + doc.at("version").dump());
    const auto name = doc.at("name").get<std::string>();
    const Box bounds{read_point(doc.at("bounds").at("min")), read_point(doc.at("bounds").at("max"))};
    std::vector<Obstacle> obstacles;
    for (const auto& o : doc.at("obstacles")) obstacles.push_back(read_obstacle(o));
    RobotModel robot = read_robot(doc.at("robot"));
    const auto base = read_numbers(doc.at("start").at("base"));
    if (base.size() != 3) throw SceneParseError("start.base must be [x, y, theta]");
    Configuration start{base[0], base[1], base[2], read_numbers(doc.at("start").at("joints"))};
    const auto& g = doc.at("goal_pose");
    const EndEffectorPose goal{g.at("x").get<double>(), g.at("y").get<double>(), g.at("phi").get<double>()};
    return Scene(name, bounds, std::move(obstacles), std::move(robot), std::move(start), goal);
}

}  // namespace

Scene::Scene(std::string name, Box bounds, std::vector<Obstacle> obstacles, RobotModel robot, Configuration start,
             EndEffectorPose goal_pose)
    : name_(std::move(name)),
      bounds_(bounds),
      obstacles_(std::move(obstacles)),
      robot_(std::move(robot)),
      start_(std::move(start)),
      goal_pose_(goal_pose) {
    if (robot_.weights.empty() && !robot_.link_lengths.empty()) robot_.weights = compute_weights(robot_);
    start_.base_theta = wrap_angle(start_.base_theta);
    goal_pose_.phi = wrap_angle(goal_pose_.phi);
    shapes_.reserve(obstacles_.size());
    for (const Obstacle& o : obstacles_) shapes_.push_back(to_shape(o));
}

void validate(const Scene& scene) {
    const Box& b = scene.bounds();
    if (!std::isfinite(b.min.x) || !std::isfinite(b.min.y) || !std::isfinite(b.max.x) || !std::isfinite(b.max.y) ||
        !(b.max.x > b.min.x && b.max.y > b.min.y))
        throw SceneValidationError("bounds must have positive area");
    for (std::size_t i = 0; i < scene.obstacles().size(); ++i) {
        try {
            validate(scene.obstacles()[i]);
        } catch (const std::invalid_argument& e) {
            throw SceneValidationError("obstacle " + std::to_string(i) + ": " + e.what());
        }
    }
    try {
        validate(scene.robot());
    } catch (const std::invalid_argument& e) {
        throw SceneValidationError(std::string("robot: ") + e.what());
    }
    const RobotModel& robot = scene.robot();
    const Configuration& start = scene.start();
    if (start.joints.size() != robot.arm_dof())
        throw SceneValidationError("start configuration has the wrong number of joints");
    if (!std::isfinite(start.base_x) || !std::isfinite(start.base_y) || !std::isfinite(start.base_theta))
        throw SceneValidationError("start configuration is not finite");
    for (std::size_t j = 0; j < start.joints.size(); ++j) {
        if (!(start.joints[j] >= robot.joint_limits[j].min && start.joints[j] <= robot.joint_limits[j].max))
            throw SceneValidationError("start joint " + std::to_string(j) + " outside its limits");
    }
    if (robot_in_collision(robot, start, scene)) throw SceneValidationError("start configuration in collision");
    const EndEffectorPose& g = scene.goal_pose();
    if (!std::isfinite(g.x) || !std::isfinite(g.y) || !std::isfinite(g.phi))
        throw SceneValidationError("goal pose is not finite");
    if (g.x < b.min.x || g.x > b.max.x || g.y < b.min.y || g.y > b.max.y)
        throw SceneValidationError("goal pose outside bounds");
}

Scene parse_scene(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SceneParseError(std::string("malformed scene document: ") + e.what());
    }
    try {
        Scene scene = read_scene(doc);
        validate(scene);
        return scene;
    } catch (const json::exception& e) {
        throw SceneParseError(std::string("malformed scene document: ") + e.what());
    }
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SceneParseError("cannot open scene file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scene(buffer.str());
}

std::string serialize_scene(const Scene& scene) {
    const RobotModel& r = scene.robot();
    json limits = json::array();
    for (const auto& l : r.joint_limits) limits.push_back(json::array({l.min, l.max}));
    json obstacles = json::array();
    for (const Obstacle& o : scene.obstacles()) obstacles.push_back(write_obstacle(o));
    const Configuration& s = scene.start();
    json doc = {
        {"version", 1},
        {"name", scene.name()},
        {"bounds", {{"min", write_point(scene.bounds().min)}, {"max", write_point(scene.bounds().max)}}},
        {"obstacles", obstacles},
        {"robot",
         {{"base_radius", r.base_radius},
          {"arm_mount_offset", write_point(r.arm_mount_offset)},
          {"link_lengths", r.link_lengths},
          {"link_radius", r.link_radius},
          {"joint_limits", limits},
          {"predefined_posture", r.predefined_posture},
          {"sphere_base", {{"radius", r.sphere_base.radius}, {"center", write_point(r.sphere_base.center)}}},
          {"sphere_manip", {{"radius", r.sphere_manip.radius}, {"center", write_point(r.sphere_manip.center)}}}}},
        {"start", {{"base", json::array({s.base_x, s.base_y, s.base_theta})}, {"joints", s.joints}}},
        {"goal_pose", {{"x", scene.goal_pose().x}, {"y", scene.goal_pose().y}, {"phi", scene.goal_pose().phi}}},
    };
    return doc.dump(2) + "\n";
}

std::vector<Scene> builtin_problems() {
    std::vector<Scene> out;
    for (const auto& [name, text] : detail::embedded_problems()) out.push_back(parse_scene(text));
    return out;
}

std::vector<std::string> builtin_problem_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : detail::embedded_problems()) out.emplace_back(name);
    return out;
}

Scene resolve_scene(const std::string& name_or_path) {
    const auto& problems = detail::embedded_problems();
    for (std::size_t i = 0; i < problems.size(); ++i) {
        if (name_or_path == std::to_string(i + 1) || name_or_path == problems[i].first)
            return parse_scene(problems[i].second);
    }
    return load_scene(name_or_path);
}

}  // namespace harmony
