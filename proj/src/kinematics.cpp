#include "harmony/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "harmony/rng.hpp"
#include "harmony/scene.hpp"

namespace harmony {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ChainState {
    double x{0.0};
    double y{0.0};
    double phi{0.0};
};

// End effector of the chain in the mount frame (mount at origin, heading 0).
ChainState chain_tip(std::span<const double> lengths, std::span<const double> joints) {
    ChainState s;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        s.phi += joints[i];
        s.x += lengths[i] * std::cos(s.phi);
        s.y += lengths[i] * std::sin(s.phi);
    }
    return s;
}

double min_reach(std::span<const double> lengths) {
    double total = 0.0;
    double longest = 0.0;
    for (double l : lengths) {
        total += l;
        longest = std::max(longest, l);
    }
    return std::max(0.0, longest - (total - longest));
}

double sum(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

// Solves the symmetric 3x3 system A x = b by Gaussian elimination with
// partial pivoting. A is positive definite here (damped normal equations).
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < 3; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

}  // namespace

double wrap_angle(double angle) noexcept {
    double r = std::remainder(angle, kTwoPi);
    if (r >= std::numbers::pi) r -= kTwoPi;
    if (r < -std::numbers::pi) r = -std::numbers::pi;
    return r;
}

double angle_diff(double a, double b) noexcept { return std::remainder(b - a, kTwoPi); }

double Configuration::operator[](std::size_t d) const noexcept {
    switch (d) {
        case 0: return base_x;
        case 1: return base_y;
        case 2: return base_theta;
        default: return joints[d - kBaseDof];
    }
}

double& Configuration::operator[](std::size_t d) noexcept {
    switch (d) {
        case 0: return base_x;
        case 1: return base_y;
        case 2: return base_theta;
        default: return joints[d - kBaseDof];
    }
}

RobotModel default_robot() {
    RobotModel m;
    m.base_radius = 0.3;
    m.arm_mount_offset = {0.0, 0.0};
    m.link_lengths = {0.5, 0.4, 0.3};
    m.link_radius = 0.04;
    m.joint_limits = {{-2.6, 2.6}, {-2.6, 2.6}, {-2.6, 2.6}};
    m.predefined_posture = {0.0, 2.0, -2.0};
    m.sphere_base = {0.32, {0.0, 0.0}};
    m.sphere_manip = {0.45, {0.3, 0.18}};
    m.weights = compute_weights(m);
    return m;
}

void validate(const RobotModel& model) {
    const std::size_t j = model.arm_dof();
    if (j == 0) throw std::invalid_argument("robot needs at least one link");
    if (!(model.base_radius > 0.0)) throw std::invalid_argument("base_radius must be positive");
    if (!(model.link_radius > 0.0)) throw std::invalid_argument("link_radius must be positive");
    for (double l : model.link_lengths)
        if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("link lengths must be positive");
    if (model.joint_limits.size() != j) throw std::invalid_argument("joint_limits size must match link count");
    for (const auto& lim : model.joint_limits)
        if (!(lim.min <= lim.max) || !std::isfinite(lim.min) || !std::isfinite(lim.max))
            throw std::invalid_argument("joint limit min must not exceed max");
    if (model.predefined_posture.size() != j)
        throw std::invalid_argument("predefined_posture size must match link count");
    for (std::size_t i = 0; i < j; ++i) {
        const double v = model.predefined_posture[i];
        if (!(v >= model.joint_limits[i].min && v <= model.joint_limits[i].max))
            throw std::invalid_argument("predefined posture outside joint limits");
    }
    if (model.weights.size() != model.dim()) throw std::invalid_argument("weights size must be 3 + arm dof");
    if (model.weights[0] != 1.0 || model.weights[1] != 1.0)
        throw std::invalid_argument("x and y weights must be 1");
    for (double w : model.weights)
        if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
    const double sb_reach = norm(model.sphere_base.center) + model.base_radius;
    if (!(model.sphere_base.radius >= sb_reach))
        throw std::invalid_argument("sphere_base does not enclose the base disc");

    Configuration q{0.0, 0.0, 0.0, model.predefined_posture};
    const FkResult fk = forward_kinematics(model, q);
    for (const Capsule& c : fk.body.links) {
        constexpr int kSteps = 64;
        for (int s = 0; s <= kSteps; ++s) {
            const Point2 p = c.a + (static_cast<double>(s) / kSteps) * (c.b - c.a);
            if (norm(p - model.sphere_manip.center) + c.radius > model.sphere_manip.radius + 1e-12)
                throw std::invalid_argument("sphere_manip does not enclose the arm at the predefined posture");
        }
    }
}

FkResult forward_kinematics(const RobotModel& model, const Configuration& q) {
    FkResult out;
    const Point2 base{q.base_x, q.base_y};
    out.body.base = Circle{base, model.base_radius};
    out.body.links.reserve(model.arm_dof());
    Point2 joint = base + rotate(model.arm_mount_offset, q.base_theta);
    double phi = q.base_theta;
    for (std::size_t i = 0; i < model.arm_dof(); ++i) {
        phi += q.joints[i];
        const Point2 next = joint + model.link_lengths[i] * Point2{std::cos(phi), std::sin(phi)};
        out.body.links.push_back(Capsule{joint, next, model.link_radius});
        joint = next;
    }
    out.end_effector = {joint.x, joint.y, wrap_angle(phi)};
    return out;
}

EndEffectorPose end_effector_pose(const RobotModel& model, const Configuration& q) {
    return forward_kinematics(model, q).end_effector;
}

std::vector<Point2> sample_body_points(const RobotModel& model, const Configuration& q, std::size_t approx_count) {
    const std::size_t parts = model.arm_dof() + 1;
    const std::size_t per_part = std::max<std::size_t>(16, approx_count / parts);
    const auto rings = static_cast<std::size_t>(std::max(2.0, std::floor(std::sqrt(per_part / 8.0))));
    const std::size_t per_ring = std::max<std::size_t>(8, per_part / rings);

    std::vector<Point2> points;
    points.reserve(parts * (per_part + 2 * per_ring));

    const Point2 base{q.base_x, q.base_y};
    // Base disc: concentric rings, outermost on the boundary.
    for (std::size_t r = 1; r <= rings; ++r) {
        const double radius = model.base_radius * static_cast<double>(r) / static_cast<double>(rings);
        for (std::size_t k = 0; k < per_ring; ++k) {
            const double a = kTwoPi * static_cast<double>(k) / static_cast<double>(per_ring);
            points.push_back(base + rotate(Point2{radius * std::cos(a), radius * std::sin(a)}, q.base_theta));
        }
    }
    points.push_back(base);

    // Links: axis stations, each with a ring on the capsule surface.
    const std::size_t stations = std::max<std::size_t>(2, per_part / 9);
    Point2 joint = base + rotate(model.arm_mount_offset, q.base_theta);
    double phi = q.base_theta;
    for (std::size_t i = 0; i < model.arm_dof(); ++i) {
        phi += q.joints[i];
        for (std::size_t s = 0; s <= stations; ++s) {
            const double t = model.link_lengths[i] * static_cast<double>(s) / static_cast<double>(stations);
            points.push_back(joint + rotate(Point2{t, 0.0}, phi));
            for (int k = 0; k < 8; ++k) {
                const double a = kTwoPi * k / 8.0;
                const Point2 local{t + model.link_radius * std::cos(a), model.link_radius * std::sin(a)};
                points.push_back(joint + rotate(local, phi));
            }
        }
        joint = joint + model.link_lengths[i] * Point2{std::cos(phi), std::sin(phi)};
    }
    return points;
}

bool within_reach_interval(const RobotModel& model, const BasePose& base, const EndEffectorPose& target) {
    constexpr double kSlack = 1e-9;
    const Point2 shoulder = Point2{base.x, base.y} + rotate(model.arm_mount_offset, base.theta);
    const std::span<const double> lengths(model.link_lengths);
    const double d = norm(Point2{target.x, target.y} - shoulder);
    if (d > sum(lengths) + kSlack || d < min_reach(lengths) - kSlack) return false;
    if (lengths.size() >= 2) {
        const double last = lengths.back();
        const Point2 wrist = Point2{target.x, target.y} - last * Point2{std::cos(target.phi), std::sin(target.phi)};
        const auto proximal = lengths.first(lengths.size() - 1);
        const double dw = norm(wrist - shoulder);
        if (dw > sum(proximal) + kSlack || dw < min_reach(proximal) - kSlack) return false;
    }
    return true;
}

std::optional<std::vector<double>> inverse_kinematics(const RobotModel& model, const BasePose& base,
                                                      const EndEffectorPose& target, std::uint64_t seed,
                                                      const IkOptions& options, const JointPredicate& accept,
                                                      std::int64_t* iterations_used) {
    if (!std::isfinite(target.x) || !std::isfinite(target.y) || !std::isfinite(target.phi)) return std::nullopt;
    if (!within_reach_interval(model, base, target)) return std::nullopt;

    const std::size_t n = model.arm_dof();
    const std::span<const double> lengths(model.link_lengths);
    const Point2 shoulder = Point2{base.x, base.y} + rotate(model.arm_mount_offset, base.theta);
    // Target expressed in the mount frame.
    const Point2 local = rotate(Point2{target.x, target.y} - shoulder, -base.theta);
    const double local_phi = target.phi - base.theta;

    auto error_of = [&](std::span<const double> q) {
        const ChainState tip = chain_tip(lengths, q);
        return std::array<double, 3>{local.x - tip.x, local.y - tip.y, angle_diff(tip.phi, local_phi)};
    };
    auto sq = [](const std::array<double, 3>& e) { return e[0] * e[0] + e[1] * e[1] + e[2] * e[2]; };

    const Rng root(seed);
    std::vector<double> q(n);
    std::vector<double> trial(n);
    std::vector<double> phis(n);
    std::vector<std::array<double, 3>> jac(n);
    std::int64_t used = 0;

    for (int restart = 0; restart < options.restarts; ++restart) {
        Rng rng = root.split(static_cast<std::uint64_t>(restart));
        for (std::size_t j = 0; j < n; ++j) q[j] = rng.uniform(model.joint_limits[j].min, model.joint_limits[j].max);
        auto err = error_of(q);
        double lambda = options.damping;
        double checkpoint = sq(err);

        for (int it = 0; it < options.iterations; ++it) {
            if (std::hypot(err[0], err[1]) <= options.position_tolerance &&
                std::abs(err[2]) <= options.orientation_tolerance)
                break;
            ++used;
            // Jacobian columns: d(x, y, phi)/dq_j.
            double phi = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                phi += q[j];
                phis[j] = phi;
            }
            double tail_x = 0.0;
            double tail_y = 0.0;
            for (std::size_t j = n; j-- > 0;) {
                tail_x += lengths[j] * std::cos(phis[j]);
                tail_y += lengths[j] * std::sin(phis[j]);
                jac[j] = {-tail_y, tail_x, 1.0};
            }
            std::array<std::array<double, 3>, 3> jjt{};
            for (std::size_t j = 0; j < n; ++j)
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c) jjt[r][c] += jac[j][r] * jac[j][c];
            for (int r = 0; r < 3; ++r) jjt[r][r] += lambda * lambda;
            const auto y = solve3(jjt, err);
            for (std::size_t j = 0; j < n; ++j) {
                const double step = jac[j][0] * y[0] + jac[j][1] * y[1] + jac[j][2] * y[2];
                trial[j] = std::clamp(q[j] + step, model.joint_limits[j].min, model.joint_limits[j].max);
            }
            const auto trial_err = error_of(trial);
            if (sq(trial_err) < sq(err)) {
                q.swap(trial);
                err = trial_err;
                lambda = std::max(lambda * 0.5, 1e-9);
            } else {
                lambda = std::min(lambda * 4.0, 1e3);
            }
            // Abandon a restart whose error has stopped shrinking.
            if (options.stall_window > 0 && (it + 1) % options.stall_window == 0) {
                if (sq(err) > options.stall_ratio * checkpoint) break;
                checkpoint = sq(err);
            }
        }

        if (std::hypot(err[0], err[1]) <= options.position_tolerance &&
            std::abs(err[2]) <= options.orientation_tolerance) {
            if (!accept || accept(q)) {
                if (iterations_used != nullptr) *iterations_used += used;
                return q;
            }
        }
    }
    if (iterations_used != nullptr) *iterations_used += used;
    return std::nullopt;
}

std::vector<double> compute_weights(const RobotModel& model) {
    std::vector<double> w(model.dim());
    w[0] = 1.0;
    w[1] = 1.0;
    const double reach = sum(model.link_lengths);
    w[kThetaIndex] = std::max(norm(model.arm_mount_offset) + reach + model.link_radius, model.base_radius);
    double distal = 0.0;
    for (std::size_t j = model.arm_dof(); j-- > 0;) {
        distal += model.link_lengths[j];
        w[kBaseDof + j] = distal + model.link_radius;
    }
    return w;
}

double weighted_distance(std::span<const double> a, std::span<const double> b,
                         std::span<const double> weights) noexcept {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = (d == kThetaIndex) ? angle_diff(a[d], b[d]) : b[d] - a[d];
        const double term = weights[d] * std::abs(diff);
        s += term * term;
    }
    return std::sqrt(s);
}

double weighted_distance(const RobotModel& model, const Configuration& a, const Configuration& b) {
    const auto fa = flatten(a);
    const auto fb = flatten(b);
    return weighted_distance(fa, fb, model.weights);
}

double displacement_bound(const RobotModel& model, const Configuration& a, const Configuration& b) {
    double s = model.weights[0] * std::abs(b.base_x - a.base_x) + model.weights[1] * std::abs(b.base_y - a.base_y) +
               model.weights[kThetaIndex] * std::abs(angle_diff(a.base_theta, b.base_theta));
    for (std::size_t j = 0; j < a.joints.size(); ++j)
        s += model.weights[kBaseDof + j] * std::abs(b.joints[j] - a.joints[j]);
    return s;
}

bool displacement_upper_bound_check(const RobotModel& model, const Configuration& a, const Configuration& b,
                                    std::size_t n_body_samples) {
    const auto pa = sample_body_points(model, a, n_body_samples);
    const auto pb = sample_body_points(model, b, n_body_samples);
    double worst = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, norm(pa[i] - pb[i]));
    return worst <= displacement_bound(model, a, b) + 1e-9;
}

Configuration interpolate(const Configuration& a, const Configuration& b, double t) {
    Configuration q;
    q.base_x = a.base_x + t * (b.base_x - a.base_x);
    q.base_y = a.base_y + t * (b.base_y - a.base_y);
    q.base_theta = wrap_angle(a.base_theta + t * angle_diff(a.base_theta, b.base_theta));
    q.joints.resize(a.joints.size());
    for (std::size_t j = 0; j < a.joints.size(); ++j) q.joints[j] = a.joints[j] + t * (b.joints[j] - a.joints[j]);
    return q;
}

bool robot_in_collision(const RobotModel& model, const Configuration& q, const Scene& scene) {
    const FkResult fk = forward_kinematics(model, q);
    const Shape base_shape = fk.body.base;
    if (clearance_inside(base_shape, scene.bounds()) <= 0.0) return true;
    for (const Capsule& link : fk.body.links)
        if (clearance_inside(Shape{link}, scene.bounds()) <= 0.0) return true;
    for (const Shape& obstacle : scene.obstacle_shapes()) {
        if (collides(base_shape, obstacle)) return true;
        for (const Capsule& link : fk.body.links)
            if (collides(Shape{link}, obstacle)) return true;
    }
    for (std::size_t i = 1; i < fk.body.links.size(); ++i)
        if (collides(Shape{fk.body.links[i]}, base_shape)) return true;
    return false;
}

double robot_clearance(const RobotModel& model, const Configuration& q, const Scene& scene) {
    const FkResult fk = forward_kinematics(model, q);
    const Shape base_shape = fk.body.base;
    double best = clearance_inside(base_shape, scene.bounds());
    for (const Capsule& link : fk.body.links) best = std::min(best, clearance_inside(Shape{link}, scene.bounds()));
    for (const Shape& obstacle : scene.obstacle_shapes()) {
        best = std::min(best, distance(base_shape, obstacle));
        for (const Capsule& link : fk.body.links) best = std::min(best, distance(Shape{link}, obstacle));
    }
    for (std::size_t i = 1; i < fk.body.links.size(); ++i)
        best = std::min(best, distance(Shape{fk.body.links[i]}, base_shape));
    return best;
}

bool within_goal_tolerance(const EndEffectorPose& a, const EndEffectorPose& b, double position_tol,
                           double orientation_tol) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y) <= position_tol && std::abs(angle_diff(a.phi, b.phi)) <= orientation_tol;
}

Configuration make_configuration(const BasePose& base, std::span<const double> joints) {
    return Configuration{base.x, base.y, wrap_angle(base.theta), std::vector<double>(joints.begin(), joints.end())};
}

std::vector<double> flatten(const Configuration& q) {
    std::vector<double> out;
    out.reserve(q.dim());
    out.push_back(q.base_x);
    out.push_back(q.base_y);
    out.push_back(q.base_theta);
    out.insert(out.end(), q.joints.begin(), q.joints.end());
    return out;
}

}  // namespace harmony
