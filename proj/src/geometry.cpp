#include "harmony/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace harmony {

namespace {

// A convex core (1 point, 2-point segment, or CCW polygon) plus inflation.
class Core {
public:
    explicit Core(const Shape& shape) {
        std::visit(
            [this](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Circle>) {
                    small_[0] = s.center;
                    count_ = 1;
                    radius = s.radius;
                } else if constexpr (std::is_same_v<T, Capsule>) {
                    small_[0] = s.a;
                    small_[1] = s.b;
                    count_ = 2;
                    radius = s.radius;
                } else if constexpr (std::is_same_v<T, Box>) {
                    small_ = {Point2{s.min.x, s.min.y}, Point2{s.max.x, s.min.y},
                              Point2{s.max.x, s.max.y}, Point2{s.min.x, s.max.y}};
                    count_ = 4;
                } else {
                    external_ = s.vertices.data();
                    count_ = s.vertices.size();
                }
            },
            shape);
    }

    [[nodiscard]] std::span<const Point2> points() const noexcept {
        return {external_ != nullptr ? external_ : small_.data(), count_};
    }

    double radius{0.0};

private:
    std::array<Point2, 4> small_{};
    const Point2* external_{nullptr};
    std::size_t count_{0};
};

std::size_t edge_count(const Core& c) {
    const std::size_t n = c.points().size();
    if (n <= 1) return 1;  // degenerate edge (p, p)
    if (n == 2) return 1;
    return n;
}

std::pair<Point2, Point2> edge(const Core& c, std::size_t i) {
    const std::size_t n = c.points().size();
    if (n == 1) return {c.points()[0], c.points()[0]};
    return {c.points()[i], c.points()[(i + 1) % n]};
}

bool strictly_inside(Point2 p, const Core& poly) {
    const std::size_t n = poly.points().size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly.points()[i];
        const Point2 b = poly.points()[(i + 1) % n];
        if (cross(b - a, p - a) <= 0.0) return false;
    }
    return true;
}

double boundary_distance(const Core& a, const Core& b) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < edge_count(a); ++i) {
        const auto [a0, a1] = edge(a, i);
        for (std::size_t j = 0; j < edge_count(b); ++j) {
            const auto [b0, b1] = edge(b, j);
            best = std::min(best, segment_segment_distance(a0, a1, b0, b1));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

void push_axes(const Core& c, std::vector<Point2>& axes) {
    const std::size_t n = c.points().size();
    if (n < 2) return;
    const std::size_t edges = (n == 2) ? 1 : n;
    for (std::size_t i = 0; i < edges; ++i) {
        const Point2 d = c.points()[(i + 1) % n] - c.points()[i];
        const double len = norm(d);
        if (len > 0.0) axes.push_back({-d.y / len, d.x / len});
    }
}

std::pair<double, double> project(const Core& c, Point2 axis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Point2& p : c.points()) {
        const double v = dot(p, axis);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

double penetration_depth(const Core& a, const Core& b) {
    std::vector<Point2> axes;
    push_axes(a, axes);
    push_axes(b, axes);
    if (axes.empty()) return 0.0;
    double depth = std::numeric_limits<double>::infinity();
    for (const Point2& axis : axes) {
        const auto [a0, a1] = project(a, axis);
        const auto [b0, b1] = project(b, axis);
        depth = std::min(depth, std::max(0.0, std::min(a1 - b0, b1 - a0)));
    }
    return depth;
}

double core_distance(const Core& a, const Core& b) {
    const double d = boundary_distance(a, b);
    bool overlapping = (d == 0.0);
    if (!overlapping) {
        overlapping = (!b.points().empty() && strictly_inside(a.points()[0], b)) ||
                      (!a.points().empty() && strictly_inside(b.points()[0], a));
    }
    if (!overlapping) return d;
    return -penetration_depth(a, b);
}

Circle bounding_circle(const Core& c) {
    const Box box = [&c] {
        Box b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
              {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
        for (const Point2& p : c.points()) {
            b.min = {std::min(b.min.x, p.x), std::min(b.min.y, p.y)};
            b.max = {std::max(b.max.x, p.x), std::max(b.max.y, p.y)};
        }
        return b;
    }();
    const Point2 center = 0.5 * (box.min + box.max);
    double r = 0.0;
    for (const Point2& p : c.points()) r = std::max(r, norm(p - center));
    return {center, r + c.radius};
}

}  // namespace

Shape to_shape(const Obstacle& obstacle) {
    return std::visit([](const auto& s) -> Shape { return s; }, obstacle);
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) noexcept {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

double segment_segment_distance(Point2 a0, Point2 a1, Point2 b0, Point2 b1) noexcept {
    const double o1 = cross(a1 - a0, b0 - a0);
    const double o2 = cross(a1 - a0, b1 - a0);
    const double o3 = cross(b1 - b0, a0 - b0);
    const double o4 = cross(b1 - b0, a1 - b0);
    if (((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) &&
        ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))) {
        return 0.0;
    }
    return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                     point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

double distance(const Shape& a, const Shape& b) {
    const Core ca(a);
    const Core cb(b);
    return core_distance(ca, cb) - ca.radius - cb.radius;
}

bool collides(const Shape& a, const Shape& b) {
    const Core ca(a);
    const Core cb(b);
    const Circle ba = bounding_circle(ca);
    const Circle bb = bounding_circle(cb);
    if (norm(ba.center - bb.center) > ba.radius + bb.radius) return false;
    return core_distance(ca, cb) - ca.radius - cb.radius <= 0.0;
}

Box bounding_box(const Shape& shape) {
    const Core c(shape);
    Box box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
            {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const Point2& p : c.points()) {
        box.min = {std::min(box.min.x, p.x - c.radius), std::min(box.min.y, p.y - c.radius)};
        box.max = {std::max(box.max.x, p.x + c.radius), std::max(box.max.y, p.y + c.radius)};
    }
    return box;
}

double clearance_inside(const Shape& shape, const Box& bounds) {
    const Core c(shape);
    double best = std::numeric_limits<double>::infinity();
    for (const Point2& p : c.points()) {
        best = std::min({best, p.x - bounds.min.x, bounds.max.x - p.x, p.y - bounds.min.y,
                         bounds.max.y - p.y});
    }
    return best - c.radius;
}

void validate(const Obstacle& obstacle) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                if (!std::isfinite(s.center.x) || !std::isfinite(s.center.y) || !std::isfinite(s.radius))
                    throw std::invalid_argument("circle has non-finite values");
                if (!(s.radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
            } else if constexpr (std::is_same_v<T, Box>) {
                if (!std::isfinite(s.min.x) || !std::isfinite(s.min.y) || !std::isfinite(s.max.x) ||
                    !std::isfinite(s.max.y))
                    throw std::invalid_argument("box has non-finite values");
                if (!(s.min.x < s.max.x && s.min.y < s.max.y))
                    throw std::invalid_argument("box min must be below max componentwise");
            } else {
                const auto& v = s.vertices;
                if (v.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
                double turning = 0.0;
                double area2 = 0.0;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (!std::isfinite(v[i].x) || !std::isfinite(v[i].y))
                        throw std::invalid_argument("polygon has non-finite vertex");
                    const Point2 e0 = v[(i + 1) % v.size()] - v[i];
                    const Point2 e1 = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
                    if (cross(e0, e1) < 0.0)
                        throw std::invalid_argument("polygon must be convex and counter-clockwise");
                    turning += std::atan2(cross(e0, e1), dot(e0, e1));
                    area2 += cross(v[i], v[(i + 1) % v.size()]);
                }
                if (!(area2 > 0.0)) throw std::invalid_argument("polygon vertices are collinear");
                if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6)
                    throw std::invalid_argument("polygon must be simple (winds exactly once)");
            }
        },
        obstacle);
}

}  // namespace harmony
