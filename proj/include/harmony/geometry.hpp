#pragma once

// Planar primitives and exact signed-distance queries.
//
// Every shape is treated as a convex "core" (point, segment or convex
// polygon) inflated by a radius. Distances between cores are exact; when
// cores overlap the separating-axis overlap gives the penetration depth.

#include <array>
#include <cmath>
#include <span>
#include <variant>
#include <vector>

namespace harmony {

struct Point2 {
    double x{0.0};
    double y{0.0};

    friend Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) noexcept { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

[[nodiscard]] inline double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }
[[nodiscard]] inline double cross(Point2 a, Point2 b) noexcept { return a.x * b.y - a.y * b.x; }
[[nodiscard]] inline double norm(Point2 a) noexcept { return std::hypot(a.x, a.y); }
[[nodiscard]] inline Point2 rotate(Point2 p, double angle) noexcept {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

struct Circle {
    Point2 center;
    double radius{0.0};
    friend bool operator==(const Circle&, const Circle&) = default;
};

/// Convex polygon, vertices counter-clockwise.
struct Polygon {
    std::vector<Point2> vertices;
    friend bool operator==(const Polygon&, const Polygon&) = default;
};

struct Box {
    Point2 min;
    Point2 max;
    friend bool operator==(const Box&, const Box&) = default;
};

struct Capsule {
    Point2 a;
    Point2 b;
    double radius{0.0};
    friend bool operator==(const Capsule&, const Capsule&) = default;
};

using Obstacle = std::variant<Circle, Polygon, Box>;
using Shape = std::variant<Circle, Polygon, Box, Capsule>;

[[nodiscard]] Shape to_shape(const Obstacle& obstacle);

/// Signed clearance between two shapes. Negative values are a lower bound on
/// the penetration depth; touching shapes give exactly zero.
[[nodiscard]] double distance(const Shape& a, const Shape& b);

/// Contact counts as collision.
[[nodiscard]] bool collides(const Shape& a, const Shape& b);

[[nodiscard]] Box bounding_box(const Shape& shape);

/// Smallest distance from the shape to the boundary of `bounds`, negative when
/// any part of the shape lies outside.
[[nodiscard]] double clearance_inside(const Shape& shape, const Box& bounds);

/// Throws std::invalid_argument naming the violated invariant.
void validate(const Obstacle& obstacle);

[[nodiscard]] double point_segment_distance(Point2 p, Point2 a, Point2 b) noexcept;
[[nodiscard]] double segment_segment_distance(Point2 a0, Point2 a1, Point2 b0, Point2 b1) noexcept;

}  // namespace harmony
