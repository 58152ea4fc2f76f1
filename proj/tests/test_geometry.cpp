#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "harmony/geometry.hpp"
#include "test_support.hpp"

using namespace harmony;
using harmony::testing::random_shape;
using harmony::testing::translated;

namespace {

// Independent oracle: every shape is a vertex loop (possibly one or two
// points) plus a radius. Disjoint cores are separated by a vertex-edge pair.
struct Core {
    std::vector<Point2> pts;
    double radius{0.0};
};

Core core_of(const Shape& s) {
    return std::visit(
        [](const auto& v) -> Core {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return {{v.center}, v.radius};
            } else if constexpr (std::is_same_v<T, Box>) {
                return {{v.min, {v.max.x, v.min.y}, v.max, {v.min.x, v.max.y}}, 0.0};
            } else if constexpr (std::is_same_v<T, Polygon>) {
                return {v.vertices, 0.0};
            } else {
                return {{v.a, v.b}, v.radius};
            }
        },
        s);
}

double seg_point(Point2 p, Point2 a, Point2 b) {
    const double lx = b.x - a.x, ly = b.y - a.y;
    const double len2 = lx * lx + ly * ly;
    double t = len2 > 0 ? ((p.x - a.x) * lx + (p.y - a.y) * ly) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * lx), p.y - (a.y + t * ly));
}

bool inside(const std::vector<Point2>& poly, Point2 p) {
    if (poly.size() < 3) return false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
        if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0) return false;
    }
    return true;
}

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    auto orient = [](Point2 p, Point2 q, Point2 r) { return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x); };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

std::vector<std::pair<Point2, Point2>> edges(const std::vector<Point2>& pts) {
    std::vector<std::pair<Point2, Point2>> out;
    if (pts.size() == 1) out.push_back({pts[0], pts[0]});
    else if (pts.size() == 2) out.push_back({pts[0], pts[1]});
    else
        for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({pts[i], pts[(i + 1) % pts.size()]});
    return out;
}

// Core-to-core distance, or nullopt when the cores overlap.
std::optional<double> oracle_core_distance(const Core& a, const Core& b) {
    for (const auto& p : a.pts)
        if (inside(b.pts, p)) return std::nullopt;
    for (const auto& p : b.pts)
        if (inside(a.pts, p)) return std::nullopt;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [p, q] : edges(a.pts))
        for (const auto& [r, s] : edges(b.pts)) {
            if (segments_cross(p, q, r, s)) return std::nullopt;
            best = std::min({best, seg_point(p, r, s), seg_point(q, r, s), seg_point(r, p, q), seg_point(s, p, q)});
        }
    return best;
}

}  // namespace

TEST_CASE("circle distances") {
    CHECK(distance(Circle{{0, 0}, 1}, Circle{{3, 0}, 1}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(distance(Circle{{0, 0}, 1}, Circle{{1, 0}, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("capsule to point distance") {
    CHECK(distance(Capsule{{0, 0}, {2, 0}, 0.1}, Circle{{1, 1}, 0.0}) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("collision examples") {
    CHECK_FALSE(collides(Circle{{0, 0}, 1}, Circle{{3, 0}, 1}));
    CHECK(collides(Box{{0, 0}, {1, 1}}, Circle{{0.5, 0.5}, 0.2}));
    CHECK(distance(Circle{{0, 0}, 1}, Circle{{2, 0}, 1}) == 0.0);
    CHECK(collides(Circle{{0, 0}, 1}, Circle{{2, 0}, 1}));
}

TEST_CASE("box and polygon contact is exact") {
    const Box a{{0, 0}, {1, 1}};
    const Box b{{1, 0.5}, {2, 2}};
    CHECK(distance(a, b) == 0.0);
    CHECK(collides(a, b));
    const Polygon tri{{{2, 0}, {3, 0}, {2.5, 1}}};
    CHECK(distance(a, tri) == doctest::Approx(1.0));
}

TEST_CASE("random pairs: symmetry, collision sign and translation invariance") {
    Rng rng(17);
    int separated = 0;
    for (int i = 0; i < 10000; ++i) {
        const Shape a = random_shape(rng);
        const Shape b = random_shape(rng);
        const double d = distance(a, b);
        REQUIRE(std::isfinite(d));
        CHECK(std::abs(d - distance(b, a)) <= 1e-9);
        CHECK(collides(a, b) == (d <= 0.0));
        const Point2 shift = harmony::testing::random_point(rng, -10.0, 10.0);
        CHECK(std::abs(distance(translated(a, shift), translated(b, shift)) - d) <= 1e-9);

        const Core ca = core_of(a), cb = core_of(b);
        if (const auto core = oracle_core_distance(ca, cb)) {
            ++separated;
            CHECK(std::abs(d - (*core - ca.radius - cb.radius)) <= 1e-9);
        } else {
            CHECK(d <= 1e-9 - ca.radius - cb.radius);
            CHECK(collides(a, b));
        }
    }
    CHECK(separated > 5000);
}

TEST_CASE("clearance inside bounds") {
    const Box bounds{{0, 0}, {5, 4}};
    CHECK(clearance_inside(Circle{{1, 1}, 0.5}, bounds) == doctest::Approx(0.5));
    CHECK(clearance_inside(Circle{{0.2, 1}, 0.5}, bounds) < 0.0);
    CHECK(clearance_inside(Capsule{{1, 1}, {4.9, 1}, 0.05}, bounds) == doctest::Approx(0.05));
}

TEST_CASE("obstacle validation") {
    CHECK_NOTHROW(validate(Obstacle{Circle{{0, 0}, 1}}));
    CHECK_THROWS_AS(validate(Obstacle{Circle{{0, 0}, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Obstacle{Box{{1, 0}, {0, 1}}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Obstacle{Polygon{{{0, 0}, {1, 0}}}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Obstacle{Polygon{{{0, 0}, {0, 1}, {1, 0}}}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Obstacle{Polygon{{{0, 0}, {1, 0}, {2, 0}}}}), std::invalid_argument);
}

TEST_CASE("bounding boxes enclose shapes") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const Shape s = random_shape(rng);
        const Box bb = bounding_box(s);
        const Core c = core_of(s);
        for (const auto& p : c.pts) {
            CHECK(p.x - c.radius >= bb.min.x - 1e-12);
            CHECK(p.x + c.radius <= bb.max.x + 1e-12);
            CHECK(p.y - c.radius >= bb.min.y - 1e-12);
            CHECK(p.y + c.radius <= bb.max.y + 1e-12);
        }
    }
}
