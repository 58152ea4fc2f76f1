#include "harmony/regions.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "harmony/rng.hpp"
#include "harmony/scene.hpp"

namespace harmony {

namespace {

int cells_spanning(double extent, double resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
    return std::max(1, static_cast<int>(std::ceil(extent / resolution - 1e-9)));
}

}  // namespace

BaseGrid::BaseGrid(const Box& bounds, double resolution_xy, double resolution_theta)
    : BaseGrid(bounds, cells_spanning(bounds.max.x - bounds.min.x, resolution_xy),
               cells_spanning(bounds.max.y - bounds.min.y, resolution_xy),
               std::max(1, static_cast<int>(std::lround(2.0 * std::numbers::pi / resolution_theta)))) {}

BaseGrid::BaseGrid(const Box& bounds, int nx_, int ny_, int ntheta_)
    : origin(bounds.min),
      dx((bounds.max.x - bounds.min.x) / nx_),
      dy((bounds.max.y - bounds.min.y) / ny_),
      dtheta(2.0 * std::numbers::pi / ntheta_),
      nx(nx_),
      ny(ny_),
      ntheta(ntheta_) {
    if (nx <= 0 || ny <= 0 || ntheta <= 0) throw std::invalid_argument("grid dimensions must be positive");
    labels.assign(size(), Region::base);
}

CellCoord BaseGrid::coord(std::size_t index) const noexcept {
    const auto nt = static_cast<std::size_t>(ntheta);
    const auto nyy = static_cast<std::size_t>(ny);
    return {static_cast<int>(index / nt / nyy), static_cast<int>((index / nt) % nyy), static_cast<int>(index % nt)};
}

std::size_t BaseGrid::cell_of(double x, double y, double theta) const noexcept {
    auto clamp_index = [](double v, int n) {
        const double f = std::floor(v);
        if (!(f >= 0.0)) return 0;
        if (f >= n - 1) return n - 1;
        return static_cast<int>(f);
    };
    const int ix = clamp_index((x - origin.x) / dx, nx);
    const int iy = clamp_index((y - origin.y) / dy, ny);
    const int it = clamp_index((wrap_angle(theta) + std::numbers::pi) / dtheta, ntheta);
    return index({ix, iy, it});
}

BasePose BaseGrid::cell_min(std::size_t idx) const noexcept {
    const CellCoord c = coord(idx);
    return {origin.x + c.ix * dx, origin.y + c.iy * dy, -std::numbers::pi + c.it * dtheta};
}

BasePose BaseGrid::cell_center(std::size_t idx) const noexcept {
    const BasePose m = cell_min(idx);
    return {m.x + 0.5 * dx, m.y + 0.5 * dy, m.theta + 0.5 * dtheta};
}

std::size_t BaseGrid::count(Region r) const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), r));
}

Point2 GvgGraph::center(std::size_t idx) const noexcept {
    const auto ix = static_cast<double>(idx / static_cast<std::size_t>(ny));
    const auto iy = static_cast<double>(idx % static_cast<std::size_t>(ny));
    return {origin.x + (ix + 0.5) * cell, origin.y + (iy + 0.5) * cell};
}

double source_distance(const Scene& scene, int id, Point2 p) {
    const auto n = static_cast<int>(scene.obstacle_shapes().size());
    if (id < n) return distance(Shape{Circle{p, 0.0}}, scene.obstacle_shapes()[static_cast<std::size_t>(id)]);
    const Box& b = scene.bounds();
    switch (id - n) {
        case 0: return p.x - b.min.x;
        case 1: return b.max.x - p.x;
        case 2: return p.y - b.min.y;
        default: return b.max.y - p.y;
    }
}

GvgGraph build_gvg(const Scene& scene, double resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("gvg resolution must be positive");
    const Box& bounds = scene.bounds();
    GvgGraph g;
    g.origin = bounds.min;
    g.cell = resolution;
    g.nx = cells_spanning(bounds.max.x - bounds.min.x, resolution);
    g.ny = cells_spanning(bounds.max.y - bounds.min.y, resolution);
    const std::size_t n = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
    const auto n_obstacles = static_cast<int>(scene.obstacle_shapes().size());

    g.occupied.assign(n, 0);
    g.clearance.assign(n, 0.0);
    g.nearest.assign(n, -1);

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, kInf);
    std::vector<Point2> source(n);

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

    for (std::size_t i = 0; i < n; ++i) {
        const Point2 c = g.center(i);
        int hit = -1;
        if (c.x > bounds.max.x || c.y > bounds.max.y) {
            hit = (c.x > bounds.max.x) ? n_obstacles + 1 : n_obstacles + 3;
        } else {
            for (int k = 0; k < n_obstacles; ++k) {
                if (source_distance(scene, k, c) <= 0.0) {
                    hit = k;
                    break;
                }
            }
        }
        if (hit >= 0) {
            g.occupied[i] = 1;
            g.nearest[i] = hit;
            dist[i] = 0.0;
            source[i] = c;
            open.emplace(0.0, i);
        }
    }
    // Workspace walls seed the free border cells.
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) {
            if (ix != 0 && iy != 0 && ix != g.nx - 1 && iy != g.ny - 1) continue;
            const std::size_t i = g.index(ix, iy);
            if (g.occupied[i]) continue;
            const Point2 c = g.center(i);
            const std::array<std::pair<int, Point2>, 4> walls{{{0, {bounds.min.x, c.y}},
                                                               {1, {bounds.max.x, c.y}},
                                                               {2, {c.x, bounds.min.y}},
                                                               {3, {c.x, bounds.max.y}}}};
            for (const auto& [wall, p] : walls) {
                const double d = norm(c - p);
                if (d < dist[i]) {
                    dist[i] = d;
                    source[i] = p;
                    g.nearest[i] = n_obstacles + wall;
                }
            }
            open.emplace(dist[i], i);
        }
    }

    while (!open.empty()) {
        const auto [d, i] = open.top();
        open.pop();
        if (d > dist[i]) continue;
        const int ix = static_cast<int>(i / static_cast<std::size_t>(g.ny));
        const int iy = static_cast<int>(i % static_cast<std::size_t>(g.ny));
        for (int ox = -1; ox <= 1; ++ox) {
            for (int oy = -1; oy <= 1; ++oy) {
                if (ox == 0 && oy == 0) continue;
                const int jx = ix + ox;
                const int jy = iy + oy;
                if (jx < 0 || jy < 0 || jx >= g.nx || jy >= g.ny) continue;
                const std::size_t j = g.index(jx, jy);
                if (g.occupied[j]) continue;
                const double nd = norm(g.center(j) - source[i]);
                if (nd < dist[j]) {
                    dist[j] = nd;
                    source[j] = source[i];
                    g.nearest[j] = g.nearest[i];
                    open.emplace(nd, j);
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!g.occupied[i] && g.nearest[i] >= 0) g.clearance[i] = source_distance(scene, g.nearest[i], g.center(i));
    }

    const double diag = g.diagonal();
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) {
            const std::size_t i = g.index(ix, iy);
            if (g.occupied[i] || g.nearest[i] < 0) continue;
            const std::array<std::pair<int, int>, 4> nbrs{{{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}}};
            for (const auto& [jx, jy] : nbrs) {
                if (jx < 0 || jy < 0 || jx >= g.nx || jy >= g.ny) continue;
                const std::size_t j = g.index(jx, jy);
                if (g.occupied[j] || g.nearest[j] == g.nearest[i]) continue;
                const double second = source_distance(scene, g.nearest[j], g.center(i));
                if (second - g.clearance[i] <= diag) {
                    g.ridge.push_back(i);
                    break;
                }
            }
        }
    }
    return g;
}

ReachabilityMap reachability_cells(const Scene& scene, const BaseGrid& grid, std::uint64_t seed) {
    ReachabilityMap out;
    const RobotModel& robot = scene.robot();
    std::int64_t checks = 0;
    const EndEffectorPose& target = scene.goal_pose();
    // Extra restarts find solutions whose basin is narrowed by a joint limit.
    IkOptions options;
    options.restarts = kReachabilityRestarts;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const BasePose base = grid.cell_center(idx);
        if (!within_reach_interval(robot, base, target)) continue;
        auto accept = [&](std::span<const double> joints) {
            ++checks;
            return !robot_in_collision(robot, make_configuration(base, joints), scene);
        };
        auto joints = inverse_kinematics(robot, base, target, mix_seed(seed, idx), options, accept,
                                         &out.ik_iterations);
        if (joints) {
            out.cells.push_back(idx);
            out.witnesses.push_back(std::move(*joints));
        }
    }
    out.collision_checks = checks;
    return out;
}

std::vector<std::size_t> narrow_passage_cells(const Scene& scene, const GvgGraph& gvg, const BaseGrid& grid) {
    const RobotModel& robot = scene.robot();
    std::vector<std::uint8_t> hit(grid.size(), 0);
    auto collides_any = [&scene](const Circle& c) {
        const Shape s{c};
        for (const Shape& o : scene.obstacle_shapes())
            if (collides(s, o)) return true;
        return false;
    };
    for (std::size_t r : gvg.ridge) {
        const Point2 p = gvg.center(r);
        for (int k = 0; k < grid.ntheta; ++k) {
            const double theta = -std::numbers::pi + (k + 0.5) * grid.dtheta;
            const Circle sb{p + rotate(robot.sphere_base.center, theta), robot.sphere_base.radius};
            if (collides_any(sb)) continue;
            const Circle sm{p + rotate(robot.sphere_manip.center, theta), robot.sphere_manip.radius};
            if (!collides_any(sm)) continue;
            const CellCoord c = grid.coord(grid.cell_of(p.x, p.y, theta));
            for (int ox = -1; ox <= 1; ++ox) {
                for (int oy = -1; oy <= 1; ++oy) {
                    const int jx = c.ix + ox;
                    const int jy = c.iy + oy;
                    if (jx < 0 || jy < 0 || jx >= grid.nx || jy >= grid.ny) continue;
                    hit[grid.index({jx, jy, c.it})] = 1;
                }
            }
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < hit.size(); ++i)
        if (hit[i]) out.push_back(i);
    return out;
}

ManipulationRegions identify_manipulation_regions(const Scene& scene, BaseGrid grid, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    ManipulationRegions out;
    out.reachability = reachability_cells(scene, grid, seed);
    out.gvg = build_gvg(scene, std::min(grid.dx, grid.dy));
    out.narrow_passages = narrow_passage_cells(scene, out.gvg, grid);
    std::fill(grid.labels.begin(), grid.labels.end(), Region::base);
    for (std::size_t c : out.reachability.cells) grid.labels[c] = Region::manipulation;
    for (std::size_t c : out.narrow_passages) grid.labels[c] = Region::manipulation;
    out.grid = std::move(grid);
    out.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

ManipulationRegions identify_reachability_only(const Scene& scene, BaseGrid grid, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    ManipulationRegions out;
    out.reachability = reachability_cells(scene, grid, seed);
    std::fill(grid.labels.begin(), grid.labels.end(), Region::base);
    out.grid = std::move(grid);
    out.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace harmony
