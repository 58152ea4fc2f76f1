#pragma once

// Partition of the gridded base space (x, y, theta) into manipulation
// regions, where base and arm must move together, and base regions.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "harmony/geometry.hpp"
#include "harmony/kinematics.hpp"

namespace harmony {

class Scene;

enum class Region : std::uint8_t { base = 0, manipulation = 1 };

struct CellCoord {
    int ix{0};
    int iy{0};
    int it{0};
    friend bool operator==(const CellCoord&, const CellCoord&) = default;
};

/// Regular grid over the 3-DoF base space. Cells tile the workspace bounds
/// exactly; headings start at -pi.
struct BaseGrid {
    BaseGrid() = default;
    /// `resolution_xy` is rounded so an integral number of cells spans the
    /// bounds; `resolution_theta` must divide 2*pi up to rounding.
    BaseGrid(const Box& bounds, double resolution_xy, double resolution_theta);
    BaseGrid(const Box& bounds, int nx, int ny, int ntheta);

    Point2 origin;
    double dx{0.0};
    double dy{0.0};
    double dtheta{0.0};
    int nx{0};
    int ny{0};
    int ntheta{0};

    std::vector<Region> labels;
    /// Sampling hyper-volume per cell; empty until finalize_pmf.
    std::vector<double> volumes;
    std::vector<double> masses;
    /// Inclusive prefix sums of masses, ending at 1.
    std::vector<double> cumulative;

    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(ntheta);
    }
    [[nodiscard]] std::size_t index(CellCoord c) const noexcept {
        return (static_cast<std::size_t>(c.ix) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(c.iy)) *
                   static_cast<std::size_t>(ntheta) +
               static_cast<std::size_t>(c.it);
    }
    [[nodiscard]] CellCoord coord(std::size_t index) const noexcept;
    [[nodiscard]] std::size_t cell_of(double x, double y, double theta) const noexcept;
    /// Lower corner of the cell (x, y, theta).
    [[nodiscard]] BasePose cell_min(std::size_t index) const noexcept;
    [[nodiscard]] BasePose cell_center(std::size_t index) const noexcept;
    [[nodiscard]] Region label_of(const Configuration& q) const noexcept {
        return labels[cell_of(q.base_x, q.base_y, q.base_theta)];
    }
    [[nodiscard]] std::size_t count(Region r) const noexcept;
};

/// Default resolution: 0.1 m in x and y, 30 degrees in heading.
inline constexpr double kDefaultResolutionXY = 0.1;
inline constexpr double kDefaultResolutionTheta = std::numbers::pi / 6.0;

/// Discrete generalized Voronoi graph of the workspace obtained from a
/// brushfire distance transform. Workspace walls are sources with ids
/// n_obstacles + {0: left, 1: right, 2: bottom, 3: top}.
struct GvgGraph {
    Point2 origin;
    double cell{0.0};
    int nx{0};
    int ny{0};
    std::vector<std::uint8_t> occupied;
    std::vector<double> clearance;
    std::vector<int> nearest;
    /// Ridge cells as flat indices (ix * ny + iy), ascending.
    std::vector<std::size_t> ridge;

    [[nodiscard]] std::size_t index(int ix, int iy) const noexcept {
        return static_cast<std::size_t>(ix) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(iy);
    }
    [[nodiscard]] Point2 center(std::size_t index) const noexcept;
    [[nodiscard]] double diagonal() const noexcept { return cell * std::numbers::sqrt2; }
};

/// Exact distance from a point to source `id` (obstacle or workspace wall).
[[nodiscard]] double source_distance(const Scene& scene, int id, Point2 p);

[[nodiscard]] GvgGraph build_gvg(const Scene& scene, double resolution);

struct ReachabilityMap {
    /// Cell indices in ascending order.
    std::vector<std::size_t> cells;
    /// Collision-free IK solution from each cell center, parallel to `cells`.
    std::vector<std::vector<double>> witnesses;
    std::int64_t ik_iterations{0};
    std::int64_t collision_checks{0};
};

/// IK restarts per cell when building the reachability map.
inline constexpr int kReachabilityRestarts = 50;

inline constexpr std::uint64_t kDefaultRegionSeed = 0x5EED'0F'4EAC4ULL;

[[nodiscard]] ReachabilityMap reachability_cells(const Scene& scene, const BaseGrid& grid,
                                                 std::uint64_t seed = kDefaultRegionSeed);

/// Ridge cells where the base sphere fits but the manipulator sphere hits an
/// obstacle, per heading bin, dilated by one cell in x and y. Ascending.
[[nodiscard]] std::vector<std::size_t> narrow_passage_cells(const Scene& scene, const GvgGraph& gvg,
                                                            const BaseGrid& grid);

struct ManipulationRegions {
    BaseGrid grid;
    ReachabilityMap reachability;
    std::vector<std::size_t> narrow_passages;
    GvgGraph gvg;
    double build_seconds{0.0};
};

/// Labels reachability and narrow-passage cells as manipulation regions.
[[nodiscard]] ManipulationRegions identify_manipulation_regions(const Scene& scene, BaseGrid grid,
                                                               std::uint64_t seed = kDefaultRegionSeed);

/// Reachability only (goal generation for the baselines); no GVG work.
[[nodiscard]] ManipulationRegions identify_reachability_only(const Scene& scene, BaseGrid grid,
                                                            std::uint64_t seed = kDefaultRegionSeed);

}  // namespace harmony
