#pragma once

// Deterministic SVG rendering of scenes, regions, paths and sample density.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "harmony/kinematics.hpp"
#include "harmony/regions.hpp"

namespace harmony {

class Scene;

struct SvgLayers {
    /// Optional layers; null pointers are skipped.
    const std::vector<Configuration>* path{nullptr};
    const ManipulationRegions* regions{nullptr};
    const std::vector<Configuration>* samples{nullptr};
    /// Path length between arm snapshots.
    double snapshot_spacing{0.5};
    /// Pixels per metre.
    double scale{160.0};
};

/// Counts per (ix, iy) bin of `grid`, indexed ix * ny + iy. Samples outside
/// the bounds are clamped into the border bins.
[[nodiscard]] std::vector<std::int64_t> sample_heatmap(const BaseGrid& grid, const std::vector<Configuration>& samples);

/// Indices into `path` whose base positions are snapshot points: the first,
/// every `spacing` of base path length after it, and the last.
[[nodiscard]] std::vector<std::size_t> snapshot_indices(const std::vector<Configuration>& path, double spacing);

[[nodiscard]] std::string render_svg(const Scene& scene, const SvgLayers& layers = {});

/// Throws std::runtime_error when the file cannot be written.
void write_svg(const Scene& scene, const SvgLayers& layers, const std::filesystem::path& out);

}  // namespace harmony
