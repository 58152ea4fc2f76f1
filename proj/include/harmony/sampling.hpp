#pragma once

// Harmonious sampler: a hyper-volume weighted PMF over base cells mixed
// with a uniform sampler over the whole configuration space.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "harmony/kinematics.hpp"
#include "harmony/regions.hpp"
#include "harmony/rng.hpp"

namespace harmony {

class EmptySamplingSpace : public std::runtime_error {
public:
    EmptySamplingSpace() : std::runtime_error("empty sampling space") {}
};

struct SamplerParams {
    double rho_sample{0.8};
    std::vector<JointLimit> joint_bounds;
    Box base_bounds;
    std::uint64_t seed{0};
};

/// Product of weighted extents of the cell's sampling space: the base
/// extents always, plus the full joint intervals for manipulation cells.
[[nodiscard]] double cell_volume(const BaseGrid& grid, std::size_t cell, std::span<const double> weights,
                                 std::span<const JointLimit> joint_bounds);

/// Fills volumes, masses and cumulative sums. Throws EmptySamplingSpace when
/// every cell has zero volume.
void finalize_pmf(BaseGrid& grid, std::span<const double> weights, std::span<const JointLimit> joint_bounds);

/// Inverse-transform lookup: the first cell whose cumulative mass exceeds u.
[[nodiscard]] std::size_t pick_cell(const BaseGrid& grid, double u) noexcept;

class HarmoniousSampler {
public:
    /// `grid` must outlive the sampler and have a finalized PMF.
    HarmoniousSampler(const BaseGrid& grid, SamplerParams params, std::vector<double> predefined_posture);

    [[nodiscard]] Configuration draw(Rng& rng) const;
    [[nodiscard]] Configuration draw_uniform(Rng& rng) const;

    [[nodiscard]] const BaseGrid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const SamplerParams& params() const noexcept { return params_; }
    [[nodiscard]] std::size_t manipulation_dof() const noexcept { return kBaseDof + params_.joint_bounds.size(); }
    [[nodiscard]] static constexpr std::size_t base_dof() noexcept { return kBaseDof; }

private:
    const BaseGrid* grid_;
    SamplerParams params_;
    std::vector<double> predefined_;
};

}  // namespace harmony
