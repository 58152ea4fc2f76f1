#include "harmony/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace harmony {

double cell_volume(const BaseGrid& grid, std::size_t cell, std::span<const double> weights,
                   std::span<const JointLimit> joint_bounds) {
    double v = (weights[0] * grid.dx) * (weights[1] * grid.dy) * (weights[kThetaIndex] * grid.dtheta);
    if (grid.labels[cell] == Region::manipulation) {
        for (std::size_t j = 0; j < joint_bounds.size(); ++j)
            v *= weights[kBaseDof + j] * (joint_bounds[j].max - joint_bounds[j].min);
    }
    return v;
}

void finalize_pmf(BaseGrid& grid, std::span<const double> weights, std::span<const JointLimit> joint_bounds) {
    const std::size_t n = grid.size();
    grid.volumes.resize(n);
    grid.masses.resize(n);
    grid.cumulative.resize(n);
    long double total = 0.0L;
    for (std::size_t c = 0; c < n; ++c) {
        grid.volumes[c] = cell_volume(grid, c, weights, joint_bounds);
        total += grid.volumes[c];
    }
    if (!(total > 0.0L)) throw EmptySamplingSpace();
    long double running = 0.0L;
    for (std::size_t c = 0; c < n; ++c) {
        grid.masses[c] = static_cast<double>(grid.volumes[c] / total);
        running += grid.volumes[c];
        grid.cumulative[c] = static_cast<double>(running / total);
    }
    grid.cumulative.back() = 1.0;
}

std::size_t pick_cell(const BaseGrid& grid, double u) noexcept {
    const auto it = std::upper_bound(grid.cumulative.begin(), grid.cumulative.end(), u);
    if (it == grid.cumulative.end()) return grid.cumulative.size() - 1;
    return static_cast<std::size_t>(it - grid.cumulative.begin());
}

HarmoniousSampler::HarmoniousSampler(const BaseGrid& grid, SamplerParams params, std::vector<double> predefined_posture)
    : grid_(&grid), params_(std::move(params)), predefined_(std::move(predefined_posture)) {
    if (!(params_.rho_sample >= 0.0 && params_.rho_sample <= 1.0))
        throw std::invalid_argument("rho_sample must lie in [0, 1]");
    if (predefined_.size() != params_.joint_bounds.size())
        throw std::invalid_argument("predefined posture does not match joint bounds");
    if (params_.rho_sample > 0.0 && grid_->cumulative.size() != grid_->size())
        throw std::invalid_argument("sampler grid has no finalized PMF");
}

Configuration HarmoniousSampler::draw_uniform(Rng& rng) const {
    Configuration q;
    q.base_x = rng.uniform(params_.base_bounds.min.x, params_.base_bounds.max.x);
    q.base_y = rng.uniform(params_.base_bounds.min.y, params_.base_bounds.max.y);
    q.base_theta = wrap_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
    q.joints.resize(params_.joint_bounds.size());
    for (std::size_t j = 0; j < q.joints.size(); ++j)
        q.joints[j] = rng.uniform(params_.joint_bounds[j].min, params_.joint_bounds[j].max);
    return q;
}

Configuration HarmoniousSampler::draw(Rng& rng) const {
    if (!(rng.uniform() < params_.rho_sample)) return draw_uniform(rng);
    const std::size_t cell = pick_cell(*grid_, rng.uniform());
    const BasePose lo = grid_->cell_min(cell);
    Configuration q;
    q.base_x = lo.x + grid_->dx * rng.uniform();
    q.base_y = lo.y + grid_->dy * rng.uniform();
    q.base_theta = wrap_angle(lo.theta + grid_->dtheta * rng.uniform());
    if (grid_->labels[cell] == Region::manipulation) {
        q.joints.resize(params_.joint_bounds.size());
        for (std::size_t j = 0; j < q.joints.size(); ++j)
            q.joints[j] = rng.uniform(params_.joint_bounds[j].min, params_.joint_bounds[j].max);
    } else {
        q.joints = predefined_;
    }
    return q;
}

}  // namespace harmony
