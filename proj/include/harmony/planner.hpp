#pragma once

// Anytime LazyPRM* planners: the harmonious planner (single- and multi-goal)
// and the coupled and decoupled baselines.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "harmony/clock.hpp"
#include "harmony/kinematics.hpp"
#include "harmony/nn_index.hpp"
#include "harmony/regions.hpp"
#include "harmony/rng.hpp"

namespace harmony {

class Scene;

struct PlannerParams {
    double rho_goal{0.01};
    double rho_sample{0.8};
    double time_budget{100.0};
    std::uint64_t seed{0};
    double step{0.05};
    int cadence{50};
    double position_tolerance{1e-3};
    double orientation_tolerance{1e-2};
    double split_base{0.15};
    double split_arm{0.85};
    double resolution_xy{kDefaultResolutionXY};
    double resolution_theta{kDefaultResolutionTheta};
    std::uint64_t region_seed{kDefaultRegionSeed};
    std::size_t tree_threshold{kDefaultTreeThreshold};
    ClockMode clock{ClockMode::work};
    WorkCosts costs{};
    /// Optional cap on loop iterations (0 = none), for tests.
    std::int64_t max_iterations{0};
};

/// Throws std::invalid_argument on out-of-range parameters.
void validate(const PlannerParams& params);

enum class PlanStatus { solved, timeout, unreachable };
[[nodiscard]] std::string_view to_string(PlanStatus status) noexcept;

enum class FailedPhase : std::uint8_t { none = 0, base = 1, arm = 2 };

struct TracePoint {
    double time{0.0};
    double cost{0.0};
    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct PlanCounters {
    std::int64_t samples{0};
    std::int64_t collision_checks{0};
    std::int64_t edges_validated{0};
    std::int64_t goals_injected{0};
    std::int64_t goal_attempts{0};
    std::int64_t vertices{0};
    std::int64_t edges{0};
    std::int64_t searches{0};
    WorkCounters work;
};

struct PlanResult {
    PlanStatus status{PlanStatus::timeout};
    std::vector<Configuration> path;
    double final_cost{std::numeric_limits<double>::infinity()};
    /// NaN when unsolved.
    double initial_time{std::numeric_limits<double>::quiet_NaN()};
    std::vector<TracePoint> trace;
    PlanCounters counters;
    /// Decoupled only: first-solution time of each phase (NaN otherwise).
    double base_time{std::numeric_limits<double>::quiet_NaN()};
    double arm_time{std::numeric_limits<double>::quiet_NaN()};
    FailedPhase failed_phase{FailedPhase::none};
    /// Goal configurations in the order they were added.
    std::vector<Configuration> goals;
    /// Collision-free sampler draws inserted into the roadmap, when logging
    /// was requested.
    std::vector<Configuration> sample_log;
};

struct GoalCounters {
    std::int64_t ik_iterations{0};
    std::int64_t collision_checks{0};
};

/// One goal-injection attempt: a uniformly chosen reachability cell, a base
/// pose drawn uniformly inside it, then IK to the goal pose. Returns nullopt
/// on an IK miss, a colliding result, or a duplicate of `existing`.
[[nodiscard]] std::optional<Configuration> add_goal_configuration(const Scene& scene, const BaseGrid& grid,
                                                                  const ReachabilityMap& reachability, Rng& rng,
                                                                  std::span<const Configuration> existing,
                                                                  double position_tolerance = 1e-3,
                                                                  double orientation_tolerance = 1e-2,
                                                                  GoalCounters* counters = nullptr);

/// Precomputed regions can be shared across trials on one scene; their work
/// is still charged to every trial's clock.
struct PlannerContext {
    std::shared_ptr<const ManipulationRegions> regions;
    bool log_samples{false};
};

[[nodiscard]] PlanResult plan_harmonious(const Scene& scene, const PlannerParams& params, bool multi_goal,
                                         const PlannerContext& context = {});
[[nodiscard]] PlanResult plan_coupled(const Scene& scene, const PlannerParams& params,
                                      const PlannerContext& context = {});
[[nodiscard]] PlanResult plan_decoupled(const Scene& scene, const PlannerParams& params,
                                        const PlannerContext& context = {});

/// Regions as the planners compute them for `params`.
[[nodiscard]] ManipulationRegions planner_regions(const Scene& scene, const PlannerParams& params, bool full);
/// Clock charge for building `regions`.
[[nodiscard]] WorkCounters region_work(const ManipulationRegions& regions, bool full);

struct PathCheck {
    bool collision_free{true};
    bool starts_at_start{true};
    bool reaches_goal{true};
    [[nodiscard]] bool ok() const noexcept { return collision_free && starts_at_start && reaches_goal; }
};

/// Pointwise re-check of every path segment at `step`, plus the endpoints.
[[nodiscard]] PathCheck check_path(const Scene& scene, std::span<const Configuration> path, double step,
                                   double position_tolerance, double orientation_tolerance);

[[nodiscard]] double path_cost(const RobotModel& model, std::span<const Configuration> path);

}  // namespace harmony
