#include "harmony/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "harmony/roadmap.hpp"
#include "harmony/sampling.hpp"
#include "harmony/scene.hpp"

namespace harmony {

void validate(const PlannerParams& p) {
    auto probability = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!probability(p.rho_goal)) throw std::invalid_argument("rho_goal must lie in [0, 1]");
    if (!probability(p.rho_sample)) throw std::invalid_argument("rho_sample must lie in [0, 1]");
    if (!(p.time_budget > 0.0)) throw std::invalid_argument("time budget must be positive");
    if (!(p.step > 0.0)) throw std::invalid_argument("interpolation step must be positive");
    if (p.cadence < 1) throw std::invalid_argument("search cadence must be at least 1");
    if (!(p.position_tolerance > 0.0) || !(p.orientation_tolerance > 0.0))
        throw std::invalid_argument("goal tolerances must be positive");
    if (!(p.split_base > 0.0) || !(p.split_arm > 0.0) || std::abs(p.split_base + p.split_arm - 1.0) > 1e-9)
        throw std::invalid_argument("decoupled split must be positive and sum to 1");
}

std::string_view to_string(PlanStatus status) noexcept {
    switch (status) {
        case PlanStatus::solved: return "solved";
        case PlanStatus::timeout: return "timeout";
        case PlanStatus::unreachable: return "unreachable";
    }
    return "unknown";
}

namespace {

bool base_disc_collides(const Scene& scene, const BasePose& base) {
    const Shape disc{Circle{{base.x, base.y}, scene.robot().base_radius}};
    if (clearance_inside(disc, scene.bounds()) <= 0.0) return true;
    for (const Shape& o : scene.obstacle_shapes())
        if (collides(disc, o)) return true;
    return false;
}

bool reaches_goal(const Scene& scene, const Configuration& q, double pos_tol, double ori_tol) {
    return within_goal_tolerance(end_effector_pose(scene.robot(), q), scene.goal_pose(), pos_tol, ori_tol);
}

// One LazyPRM* run. Samplers, tagging and goal injection are supplied by
// the planner variants.
struct EngineSetup {
    std::size_t dof{0};
    std::function<Configuration(Rng&)> sample;
    std::function<Region(const Configuration&)> tag;
    bool region_specific{false};
    std::function<std::optional<Configuration>(Rng&, std::span<const Configuration>)> inject;
    std::size_t goal_cap{1};
    double rho_goal{0.0};
    /// Absolute clock reading at which the run stops.
    double deadline{0.0};
    bool stop_at_first{false};
    bool start_is_goal{false};
};

struct EngineOutcome {
    std::vector<Configuration> path;
    double cost{std::numeric_limits<double>::infinity()};
    double first_time{std::numeric_limits<double>::quiet_NaN()};
    std::vector<TracePoint> trace;
    std::vector<Configuration> goals;
    bool solved() const noexcept { return !path.empty(); }
};

class Engine {
public:
    Engine(const Scene& scene, const PlannerParams& params, const PlannerClock& clock, PlanCounters& counters,
           Rng& rng, std::vector<Configuration>* sample_log)
        : scene_(scene),
          params_(params),
          clock_(clock),
          counters_(counters),
          rng_(rng),
          sample_log_(sample_log),
          roadmap_(scene.robot().weights),
          index_(scene.robot().weights, params.tree_threshold) {}

    EngineOutcome run(const Configuration& start, const EngineSetup& setup) {
        setup_ = &setup;
        insert(start, setup.start_is_goal);
        if (setup.start_is_goal) {
            outcome_.goals.push_back(start);
            search();
        }

        std::int64_t iterations = 0;
        std::int64_t insertions = 0;
        while (now() < setup.deadline) {
            if (setup.stop_at_first && outcome_.solved()) break;
            if (params_.max_iterations > 0 && iterations >= params_.max_iterations) break;
            ++iterations;
            const bool want_goal = outcome_.goals.empty() || rng_.uniform() < setup.rho_goal;
            if (want_goal && outcome_.goals.size() < setup.goal_cap) {
                ++counters_.goal_attempts;
                auto goal = setup.inject(rng_, outcome_.goals);
                if (!goal) continue;
                ++counters_.goals_injected;
                outcome_.goals.push_back(*goal);
                insert(*goal, true);
                search();
                continue;
            }
            Configuration q = setup.sample(rng_);
            ++counters_.work.samples;
            ++counters_.work.collision_checks;
            if (robot_in_collision(scene_.robot(), q, scene_)) continue;
            if (sample_log_) sample_log_->push_back(q);
            insert(std::move(q), false);
            if (++insertions % params_.cadence == 0) search();
        }
        search();
        counters_.vertices += static_cast<std::int64_t>(roadmap_.vertex_count());
        counters_.edges += static_cast<std::int64_t>(roadmap_.edge_count());
        return std::move(outcome_);
    }

private:
    double now() const noexcept { return clock_.elapsed(counters_.work); }

    void insert(Configuration q, bool goal) {
        const Region tag = setup_->tag ? setup_->tag(q) : Region::base;
        const std::int64_t heuristic_before = roadmap_.distance_evaluations();
        const VertexId id = roadmap_.add_vertex(std::move(q), tag, goal);
        counters_.work.distance_evaluations += roadmap_.distance_evaluations() - heuristic_before;
        const auto& coords = roadmap_.vertex(id).coords;
        if (id > 0) {
            const std::size_t k = k_value(roadmap_.vertex_count() - 1, setup_->dof);
            const std::int64_t before = index_.distance_evaluations();
            const std::vector<VertexId> nbrs = setup_->region_specific
                                                   ? region_specific_knn(index_, coords, tag, k)
                                                   : region_specific_knn(index_, coords, Region::base, k);
            counters_.work.distance_evaluations += index_.distance_evaluations() - before;
            for (VertexId n : nbrs) roadmap_.add_edge(n, id);
            counters_.work.edges_added += static_cast<std::int64_t>(nbrs.size());
        }
        index_.insert(id, coords, tag);
    }

    void search() {
        MotionCounters motion;
        SearchCounters search;
        auto path = lazy_shortest_path(
            roadmap_,
            [&](const Roadmap& g, EdgeId e) {
                const RoadmapEdge& edge = g.edge(e);
                return motion_valid(scene_.robot(), scene_, g.vertex(edge.u).q, g.vertex(edge.v).q, params_.step,
                                    &motion);
            },
            &search,
            [&] {
                WorkCounters pending = counters_.work;
                pending.collision_checks += motion.collision_checks;
                pending.relaxations += search.relaxations;
                return clock_.elapsed(pending) >= setup_->deadline;
            });
        counters_.work.collision_checks += motion.collision_checks;
        counters_.edges_validated += motion.edges_validated;
        counters_.work.relaxations += search.relaxations;
        counters_.searches += search.searches;
        if (!path || !(path->cost < outcome_.cost)) return;
        const double t = now();
        if (t > setup_->deadline) return;
        if (!outcome_.solved()) outcome_.first_time = t;
        outcome_.cost = path->cost;
        outcome_.path.clear();
        for (VertexId v : path->vertices) outcome_.path.push_back(roadmap_.vertex(v).q);
        outcome_.trace.push_back({t, path->cost});
    }

    const Scene& scene_;
    const PlannerParams& params_;
    const PlannerClock& clock_;
    PlanCounters& counters_;
    Rng& rng_;
    std::vector<Configuration>* sample_log_;
    Roadmap roadmap_;
    NnIndex index_;
    const EngineSetup* setup_{nullptr};
    EngineOutcome outcome_;
};

std::shared_ptr<const ManipulationRegions> regions_for(const Scene& scene, const PlannerParams& params,
                                                       const PlannerContext& context, bool full) {
    if (context.regions) return context.regions;
    return std::make_shared<const ManipulationRegions>(planner_regions(scene, params, full));
}

void finish(PlanResult& result, const PlannerParams& params) {
    result.counters.samples = result.counters.work.samples;
    result.counters.collision_checks = result.counters.work.collision_checks;
    (void)params;
}

std::function<std::optional<Configuration>(Rng&, std::span<const Configuration>)> goal_injector(
    const Scene& scene, const ManipulationRegions& regions, const PlannerParams& params, WorkCounters& work) {
    return [&scene, &regions, &params, &work](Rng& rng, std::span<const Configuration> existing) {
        GoalCounters gc;
        auto q = add_goal_configuration(scene, regions.grid, regions.reachability, rng, existing,
                                        params.position_tolerance, params.orientation_tolerance, &gc);
        work.ik_iterations += gc.ik_iterations;
        work.collision_checks += gc.collision_checks;
        return q;
    };
}

}  // namespace

ManipulationRegions planner_regions(const Scene& scene, const PlannerParams& params, bool full) {
    BaseGrid grid(scene.bounds(), params.resolution_xy, params.resolution_theta);
    return full ? identify_manipulation_regions(scene, std::move(grid), params.region_seed)
                : identify_reachability_only(scene, std::move(grid), params.region_seed);
}

WorkCounters region_work(const ManipulationRegions& regions, bool full) {
    WorkCounters w;
    w.ik_iterations = regions.reachability.ik_iterations;
    w.collision_checks = regions.reachability.collision_checks;
    w.grid_cells = static_cast<std::int64_t>(regions.grid.size());
    if (full) {
        const auto gvg_cells = static_cast<std::int64_t>(regions.gvg.nx) * regions.gvg.ny;
        w.grid_cells += gvg_cells + static_cast<std::int64_t>(regions.gvg.ridge.size()) * regions.grid.ntheta;
    }
    return w;
}

std::optional<Configuration> add_goal_configuration(const Scene& scene, const BaseGrid& grid,
                                                    const ReachabilityMap& reachability, Rng& rng,
                                                    std::span<const Configuration> existing,
                                                    double position_tolerance, double orientation_tolerance,
                                                    GoalCounters* counters) {
    if (reachability.cells.empty()) return std::nullopt;
    GoalCounters local;
    GoalCounters& c = counters ? *counters : local;
    const std::size_t cell = reachability.cells[rng.below(reachability.cells.size())];
    const BasePose lo = grid.cell_min(cell);
    const BasePose base{lo.x + grid.dx * rng.uniform(), lo.y + grid.dy * rng.uniform(),
                        wrap_angle(lo.theta + grid.dtheta * rng.uniform())};
    const std::uint64_t ik_seed = rng();
    ++c.collision_checks;
    if (base_disc_collides(scene, base)) return std::nullopt;
    const RobotModel& robot = scene.robot();
    auto accept = [&](std::span<const double> joints) {
        ++c.collision_checks;
        return !robot_in_collision(robot, make_configuration(base, joints), scene);
    };
    auto joints = inverse_kinematics(robot, base, scene.goal_pose(), ik_seed, IkOptions{}, accept, &c.ik_iterations);
    if (!joints) return std::nullopt;
    Configuration q = make_configuration(base, *joints);
    if (!reaches_goal(scene, q, position_tolerance, orientation_tolerance)) return std::nullopt;
    for (const Configuration& g : existing)
        if (weighted_distance(robot, g, q) <= 1e-6) return std::nullopt;
    return q;
}

PlanResult plan_harmonious(const Scene& scene, const PlannerParams& params, bool multi_goal,
                           const PlannerContext& context) {
    validate(params);
    PlanResult result;
    const auto regions = regions_for(scene, params, context, true);
    result.counters.work += region_work(*regions, true);
    if (regions->reachability.cells.empty() &&
        !reaches_goal(scene, scene.start(), params.position_tolerance, params.orientation_tolerance)) {
        result.status = PlanStatus::unreachable;
        finish(result, params);
        return result;
    }

    const RobotModel& robot = scene.robot();
    BaseGrid grid = regions->grid;
    finalize_pmf(grid, robot.weights, robot.joint_limits);
    const HarmoniousSampler sampler(grid, SamplerParams{params.rho_sample, robot.joint_limits, scene.bounds(), params.seed},
                                    robot.predefined_posture);

    const PlannerClock clock(params.clock, params.costs);
    Rng rng(params.seed);
    Engine engine(scene, params, clock, result.counters, rng, context.log_samples ? &result.sample_log : nullptr);
    EngineSetup setup;
    setup.dof = robot.dim();
    setup.sample = [&sampler](Rng& r) { return sampler.draw(r); };
    setup.tag = [&grid](const Configuration& q) { return grid.label_of(q); };
    setup.region_specific = true;
    setup.inject = goal_injector(scene, *regions, params, result.counters.work);
    setup.goal_cap = multi_goal ? std::numeric_limits<std::size_t>::max() : 1;
    setup.rho_goal = params.rho_goal;
    setup.deadline = params.time_budget;
    setup.start_is_goal = reaches_goal(scene, scene.start(), params.position_tolerance, params.orientation_tolerance);
    EngineOutcome out = engine.run(scene.start(), setup);

    result.goals = std::move(out.goals);
    result.trace = std::move(out.trace);
    if (out.solved()) {
        result.status = PlanStatus::solved;
        result.path = std::move(out.path);
        result.final_cost = out.cost;
        result.initial_time = out.first_time;
    } else {
        result.status = (regions->reachability.cells.empty() && result.goals.empty()) ? PlanStatus::unreachable
                                                                                      : PlanStatus::timeout;
    }
    finish(result, params);
    return result;
}

PlanResult plan_coupled(const Scene& scene, const PlannerParams& params, const PlannerContext& context) {
    validate(params);
    PlanResult result;
    const auto regions = regions_for(scene, params, context, false);
    result.counters.work += region_work(*regions, false);
    if (regions->reachability.cells.empty() &&
        !reaches_goal(scene, scene.start(), params.position_tolerance, params.orientation_tolerance)) {
        result.status = PlanStatus::unreachable;
        finish(result, params);
        return result;
    }

    const RobotModel& robot = scene.robot();
    const HarmoniousSampler sampler(regions->grid, SamplerParams{0.0, robot.joint_limits, scene.bounds(), params.seed},
                                    robot.predefined_posture);
    const PlannerClock clock(params.clock, params.costs);
    Rng rng(params.seed);
    Engine engine(scene, params, clock, result.counters, rng, context.log_samples ? &result.sample_log : nullptr);
    EngineSetup setup;
    setup.dof = robot.dim();
    setup.sample = [&sampler](Rng& r) { return sampler.draw_uniform(r); };
    setup.inject = goal_injector(scene, *regions, params, result.counters.work);
    setup.goal_cap = 1;
    setup.deadline = params.time_budget;
    setup.start_is_goal = reaches_goal(scene, scene.start(), params.position_tolerance, params.orientation_tolerance);
    EngineOutcome out = engine.run(scene.start(), setup);

    result.goals = std::move(out.goals);
    result.trace = std::move(out.trace);
    if (out.solved()) {
        result.status = PlanStatus::solved;
        result.path = std::move(out.path);
        result.final_cost = out.cost;
        result.initial_time = out.first_time;
    } else {
        result.status = (regions->reachability.cells.empty() && result.goals.empty()) ? PlanStatus::unreachable
                                                                                      : PlanStatus::timeout;
    }
    finish(result, params);
    return result;
}

PlanResult plan_decoupled(const Scene& scene, const PlannerParams& params, const PlannerContext& context) {
    validate(params);
    PlanResult result;
    const auto regions = regions_for(scene, params, context, false);
    result.counters.work += region_work(*regions, false);
    if (regions->reachability.cells.empty() &&
        !reaches_goal(scene, scene.start(), params.position_tolerance, params.orientation_tolerance)) {
        result.status = PlanStatus::unreachable;
        finish(result, params);
        return result;
    }

    const RobotModel& robot = scene.robot();
    const std::vector<double>& q_pre = robot.predefined_posture;
    const PlannerClock clock(params.clock, params.costs);
    const double base_deadline = params.split_base * params.time_budget;
    const double arm_deadline = params.time_budget;
    Rng rng(params.seed);
    auto* log = context.log_samples ? &result.sample_log : nullptr;
    const Configuration& start = scene.start();
    const BasePose start_base{start.base_x, start.base_y, start.base_theta};

    auto arm_sampler = [&robot](const BasePose& base) {
        return [&robot, base](Rng& r) {
            std::vector<double> joints(robot.arm_dof());
            for (std::size_t j = 0; j < joints.size(); ++j)
                joints[j] = r.uniform(robot.joint_limits[j].min, robot.joint_limits[j].max);
            return make_configuration(base, joints);
        };
    };
    auto fixed_goal = [](Configuration target) {
        return [target = std::move(target)](Rng&, std::span<const Configuration> existing)
                   -> std::optional<Configuration> {
            if (!existing.empty()) return std::nullopt;
            return target;
        };
    };
    auto fail = [&](FailedPhase phase) {
        result.status = PlanStatus::timeout;
        result.failed_phase = phase;
        finish(result, params);
        return result;
    };

    std::vector<Configuration> path;
    double cost = 0.0;
    Configuration base_start = start;

    // Bring the arm to the predefined posture before the base moves.
    if (start.joints != q_pre) {
        base_start = make_configuration(start_base, q_pre);
        Engine pre(scene, params, clock, result.counters, rng, log);
        EngineSetup setup;
        setup.dof = robot.arm_dof();
        setup.sample = arm_sampler(start_base);
        setup.inject = fixed_goal(base_start);
        setup.deadline = base_deadline;
        setup.stop_at_first = true;
        if (robot_in_collision(robot, base_start, scene)) return fail(FailedPhase::base);
        EngineOutcome out = pre.run(start, setup);
        if (!out.solved()) return fail(FailedPhase::base);
        path = std::move(out.path);
        cost = out.cost;
    }

    // Phase 1: base motion with the arm frozen.
    std::vector<double> arm_target;
    EngineOutcome base_out;
    {
        Engine engine(scene, params, clock, result.counters, rng, log);
        EngineSetup setup;
        setup.dof = kBaseDof;
        setup.sample = [&scene, &q_pre](Rng& r) {
            const Box& b = scene.bounds();
            const BasePose base{r.uniform(b.min.x, b.max.x), r.uniform(b.min.y, b.max.y),
                                r.uniform(-std::numbers::pi, std::numbers::pi)};
            return make_configuration(base, q_pre);
        };
        auto inject = goal_injector(scene, *regions, params, result.counters.work);
        setup.inject = [&, inject](Rng& r, std::span<const Configuration> existing) -> std::optional<Configuration> {
            auto goal = inject(r, {});
            if (!goal) return std::nullopt;
            Configuration parked = make_configuration({goal->base_x, goal->base_y, goal->base_theta}, q_pre);
            ++result.counters.work.collision_checks;
            if (robot_in_collision(robot, parked, scene)) return std::nullopt;
            for (const Configuration& g : existing)
                if (weighted_distance(robot, g, parked) <= 1e-6) return std::nullopt;
            arm_target = goal->joints;
            return parked;
        };
        setup.goal_cap = 1;
        setup.deadline = base_deadline;
        base_out = engine.run(base_start, setup);
    }
    if (!base_out.solved()) return fail(FailedPhase::base);
    result.base_time = base_out.first_time;
    const double base_cost = cost + base_out.cost;
    if (path.empty()) {
        path = base_out.path;
    } else {
        path.insert(path.end(), base_out.path.begin() + 1, base_out.path.end());
    }

    // Phase 2: arm motion at the parked base.
    const Configuration parked = base_out.path.back();
    const BasePose parked_base{parked.base_x, parked.base_y, parked.base_theta};
    const Configuration arm_goal = make_configuration(parked_base, arm_target);
    result.goals.push_back(arm_goal);
    const double arm_start_time = clock.elapsed(result.counters.work);
    Engine engine(scene, params, clock, result.counters, rng, log);
    EngineSetup setup;
    setup.dof = robot.arm_dof();
    setup.sample = arm_sampler(parked_base);
    setup.inject = fixed_goal(arm_goal);
    setup.deadline = std::max(arm_deadline, arm_start_time);
    setup.start_is_goal = parked == arm_goal;
    EngineOutcome arm_out = engine.run(parked, setup);
    if (!arm_out.solved()) return fail(FailedPhase::arm);

    result.arm_time = arm_out.first_time - arm_start_time;
    path.insert(path.end(), arm_out.path.begin() + 1, arm_out.path.end());
    result.path = std::move(path);
    result.final_cost = base_cost + arm_out.cost;
    result.initial_time = result.base_time + result.arm_time;
    for (const TracePoint& p : arm_out.trace) result.trace.push_back({p.time, base_cost + p.cost});
    result.status = PlanStatus::solved;
    finish(result, params);
    return result;
}

PathCheck check_path(const Scene& scene, std::span<const Configuration> path, double step,
                     double position_tolerance, double orientation_tolerance) {
    PathCheck check;
    if (path.empty()) return {false, false, false};
    const RobotModel& robot = scene.robot();
    check.starts_at_start = weighted_distance(robot, path.front(), scene.start()) <= 1e-9;
    check.reaches_goal = reaches_goal(scene, path.back(), position_tolerance, orientation_tolerance);
    if (path.size() == 1) check.collision_free = !robot_in_collision(robot, path.front(), scene);
    for (std::size_t i = 0; i + 1 < path.size() && check.collision_free; ++i)
        check.collision_free = motion_valid_pointwise(robot, scene, path[i], path[i + 1], step);
    return check;
}

double path_cost(const RobotModel& model, std::span<const Configuration> path) {
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) c += weighted_distance(model, path[i], path[i + 1]);
    return c;
}

}  // namespace harmony
