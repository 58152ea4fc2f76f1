#pragma once

// Planning budgets are charged against a work clock: a weighted count of
// the expensive operations a planner performs. The result depends only on
// what was computed, so budgets, traces and timeouts are reproducible
// across machines and parallelism levels. A wall clock is available too.

#include <chrono>
#include <cstdint>

namespace harmony {

struct WorkCounters {
    std::int64_t samples{0};
    std::int64_t collision_checks{0};
    std::int64_t distance_evaluations{0};
    std::int64_t relaxations{0};
    std::int64_t ik_iterations{0};
    std::int64_t edges_added{0};
    std::int64_t grid_cells{0};

    WorkCounters& operator+=(const WorkCounters& o) noexcept {
        samples += o.samples;
        collision_checks += o.collision_checks;
        distance_evaluations += o.distance_evaluations;
        relaxations += o.relaxations;
        ik_iterations += o.ik_iterations;
        edges_added += o.edges_added;
        grid_cells += o.grid_cells;
        return *this;
    }
};

/// Nominal seconds per operation: five times the per-operation cost measured
/// on the reference desk machine, so a 30 s budget runs in about 6 s.
struct WorkCosts {
    double sample{1.3e-5};
    double collision_check{2.9e-5};
    double distance_evaluation{6.4e-8};
    double relaxation{2.9e-8};
    double ik_iteration{1.1e-6};
    double edge_added{3.5e-6};
    double grid_cell{1.0e-6};

    [[nodiscard]] double seconds(const WorkCounters& c) const noexcept {
        return sample * static_cast<double>(c.samples) + collision_check * static_cast<double>(c.collision_checks) +
               distance_evaluation * static_cast<double>(c.distance_evaluations) +
               relaxation * static_cast<double>(c.relaxations) + ik_iteration * static_cast<double>(c.ik_iterations) +
               edge_added * static_cast<double>(c.edges_added) + grid_cell * static_cast<double>(c.grid_cells);
    }
};

enum class ClockMode { work, wall };

class PlannerClock {
public:
    PlannerClock(ClockMode mode, WorkCosts costs)
        : mode_(mode), costs_(costs), started_(std::chrono::steady_clock::now()) {}

    /// Seconds elapsed given the work done so far.
    [[nodiscard]] double elapsed(const WorkCounters& work) const noexcept {
        if (mode_ == ClockMode::work) return costs_.seconds(work);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    }
    [[nodiscard]] ClockMode mode() const noexcept { return mode_; }

private:
    ClockMode mode_;
    WorkCosts costs_;
    std::chrono::steady_clock::time_point started_;
};

}  // namespace harmony
