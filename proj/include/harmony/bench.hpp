#pragma once

// Experiment harness: planner x scene x seed matrices, per-trial CSV records
// and per-(scene, planner) aggregates.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "harmony/planner.hpp"

namespace harmony {

enum class PlannerKind { harmonious_single, harmonious_multi, coupled, decoupled };

inline constexpr PlannerKind kAllPlanners[] = {PlannerKind::harmonious_single, PlannerKind::harmonious_multi,
                                               PlannerKind::coupled, PlannerKind::decoupled};

[[nodiscard]] std::string_view to_string(PlannerKind kind) noexcept;
[[nodiscard]] std::optional<PlannerKind> parse_planner_kind(std::string_view text) noexcept;

struct TrialSpec {
    /// "1".."6", a builtin name, or a scene file path.
    std::string scene;
    PlannerKind planner{PlannerKind::harmonious_multi};
    std::uint64_t seed{0};
    double budget{30.0};
    /// Everything except seed and budget, which come from the fields above.
    PlannerParams params{};
};

struct TrialRecord {
    std::string scene;
    PlannerKind planner{PlannerKind::harmonious_multi};
    std::uint64_t seed{0};
    PlanStatus status{PlanStatus::timeout};
    double initial_time{std::numeric_limits<double>::quiet_NaN()};
    double final_cost{std::numeric_limits<double>::infinity()};
    std::int64_t samples{0};
    std::int64_t collision_checks{0};
    std::int64_t goals_injected{0};
    std::vector<TracePoint> trace;
    std::int64_t edges_validated{0};
    double base_time{std::numeric_limits<double>::quiet_NaN()};
    double arm_time{std::numeric_limits<double>::quiet_NaN()};
    FailedPhase failed_phase{FailedPhase::none};

    friend bool operator==(const TrialRecord& a, const TrialRecord& b);
};

/// Statistics over the trials of one (scene, planner) pair. Means are over
/// solved trials only and NaN when none solved.
struct AggregateRow {
    std::string scene;
    PlannerKind planner{PlannerKind::harmonious_multi};
    std::int64_t trials{0};
    std::int64_t solved{0};
    std::int64_t timeouts{0};
    std::int64_t unreachable{0};
    double mean_initial_time{std::numeric_limits<double>::quiet_NaN()};
    double mean_final_cost{std::numeric_limits<double>::quiet_NaN()};
    double mean_base_time{std::numeric_limits<double>::quiet_NaN()};
    double mean_arm_time{std::numeric_limits<double>::quiet_NaN()};

    friend bool operator==(const AggregateRow& a, const AggregateRow& b);
};

struct MatrixResult {
    /// Ordered by (scene, planner name, seed).
    std::vector<TrialRecord> records;
    std::vector<AggregateRow> aggregates;
};

/// Called once per finished trial, from the worker thread that ran it.
using TrialObserver = std::function<void(const TrialSpec&, const Scene&, const PlanResult&)>;

[[nodiscard]] TrialRecord make_record(const Scene& scene, const TrialSpec& spec, const PlanResult& result);

/// Runs every trial; `parallelism` 0 uses all hardware threads. Results do
/// not depend on the parallelism level. Throws std::runtime_error naming the
/// scene when one fails to load.
[[nodiscard]] MatrixResult run_matrix(const std::vector<TrialSpec>& specs, unsigned parallelism,
                                      const TrialObserver& observer = {});

/// Paired-seed matrix: every planner sees the same seeds on every scene.
[[nodiscard]] std::vector<TrialSpec> make_matrix(const std::vector<std::string>& scenes,
                                                 const std::vector<PlannerKind>& planners,
                                                 const std::vector<std::uint64_t>& seeds, double budget,
                                                 const PlannerParams& params = {});

void sort_records(std::vector<TrialRecord>& records);
[[nodiscard]] std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

[[nodiscard]] std::string format_double(double value);

void write_csv(const std::vector<TrialRecord>& records, std::ostream& out);
[[nodiscard]] std::string to_csv(const std::vector<TrialRecord>& records);
/// Throws std::runtime_error when the file cannot be written.
void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path);
/// Throws std::runtime_error on malformed input.
[[nodiscard]] std::vector<TrialRecord> parse_csv(std::string_view text);

[[nodiscard]] std::string aggregates_to_csv(const std::vector<AggregateRow>& rows);

/// Best cost known at time t (infinity before the first solution).
[[nodiscard]] double cost_at(const std::vector<TracePoint>& trace, double t) noexcept;

/// Median of best-known cost across trials at each time (infinity where
/// fewer than half have a solution). One row per (scene, planner).
struct CostCurve {
    std::string scene;
    PlannerKind planner{PlannerKind::harmonious_multi};
    std::vector<double> times;
    std::vector<double> median_costs;
};
[[nodiscard]] std::vector<CostCurve> cost_curves(const std::vector<TrialRecord>& records,
                                                 const std::vector<double>& times);
[[nodiscard]] std::string curves_to_csv(const std::vector<CostCurve>& curves);

}  // namespace harmony
