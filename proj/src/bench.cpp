#include "harmony/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "harmony/scene.hpp"

namespace harmony {

namespace {

constexpr std::string_view kHeader =
    "scene,planner,seed,status,initial_time_s,final_cost,samples,collision_checks,goals_injected,trace,"
    "edges_validated,base_time_s,arm_time_s,failed_phase";

bool same_double(double a, double b) noexcept { return a == b || (std::isnan(a) && std::isnan(b)); }

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_row(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::runtime_error("malformed number '" + std::string(text) + "'");
    return v;
}

template <typename Int>
Int parse_int(std::string_view text) {
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::runtime_error("malformed integer '" + std::string(text) + "'");
    return v;
}

PlanStatus parse_status(std::string_view text) {
    if (text == "solved") return PlanStatus::solved;
    if (text == "timeout") return PlanStatus::timeout;
    if (text == "unreachable") return PlanStatus::unreachable;
    throw std::runtime_error("unknown status '" + std::string(text) + "'");
}

std::string_view phase_name(FailedPhase p) noexcept {
    switch (p) {
        case FailedPhase::base: return "base";
        case FailedPhase::arm: return "arm";
        case FailedPhase::none: break;
    }
    return "none";
}

FailedPhase parse_phase(std::string_view text) {
    if (text == "none") return FailedPhase::none;
    if (text == "base") return FailedPhase::base;
    if (text == "arm") return FailedPhase::arm;
    throw std::runtime_error("unknown failed phase '" + std::string(text) + "'");
}

auto record_key(const TrialRecord& r) { return std::make_tuple(std::string_view(r.scene), to_string(r.planner), r.seed); }

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

PlanResult run_planner(const Scene& scene, PlannerKind kind, const PlannerParams& params,
                       const PlannerContext& context) {
    switch (kind) {
        case PlannerKind::harmonious_single: return plan_harmonious(scene, params, false, context);
        case PlannerKind::harmonious_multi: return plan_harmonious(scene, params, true, context);
        case PlannerKind::coupled: return plan_coupled(scene, params, context);
        case PlannerKind::decoupled: return plan_decoupled(scene, params, context);
    }
    throw std::logic_error("unknown planner kind");
}

}  // namespace

std::string_view to_string(PlannerKind kind) noexcept {
    switch (kind) {
        case PlannerKind::harmonious_single: return "harmonious_single";
        case PlannerKind::harmonious_multi: return "harmonious_multi";
        case PlannerKind::coupled: return "coupled";
        case PlannerKind::decoupled: return "decoupled";
    }
    return "unknown";
}

std::optional<PlannerKind> parse_planner_kind(std::string_view text) noexcept {
    for (PlannerKind k : kAllPlanners)
        if (to_string(k) == text) return k;
    return std::nullopt;
}

bool operator==(const TrialRecord& a, const TrialRecord& b) {
    return a.scene == b.scene && a.planner == b.planner && a.seed == b.seed && a.status == b.status &&
           same_double(a.initial_time, b.initial_time) && same_double(a.final_cost, b.final_cost) &&
           a.samples == b.samples && a.collision_checks == b.collision_checks &&
           a.goals_injected == b.goals_injected && a.trace == b.trace && a.edges_validated == b.edges_validated &&
           same_double(a.base_time, b.base_time) && same_double(a.arm_time, b.arm_time) &&
           a.failed_phase == b.failed_phase;
}

bool operator==(const AggregateRow& a, const AggregateRow& b) {
    return a.scene == b.scene && a.planner == b.planner && a.trials == b.trials && a.solved == b.solved &&
           a.timeouts == b.timeouts && a.unreachable == b.unreachable &&
           same_double(a.mean_initial_time, b.mean_initial_time) &&
           same_double(a.mean_final_cost, b.mean_final_cost) && same_double(a.mean_base_time, b.mean_base_time) &&
           same_double(a.mean_arm_time, b.mean_arm_time);
}

TrialRecord make_record(const Scene& scene, const TrialSpec& spec, const PlanResult& result) {
    TrialRecord r;
    r.scene = scene.name();
    r.planner = spec.planner;
    r.seed = spec.seed;
    r.status = result.status;
    r.initial_time = result.initial_time;
    r.final_cost = result.final_cost;
    r.samples = result.counters.samples;
    r.collision_checks = result.counters.collision_checks;
    r.goals_injected = result.counters.goals_injected;
    r.trace = result.trace;
    r.edges_validated = result.counters.edges_validated;
    r.base_time = result.base_time;
    r.arm_time = result.arm_time;
    r.failed_phase = result.failed_phase;
    return r;
}

std::vector<TrialSpec> make_matrix(const std::vector<std::string>& scenes, const std::vector<PlannerKind>& planners,
                                   const std::vector<std::uint64_t>& seeds, double budget,
                                   const PlannerParams& params) {
    std::vector<TrialSpec> specs;
    for (const auto& scene : scenes)
        for (PlannerKind planner : planners)
            for (std::uint64_t seed : seeds) specs.push_back({scene, planner, seed, budget, params});
    return specs;
}

MatrixResult run_matrix(const std::vector<TrialSpec>& specs, unsigned parallelism, const TrialObserver& observer) {
    // Scenes and regions are loaded once and shared by every trial on them.
    struct SceneEntry {
        std::unique_ptr<Scene> scene;
        std::map<std::tuple<double, double, std::uint64_t>, std::shared_ptr<const ManipulationRegions>> regions;
    };
    std::map<std::string, SceneEntry> scenes;
    for (const TrialSpec& spec : specs) {
        if (!(spec.budget > 0.0)) throw std::invalid_argument("trial budget must be positive");
        auto& entry = scenes[spec.scene];
        if (!entry.scene) {
            try {
                entry.scene = std::make_unique<Scene>(resolve_scene(spec.scene));
            } catch (const std::exception& e) {
                throw std::runtime_error("cannot load scene '" + spec.scene + "': " + e.what());
            }
        }
        const auto key = std::make_tuple(spec.params.resolution_xy, spec.params.resolution_theta, spec.params.region_seed);
        if (!entry.regions.contains(key))
            entry.regions[key] =
                std::make_shared<const ManipulationRegions>(planner_regions(*entry.scene, spec.params, true));
    }

    std::vector<TrialRecord> records(specs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            try {
                const TrialSpec& spec = specs[i];
                const SceneEntry& entry = scenes.at(spec.scene);
                PlannerParams params = spec.params;
                params.seed = spec.seed;
                params.time_budget = spec.budget;
                PlannerContext context;
                context.regions = entry.regions.at(
                    std::make_tuple(params.resolution_xy, params.resolution_theta, params.region_seed));
                const PlanResult result = run_planner(*entry.scene, spec.planner, params, context);
                records[i] = make_record(*entry.scene, spec, result);
                if (observer) observer(spec, *entry.scene, result);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(specs.size());
            }
        }
    };
    unsigned threads = parallelism == 0 ? std::max(1u, std::thread::hardware_concurrency()) : parallelism;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(specs.size(), 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    MatrixResult out;
    out.records = std::move(records);
    sort_records(out.records);
    out.aggregates = aggregate(out.records);
    return out;
}

void sort_records(std::vector<TrialRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const TrialRecord& a, const TrialRecord& b) { return record_key(a) < record_key(b); });
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
    std::map<std::pair<std::string, std::string_view>, std::vector<const TrialRecord*>> groups;
    for (const TrialRecord& r : records) groups[{r.scene, to_string(r.planner)}].push_back(&r);
    std::vector<AggregateRow> rows;
    for (const auto& [key, members] : groups) {
        AggregateRow row;
        row.scene = key.first;
        row.planner = members.front()->planner;
        std::vector<double> init, cost, base, arm;
        for (const TrialRecord* r : members) {
            ++row.trials;
            switch (r->status) {
                case PlanStatus::solved:
                    ++row.solved;
                    init.push_back(r->initial_time);
                    cost.push_back(r->final_cost);
                    if (!std::isnan(r->base_time)) base.push_back(r->base_time);
                    if (!std::isnan(r->arm_time)) arm.push_back(r->arm_time);
                    break;
                case PlanStatus::timeout: ++row.timeouts; break;
                case PlanStatus::unreachable: ++row.unreachable; break;
            }
        }
        row.mean_initial_time = mean_of(init);
        row.mean_final_cost = mean_of(cost);
        row.mean_base_time = mean_of(base);
        row.mean_arm_time = mean_of(arm);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

void write_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
    out << kHeader << '\n';
    for (const TrialRecord& r : records) {
        std::string trace;
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            if (i) trace += ';';
            trace += format_double(r.trace[i].time) + ':' + format_double(r.trace[i].cost);
        }
        out << quote(r.scene) << ',' << to_string(r.planner) << ',' << r.seed << ',' << to_string(r.status) << ','
            << format_double(r.initial_time) << ',' << format_double(r.final_cost) << ',' << r.samples << ','
            << r.collision_checks << ',' << r.goals_injected << ',' << trace << ',' << r.edges_validated << ','
            << format_double(r.base_time) << ',' << format_double(r.arm_time) << ',' << phase_name(r.failed_phase)
            << '\n';
    }
}

std::string to_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream out;
    write_csv(records, out);
    return out.str();
}

void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(records, out);
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<TrialRecord> parse_csv(std::string_view text) {
    std::vector<TrialRecord> records;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (header) {
            if (line != kHeader) throw std::runtime_error("unexpected CSV header");
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_row(line);
        if (f.size() != 14) throw std::runtime_error("expected 14 CSV fields, got " + std::to_string(f.size()));
        TrialRecord r;
        r.scene = f[0];
        const auto kind = parse_planner_kind(f[1]);
        if (!kind) throw std::runtime_error("unknown planner '" + f[1] + "'");
        r.planner = *kind;
        r.seed = parse_int<std::uint64_t>(f[2]);
        r.status = parse_status(f[3]);
        r.initial_time = parse_double(f[4]);
        r.final_cost = parse_double(f[5]);
        r.samples = parse_int<std::int64_t>(f[6]);
        r.collision_checks = parse_int<std::int64_t>(f[7]);
        r.goals_injected = parse_int<std::int64_t>(f[8]);
        std::string_view trace = f[9];
        while (!trace.empty()) {
            const std::size_t semi = std::min(trace.find(';'), trace.size());
            const std::string_view pair = trace.substr(0, semi);
            const std::size_t colon = pair.find(':');
            if (colon == std::string_view::npos) throw std::runtime_error("malformed trace pair");
            r.trace.push_back({parse_double(pair.substr(0, colon)), parse_double(pair.substr(colon + 1))});
            trace.remove_prefix(std::min(semi + 1, trace.size()));
        }
        r.edges_validated = parse_int<std::int64_t>(f[10]);
        r.base_time = parse_double(f[11]);
        r.arm_time = parse_double(f[12]);
        r.failed_phase = parse_phase(f[13]);
        records.push_back(std::move(r));
    }
    if (header) throw std::runtime_error("missing CSV header");
    return records;
}

std::string aggregates_to_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    out << "scene,planner,trials,solved,timeouts,unreachable,mean_initial_time_s,mean_final_cost,mean_base_time_s,"
           "mean_arm_time_s\n";
    for (const AggregateRow& r : rows) {
        out << quote(r.scene) << ',' << to_string(r.planner) << ',' << r.trials << ',' << r.solved << ','
            << r.timeouts << ',' << r.unreachable << ',' << format_double(r.mean_initial_time) << ','
            << format_double(r.mean_final_cost) << ',' << format_double(r.mean_base_time) << ','
            << format_double(r.mean_arm_time) << '\n';
    }
    return out.str();
}

double cost_at(const std::vector<TracePoint>& trace, double t) noexcept {
    double best = std::numeric_limits<double>::infinity();
    for (const TracePoint& p : trace) {
        if (p.time > t) break;
        best = p.cost;
    }
    return best;
}

std::vector<CostCurve> cost_curves(const std::vector<TrialRecord>& records, const std::vector<double>& times) {
    std::map<std::pair<std::string, std::string_view>, std::vector<const TrialRecord*>> groups;
    for (const TrialRecord& r : records) groups[{r.scene, to_string(r.planner)}].push_back(&r);
    std::vector<CostCurve> curves;
    for (const auto& [key, members] : groups) {
        CostCurve curve;
        curve.scene = key.first;
        curve.planner = members.front()->planner;
        curve.times = times;
        for (double t : times) {
            std::vector<double> costs;
            for (const TrialRecord* r : members) costs.push_back(cost_at(r->trace, t));
            std::sort(costs.begin(), costs.end());
            const std::size_t n = costs.size();
            curve.median_costs.push_back(n % 2 ? costs[n / 2] : 0.5 * (costs[n / 2 - 1] + costs[n / 2]));
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::string curves_to_csv(const std::vector<CostCurve>& curves) {
    std::ostringstream out;
    out << "scene,planner,time_s,median_cost\n";
    for (const CostCurve& c : curves)
        for (std::size_t i = 0; i < c.times.size(); ++i)
            out << quote(c.scene) << ',' << to_string(c.planner) << ',' << format_double(c.times[i]) << ','
                << format_double(c.median_costs[i]) << '\n';
    return out.str();
}

}  // namespace harmony
