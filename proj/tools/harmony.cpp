// Command-line front end: plan, bench and regions subcommands.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "harmony/bench.hpp"
#include "harmony/planner.hpp"
#include "harmony/scene.hpp"
#include "harmony/svg.hpp"

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitError = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitUnreachable = 3;

std::optional<std::uint64_t> env_seed() {
    const char* text = std::getenv("HARMONY_SEED");
    if (!text || !*text) return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != std::string(text).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("HARMONY_SEED is not an unsigned integer: ") + text);
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

// "1..6", "2,5" or names/paths separated by commas.
std::vector<std::string> parse_problems(const std::string& text) {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (lo > hi) throw std::invalid_argument("empty problem range " + text);
        std::vector<std::string> out;
        for (int i = lo; i <= hi; ++i) out.push_back(std::to_string(i));
        return out;
    }
    return split(text, ',');
}

std::vector<harmony::PlannerKind> parse_planners(const std::string& text) {
    if (text == "all") return {std::begin(harmony::kAllPlanners), std::end(harmony::kAllPlanners)};
    std::vector<harmony::PlannerKind> out;
    for (const auto& name : split(text, ',')) {
        const auto kind = harmony::parse_planner_kind(name);
        if (!kind) throw std::invalid_argument("unknown planner " + name);
        out.push_back(*kind);
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path);
}

int exit_code(harmony::PlanStatus status) {
    switch (status) {
        case harmony::PlanStatus::solved: return kExitSolved;
        case harmony::PlanStatus::timeout: return kExitTimeout;
        case harmony::PlanStatus::unreachable: return kExitUnreachable;
    }
    return kExitError;
}

struct PlanOptions {
    std::string scene;
    std::string planner{"harmonious"};
    double budget{30.0};
    std::uint64_t seed{0};
    bool multi_goal{false};
    bool wall_clock{false};
    std::string svg;
    std::string csv;
};

int run_plan(const PlanOptions& o) {
    harmony::PlannerKind kind{};
    if (o.planner == "harmonious") {
        kind = o.multi_goal ? harmony::PlannerKind::harmonious_multi : harmony::PlannerKind::harmonious_single;
    } else if (const auto parsed = harmony::parse_planner_kind(o.planner)) {
        kind = *parsed;
        if (o.multi_goal && kind == harmony::PlannerKind::harmonious_single) kind = harmony::PlannerKind::harmonious_multi;
    } else {
        throw std::invalid_argument("unknown planner " + o.planner);
    }
    const harmony::Scene scene = harmony::resolve_scene(o.scene);
    harmony::PlannerParams params;
    params.time_budget = o.budget;
    params.seed = env_seed().value_or(o.seed);
    if (o.wall_clock) params.clock = harmony::ClockMode::wall;
    harmony::validate(params);

    harmony::PlannerContext context;
    context.log_samples = !o.svg.empty();
    if (!o.svg.empty())
        context.regions =
            std::make_shared<const harmony::ManipulationRegions>(harmony::planner_regions(scene, params, true));

    harmony::PlanResult result;
    switch (kind) {
        case harmony::PlannerKind::harmonious_single: result = plan_harmonious(scene, params, false, context); break;
        case harmony::PlannerKind::harmonious_multi: result = plan_harmonious(scene, params, true, context); break;
        case harmony::PlannerKind::coupled: result = plan_coupled(scene, params, context); break;
        case harmony::PlannerKind::decoupled: result = plan_decoupled(scene, params, context); break;
    }

    std::cout << "scene " << scene.name() << "\nplanner " << harmony::to_string(kind) << "\nseed " << params.seed
              << "\nstatus " << harmony::to_string(result.status) << "\ninitial_time_s "
              << harmony::format_double(result.initial_time) << "\nfinal_cost "
              << harmony::format_double(result.final_cost) << "\nsamples " << result.counters.samples
              << "\ncollision_checks " << result.counters.collision_checks << "\ngoals_injected "
              << result.counters.goals_injected << "\npath_waypoints " << result.path.size() << '\n';

    if (!o.csv.empty()) {
        harmony::TrialSpec spec{o.scene, kind, params.seed, o.budget, params};
        harmony::emit_csv({harmony::make_record(scene, spec, result)}, o.csv);
    }
    if (!o.svg.empty()) {
        harmony::SvgLayers layers;
        layers.path = &result.path;
        layers.regions = context.regions.get();
        layers.samples = &result.sample_log;
        harmony::write_svg(scene, layers, o.svg);
    }
    return exit_code(result.status);
}

struct BenchOptions {
    std::string problems{"1..6"};
    std::string planners{"all"};
    int seeds{20};
    std::uint64_t seed_base{1};
    double budget{30.0};
    std::string csv;
    std::string aggregate_csv;
    std::string curves_csv;
    unsigned jobs{0};
    bool wall_clock{false};
};

int run_bench(const BenchOptions& o) {
    if (o.seeds <= 0) throw std::invalid_argument("--seeds must be positive");
    const std::uint64_t base = env_seed().value_or(o.seed_base);
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < o.seeds; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
    harmony::PlannerParams params;
    if (o.wall_clock) params.clock = harmony::ClockMode::wall;
    params.time_budget = o.budget;
    harmony::validate(params);

    const auto specs = harmony::make_matrix(parse_problems(o.problems), parse_planners(o.planners), seeds, o.budget, params);
    const auto result = harmony::run_matrix(specs, o.jobs);
    harmony::emit_csv(result.records, o.csv);
    if (!o.aggregate_csv.empty()) write_text(o.aggregate_csv, harmony::aggregates_to_csv(result.aggregates));
    if (!o.curves_csv.empty()) {
        std::vector<double> times;
        for (int i = 1; i <= 30; ++i) times.push_back(o.budget * i / 30.0);
        write_text(o.curves_csv, harmony::curves_to_csv(harmony::cost_curves(result.records, times)));
    }
    std::cout << harmony::aggregates_to_csv(result.aggregates);
    return kExitSolved;
}

int run_regions(const std::string& scene_name, const std::string& svg) {
    const harmony::Scene scene = harmony::resolve_scene(scene_name);
    const harmony::PlannerParams params;
    const harmony::ManipulationRegions regions = harmony::planner_regions(scene, params, true);
    std::cout << "scene " << scene.name() << "\ncells " << regions.grid.size() << "\nmanipulation_cells "
              << regions.grid.count(harmony::Region::manipulation) << "\nreachability_cells "
              << regions.reachability.cells.size() << "\nnarrow_passage_cells " << regions.narrow_passages.size()
              << "\nridge_cells " << regions.gvg.ridge.size() << '\n';
    if (!svg.empty()) {
        harmony::SvgLayers layers;
        layers.regions = &regions;
        harmony::write_svg(scene, layers, svg);
    }
    return kExitSolved;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Harmonious sampling planner for a planar mobile manipulator"};
    app.require_subcommand(1);

    PlanOptions plan;
    auto* plan_cmd = app.add_subcommand("plan", "Plan on one scene");
    plan_cmd->add_option("--scene", plan.scene, "Problem number 1..6, builtin name or scene file")->required();
    plan_cmd->add_option("--planner", plan.planner,
                         "harmonious, harmonious_single, harmonious_multi, coupled or decoupled");
    plan_cmd->add_option("--budget", plan.budget, "Time budget in seconds")->check(CLI::PositiveNumber);
    plan_cmd->add_option("--seed", plan.seed, "Random seed (HARMONY_SEED overrides)");
    plan_cmd->add_flag("--multi-goal", plan.multi_goal, "Use the multi-goal harmonious planner");
    plan_cmd->add_flag("--wall-clock", plan.wall_clock, "Budget in wall-clock instead of work seconds");
    plan_cmd->add_option("--svg", plan.svg, "Write an SVG rendering");
    plan_cmd->add_option("--csv", plan.csv, "Write a one-row CSV record");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run a planner x problem x seed matrix");
    bench_cmd->add_option("--problems", bench.problems, "Range like 1..6 or a comma list");
    bench_cmd->add_option("--planners", bench.planners, "all or a comma list");
    bench_cmd->add_option("--seeds", bench.seeds, "Number of paired seeds");
    bench_cmd->add_option("--seed-base", bench.seed_base, "First seed (HARMONY_SEED overrides)");
    bench_cmd->add_option("--budget", bench.budget, "Time budget per trial in seconds")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--csv", bench.csv, "Per-trial CSV output")->required();
    bench_cmd->add_option("--aggregate", bench.aggregate_csv, "Per-(scene, planner) CSV output");
    bench_cmd->add_option("--curves", bench.curves_csv, "Median cost-vs-time CSV output");
    bench_cmd->add_option("--jobs", bench.jobs, "Worker threads (0 = all cores)");
    bench_cmd->add_flag("--wall-clock", bench.wall_clock, "Budget in wall-clock instead of work seconds");

    std::string regions_scene;
    std::string regions_svg;
    auto* regions_cmd = app.add_subcommand("regions", "Identify manipulation regions");
    regions_cmd->add_option("--scene", regions_scene, "Problem number 1..6, builtin name or scene file")->required();
    regions_cmd->add_option("--svg", regions_svg, "Write an SVG of the labeled regions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*plan_cmd) return run_plan(plan);
        if (*bench_cmd) return run_bench(bench);
        if (*regions_cmd) return run_regions(regions_scene, regions_svg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
