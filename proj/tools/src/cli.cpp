#include "capbp/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "capbp/csv.hpp"
#include "capbp/engine.hpp"
#include "capbp/scenario.hpp"

namespace capbp::cli {

namespace fs = std::filesystem;

namespace {

struct Failure {
    int code;
    std::string message;
};

fs::path default_out_dir() {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? fs::path(env) : fs::path("out");
}

fs::path resolve_scenario_path(const std::string& arg) {
    fs::path path(arg);
    if (!fs::exists(path) && path.extension() != ".json") {
        fs::path with_ext = path;
        with_ext += ".json";
        if (fs::exists(with_ext)) return with_ext;
    }
    return path;
}

struct LoadedScenario {
    fs::path path;
    Scenario scenario;
};

LoadedScenario load(const std::string& arg) {
    const fs::path path = resolve_scenario_path(arg);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kExitIo, "cannot read " + path.string()};
    std::ostringstream text;
    text << in.rdbuf();
    const auto parsed = parse_scenario(text.str());
    if (!parsed.ok()) {
        std::string message;
        for (const auto& d : parsed.errors) {
            if (!message.empty()) message += '\n';
            message += path.string() + ": " + format_diagnostic(d);
        }
        throw Failure{kExitUsage, message};
    }
    try {
        return {path, to_scenario(*parsed.document)};
    } catch (const ConfigError& e) {
        throw Failure{kExitUsage, path.string() + ": " + e.what()};
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Failure{kExitIo, "cannot write " + path.string()};
    file << content;
    file.close();
    if (!file) throw Failure{kExitIo, "error writing " + path.string()};
}

void apply_overrides(Scenario& s, const std::optional<std::uint64_t>& seed,
                     const std::optional<std::int64_t>& horizon) {
    if (seed) s.run.seed = *seed;
    if (horizon) s.run.horizon = *horizon;
}

void require_valid(const Scenario& s, const fs::path& path) {
    const auto diagnostics = validate_scenario(s);
    if (diagnostics.empty()) return;
    std::string message;
    for (const auto& d : diagnostics) {
        if (!message.empty()) message += '\n';
        message += path.string() + ": " + format_diagnostic(d);
    }
    throw Failure{kExitUsage, message};
}

std::string choose_controller(const Scenario& s, const std::optional<std::string>& requested) {
    const std::string name = requested.value_or(s.active_controller);
    if (!s.controllers.contains(name)) {
        std::string known;
        for (const auto& [id, config] : s.controllers) known += (known.empty() ? "" : ", ") + id;
        throw Failure{kExitUsage, "unknown controller '" + name + "' (scenario defines: " + known + ")"};
    }
    return name;
}

// "1,2,5" or "1-10" or a mix of both.
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) throw Failure{kExitUsage, "empty entry in seed list '" + text + "'"};
        try {
            const auto dash = item.find('-');
            std::size_t used = 0;
            if (dash == std::string::npos) {
                seeds.push_back(std::stoull(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } else {
                const std::string lo_text = item.substr(0, dash);
                const std::string hi_text = item.substr(dash + 1);
                const auto lo = std::stoull(lo_text, &used);
                if (used != lo_text.size()) throw std::invalid_argument(item);
                const auto hi = std::stoull(hi_text, &used);
                if (used != hi_text.size() || hi < lo) throw std::invalid_argument(item);
                for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
            }
        } catch (const std::logic_error&) {
            throw Failure{kExitUsage, "bad seed list entry '" + item + "'"};
        }
    }
    if (seeds.empty()) throw Failure{kExitUsage, "seed list is empty"};
    return seeds;
}

double mean_avg_time_spent(const SimulationTrace& trace) {
    if (trace.rows.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& row : trace.rows) sum += row.avg_time_spent_slots;
    return sum / static_cast<double>(trace.rows.size());
}

struct RunOptions {
    std::string scenario;
    std::optional<std::string> controller;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> horizon;
    std::optional<std::string> out;
};

int do_run(const RunOptions& o, std::ostream& out) {
    auto loaded = load(o.scenario);
    apply_overrides(loaded.scenario, o.seed, o.horizon);
    const std::string controller = choose_controller(loaded.scenario, o.controller);
    require_valid(loaded.scenario, loaded.path);

    const auto trace = run(loaded.scenario, controller);
    const fs::path target =
        o.out ? fs::path(*o.out)
              : default_out_dir() / (loaded.path.stem().string() + "_" + controller + ".csv");
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_file(target, csv.str());

    long long violations = 0;
    for (const auto& row : trace.rows) violations += row.wc_violations;
    out << "controller=" << controller << " slots=" << trace.rows.size()
        << " final_total_queue=" << format_number(trace.final_state.total_queue)
        << " mean_avg_time_spent_slots=" << format_number(mean_avg_time_spent(trace))
        << " wc_violations=" << violations << " trace=" << target.string() << '\n';
    return kExitOk;
}

struct SweepOptions {
    std::string scenario;
    std::vector<double> multipliers{0.25, 0.5, 0.75, 1.0};
    std::string seeds = "1-10";
    std::vector<std::string> controllers;
    std::optional<std::int64_t> horizon;
    int jobs = 1;
    std::optional<std::string> out;
};

int do_sweep(const SweepOptions& o, std::ostream& out) {
    auto loaded = load(o.scenario);
    apply_overrides(loaded.scenario, std::nullopt, o.horizon);
    require_valid(loaded.scenario, loaded.path);

    std::vector<std::string> controllers = o.controllers;
    if (controllers.empty()) {
        for (const auto& [name, config] : loaded.scenario.controllers) controllers.push_back(name);
    }
    std::set<std::string> seen;
    for (const auto& name : controllers) {
        if (!seen.insert(name).second) throw Failure{kExitUsage, "duplicate controller '" + name + "'"};
        choose_controller(loaded.scenario, name);
    }
    if (o.multipliers.empty()) throw Failure{kExitUsage, "no multipliers given"};
    for (const double m : o.multipliers) {
        if (!(m >= 0.0)) throw Failure{kExitUsage, "multipliers must be >= 0"};
    }
    if (o.jobs < 1) throw Failure{kExitUsage, "--jobs must be >= 1"};
    const auto seeds = parse_seed_list(o.seeds);

    std::vector<SweepCell> cells;
    try {
        cells = sweep(loaded.scenario, o.multipliers, seeds, controllers, o.jobs);
    } catch (const ConfigError& e) {
        throw Failure{kExitUsage, e.what()};
    }
    const fs::path target = o.out ? fs::path(*o.out) : default_out_dir() / (loaded.path.stem().string() + "_sweep.csv");
    std::ostringstream csv;
    write_sweep_csv(csv, cells);
    write_file(target, csv.str());
    out << "cells=" << cells.size() << " sweep=" << target.string() << '\n';
    return kExitOk;
}

int do_validate(const std::string& arg, std::ostream& out) {
    const auto loaded = load(arg);
    out << "ok " << loaded.path.string() << " fingerprint=" << fingerprint(loaded.scenario) << '\n';
    return kExitOk;
}

struct ExplainOptions {
    std::string scenario;
    std::string junction;
    std::int64_t slot = 0;
    std::optional<std::string> controller;
    std::optional<std::uint64_t> seed;
};

int do_explain(const ExplainOptions& o, std::ostream& out) {
    auto loaded = load(o.scenario);
    apply_overrides(loaded.scenario, o.seed, std::nullopt);
    const std::string controller = choose_controller(loaded.scenario, o.controller);
    require_valid(loaded.scenario, loaded.path);
    if (o.slot < 0) throw Failure{kExitUsage, "--slot must be >= 0"};

    Simulation sim(loaded.scenario, controller);
    const auto j = sim.network().find_junction(o.junction);
    if (!j) throw Failure{kExitUsage, "unknown junction '" + o.junction + "'"};
    while (sim.slot() < o.slot) sim.advance();

    const auto& net = sim.network();
    const auto& junction = net.junction(*j);
    const auto totals = sim.state().node_totals(net);
    const auto obs = observe(net, sim.state(), totals, *j);
    const auto& config = sim.controller();

    out << "junction " << junction.id << " slot " << o.slot << " controller " << controller << " ("
        << to_string(config.kind) << ", " << to_string(config.pressure.kind()) << " pressure)\n";
    if (config.kind == ControllerKind::fixed_cycle) {
        const auto decision = decide_all(sim.state(), net, std::span(&config, 1), o.slot);
        out << "decision " << decision[*j].phase_id << " (fixed cycle)\n";
        return kExitOk;
    }
    const auto ex = explain_junction(obs, config);
    for (std::size_t i = 0; i < junction.inputs.size(); ++i) {
        out << "input  " << net.node(junction.inputs[i]).id << " Q=" << format_number(obs.input_queue[i])
            << " C=" << format_number(obs.input_capacity[i])
            << " P=" << format_number(ex.weights.input_pressure[i]) << '\n';
    }
    for (std::size_t i = 0; i < junction.outputs.size(); ++i) {
        out << "output " << net.node(junction.outputs[i]).id << " Q=" << format_number(obs.output_queue[i])
            << " C=" << format_number(obs.output_capacity[i])
            << " P=" << format_number(ex.weights.output_pressure[i]) << '\n';
    }
    for (std::size_t m = 0; m < obs.movements.size(); ++m) {
        const auto& mv = obs.movements[m];
        out << "move   " << net.node(junction.inputs[mv.input]).id << "->" << net.node(junction.outputs[mv.output]).id
            << " d=" << (mv.occupied ? 1 : 0) << " W=" << format_number(ex.weights.weight[m]) << '\n';
    }
    for (std::size_t p = 0; p < obs.phase_ids.size(); ++p) {
        out << "phase  " << obs.phase_ids[p] << " objective=" << format_number(ex.objectives[p])
            << " can_move=" << (phase_can_move(obs, p) ? "yes" : "no") << '\n';
    }
    out << "ties  ";
    for (const auto t : ex.ties) out << ' ' << obs.phase_ids[t];
    out << "\ndecision " << ex.decision.phase_id << (ex.decision.tie_break_used ? " (tie broken toward a movable phase)" : "")
        << '\n';
    return kExitOk;
}

struct PressureOptions {
    std::string kind = "normalized";
    double m = 4.0;
    double c_infinity = 500.0;
    std::vector<int> capacities{50, 100};
    int samples = 201;
    std::optional<std::string> out;
};

int do_pressure_table(const PressureOptions& o, std::ostream& out) {
    const auto kind = parse_pressure_kind(o.kind);
    if (!kind) throw Failure{kExitUsage, "unknown pressure kind '" + o.kind + "'"};
    std::vector<PressureSample> rows;
    try {
        const auto f = *kind == PressureKind::normalized ? PressureFunction::normalized({o.m, o.c_infinity})
                       : *kind == PressureKind::relative ? PressureFunction::relative()
                                                         : PressureFunction::linear();
        rows = pressure_table(f, o.capacities, o.samples);
    } catch (const ConfigError& e) {
        throw Failure{kExitUsage, e.what()};
    }
    const fs::path target = o.out ? fs::path(*o.out) : default_out_dir() / "pressure_table.csv";
    std::ostringstream csv;
    write_pressure_csv(csv, rows);
    write_file(target, csv.str());
    out << "rows=" << rows.size() << " table=" << target.string() << '\n';
    return kExitOk;
}

int do_fixtures(const std::optional<std::string>& dir, std::ostream& out) {
    const fs::path target = dir ? fs::path(*dir) : fs::path("fixtures");
    for (const auto& fixture : canonical_fixtures()) {
        const fs::path path = target / (fixture.name + ".json");
        write_file(path, fixture.text);
        out << path.string() << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Signal-control simulator for capacity-aware back-pressure", "capbp"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write its trace CSV");
    run_cmd->add_option("scenario", run_opts.scenario, "Scenario file (.json may be omitted)")->required();
    run_cmd->add_option("--controller", run_opts.controller, "Controller name, e.g. fc, bp, bpc");
    run_cmd->add_option("--seed", run_opts.seed, "Override the scenario seed");
    run_cmd->add_option("--horizon", run_opts.horizon, "Override the number of slots");
    run_cmd->add_option("--out", run_opts.out, "Trace CSV path");

    SweepOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a multiplier x seed x controller grid");
    sweep_cmd->add_option("scenario", sweep_opts.scenario, "Scenario file")->required();
    sweep_cmd->add_option("--multipliers", sweep_opts.multipliers, "Demand multipliers")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--seeds", sweep_opts.seeds, "Seeds, e.g. 1-10 or 1,4,7")->capture_default_str();
    sweep_cmd->add_option("--controllers,--controller", sweep_opts.controllers,
                          "Controllers to compare (default: all in the scenario)")
        ->delimiter(',');
    sweep_cmd->add_option("--horizon", sweep_opts.horizon, "Override the number of slots");
    sweep_cmd->add_option("--jobs", sweep_opts.jobs, "Worker threads")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_opts.out, "Sweep CSV path");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    validate_cmd->add_option("scenario", validate_path, "Scenario file")->required();

    ExplainOptions explain_opts;
    auto* explain_cmd = app.add_subcommand("explain", "Show pressures, weights and the decision at one junction");
    explain_cmd->add_option("scenario", explain_opts.scenario, "Scenario file")->required();
    explain_cmd->add_option("--junction", explain_opts.junction, "Junction id")->required();
    explain_cmd->add_option("--slot", explain_opts.slot, "Slot to inspect")->capture_default_str();
    explain_cmd->add_option("--controller", explain_opts.controller, "Controller name");
    explain_cmd->add_option("--seed", explain_opts.seed, "Override the scenario seed");

    PressureOptions pressure_opts;
    auto* pressure_cmd = app.add_subcommand("pressure-table", "Sample pressure curves as CSV");
    pressure_cmd->add_option("--kind", pressure_opts.kind, "linear, relative or normalized")->capture_default_str();
    pressure_cmd->add_option("--m", pressure_opts.m, "Exponent m > 1")->capture_default_str();
    pressure_cmd->add_option("--c-inf", pressure_opts.c_infinity, "C_inf")->capture_default_str();
    pressure_cmd->add_option("--capacities", pressure_opts.capacities, "Capacities, one curve each")
        ->delimiter(',')
        ->capture_default_str();
    pressure_cmd->add_option("--samples", pressure_opts.samples, "Samples per curve")->capture_default_str();
    pressure_cmd->add_option("--out", pressure_opts.out, "CSV path");

    std::optional<std::string> fixtures_dir;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Write the canonical scenario files");
    fixtures_cmd->add_option("--out", fixtures_dir, "Directory (default: fixtures)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "capbp: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*run_cmd) return do_run(run_opts, out);
        if (*sweep_cmd) return do_sweep(sweep_opts, out);
        if (*validate_cmd) return do_validate(validate_path, out);
        if (*explain_cmd) return do_explain(explain_opts, out);
        if (*pressure_cmd) return do_pressure_table(pressure_opts, out);
        if (*fixtures_cmd) return do_fixtures(fixtures_dir, out);
    } catch (const Failure& f) {
        err << "capbp: " << f.message << '\n';
        return f.code;
    } catch (const ScenarioError& e) {
        err << "capbp: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "capbp: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "capbp: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}

} // namespace capbp::cli
