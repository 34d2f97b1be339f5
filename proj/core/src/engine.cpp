#include "capbp/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "capbp/scenario.hpp"

namespace capbp {

std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream out;
    if (d.line > 0) out << "line " << d.line << ", column " << d.column << ": ";
    if (!d.path.empty()) out << d.path << ": ";
    out << d.message;
    return out.str();
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::string message = "invalid scenario:";
    for (const auto& d : diagnostics) message += "\n  " + format_diagnostic(d);
    return message;
}

bool is_integral(double x) { return std::isfinite(x) && std::floor(x) == x; }

std::string number(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

void validate_controllers(const Scenario& s, const Network* net, std::vector<Diagnostic>& out) {
    if (!s.controllers.contains(s.active_controller)) {
        out.push_back({"/controllers/active",
                       "active controller '" + s.active_controller + "' is not defined"});
    }
    for (const auto& [name, config] : s.controllers) {
        const std::string base = "/controllers/" + name;
        if (!(config.tie_epsilon >= 0.0)) {
            out.push_back({base + "/tie_epsilon", "tie_epsilon must be >= 0"});
        }
        if (config.kind == ControllerKind::capacity_aware &&
            config.pressure.kind() != PressureKind::normalized) {
            out.push_back({base + "/pressure/kind", "capacity-aware control needs normalized pressure"});
        }
        if (config.kind != ControllerKind::fixed_cycle &&
            config.pressure.kind() == PressureKind::normalized) {
            const double c_inf = config.pressure.params().c_infinity;
            for (const auto& node : s.topology.nodes) {
                if (node.capacity > c_inf) {
                    out.push_back({base + "/pressure/C_inf",
                                   "node " + node.id + " capacity " + std::to_string(node.capacity) +
                                       " exceeds C_inf " + number(c_inf)});
                }
            }
        }
        if (config.kind != ControllerKind::fixed_cycle) continue;

        auto check_cycle = [&](const std::vector<CycleStep>& cycle, const std::string& path,
                               const Network::Junction* junction) {
            if (cycle.empty()) {
                out.push_back({path, "fixed-cycle program is empty"});
                return;
            }
            for (std::size_t i = 0; i < cycle.size(); ++i) {
                const auto& step = cycle[i];
                const std::string where = path + "/" + std::to_string(i);
                if (step.slots < 1) out.push_back({where + "/slots", "cycle step lasts < 1 slot"});
                if (junction && !junction->phase_index(step.phase)) {
                    out.push_back({where + "/phase",
                                   "junction " + junction->id + " has no phase " + step.phase});
                }
            }
        };
        for (const auto& [junction_id, cycle] : config.junction_cycles) {
            const std::string path = base + "/junction_cycles/" + junction_id;
            const Network::Junction* junction = nullptr;
            if (net) {
                const auto j = net->find_junction(junction_id);
                if (!j) {
                    out.push_back({path, "unknown junction " + junction_id});
                    continue;
                }
                junction = &net->junction(*j);
            }
            check_cycle(cycle, path, junction);
        }
        if (!net) continue;
        bool default_used = false;
        for (JunctionIndex j = 0; j < net->junction_count(); ++j) {
            if (config.junction_cycles.contains(net->junction(j).id)) continue;
            default_used = true;
            check_cycle(config.cycle, base + "/cycle", &net->junction(j));
        }
        if (!default_used && !config.cycle.empty()) {
            check_cycle(config.cycle, base + "/cycle", nullptr);
        }
    }
}

void validate_arrivals(const Scenario& s, const Network& net, std::vector<Diagnostic>& out) {
    const auto& a = s.arrivals;
    if (!(a.boundary_rate >= 0.0) || !std::isfinite(a.boundary_rate)) {
        out.push_back({"/arrivals/lambda_boundary", "arrival rate must be finite and >= 0"});
    }
    double max_rate = a.boundary_rate;
    for (const auto& [id, rate] : a.rates) {
        const std::string path = "/arrivals/lambda/" + id;
        if (!net.find_node(id)) out.push_back({path, "unknown node " + id});
        if (!(rate >= 0.0) || !std::isfinite(rate)) {
            out.push_back({path, "arrival rate must be finite and >= 0"});
        }
        max_rate = std::max(max_rate, rate);
    }
    double max_profile = a.profile.empty() ? 1.0 : 0.0;
    for (std::size_t i = 0; i < a.profile.size(); ++i) {
        if (!(a.profile[i] >= 0.0) || !std::isfinite(a.profile[i])) {
            out.push_back({"/arrivals/profile/" + std::to_string(i), "profile values must be >= 0"});
        }
        max_profile = std::max(max_profile, a.profile[i]);
    }
    if (a.batch < 1) out.push_back({"/arrivals/batch", "batch must be >= 1"});
    if (a.kind == ArrivalKind::bernoulli_batch && a.batch >= 1 &&
        max_rate * max_profile > a.batch + 1e-12) {
        out.push_back({"/arrivals/batch",
                       "bernoulli-batch needs lambda * profile <= batch at every node"});
    }
    if (a.kind == ArrivalKind::deterministic_fluid && s.run.mode == QueueMode::integer) {
        out.push_back({"/arrivals/kind", "deterministic-fluid arrivals need fluid mode"});
    }
}

void validate_routing(const Scenario& s, const Network& net, std::vector<Diagnostic>& out) {
    for (const auto& [from_id, row] : s.routing.ratios) {
        const std::string base = "/routing/r/" + from_id;
        const auto from = net.find_node(from_id);
        if (!from) {
            out.push_back({base, "unknown node " + from_id});
            continue;
        }
        double sum = 0.0;
        for (const auto& [to_id, ratio] : row) {
            const std::string path = base + "/" + to_id;
            const auto to = net.find_node(to_id);
            if (!to) {
                out.push_back({path, "unknown node " + to_id});
            } else if (!net.find_link(*from, *to)) {
                out.push_back({path, "no link " + from_id + "->" + to_id});
            }
            if (!(ratio >= 0.0 && ratio <= 1.0)) out.push_back({path, "ratio outside [0,1]"});
            sum += ratio;
        }
        if (sum > 1.0 + 1e-12) {
            out.push_back({base, "routing ratios at node " + from_id + " sum to " + number(sum) +
                                     " > 1"});
        }
    }
}

void validate_initial(const Scenario& s, const Network& net, std::vector<Diagnostic>& out) {
    for (std::size_t i = 0; i < s.initial.size(); ++i) {
        const auto& q = s.initial[i];
        const std::string path = "/initial/" + std::to_string(i);
        const auto from = net.find_node(q.from);
        const auto to = net.find_node(q.to);
        if (!from || !to || !net.find_link(*from, *to)) {
            out.push_back({path, "no link " + q.from + "->" + q.to});
        }
        if (!(q.count >= 0.0) || !std::isfinite(q.count)) {
            out.push_back({path + "/Q", "initial queue must be >= 0"});
        } else if (s.run.mode == QueueMode::integer && !is_integral(q.count)) {
            out.push_back({path + "/Q", "integer mode needs whole vehicles"});
        }
    }
}

} // namespace

std::vector<Diagnostic> validate_scenario(const Scenario& s) {
    std::vector<Diagnostic> out;
    if (s.run.horizon < 1) out.push_back({"/run/horizon", "horizon must be >= 1"});
    if (!(s.run.slot_seconds > 0.0)) out.push_back({"/run/slot_seconds", "slot_seconds must be > 0"});
    if (s.run.derating && !(*s.run.derating > 0.0 && *s.run.derating <= 1.0)) {
        out.push_back({"/run/derating", "derating must lie in (0, 1]"});
    }

    const auto violations = validate_topology(s.topology);
    for (const auto& v : violations) out.push_back({v.path, "[" + v.kind + "] " + v.detail});
    if (!violations.empty()) {
        validate_controllers(s, nullptr, out);
        return out;
    }

    const auto net = Network::build(s.topology);
    validate_controllers(s, &net, out);
    validate_arrivals(s, net, out);
    validate_routing(s, net, out);
    validate_initial(s, net, out);
    return out;
}

ScenarioError::ScenarioError(std::vector<Diagnostic> diagnostics)
    : ConfigError(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

Scenario scale_arrivals(Scenario scenario, double factor) {
    scenario.arrivals.boundary_rate *= factor;
    for (auto& [id, rate] : scenario.arrivals.rates) rate *= factor;
    return scenario;
}

std::string fingerprint(const Scenario& scenario) {
    // FNV-1a, 64 bit.
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : serialize(to_document(scenario))) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

Simulation::Simulation(const Scenario& scenario, std::optional<std::string> controller)
    : scenario_(scenario) {
    auto diagnostics = validate_scenario(scenario_);
    controller_name_ = controller.value_or(scenario_.active_controller);
    if (!scenario_.controllers.contains(controller_name_)) {
        diagnostics.push_back({"/controllers", "unknown controller '" + controller_name_ + "'"});
    }
    if (!diagnostics.empty()) throw ScenarioError(std::move(diagnostics));
    config_ = scenario_.controllers.at(controller_name_);

    options_.mode = scenario_.run.mode;
    options_.cap_inflow = scenario_.run.cap_inflow;
    network_ = Network::build(scenario_.topology, scenario_.run.derating.value_or(1.0),
                              options_.mode == QueueMode::integer);
    routing_ = RoutingTable::build(network_, scenario_.routing);

    arrivals_.kind = scenario_.arrivals.kind;
    arrivals_.batch = scenario_.arrivals.batch;
    arrivals_.profile = scenario_.arrivals.profile;
    arrivals_.rates.assign(network_.node_count(), 0.0);
    for (NodeIndex n = 0; n < network_.node_count(); ++n) {
        if (network_.node(n).is_boundary) arrivals_.rates[n] = scenario_.arrivals.boundary_rate;
    }
    for (const auto& [id, rate] : scenario_.arrivals.rates) {
        arrivals_.rates[*network_.find_node(id)] = rate;
    }

    state_ = QueueState(network_.link_count(), network_.node_count());
    for (const auto& q : scenario_.initial) {
        const auto link = network_.find_link(*network_.find_node(q.from), *network_.find_node(q.to));
        state_.add(*link, 0, q.count);
    }

    // Separate streams so that every controller sees the same arrivals.
    const auto lo = static_cast<std::uint32_t>(scenario_.run.seed);
    const auto hi = static_cast<std::uint32_t>(scenario_.run.seed >> 32);
    std::seed_seq arrival_seed{lo, hi, std::uint32_t{0xA11}};
    std::seed_seq routing_seed{lo, hi, std::uint32_t{0x207}};
    arrival_rng_.seed(arrival_seed);
    routing_rng_.seed(routing_seed);
}

Simulation::SlotOutcome Simulation::advance() {
    const std::int64_t k = state_.slot();
    SlotOutcome outcome;
    outcome.decisions = decide_all(state_, network_, std::span(&config_, 1), k);
    auto flows = compute_flows(state_, network_, phase_indices(outcome.decisions), options_);
    outcome.violations = work_conservation_audit(state_, network_, outcome.decisions, flows);
    const auto arrivals = sample_arrivals(arrivals_, k, arrival_rng_);
    auto result = apply_flows(state_, network_, std::move(flows), arrivals, routing_, options_,
                              routing_rng_);
    state_ = std::move(result.next);
    outcome.flows = std::move(result.flows);

    auto& row = outcome.row;
    row.slot = k;
    row.total_queue = state_.total();
    if (row.total_queue > 0.0) {
        row.avg_time_spent_slots = state_.total_time_spent(state_.slot()) / row.total_queue;
    }
    row.avg_time_spent_seconds = row.avg_time_spent_slots * scenario_.run.slot_seconds;
    row.served_flow = outcome.flows.total();
    row.arrivals = result.arrivals;
    row.exits = result.exits;
    row.wc_violations = static_cast<int>(
        std::count(outcome.violations.begin(), outcome.violations.end(), true));
    return outcome;
}

SimulationTrace run(const Scenario& scenario, std::optional<std::string> controller) {
    Simulation sim(scenario, std::move(controller));
    SimulationTrace trace;
    {
        Scenario resolved = scenario;
        resolved.active_controller = sim.controller_name();
        trace.fingerprint = fingerprint(resolved);
    }
    trace.controller = sim.controller_name();
    trace.rows.reserve(static_cast<std::size_t>(scenario.run.horizon));
    for (std::int64_t k = 0; k < scenario.run.horizon; ++k) {
        auto outcome = sim.advance();
        for (JunctionIndex j = 0; j < outcome.violations.size(); ++j) {
            if (outcome.violations[j]) trace.violations.push_back({k, sim.network().junction(j).id});
        }
        trace.rows.push_back(outcome.row);
    }

    const auto& net = sim.network();
    const auto totals = sim.state().node_totals(net);
    trace.final_state.total_queue = sim.state().total();
    for (NodeIndex n = 0; n < net.node_count(); ++n) {
        trace.final_state.node_queues.emplace_back(net.node(n).id, totals[n]);
        const double overfill = sim.state().overfill_arrivals()[n];
        if (overfill > 0.0) trace.final_state.overfill_arrivals.emplace_back(net.node(n).id, overfill);
    }
    return trace;
}

std::vector<SweepCell> sweep(const Scenario& base, std::span<const double> multipliers,
                             std::span<const std::uint64_t> seeds,
                             std::span<const std::string> controllers, int jobs) {
    if (multipliers.empty() || seeds.empty() || controllers.empty()) {
        throw ConfigError("sweep needs at least one multiplier, seed and controller");
    }
    const std::set<std::string> distinct(controllers.begin(), controllers.end());
    if (distinct.size() != controllers.size()) throw ConfigError("duplicate controller in sweep");
    for (const auto& name : controllers) {
        if (!base.controllers.contains(name)) throw ConfigError("unknown controller '" + name + "'");
    }

    std::vector<SweepCell> cells;
    for (const double multiplier : multipliers) {
        for (const auto seed : seeds) {
            for (const auto& name : controllers) cells.push_back({multiplier, seed, name});
        }
    }

    auto run_cell = [&](SweepCell& cell) {
        Scenario scenario = scale_arrivals(base, cell.multiplier);
        scenario.run.seed = cell.seed;
        const auto trace = run(scenario, cell.controller);
        double sum = 0.0;
        for (const auto& row : trace.rows) {
            sum += row.total_queue;
            cell.total_wc_violations += row.wc_violations;
        }
        cell.mean_total_queue = sum / static_cast<double>(trace.rows.size());
        cell.final_avg_time_spent_slots = trace.rows.back().avg_time_spent_slots;
        cell.final_avg_time_spent_seconds = trace.rows.back().avg_time_spent_seconds;
    };

    const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
    if (workers == 1) {
        for (auto& cell : cells) run_cell(cell);
        return cells;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, cells.size()); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < cells.size(); i = next++) {
                try {
                    run_cell(cells[i]);
                } catch (...) {
                    std::lock_guard lock(failure_lock);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return cells;
}

} // namespace capbp
