#include "capbp/control.hpp"

#include <algorithm>
#include <numeric>

#include "capbp/errors.hpp"

namespace capbp {

const char* to_string(ControllerKind kind) {
    switch (kind) {
    case ControllerKind::fixed_cycle:
        return "fixed-cycle";
    case ControllerKind::back_pressure:
        return "back-pressure";
    case ControllerKind::capacity_aware:
        break;
    }
    return "capacity-aware";
}

std::optional<ControllerKind> parse_controller_kind(const std::string& text) {
    if (text == "fixed-cycle") return ControllerKind::fixed_cycle;
    if (text == "back-pressure") return ControllerKind::back_pressure;
    if (text == "capacity-aware") return ControllerKind::capacity_aware;
    return std::nullopt;
}

namespace {

std::size_t position(const std::vector<NodeIndex>& nodes, NodeIndex n) {
    return static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), n) - nodes.begin());
}

} // namespace

JunctionObservation observe(const Network& net, const QueueState& state,
                            std::span<const double> node_totals, JunctionIndex j) {
    const auto& junction = net.junction(j);
    JunctionObservation obs;
    obs.junction = junction.id;
    for (const auto n : junction.inputs) {
        obs.input_queue.push_back(node_totals[n]);
        obs.input_capacity.push_back(net.capacity(n));
    }
    for (const auto n : junction.outputs) {
        obs.output_queue.push_back(node_totals[n]);
        obs.output_capacity.push_back(net.capacity(n));
    }
    for (const auto l : junction.links) {
        const auto& link = net.link(l);
        obs.movements.push_back({position(junction.inputs, link.from),
                                 position(junction.outputs, link.to), state.count(l) > 0.0});
    }
    for (const auto& phase : junction.phases) {
        obs.phase_ids.push_back(phase.id);
        obs.service.push_back(phase.service);
    }
    return obs;
}

JunctionWeights compute_weights(const JunctionObservation& obs, const PressureFunction& pressure) {
    JunctionWeights w;
    for (std::size_t i = 0; i < obs.input_queue.size(); ++i) {
        w.input_pressure.push_back(pressure(obs.input_queue[i], obs.input_capacity[i]));
    }
    for (std::size_t o = 0; o < obs.output_queue.size(); ++o) {
        w.output_pressure.push_back(pressure(obs.output_queue[o], obs.output_capacity[o]));
    }
    for (const auto& m : obs.movements) {
        const double release = std::max(w.input_pressure[m.input] - w.output_pressure[m.output], 0.0);
        w.weight.push_back(m.occupied ? release : 0.0);
    }
    return w;
}

std::vector<double> phase_objectives(const JunctionObservation& obs, const JunctionWeights& weights) {
    std::vector<double> objectives;
    objectives.reserve(obs.service.size());
    for (const auto& service : obs.service) {
        double sum = 0.0;
        for (std::size_t m = 0; m < service.size(); ++m) sum += weights.weight[m] * service[m];
        objectives.push_back(sum);
    }
    return objectives;
}

bool phase_can_move(const JunctionObservation& obs, std::size_t phase) {
    const auto& service = obs.service[phase];
    for (std::size_t m = 0; m < obs.movements.size(); ++m) {
        const auto& mv = obs.movements[m];
        if (service[m] > 0.0 && mv.occupied &&
            obs.output_queue[mv.output] < obs.output_capacity[mv.output]) {
            return true;
        }
    }
    return false;
}

std::vector<std::size_t> tie_set(std::span<const double> objectives, double epsilon) {
    std::vector<std::size_t> ties;
    if (objectives.empty()) return ties;
    const double best = *std::max_element(objectives.begin(), objectives.end());
    for (std::size_t p = 0; p < objectives.size(); ++p) {
        if (objectives[p] >= best - epsilon) ties.push_back(p);
    }
    return ties;
}

PhaseDecision select_phase(const JunctionObservation& obs, const JunctionWeights& weights,
                           const ControllerConfig& config) {
    if (obs.service.empty()) throw ConfigError("junction " + obs.junction + " has no phases");
    const auto objectives = phase_objectives(obs, weights);
    const auto ties = tie_set(objectives, config.tie_epsilon);

    std::size_t chosen = ties.front();
    if (ties.size() > 1) {
        const auto movable = std::find_if(ties.begin(), ties.end(),
                                          [&](std::size_t p) { return phase_can_move(obs, p); });
        if (movable != ties.end()) chosen = *movable;
    }
    return {chosen, obs.phase_ids[chosen], objectives[chosen], chosen != ties.front()};
}

std::string fixed_cycle_decide(std::span<const CycleStep> cycle, std::int64_t slot) {
    if (cycle.empty()) throw ConfigError("fixed-cycle program is empty");
    std::int64_t period = 0;
    for (const auto& step : cycle) {
        if (step.slots < 1) throw ConfigError("fixed-cycle step " + step.phase + " lasts < 1 slot");
        period += step.slots;
    }
    std::int64_t offset = ((slot % period) + period) % period;
    for (const auto& step : cycle) {
        if (offset < step.slots) return step.phase;
        offset -= step.slots;
    }
    return cycle.back().phase;
}

std::string fixed_cycle_decide(const ControllerConfig& config, std::int64_t slot) {
    return fixed_cycle_decide(config.cycle, slot);
}

std::vector<PhaseDecision> decide_all(const QueueState& state, const Network& net,
                                      std::span<const ControllerConfig> configs, std::int64_t slot) {
    if (configs.size() != 1 && configs.size() != net.junction_count()) {
        throw ConfigError("missing controller config: need 1 or " +
                          std::to_string(net.junction_count()) + ", got " +
                          std::to_string(configs.size()));
    }
    const auto totals = state.node_totals(net);
    std::vector<PhaseDecision> decisions;
    decisions.reserve(net.junction_count());
    for (JunctionIndex j = 0; j < net.junction_count(); ++j) {
        const auto& config = configs.size() == 1 ? configs[0] : configs[j];
        const auto& junction = net.junction(j);
        if (config.kind == ControllerKind::fixed_cycle) {
            const auto it = config.junction_cycles.find(junction.id);
            const auto& cycle = it != config.junction_cycles.end() ? it->second : config.cycle;
            const auto id = fixed_cycle_decide(cycle, slot);
            const auto index = junction.phase_index(id);
            if (!index) throw ConfigError("junction " + junction.id + " has no phase " + id);
            decisions.push_back({*index, id, 0.0, false});
            continue;
        }
        const auto obs = observe(net, state, totals, j);
        decisions.push_back(select_phase(obs, compute_weights(obs, config.pressure), config));
    }
    return decisions;
}

std::vector<std::size_t> phase_indices(std::span<const PhaseDecision> decisions) {
    std::vector<std::size_t> phases;
    phases.reserve(decisions.size());
    for (const auto& d : decisions) phases.push_back(d.phase);
    return phases;
}

bool violates_work_conservation(const JunctionObservation& obs, double junction_flow) {
    if (junction_flow > 0.0) return false;
    for (std::size_t p = 0; p < obs.service.size(); ++p) {
        if (phase_can_move(obs, p)) return true;
    }
    return false;
}

std::vector<bool> work_conservation_audit(const QueueState& state, const Network& net,
                                          std::span<const PhaseDecision> decisions,
                                          const FlowRealization& flows) {
    if (decisions.size() != net.junction_count()) {
        throw ConfigError("audit needs one decision per junction");
    }
    const auto totals = state.node_totals(net);
    std::vector<bool> flags(net.junction_count(), false);
    for (JunctionIndex j = 0; j < net.junction_count(); ++j) {
        double served = 0.0;
        for (const auto l : net.junction(j).links) served += flows.flow[l];
        if (served > 0.0) continue;
        flags[j] = violates_work_conservation(observe(net, state, totals, j), served);
    }
    return flags;
}

JunctionExplanation explain_junction(const JunctionObservation& obs, const ControllerConfig& config) {
    JunctionExplanation out;
    out.observation = obs;
    out.weights = compute_weights(obs, config.pressure);
    out.objectives = phase_objectives(obs, out.weights);
    out.ties = tie_set(out.objectives, config.tie_epsilon);
    out.decision = select_phase(obs, out.weights, config);
    return out;
}

} // namespace capbp
