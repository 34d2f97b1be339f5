#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capbp/dynamics.hpp"
#include "capbp/pressure.hpp"
#include "capbp/topology.hpp"

namespace capbp {

enum class ControllerKind { fixed_cycle, back_pressure, capacity_aware };

const char* to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller_kind(const std::string& text);

struct CycleStep {
    std::string phase;
    int slots = 1;

    bool operator==(const CycleStep&) const = default;
};

struct ControllerConfig {
    ControllerKind kind = ControllerKind::back_pressure;
    PressureFunction pressure = PressureFunction::linear();
    /// Fixed-cycle program, and per-junction replacements for junctions
    /// whose phase ids differ.
    std::vector<CycleStep> cycle;
    std::map<std::string, std::vector<CycleStep>> junction_cycles;
    /// Objectives within this distance of the maximum count as tied.
    double tie_epsilon = 1e-9;

    bool operator==(const ControllerConfig&) const = default;
};

/// Movement a->b of a junction as seen by its controller. `input` and
/// `output` index the observation's input/output lists.
struct ObservedMovement {
    std::size_t input;
    std::size_t output;
    bool occupied; // d_ab: Q_ab > 0
};

/// Everything a junction controller may look at: aggregate lengths and
/// capacities of its own inputs and outputs, occupancy bits of its
/// movements, and its phase table.
struct JunctionObservation {
    std::string junction;
    std::vector<double> input_queue;
    std::vector<double> input_capacity;
    std::vector<double> output_queue;
    std::vector<double> output_capacity;
    std::vector<ObservedMovement> movements;
    std::vector<std::string> phase_ids;
    std::vector<std::vector<double>> service; // [phase][movement]
};

JunctionObservation observe(const Network& net, const QueueState& state,
                            std::span<const double> node_totals, JunctionIndex j);

struct JunctionWeights {
    std::vector<double> input_pressure;
    std::vector<double> output_pressure;
    std::vector<double> weight; // W_ab per movement
};

/// Pi_a = P(Q_a, C_a) on every input and output, then
/// W_ab = d_ab * max(Pi_a - Pi_b, 0).
JunctionWeights compute_weights(const JunctionObservation& obs, const PressureFunction& pressure);

/// sum_ab W_ab mu_ab(p) for every phase p.
std::vector<double> phase_objectives(const JunctionObservation& obs, const JunctionWeights& weights);

/// True when the phase serves some occupied movement whose output is not
/// full.
bool phase_can_move(const JunctionObservation& obs, std::size_t phase);

/// Phases whose objective is within `epsilon` of the maximum, ascending.
std::vector<std::size_t> tie_set(std::span<const double> objectives, double epsilon);

struct PhaseDecision {
    std::size_t phase = 0;
    std::string phase_id;
    double objective = 0.0;
    /// The movable-phase preference changed the outcome of a tie.
    bool tie_break_used = false;
};

/// Back-pressure argmax. Among tied phases the first one that can move
/// vehicles wins; otherwise the lowest index.
PhaseDecision select_phase(const JunctionObservation& obs, const JunctionWeights& weights,
                           const ControllerConfig& config);

/// Phase active at `slot` when walking the (phase, duration) program
/// periodically.
std::string fixed_cycle_decide(std::span<const CycleStep> cycle, std::int64_t slot);
std::string fixed_cycle_decide(const ControllerConfig& config, std::int64_t slot);

/// One decision per junction. `configs` holds either a single config shared
/// by all junctions or exactly one per junction.
std::vector<PhaseDecision> decide_all(const QueueState& state, const Network& net,
                                      std::span<const ControllerConfig> configs, std::int64_t slot);

std::vector<std::size_t> phase_indices(std::span<const PhaseDecision> decisions);

/// Junction-level audit: no vehicle moved although some phase could have
/// moved one.
bool violates_work_conservation(const JunctionObservation& obs, double junction_flow);

/// Flags every junction whose links carried no flow while a phase with an
/// occupied, unblocked movement existed.
std::vector<bool> work_conservation_audit(const QueueState& state, const Network& net,
                                          std::span<const PhaseDecision> decisions,
                                          const FlowRealization& flows);

struct JunctionExplanation {
    JunctionObservation observation;
    JunctionWeights weights;
    std::vector<double> objectives;
    std::vector<std::size_t> ties;
    PhaseDecision decision;
};

JunctionExplanation explain_junction(const JunctionObservation& obs, const ControllerConfig& config);

} // namespace capbp
