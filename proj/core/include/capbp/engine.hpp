#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capbp/control.hpp"
#include "capbp/dynamics.hpp"
#include "capbp/errors.hpp"
#include "capbp/topology.hpp"

namespace capbp {

/// Share of a 15 s slot left after a 4 s yellow interval.
inline constexpr double kYellowDerating = 11.0 / 15.0;

struct ArrivalSpec {
    ArrivalKind kind = ArrivalKind::poisson;
    /// lambda for every boundary node; `rates` overrides single nodes
    /// (including non-boundary ones).
    double boundary_rate = 0.0;
    std::map<std::string, double> rates;
    int batch = 1;
    std::vector<double> profile;

    bool operator==(const ArrivalSpec&) const = default;
};

/// Vehicles present at slot 0, all with entry slot 0.
struct InitialQueue {
    std::string from;
    std::string to;
    double count = 0.0;

    bool operator==(const InitialQueue&) const = default;
};

struct RunSettings {
    std::int64_t horizon = 1;
    std::uint64_t seed = 1;
    QueueMode mode = QueueMode::integer;
    double slot_seconds = 15.0;
    /// Service derating (e.g. kYellowDerating); unset means mu as given.
    std::optional<double> derating;
    bool cap_inflow = false;

    bool operator==(const RunSettings&) const = default;
};

struct Scenario {
    std::string notes;
    NetworkTopology topology;
    ArrivalSpec arrivals;
    RoutingSpec routing;
    /// Named controller configurations, usually "fc", "bp" and "bpc".
    std::map<std::string, ControllerConfig> controllers;
    std::string active_controller;
    std::vector<InitialQueue> initial;
    RunSettings run;

    bool operator==(const Scenario&) const = default;
};

struct Diagnostic {
    std::string path;
    std::string message;
    int line = 0; // 1-based when known
    int column = 0;
};

std::string format_diagnostic(const Diagnostic& d);

/// Every problem preventing the scenario from running; empty when valid.
std::vector<Diagnostic> validate_scenario(const Scenario& scenario);

class ScenarioError : public ConfigError {
  public:
    explicit ScenarioError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  private:
    std::vector<Diagnostic> diagnostics_;
};

/// Arrival rates of every boundary node and override scaled by `factor`.
Scenario scale_arrivals(Scenario scenario, double factor);

struct MetricsRow {
    std::int64_t slot = 0;
    double total_queue = 0.0;
    double avg_time_spent_slots = 0.0;
    double avg_time_spent_seconds = 0.0;
    double served_flow = 0.0;
    double arrivals = 0.0;
    double exits = 0.0;
    int wc_violations = 0;

    bool operator==(const MetricsRow&) const = default;
};

struct ViolationRecord {
    std::int64_t slot;
    std::string junction;

    bool operator==(const ViolationRecord&) const = default;
};

struct FinalSummary {
    double total_queue = 0.0;
    std::vector<std::pair<std::string, double>> node_queues;
    std::vector<std::pair<std::string, double>> overfill_arrivals;

    bool operator==(const FinalSummary&) const = default;
};

struct SimulationTrace {
    std::string fingerprint;
    std::string controller;
    std::vector<MetricsRow> rows;
    FinalSummary final_state;
    std::vector<ViolationRecord> violations;

    bool operator==(const SimulationTrace&) const = default;
};

/// 16-hex-digit content hash of the scenario's canonical serialization.
std::string fingerprint(const Scenario& scenario);

/// Stepwise simulation of one scenario under one controller. Each slot:
/// decide phases, compute flows, audit work conservation, apply the queue
/// update. Throws ScenarioError when the scenario does not validate.
class Simulation {
  public:
    struct SlotOutcome {
        MetricsRow row;
        std::vector<PhaseDecision> decisions;
        FlowRealization flows;
        std::vector<bool> violations;
    };

    /// `controller` selects one of scenario.controllers; defaults to the
    /// scenario's active controller.
    explicit Simulation(const Scenario& scenario, std::optional<std::string> controller = {});

    const Network& network() const { return network_; }
    const QueueState& state() const { return state_; }
    const ControllerConfig& controller() const { return config_; }
    const std::string& controller_name() const { return controller_name_; }
    std::int64_t slot() const { return state_.slot(); }

    SlotOutcome advance();

  private:
    Scenario scenario_;
    std::string controller_name_;
    ControllerConfig config_;
    Network network_;
    RoutingTable routing_;
    ArrivalProcess arrivals_;
    DynamicsOptions options_;
    QueueState state_;
    Rng arrival_rng_;
    Rng routing_rng_;
};

SimulationTrace run(const Scenario& scenario, std::optional<std::string> controller = {});

struct SweepCell {
    double multiplier = 1.0;
    std::uint64_t seed = 0;
    std::string controller;
    double mean_total_queue = 0.0;
    double final_avg_time_spent_slots = 0.0;
    double final_avg_time_spent_seconds = 0.0;
    long long total_wc_violations = 0;

    bool operator==(const SweepCell&) const = default;
};

/// Runs every (multiplier, seed, controller) cell; all controllers of a
/// cell see the same seed. Results are ordered by multiplier, seed, then
/// controller as listed, independently of `jobs`.
std::vector<SweepCell> sweep(const Scenario& base, std::span<const double> multipliers,
                             std::span<const std::uint64_t> seeds,
                             std::span<const std::string> controllers, int jobs = 1);

} // namespace capbp
