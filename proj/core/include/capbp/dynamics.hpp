#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "capbp/topology.hpp"

namespace capbp {

using Rng = std::mt19937_64;

/// integer: vehicle counts, multinomial routing. fluid: real-valued
/// queues with proportional routing.
enum class QueueMode { integer, fluid };

const char* to_string(QueueMode mode);

struct DynamicsOptions {
    QueueMode mode = QueueMode::integer;
    /// Caps the joint inflow into a node at its free room at slot start.
    /// Off by default: blocking is then decided by the slot-start test only,
    /// and several upstream flows may jointly overshoot the capacity.
    bool cap_inflow = false;
};

/// Entry slot -> vehicles that entered the network in that slot. Kept
/// sorted so the oldest vehicles are always at the front.
using EntryLedger = std::map<std::int64_t, double>;

/// Queue lengths Q_ab (one queue per link a->b) together with the network
/// entry slots of the queued vehicles.
class QueueState {
  public:
    QueueState() = default;
    QueueState(std::size_t link_count, std::size_t node_count);

    std::int64_t slot() const { return slot_; }
    void set_slot(std::int64_t slot) { slot_ = slot; }

    std::size_t link_count() const { return counts_.size(); }
    double count(LinkIndex l) const { return counts_[l]; }
    const EntryLedger& entries(LinkIndex l) const { return entries_[l]; }

    void add(LinkIndex l, std::int64_t entry_slot, double amount);
    /// Removes `amount` vehicles, oldest entry slots first, and returns them.
    EntryLedger remove_oldest(LinkIndex l, double amount);

    double total() const;
    /// Q_a = sum_b Q_ab for every node.
    std::vector<double> node_totals(const Network& net) const;
    /// Sum over queued vehicles of (now - entry slot).
    double total_time_spent(std::int64_t now) const;

    /// Cumulative exogenous arrivals admitted while their node was full.
    const std::vector<double>& overfill_arrivals() const { return overfill_; }
    void note_overfill(NodeIndex n, double amount) { overfill_[n] += amount; }

    bool operator==(const QueueState&) const = default;

  private:
    std::int64_t slot_ = 0;
    std::vector<double> counts_;
    std::vector<EntryLedger> entries_;
    std::vector<double> overfill_;
};

/// delta(q, c): 1 if the node can accept vehicles (q < c), 0 once full.
int blocking_indicator(double q, double c);

struct FlowRealization {
    std::vector<double> flow;  // f_ab per link
    std::vector<bool> blocked; // mu > 0 and Q_ab > 0, but destination full

    double total() const;
};

/// f_ab = delta(Q_b, C_b) * min(Q_ab, mu_ab(p)) against the slot-start state.
/// `phases` holds the selected phase index of every junction.
FlowRealization compute_flows(const QueueState& state, const Network& net,
                              std::span<const std::size_t> phases,
                              const DynamicsOptions& options = {});

enum class ArrivalKind { poisson, bernoulli_batch, deterministic_fluid };

const char* to_string(ArrivalKind kind);

struct ArrivalProcess {
    ArrivalKind kind = ArrivalKind::poisson;
    std::vector<double> rates;   // lambda_a per node per slot
    std::vector<double> profile; // per-slot multiplier; last value repeats
    int batch = 1;               // bernoulli-batch only

    double profile_at(std::int64_t slot) const;
};

/// Exogenous arrivals A_a(k). Poisson and bernoulli-batch draw integer
/// counts with mean lambda_a * profile(k); deterministic-fluid returns the
/// mean itself.
std::vector<double> sample_arrivals(const ArrivalProcess& process, std::int64_t slot, Rng& rng);

/// Routing ratios r_ab keyed by node ids. Nodes that are absent, or whose
/// ratios sum below one, let the remainder leave the network.
struct RoutingSpec {
    std::map<std::string, std::map<std::string, double>> ratios;

    bool operator==(const RoutingSpec&) const = default;
};

struct RouteShare {
    LinkIndex link;
    double ratio;
};

class RoutingTable {
  public:
    /// Throws ConfigError on unknown nodes, ratios on non-existent links,
    /// ratios outside [0,1] or ratio sums above 1.
    static RoutingTable build(const Network& net, const RoutingSpec& spec);

    const std::vector<RouteShare>& shares(NodeIndex n) const { return shares_[n]; }
    double exit_rate(NodeIndex n) const { return exit_rate_[n]; }

  private:
    std::vector<std::vector<RouteShare>> shares_;
    std::vector<double> exit_rate_;
};

struct RouteSplit {
    std::vector<double> to_links; // parallel to RoutingTable::shares(node)
    double exits = 0.0;
};

/// Splits vehicles entering `node` over its outgoing queues and the exit.
/// Integer mode draws one multinomial over {b: r_ab} and exit; fluid mode
/// splits proportionally. The parts always add up to `inflow`.
RouteSplit route_inflow(NodeIndex node, double inflow, const RoutingTable& routing, QueueMode mode,
                        Rng& rng);

struct StepResult {
    QueueState next;
    FlowRealization flows;
    double arrivals = 0.0;
    double exits = 0.0;
};

/// Queue update given already computed flows:
///   Q_ab(k+1) = Q_ab(k) - f_ab(k) + r_ab(k) (sum_c f_ca(k) + A_a(k)).
/// Transferred vehicles keep their entry slot; exogenous ones enter at k.
StepResult apply_flows(const QueueState& state, const Network& net, FlowRealization flows,
                       std::span<const double> arrivals, const RoutingTable& routing,
                       const DynamicsOptions& options, Rng& rng);

/// compute_flows followed by apply_flows.
StepResult step(const QueueState& state, const Network& net, std::span<const std::size_t> phases,
                std::span<const double> arrivals, const RoutingTable& routing,
                const DynamicsOptions& options, Rng& rng);

} // namespace capbp
