#include "capbp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "capbp/errors.hpp"

namespace capbp {

namespace {

// Fluid-mode residue below which a ledger entry is dropped.
constexpr double kLedgerEpsilon = 1e-12;
constexpr double kRatioSlack = 1e-12;

} // namespace

const char* to_string(QueueMode mode) { return mode == QueueMode::integer ? "integer" : "fluid"; }

const char* to_string(ArrivalKind kind) {
    switch (kind) {
    case ArrivalKind::poisson:
        return "poisson";
    case ArrivalKind::bernoulli_batch:
        return "bernoulli-batch";
    case ArrivalKind::deterministic_fluid:
        break;
    }
    return "deterministic-fluid";
}

QueueState::QueueState(std::size_t link_count, std::size_t node_count)
    : counts_(link_count, 0.0), entries_(link_count), overfill_(node_count, 0.0) {}

void QueueState::add(LinkIndex l, std::int64_t entry_slot, double amount) {
    if (amount <= 0.0) return;
    counts_[l] += amount;
    entries_[l][entry_slot] += amount;
}

EntryLedger QueueState::remove_oldest(LinkIndex l, double amount) {
    EntryLedger removed;
    if (amount <= 0.0) return removed;
    amount = std::min(amount, counts_[l]);
    counts_[l] -= amount;
    if (counts_[l] < kLedgerEpsilon) counts_[l] = 0.0;

    auto& ledger = entries_[l];
    double left = amount;
    while (left > 0.0 && !ledger.empty()) {
        auto front = ledger.begin();
        const double take = std::min(left, front->second);
        removed[front->first] += take;
        front->second -= take;
        left -= take;
        if (front->second <= kLedgerEpsilon) ledger.erase(front);
        if (left <= kLedgerEpsilon) break;
    }
    if (counts_[l] == 0.0) ledger.clear();
    return removed;
}

double QueueState::total() const { return std::accumulate(counts_.begin(), counts_.end(), 0.0); }

std::vector<double> QueueState::node_totals(const Network& net) const {
    std::vector<double> totals(net.node_count(), 0.0);
    for (LinkIndex l = 0; l < counts_.size(); ++l) totals[net.link(l).from] += counts_[l];
    return totals;
}

double QueueState::total_time_spent(std::int64_t now) const {
    double sum = 0.0;
    for (const auto& ledger : entries_) {
        for (const auto& [entry, amount] : ledger) sum += amount * static_cast<double>(now - entry);
    }
    return sum;
}

int blocking_indicator(double q, double c) { return q < c ? 1 : 0; }

double FlowRealization::total() const { return std::accumulate(flow.begin(), flow.end(), 0.0); }

FlowRealization compute_flows(const QueueState& state, const Network& net,
                              std::span<const std::size_t> phases, const DynamicsOptions& options) {
    if (phases.size() != net.junction_count()) {
        throw ConfigError("expected one phase per junction, got " + std::to_string(phases.size()));
    }
    const auto totals = state.node_totals(net);

    FlowRealization flows;
    flows.flow.assign(net.link_count(), 0.0);
    flows.blocked.assign(net.link_count(), false);

    std::vector<double> room;
    if (options.cap_inflow) {
        room.resize(net.node_count());
        for (NodeIndex n = 0; n < net.node_count(); ++n) {
            room[n] = std::max(0.0, net.capacity(n) - totals[n]);
        }
    }

    for (JunctionIndex j = 0; j < net.junction_count(); ++j) {
        const auto& junction = net.junction(j);
        if (phases[j] >= junction.phases.size()) {
            throw ConfigError("junction " + junction.id + " has no phase #" +
                              std::to_string(phases[j]));
        }
        const auto& service = junction.phases[phases[j]].service;
        for (std::size_t local = 0; local < junction.links.size(); ++local) {
            const LinkIndex l = junction.links[local];
            const auto& link = net.link(l);
            const double demand = std::min(state.count(l), service[local]);
            if (demand <= 0.0) continue;
            if (blocking_indicator(totals[link.to], net.capacity(link.to)) == 0) {
                flows.blocked[l] = true;
                continue;
            }
            double f = demand;
            if (options.cap_inflow) {
                f = std::min(f, room[link.to]);
                room[link.to] -= f;
            }
            flows.flow[l] = f;
        }
    }
    return flows;
}

double ArrivalProcess::profile_at(std::int64_t slot) const {
    if (profile.empty()) return 1.0;
    const auto last = static_cast<std::int64_t>(profile.size()) - 1;
    return profile[static_cast<std::size_t>(std::clamp<std::int64_t>(slot, 0, last))];
}

std::vector<double> sample_arrivals(const ArrivalProcess& process, std::int64_t slot, Rng& rng) {
    std::vector<double> arrivals(process.rates.size(), 0.0);
    const double scale = process.profile_at(slot);
    for (std::size_t n = 0; n < process.rates.size(); ++n) {
        const double mean = process.rates[n] * scale;
        if (mean <= 0.0) continue;
        switch (process.kind) {
        case ArrivalKind::poisson:
            arrivals[n] = static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
            break;
        case ArrivalKind::bernoulli_batch: {
            const double p = mean / process.batch;
            if (p > 1.0) {
                throw ConfigError("bernoulli-batch arrival mean exceeds the batch size");
            }
            arrivals[n] = std::bernoulli_distribution(p)(rng) ? process.batch : 0.0;
            break;
        }
        case ArrivalKind::deterministic_fluid:
            arrivals[n] = mean;
            break;
        }
    }
    return arrivals;
}

RoutingTable RoutingTable::build(const Network& net, const RoutingSpec& spec) {
    RoutingTable table;
    table.shares_.resize(net.node_count());
    table.exit_rate_.assign(net.node_count(), 1.0);

    for (const auto& [from_id, row] : spec.ratios) {
        const auto from = net.find_node(from_id);
        if (!from) throw ConfigError("routing refers to unknown node " + from_id);
        double sum = 0.0;
        for (const auto& [to_id, ratio] : row) {
            const auto to = net.find_node(to_id);
            if (!to) throw ConfigError("routing at node " + from_id + " refers to unknown node " + to_id);
            const auto link = net.find_link(*from, *to);
            if (!link) {
                throw ConfigError("routing at node " + from_id + " targets " + to_id +
                                  " but no link " + from_id + "->" + to_id + " exists");
            }
            if (!(ratio >= 0.0 && ratio <= 1.0)) {
                throw ConfigError("routing ratio " + from_id + "->" + to_id + " outside [0,1]");
            }
            sum += ratio;
            if (ratio > 0.0) table.shares_[*from].push_back({*link, ratio});
        }
        if (sum > 1.0 + kRatioSlack) {
            std::ostringstream msg;
            msg << "routing ratios at node " << from_id << " sum to " << sum << " > 1";
            throw ConfigError(msg.str());
        }
        table.exit_rate_[*from] = std::max(0.0, 1.0 - sum);
        // Keep link order stable regardless of map ordering of destinations.
        std::sort(table.shares_[*from].begin(), table.shares_[*from].end(),
                  [](const RouteShare& a, const RouteShare& b) { return a.link < b.link; });
    }
    return table;
}

RouteSplit route_inflow(NodeIndex node, double inflow, const RoutingTable& routing, QueueMode mode,
                        Rng& rng) {
    const auto& shares = routing.shares(node);
    RouteSplit split;
    split.to_links.assign(shares.size(), 0.0);
    if (inflow <= 0.0) return split;

    if (mode == QueueMode::fluid) {
        double routed = 0.0;
        for (std::size_t i = 0; i < shares.size(); ++i) {
            split.to_links[i] = inflow * shares[i].ratio;
            routed += split.to_links[i];
        }
        split.exits = std::max(0.0, inflow - routed);
        return split;
    }

    // Multinomial as a chain of conditional binomials; the exit category
    // takes whatever is left.
    auto remaining = static_cast<long long>(std::llround(inflow));
    double mass_left = 1.0;
    for (std::size_t i = 0; i < shares.size() && remaining > 0; ++i) {
        const double p = mass_left > 0.0 ? std::clamp(shares[i].ratio / mass_left, 0.0, 1.0) : 1.0;
        const long long drawn =
            p >= 1.0 ? remaining : std::binomial_distribution<long long>(remaining, p)(rng);
        split.to_links[i] = static_cast<double>(drawn);
        remaining -= drawn;
        mass_left -= shares[i].ratio;
    }
    split.exits = static_cast<double>(remaining);
    return split;
}

StepResult apply_flows(const QueueState& state, const Network& net, FlowRealization flows,
                       std::span<const double> arrivals, const RoutingTable& routing,
                       const DynamicsOptions& options, Rng& rng) {
    if (arrivals.size() != net.node_count()) {
        throw ConfigError("expected one arrival count per node");
    }
    StepResult result;
    result.next = state;
    QueueState& next = result.next;
    const std::int64_t k = state.slot();

    std::vector<EntryLedger> inflow(net.node_count());
    for (LinkIndex l = 0; l < net.link_count(); ++l) {
        if (flows.flow[l] <= 0.0) continue;
        for (const auto& [entry, amount] : next.remove_oldest(l, flows.flow[l])) {
            inflow[net.link(l).to][entry] += amount;
        }
    }

    const auto totals = state.node_totals(net);
    for (NodeIndex n = 0; n < net.node_count(); ++n) {
        if (arrivals[n] <= 0.0) continue;
        inflow[n][k] += arrivals[n];
        result.arrivals += arrivals[n];
        if (totals[n] >= net.capacity(n)) next.note_overfill(n, arrivals[n]);
    }

    for (NodeIndex n = 0; n < net.node_count(); ++n) {
        const auto& shares = routing.shares(n);
        for (const auto& [entry, amount] : inflow[n]) {
            const auto split = route_inflow(n, amount, routing, options.mode, rng);
            for (std::size_t i = 0; i < shares.size(); ++i) {
                next.add(shares[i].link, entry, split.to_links[i]);
            }
            result.exits += split.exits;
        }
    }

    next.set_slot(k + 1);
    result.flows = std::move(flows);
    return result;
}

StepResult step(const QueueState& state, const Network& net, std::span<const std::size_t> phases,
                std::span<const double> arrivals, const RoutingTable& routing,
                const DynamicsOptions& options, Rng& rng) {
    auto flows = compute_flows(state, net, phases, options);
    return apply_flows(state, net, std::move(flows), arrivals, routing, options, rng);
}

} // namespace capbp
