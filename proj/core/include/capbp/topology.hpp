#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace capbp {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;
using JunctionIndex = std::size_t;

/// Movement class of a link. Only used to derive turning ratios; the
/// dynamics never look at it.
enum class Turn { unspecified, straight, left, right };

const char* to_string(Turn turn);
std::optional<Turn> parse_turn(const std::string& text);

struct NodeSpec {
    std::string id;
    int capacity = 1;
    bool is_boundary = false;

    bool operator==(const NodeSpec&) const = default;
};

struct LinkSpec {
    std::string from;
    std::string to;
    std::string junction;
    Turn turn = Turn::unspecified;

    bool operator==(const LinkSpec&) const = default;
};

/// One entry of a phase's service table: at most `mu` vehicles move from
/// `from` to `to` during a slot in which the phase is active.
struct ServiceEntry {
    std::string from;
    std::string to;
    int mu = 0;

    bool operator==(const ServiceEntry&) const = default;
};

struct PhaseSpec {
    std::string id;
    std::vector<ServiceEntry> service;

    bool operator==(const PhaseSpec&) const = default;
};

struct JunctionSpec {
    std::string id;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<PhaseSpec> phases;

    bool operator==(const JunctionSpec&) const = default;
};

struct NetworkTopology {
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<JunctionSpec> junctions;

    bool operator==(const NetworkTopology&) const = default;
};

struct Violation {
    std::string kind;
    std::string detail;
    std::string path; // e.g. /topology/links/3
};

/// Checks the structural invariants of a topology. Returns one entry per
/// violated invariant; an empty result means the topology is valid. When
/// `c_infinity` is given, capacities above it are reported as well.
std::vector<Violation> validate_topology(const NetworkTopology& topology,
                                         std::optional<double> c_infinity = std::nullopt);

/// Index-based view of a validated topology used by the simulator.
///
/// Queues are kept per link: Q_ab lives at the index of link a->b. Phase
/// service rates are stored per junction-local link and may already include
/// a derating factor (see Network::build).
class Network {
  public:
    struct Link {
        NodeIndex from;
        NodeIndex to;
        JunctionIndex junction;
        std::size_t local; // position within Junction::links
    };

    struct Phase {
        std::string id;
        std::vector<double> service; // parallel to Junction::links
    };

    struct Junction {
        std::string id;
        std::vector<NodeIndex> inputs;
        std::vector<NodeIndex> outputs;
        std::vector<LinkIndex> links;
        std::vector<Phase> phases;

        std::optional<std::size_t> phase_index(const std::string& phase_id) const;
    };

    /// Throws ConfigError listing every violation when the topology is
    /// invalid. Service rates are multiplied by `service_scale`; with
    /// `integer_service` the scaled rates are floored.
    static Network build(const NetworkTopology& topology, double service_scale = 1.0,
                         bool integer_service = true);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }
    std::size_t junction_count() const { return junctions_.size(); }

    const NodeSpec& node(NodeIndex n) const { return nodes_[n]; }
    double capacity(NodeIndex n) const { return static_cast<double>(nodes_[n].capacity); }
    const Link& link(LinkIndex l) const { return links_[l]; }
    const Junction& junction(JunctionIndex j) const { return junctions_[j]; }

    /// Links leaving a node, in declaration order.
    const std::vector<LinkIndex>& out_links(NodeIndex n) const { return out_links_[n]; }

    std::optional<NodeIndex> find_node(const std::string& id) const;
    std::optional<JunctionIndex> find_junction(const std::string& id) const;
    std::optional<LinkIndex> find_link(NodeIndex from, NodeIndex to) const;

  private:
    std::vector<NodeSpec> nodes_;
    std::vector<Link> links_;
    std::vector<Junction> junctions_;
    std::vector<std::vector<LinkIndex>> out_links_;
    std::unordered_map<std::string, NodeIndex> node_ids_;
    std::unordered_map<std::string, JunctionIndex> junction_ids_;
};

} // namespace capbp
