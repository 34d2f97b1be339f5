#include "capbp/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "capbp/errors.hpp"

namespace capbp {

const char* to_string(Turn turn) {
    switch (turn) {
    case Turn::straight:
        return "straight";
    case Turn::left:
        return "left";
    case Turn::right:
        return "right";
    case Turn::unspecified:
        break;
    }
    return "unspecified";
}

std::optional<Turn> parse_turn(const std::string& text) {
    if (text == "straight") return Turn::straight;
    if (text == "left") return Turn::left;
    if (text == "right") return Turn::right;
    if (text == "unspecified") return Turn::unspecified;
    return std::nullopt;
}

namespace {

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ",";
        out += item;
    }
    return out;
}

std::string at(const char* section, std::size_t index) {
    return std::string("/topology/") + section + "/" + std::to_string(index);
}

void check_side(std::vector<Violation>& report, const JunctionSpec& junction, const std::string& path,
                const char* side, const std::vector<std::string>& declared,
                const std::set<std::string>& derived) {
    const std::set<std::string> declared_set(declared.begin(), declared.end());
    const std::string where = path + "/" + side;
    if (declared_set.size() != declared.size()) {
        report.push_back(
            {"junction-io", "junction " + junction.id + " lists a duplicate in " + side, where});
    }
    if (declared_set != derived) {
        report.push_back({"junction-io",
                          "junction " + junction.id + " declares " + side + " {" +
                              join(declared_set) + "} but its links give {" + join(derived) + "}",
                          where});
    }
}

} // namespace

std::vector<Violation> validate_topology(const NetworkTopology& topology,
                                         std::optional<double> c_infinity) {
    std::vector<Violation> report;

    std::set<std::string> node_ids;
    for (std::size_t i = 0; i < topology.nodes.size(); ++i) {
        const auto& node = topology.nodes[i];
        if (!node_ids.insert(node.id).second) {
            report.push_back({"duplicate-node", "node id " + node.id + " declared twice",
                              at("nodes", i) + "/id"});
        }
        if (node.capacity < 1) {
            report.push_back({"capacity",
                              "node " + node.id + " has capacity " + std::to_string(node.capacity) +
                                  "; capacity >= 1 violated",
                              at("nodes", i) + "/C"});
        } else if (c_infinity && node.capacity > *c_infinity) {
            std::ostringstream msg;
            msg << "node " << node.id << " has capacity " << node.capacity << " above C_inf "
                << *c_infinity;
            report.push_back({"capacity-limit", msg.str(), at("nodes", i) + "/C"});
        }
    }

    std::set<std::string> junction_ids;
    for (std::size_t i = 0; i < topology.junctions.size(); ++i) {
        const auto& junction = topology.junctions[i];
        if (!junction_ids.insert(junction.id).second) {
            report.push_back({"duplicate-junction", "junction id " + junction.id + " declared twice",
                              at("junctions", i) + "/id"});
        }
    }

    // (from,to) -> (junction, link index) claiming it
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::string, std::size_t>>>
        owners;
    std::map<std::string, std::set<std::string>> derived_inputs;
    std::map<std::string, std::set<std::string>> derived_outputs;
    for (std::size_t i = 0; i < topology.links.size(); ++i) {
        const auto& link = topology.links[i];
        const std::string name = link.from + "->" + link.to;
        if (!node_ids.contains(link.from)) {
            report.push_back({"unknown-node", "link " + name + " starts at unknown node " + link.from,
                              at("links", i) + "/from"});
        }
        if (!node_ids.contains(link.to)) {
            report.push_back({"unknown-node", "link " + name + " ends at unknown node " + link.to,
                              at("links", i) + "/to"});
        }
        if (!junction_ids.contains(link.junction)) {
            report.push_back({"unknown-junction",
                              "link " + name + " refers to unknown junction " + link.junction,
                              at("links", i) + "/junction"});
        }
        owners[{link.from, link.to}].emplace_back(link.junction, i);
        derived_inputs[link.junction].insert(link.from);
        derived_outputs[link.junction].insert(link.to);
    }
    for (const auto& [pair, claims] : owners) {
        if (claims.size() > 1) {
            std::set<std::string> distinct;
            for (const auto& claim : claims) distinct.insert(claim.first);
            report.push_back({"partition",
                              "link " + pair.first + "->" + pair.second + " is assigned " +
                                  std::to_string(claims.size()) + " times (junctions " +
                                  join(distinct) + "); junctions must partition links",
                              at("links", claims[1].second)});
        }
    }

    for (std::size_t ji = 0; ji < topology.junctions.size(); ++ji) {
        const auto& junction = topology.junctions[ji];
        const std::string jpath = at("junctions", ji);
        check_side(report, junction, jpath, "inputs", junction.inputs, derived_inputs[junction.id]);
        check_side(report, junction, jpath, "outputs", junction.outputs,
                   derived_outputs[junction.id]);

        if (junction.phases.empty()) {
            report.push_back({"no-phases", "junction " + junction.id + " has no phases",
                              jpath + "/phases"});
            continue;
        }

        const std::set<std::string> inputs(junction.inputs.begin(), junction.inputs.end());
        const std::set<std::string> outputs(junction.outputs.begin(), junction.outputs.end());
        std::set<std::string> phase_ids;
        bool any_positive = false;
        for (std::size_t pi = 0; pi < junction.phases.size(); ++pi) {
            const auto& phase = junction.phases[pi];
            const std::string where = "junction " + junction.id + " phase " + phase.id;
            const std::string ppath = jpath + "/phases/" + std::to_string(pi);
            if (!phase_ids.insert(phase.id).second) {
                report.push_back({"duplicate-phase", where + " declared twice", ppath + "/id"});
            }
            std::set<std::pair<std::string, std::string>> seen;
            for (std::size_t ei = 0; ei < phase.service.size(); ++ei) {
                const auto& entry = phase.service[ei];
                const std::string movement = entry.from + "->" + entry.to;
                const std::string epath = ppath + "/mu/" + std::to_string(ei);
                if (!inputs.contains(entry.from) || !outputs.contains(entry.to)) {
                    report.push_back({"service-domain",
                                      where + " serves " + movement +
                                          " which is not an input/output pair",
                                      epath});
                }
                if (!seen.insert({entry.from, entry.to}).second) {
                    report.push_back(
                        {"service-duplicate", where + " lists " + movement + " twice", epath});
                }
                if (entry.mu < 0) {
                    report.push_back(
                        {"service-negative", where + " has negative mu on " + movement, epath});
                }
                if (entry.mu > 0) {
                    any_positive = true;
                    const auto it = owners.find({entry.from, entry.to});
                    const bool linked =
                        it != owners.end() &&
                        std::any_of(it->second.begin(), it->second.end(),
                                    [&](const auto& claim) { return claim.first == junction.id; });
                    if (!linked) {
                        report.push_back({"service-absent-link",
                                          where + " gives mu > 0 to " + movement +
                                              " but the junction has no such link",
                                          epath});
                    }
                }
            }
        }
        if (!any_positive) {
            report.push_back({"no-service", "junction " + junction.id + " never serves any movement",
                              jpath + "/phases"});
        }
    }

    return report;
}

std::optional<std::size_t> Network::Junction::phase_index(const std::string& phase_id) const {
    for (std::size_t p = 0; p < phases.size(); ++p) {
        if (phases[p].id == phase_id) return p;
    }
    return std::nullopt;
}

Network Network::build(const NetworkTopology& topology, double service_scale,
                       bool integer_service) {
    const auto violations = validate_topology(topology);
    if (!violations.empty()) {
        std::string message = "invalid topology:";
        for (const auto& v : violations) message += "\n  [" + v.kind + "] " + v.detail;
        throw ConfigError(message);
    }
    if (!(service_scale > 0.0)) throw ConfigError("service scale must be positive");

    Network net;
    net.nodes_ = topology.nodes;
    net.out_links_.resize(net.nodes_.size());
    for (NodeIndex n = 0; n < net.nodes_.size(); ++n) net.node_ids_.emplace(net.nodes_[n].id, n);

    net.junctions_.reserve(topology.junctions.size());
    for (JunctionIndex j = 0; j < topology.junctions.size(); ++j) {
        const auto& spec = topology.junctions[j];
        net.junction_ids_.emplace(spec.id, j);
        Junction junction;
        junction.id = spec.id;
        for (const auto& id : spec.inputs) junction.inputs.push_back(net.node_ids_.at(id));
        for (const auto& id : spec.outputs) junction.outputs.push_back(net.node_ids_.at(id));
        net.junctions_.push_back(std::move(junction));
    }

    for (LinkIndex l = 0; l < topology.links.size(); ++l) {
        const auto& spec = topology.links[l];
        Link link{};
        link.from = net.node_ids_.at(spec.from);
        link.to = net.node_ids_.at(spec.to);
        link.junction = net.junction_ids_.at(spec.junction);
        auto& junction = net.junctions_[link.junction];
        link.local = junction.links.size();
        junction.links.push_back(l);
        net.links_.push_back(link);
        net.out_links_[link.from].push_back(l);
    }

    for (JunctionIndex j = 0; j < topology.junctions.size(); ++j) {
        auto& junction = net.junctions_[j];
        for (const auto& phase_spec : topology.junctions[j].phases) {
            Phase phase;
            phase.id = phase_spec.id;
            phase.service.assign(junction.links.size(), 0.0);
            for (const auto& entry : phase_spec.service) {
                if (entry.mu == 0) continue;
                const auto from = net.node_ids_.at(entry.from);
                const auto to = net.node_ids_.at(entry.to);
                const auto l = net.find_link(from, to);
                double rate = entry.mu * service_scale;
                if (integer_service) rate = std::floor(rate);
                phase.service[net.links_[*l].local] = rate;
            }
            junction.phases.push_back(std::move(phase));
        }
    }
    return net;
}

std::optional<NodeIndex> Network::find_node(const std::string& id) const {
    const auto it = node_ids_.find(id);
    if (it == node_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<JunctionIndex> Network::find_junction(const std::string& id) const {
    const auto it = junction_ids_.find(id);
    if (it == junction_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<LinkIndex> Network::find_link(NodeIndex from, NodeIndex to) const {
    for (const auto l : out_links_[from]) {
        if (links_[l].to == to) return l;
    }
    return std::nullopt;
}

} // namespace capbp
