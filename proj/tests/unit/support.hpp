#pragma once

#include <string>
#include <vector>

#include "capbp/topology.hpp"

namespace capbp::testing {

/// One junction J with the given inputs/outputs, one link per pair in
/// `service` and one phase per entry of `phases`.
struct MiniJunction {
    std::vector<NodeSpec> nodes;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<PhaseSpec> phases;

    NetworkTopology build() const {
        NetworkTopology t;
        t.nodes = nodes;
        for (const auto& phase : phases) {
            for (const auto& e : phase.service) {
                LinkSpec link{e.from, e.to, "J", Turn::unspecified};
                bool seen = false;
                for (const auto& l : t.links) seen = seen || (l.from == link.from && l.to == link.to);
                if (!seen) t.links.push_back(link);
            }
        }
        t.junctions.push_back({"J", inputs, outputs, phases});
        return t;
    }
};

/// a -> b through junction J with a single phase of service `mu`.
inline NetworkTopology single_link(int mu, int cap_a = 50, int cap_b = 50) {
    return MiniJunction{{{"a", cap_a, true}, {"b", cap_b, false}}, {"a"}, {"b"}, {{"p", {{"a", "b", mu}}}}}
        .build();
}

} // namespace capbp::testing
