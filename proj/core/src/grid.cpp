#include "capbp/grid.hpp"

#include <array>
#include <cmath>
#include <set>
#include <string>

#include "capbp/errors.hpp"

namespace capbp {

namespace {

enum Side { north = 0, east = 1, south = 2, west = 3 };
constexpr std::array<const char*, 4> kSideName{"N", "E", "S", "W"};

std::string junction_id(int r, int c) { return "J" + std::to_string(r) + "_" + std::to_string(c); }

struct GridBuilder {
    const GridSpec& spec;
    NetworkTopology topology;
    std::set<std::string> created;

    bool has_neighbor(int r, int c, int side) const {
        switch (side) {
        case north:
            return r > 0;
        case south:
            return r + 1 < spec.rows;
        case west:
            return c > 0;
        default:
            return c + 1 < spec.cols;
        }
    }

    static std::pair<int, int> neighbor(int r, int c, int side) {
        switch (side) {
        case north:
            return {r - 1, c};
        case south:
            return {r + 1, c};
        case west:
            return {r, c - 1};
        default:
            return {r, c + 1};
        }
    }

    // North/south sides lie on the vertical road of column c.
    int lanes(int r, int c, int side) const {
        const auto& pattern = (side == north || side == south) ? spec.vertical_lanes
                                                               : spec.horizontal_lanes;
        const int index = (side == north || side == south) ? c : r;
        return pattern[static_cast<std::size_t>(index) % pattern.size()];
    }

    void add_node(const std::string& id, int lanes_count, bool boundary) {
        if (!created.insert(id).second) return;
        topology.nodes.push_back({id, road_capacity(lanes_count, spec.road_length_m), boundary});
    }

    std::string input_node(int r, int c, int side) {
        const std::string here = junction_id(r, c);
        if (!has_neighbor(r, c, side)) {
            std::string id = std::string("in_") + kSideName[side] + "_" + here;
            add_node(id, lanes(r, c, side), true);
            return id;
        }
        const auto [nr, nc] = neighbor(r, c, side);
        std::string id = junction_id(nr, nc) + ">" + here;
        add_node(id, lanes(r, c, side), false);
        return id;
    }

    std::string output_node(int r, int c, int side) {
        const std::string here = junction_id(r, c);
        if (!has_neighbor(r, c, side)) {
            std::string id = std::string("out_") + kSideName[side] + "_" + here;
            add_node(id, lanes(r, c, side), false);
            return id;
        }
        const auto [nr, nc] = neighbor(r, c, side);
        std::string id = here + ">" + junction_id(nr, nc);
        add_node(id, lanes(r, c, side), false);
        return id;
    }

    void add_junction(int r, int c) {
        JunctionSpec junction;
        junction.id = junction_id(r, c);

        std::array<std::string, 4> in;
        std::array<std::string, 4> out;
        for (int side = 0; side < 4; ++side) in[side] = input_node(r, c, side);
        for (int side = 0; side < 4; ++side) out[side] = output_node(r, c, side);
        junction.inputs.assign(in.begin(), in.end());
        junction.outputs.assign(out.begin(), out.end());

        PhaseSpec a{"a", {}};
        PhaseSpec b{"b", {}};
        PhaseSpec left_ns{"c", {}};
        PhaseSpec left_ew{"d", {}};
        for (int side = 0; side < 4; ++side) {
            const bool vertical = side == north || side == south;
            const std::string& from = in[side];
            const std::string& straight = out[(side + 2) % 4];
            const std::string& right = out[(side + 3) % 4];
            const std::string& left = out[(side + 1) % 4];
            topology.links.push_back({from, straight, junction.id, Turn::straight});
            topology.links.push_back({from, right, junction.id, Turn::right});
            topology.links.push_back({from, left, junction.id, Turn::left});

            auto& through_phase = vertical ? a : b;
            through_phase.service.push_back(
                {from, straight, spec.mu_straight_per_lane * lanes(r, c, side)});
            through_phase.service.push_back({from, right, spec.mu_right});
            (vertical ? left_ns : left_ew).service.push_back({from, left, spec.mu_left_per_lane});
        }
        junction.phases = {std::move(a), std::move(b), std::move(left_ns), std::move(left_ew)};
        topology.junctions.push_back(std::move(junction));
    }
};

} // namespace

int road_capacity(int lanes, double length_m) {
    return static_cast<int>(std::floor(lanes * length_m / kVehicleSpacingM + 1e-9));
}

NetworkTopology generate_grid(const GridSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) throw ConfigError("grid dimensions must be >= 1");
    if (!(spec.road_length_m > 0.0)) throw ConfigError("grid road length must be positive");
    if (spec.vertical_lanes.empty() || spec.horizontal_lanes.empty()) {
        throw ConfigError("grid lane patterns must not be empty");
    }
    for (const int lanes : spec.vertical_lanes) {
        if (lanes < 1) throw ConfigError("grid lane counts must be >= 1");
    }
    for (const int lanes : spec.horizontal_lanes) {
        if (lanes < 1) throw ConfigError("grid lane counts must be >= 1");
    }
    if (spec.mu_straight_per_lane < 0 || spec.mu_left_per_lane < 0 || spec.mu_right < 0) {
        throw ConfigError("grid service rates must be non-negative");
    }
    if (road_capacity(1, spec.road_length_m) < 1) {
        throw ConfigError("grid roads are too short to hold a vehicle");
    }

    GridBuilder builder{spec, {}, {}};
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) builder.add_junction(r, c);
    }
    return std::move(builder.topology);
}

} // namespace capbp
