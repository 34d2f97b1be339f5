#pragma once

#include <vector>

#include "capbp/topology.hpp"

namespace capbp {

/// Space occupied by one queued vehicle: 5 m body plus 2.5 m minimum gap.
inline constexpr double kVehicleSpacingM = 7.5;

/// Parameters of a rows x cols grid of four-way signalized junctions.
///
/// Roads are bidirectional. Vertical roads (V1, V2, ...) are indexed by
/// column and horizontal roads (H1, H2, ...) by row; their per-direction lane
/// counts cycle through `vertical_lanes` / `horizontal_lanes`. Junctions on
/// the border get boundary entry nodes (arrivals allowed) and exit nodes
/// (sinks) on their outer sides.
struct GridSpec {
    int rows = 1;
    int cols = 1;
    double road_length_m = 150.0;
    std::vector<int> vertical_lanes{2, 1};
    std::vector<int> horizontal_lanes{1, 2};
    // Service rates per 15 s slot. These are tunable defaults, not measured
    // saturation flows.
    int mu_straight_per_lane = 5;
    int mu_left_per_lane = 3; // per approach: one dedicated left-turn lane
    int mu_right = 5;

    bool operator==(const GridSpec&) const = default;
};

/// Node capacity for a road direction: floor(lanes * length / 7.5).
int road_capacity(int lanes, double length_m);

/// Builds the grid topology. Each junction gets four phases:
///   a  straight + right turns from the north/south approaches
///   b  straight + right turns from the east/west approaches
///   c  left turns from the north/south approaches
///   d  left turns from the east/west approaches
/// Throws ConfigError on non-positive dimensions or lengths.
NetworkTopology generate_grid(const GridSpec& spec);

} // namespace capbp
