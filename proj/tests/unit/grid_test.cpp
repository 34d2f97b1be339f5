#include <gtest/gtest.h>

#include <set>

#include "capbp/errors.hpp"
#include "capbp/grid.hpp"

namespace capbp {
namespace {

const NodeSpec* find(const NetworkTopology& t, const std::string& id) {
    for (const auto& n : t.nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

TEST(Grid, RoadCapacityUsesVehicleSpacing) {
    EXPECT_EQ(road_capacity(1, 150.0), 20);
    EXPECT_EQ(road_capacity(2, 150.0), 40);
    EXPECT_EQ(road_capacity(1, 100.0), 13);
}

TEST(Grid, SingleJunctionOneLane) {
    GridSpec spec;
    spec.vertical_lanes = {1};
    spec.horizontal_lanes = {1};
    const auto t = generate_grid(spec);
    ASSERT_EQ(t.junctions.size(), 1u);
    EXPECT_EQ(t.nodes.size(), 8u);
    int boundary = 0;
    for (const auto& n : t.nodes) {
        EXPECT_EQ(n.capacity, 20) << n.id;
        boundary += n.is_boundary;
    }
    EXPECT_EQ(boundary, 4);
    EXPECT_TRUE(validate_topology(t).empty());
    EXPECT_EQ(t.junctions[0].phases.size(), 4u);
    EXPECT_EQ(t.links.size(), 12u);
}

TEST(Grid, TwoByTwoHasBothDirectionsOfInternalRoads) {
    GridSpec spec;
    spec.rows = 2;
    spec.cols = 2;
    const auto t = generate_grid(spec);
    EXPECT_EQ(t.junctions.size(), 4u);
    for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
             {"J0_0", "J0_1"}, {"J0_0", "J1_0"}, {"J0_1", "J1_1"}, {"J1_0", "J1_1"}}) {
        EXPECT_NE(find(t, a + ">" + b), nullptr) << a << ">" << b;
        EXPECT_NE(find(t, b + ">" + a), nullptr) << b << ">" << a;
    }
    EXPECT_TRUE(validate_topology(t).empty());
}

TEST(Grid, FourByFourAlternatingLanes) {
    GridSpec spec;
    spec.rows = 4;
    spec.cols = 4;
    const auto t = generate_grid(spec);
    EXPECT_TRUE(validate_topology(t).empty());
    EXPECT_EQ(t.junctions.size(), 16u);
    // Column 0 carries a two-lane vertical road, column 1 a single-lane one.
    EXPECT_EQ(find(t, "J0_0>J1_0")->capacity, 40);
    EXPECT_EQ(find(t, "J0_1>J1_1")->capacity, 20);
    // Row 0 is single-lane, row 1 two-lane.
    EXPECT_EQ(find(t, "J0_0>J0_1")->capacity, 20);
    EXPECT_EQ(find(t, "J1_0>J1_1")->capacity, 40);
    EXPECT_TRUE(find(t, "in_N_J0_2")->is_boundary);
    EXPECT_FALSE(find(t, "out_S_J3_1")->is_boundary);
}

TEST(Grid, PhasesFollowTheFourPhasePlan) {
    GridSpec spec;
    spec.vertical_lanes = {2};
    spec.horizontal_lanes = {1};
    const auto t = generate_grid(spec);
    const auto& phases = t.junctions[0].phases;
    ASSERT_EQ(phases.size(), 4u);
    auto mu = [&](std::size_t p, const std::string& from, const std::string& to) {
        for (const auto& e : phases[p].service) {
            if (e.from == from && e.to == to) return e.mu;
        }
        return 0;
    };
    EXPECT_EQ(mu(0, "in_N_J0_0", "out_S_J0_0"), 10); // straight, two lanes
    EXPECT_EQ(mu(0, "in_N_J0_0", "out_W_J0_0"), 5);  // right
    EXPECT_EQ(mu(1, "in_E_J0_0", "out_W_J0_0"), 5);  // straight, one lane
    EXPECT_EQ(mu(2, "in_N_J0_0", "out_E_J0_0"), 3);  // left
    EXPECT_EQ(mu(3, "in_W_J0_0", "out_N_J0_0"), 3);
    EXPECT_EQ(mu(0, "in_N_J0_0", "out_E_J0_0"), 0);  // left not in phase a
    // No U-turn links exist.
    for (const auto& l : t.links) {
        EXPECT_NE(l.from.substr(3), l.to.substr(4)) << l.from << "->" << l.to;
    }
}

TEST(Grid, LinksCarryTurnTags) {
    const auto t = generate_grid(GridSpec{});
    std::multiset<Turn> turns;
    for (const auto& l : t.links) turns.insert(l.turn);
    EXPECT_EQ(turns.count(Turn::straight), 4u);
    EXPECT_EQ(turns.count(Turn::left), 4u);
    EXPECT_EQ(turns.count(Turn::right), 4u);
}

TEST(Grid, Deterministic) {
    GridSpec spec;
    spec.rows = 3;
    spec.cols = 2;
    EXPECT_EQ(generate_grid(spec), generate_grid(spec));
}

TEST(Grid, RejectsBadDimensions) {
    GridSpec spec;
    spec.rows = 0;
    EXPECT_THROW(generate_grid(spec), ConfigError);
    spec.rows = 1;
    spec.road_length_m = 0.0;
    EXPECT_THROW(generate_grid(spec), ConfigError);
    spec.road_length_m = 5.0;
    EXPECT_THROW(generate_grid(spec), ConfigError);
}

} // namespace
} // namespace capbp
