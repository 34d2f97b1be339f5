#include <gtest/gtest.h>

#include <random>

#include "capbp/control.hpp"
#include "capbp/errors.hpp"
#include "capbp/fixtures.hpp"
#include "capbp/grid.hpp"
#include "support.hpp"

namespace capbp {
namespace {

// Middle junction of the witness: inputs {a, c}, outputs {b, d}.
JunctionObservation witness_observation(double c_a = 200, double c_c = 200, double c_d = 200) {
    JunctionObservation obs;
    obs.junction = "J_mid";
    obs.input_queue = {60, 10};
    obs.input_capacity = {c_a, c_c};
    obs.output_queue = {50, 20};
    obs.output_capacity = {50, c_d};
    obs.movements = {{0, 0, true}, {1, 1, true}};
    obs.phase_ids = {"p_ab", "p_cd"};
    obs.service = {{1, 0}, {0, 1}};
    return obs;
}

ControllerConfig bp() { return ControllerConfig{}; }

ControllerConfig bpc(double m, double c_inf) {
    ControllerConfig c;
    c.kind = ControllerKind::capacity_aware;
    c.pressure = PressureFunction::normalized({m, c_inf});
    return c;
}

JunctionObservation two_movement_obs(double qa, double ca, double qb, double cb, bool occupied) {
    JunctionObservation obs;
    obs.input_queue = {qa};
    obs.input_capacity = {ca};
    obs.output_queue = {qb};
    obs.output_capacity = {cb};
    obs.movements = {{0, 0, occupied}};
    obs.phase_ids = {"p"};
    obs.service = {{1}};
    return obs;
}

TEST(Weights, BothFullGivesZeroWeight) {
    const auto w = compute_weights(two_movement_obs(50, 50, 60, 60, true), PressureFunction::normalized({2, 200}));
    EXPECT_EQ(w.input_pressure[0], 1.0);
    EXPECT_EQ(w.output_pressure[0], 1.0);
    EXPECT_EQ(w.weight[0], 0.0);
}

TEST(Weights, UnoccupiedMovementHasZeroWeight) {
    const auto w = compute_weights(two_movement_obs(40, 50, 0, 50, false), PressureFunction::linear());
    EXPECT_EQ(w.weight[0], 0.0);
}

TEST(Weights, DifferenceOfPressures) {
    // Relative pressures 0.6 and 0.2.
    const auto w = compute_weights(two_movement_obs(30, 50, 10, 50, true), PressureFunction::relative());
    EXPECT_DOUBLE_EQ(w.weight[0], 0.4);
    const auto reverse = compute_weights(two_movement_obs(10, 50, 30, 50, true), PressureFunction::relative());
    EXPECT_EQ(reverse.weight[0], 0.0);
}

TEST(Select, WitnessUnderLinearPressures) {
    const auto obs = witness_observation();
    const auto weights = compute_weights(obs, PressureFunction::linear());
    EXPECT_EQ(phase_objectives(obs, weights), (std::vector<double>{10, 0}));
    const auto d = select_phase(obs, weights, bp());
    EXPECT_EQ(d.phase_id, "p_ab");
    EXPECT_FALSE(d.tie_break_used);
    EXPECT_FALSE(phase_can_move(obs, 0));
    EXPECT_TRUE(phase_can_move(obs, 1));
}

TEST(Select, WitnessUnderNormalizedPressures) {
    const auto obs = witness_observation();
    const auto config = bpc(4, 500);
    const auto ex = explain_junction(obs, config);
    EXPECT_EQ(ex.weights.output_pressure[0], 1.0);
    EXPECT_EQ(ex.weights.weight[0], 0.0);
    EXPECT_EQ(ex.weights.weight[1], 0.0);
    EXPECT_EQ(ex.ties, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(ex.decision.phase_id, "p_cd");
    EXPECT_TRUE(ex.decision.tie_break_used);
}

TEST(Select, SinglePhaseIsAlwaysChosen) {
    const auto obs = two_movement_obs(0, 50, 50, 50, false);
    EXPECT_EQ(select_phase(obs, compute_weights(obs, PressureFunction::linear()), bp()).phase, 0u);
}

TEST(Select, TieWithoutMovablePhaseTakesLowestIndex) {
    auto obs = witness_observation();
    obs.movements[1].occupied = false;
    const auto config = bpc(4, 500);
    const auto d = select_phase(obs, compute_weights(obs, config.pressure), config);
    EXPECT_EQ(d.phase, 0u);
    EXPECT_FALSE(d.tie_break_used);
}

TEST(Select, TieEpsilonGroupsNearlyEqualObjectives) {
    EXPECT_EQ(tie_set(std::vector<double>{1.0, 1.0 - 1e-12, 0.5}, 1e-9), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(tie_set(std::vector<double>{1.0, 1.0 - 1e-6}, 1e-9), (std::vector<std::size_t>{0}));
}

TEST(FixedCycle, WalksTheProgram) {
    const std::vector<CycleStep> four{{"a", 1}, {"c", 1}, {"b", 1}, {"d", 1}};
    EXPECT_EQ(fixed_cycle_decide(four, 0), "a");
    EXPECT_EQ(fixed_cycle_decide(four, 5), "c");
    const std::vector<CycleStep> uneven{{"a", 2}, {"c", 1}};
    EXPECT_EQ(fixed_cycle_decide(uneven, 1), "a");
    EXPECT_EQ(fixed_cycle_decide(uneven, 2), "c");
    EXPECT_EQ(fixed_cycle_decide(uneven, 3), "a");
    EXPECT_THROW(fixed_cycle_decide(std::vector<CycleStep>{}, 0), ConfigError);
}

Network grid(int rows, int cols) {
    GridSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    return Network::build(generate_grid(spec));
}

QueueState random_state(const Network& net, std::mt19937_64& gen) {
    QueueState s(net.link_count(), net.node_count());
    std::uniform_int_distribution<int> q(0, 15);
    for (LinkIndex l = 0; l < net.link_count(); ++l) s.add(l, 0, q(gen));
    return s;
}

TEST(DecideAll, EmptyNetworkPicksLowestIndex) {
    const auto net = grid(2, 2);
    const QueueState s(net.link_count(), net.node_count());
    for (const auto& config : {bp(), bpc(2, 200)}) {
        for (const auto& d : decide_all(s, net, std::span(&config, 1), 0)) EXPECT_EQ(d.phase, 0u);
    }
}

TEST(DecideAll, DecisionsAreLocal) {
    // Two junctions that share no node decide as they would alone.
    NetworkTopology t;
    t.nodes = {{"a", 50, true}, {"b", 50, false}, {"c", 50, true}, {"d", 50, false}, {"e", 50, true}, {"f", 50, false}};
    t.links = {{"a", "b", "J", Turn::unspecified}, {"c", "d", "J", Turn::unspecified},
               {"e", "f", "K", Turn::unspecified}};
    t.junctions = {{"J", {"a", "c"}, {"b", "d"}, {{"x", {{"a", "b", 1}}}, {"y", {{"c", "d", 2}}}}},
                   {"K", {"e"}, {"f"}, {{"z", {{"e", "f", 1}}}}}};
    const auto net = Network::build(t);
    const auto alone = Network::build(testing::MiniJunction{{{"a", 50, true}, {"b", 50, false}, {"c", 50, true}, {"d", 50, false}},
                                                            {"a", "c"},
                                                            {"b", "d"},
                                                            {{"x", {{"a", "b", 1}}}, {"y", {{"c", "d", 2}}}}}
                                          .build());
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> q(0, 40);
    const auto config = bpc(2, 200);
    for (int trial = 0; trial < 200; ++trial) {
        QueueState s(net.link_count(), net.node_count());
        QueueState s_alone(alone.link_count(), alone.node_count());
        for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"c", "d"}}) {
            const int v = q(gen);
            s.add(*net.find_link(*net.find_node(from), *net.find_node(to)), 0, v);
            s_alone.add(*alone.find_link(*alone.find_node(from), *alone.find_node(to)), 0, v);
        }
        s.add(*net.find_link(*net.find_node("e"), *net.find_node("f")), 0, q(gen));
        const auto joint = decide_all(s, net, std::span(&config, 1), trial);
        const auto single = decide_all(s_alone, alone, std::span(&config, 1), trial);
        EXPECT_EQ(joint[0].phase, single[0].phase);
    }
}

TEST(DecideAll, FixedCycleIgnoresState) {
    const auto net = grid(2, 2);
    ControllerConfig fc;
    fc.kind = ControllerKind::fixed_cycle;
    fc.cycle = {{"a", 1}, {"c", 1}, {"b", 1}, {"d", 1}};
    std::mt19937_64 gen(9);
    for (std::int64_t k = 0; k < 12; ++k) {
        const auto first = decide_all(random_state(net, gen), net, std::span(&fc, 1), k);
        const auto second = decide_all(random_state(net, gen), net, std::span(&fc, 1), k);
        for (std::size_t j = 0; j < first.size(); ++j) {
            EXPECT_EQ(first[j].phase, second[j].phase);
            EXPECT_EQ(first[j].phase_id, fc.cycle[k % 4].phase);
        }
    }
}

TEST(DecideAll, JunctionCycleOverridesAndConfigCount) {
    const auto s = fixture_theorem1();
    const auto net = Network::build(s.topology);
    const QueueState state(net.link_count(), net.node_count());
    const auto& fc = s.controllers.at("fc");
    const auto d = decide_all(state, net, std::span(&fc, 1), 0);
    EXPECT_EQ(d[0].phase_id, "p_cd");
    EXPECT_EQ(d[1].phase_id, "go");
    const std::vector<ControllerConfig> two(2, bp());
    EXPECT_THROW(decide_all(state, net, two, 0), ConfigError);
    const std::vector<ControllerConfig> per_junction(net.junction_count(), bp());
    EXPECT_EQ(decide_all(state, net, per_junction, 0).size(), net.junction_count());
}

TEST(Audit, WitnessFlagsLinearOnly) {
    const auto obs = witness_observation();
    EXPECT_TRUE(violates_work_conservation(obs, 0.0));
    EXPECT_FALSE(violates_work_conservation(obs, 1.0));
}

TEST(Audit, EmptyJunctionIsNotAViolation) {
    auto obs = witness_observation();
    for (auto& m : obs.movements) m.occupied = false;
    EXPECT_FALSE(violates_work_conservation(obs, 0.0));
}

TEST(Audit, NetworkLevelOnWitness) {
    const auto s = fixture_theorem1();
    const auto net = Network::build(s.topology);
    QueueState state(net.link_count(), net.node_count());
    for (const auto& q : s.initial) {
        state.add(*net.find_link(*net.find_node(q.from), *net.find_node(q.to)), 0, q.count);
    }
    for (const auto& [name, expected] : std::vector<std::pair<std::string, bool>>{{"bp", true}, {"bpc", false}}) {
        const auto& config = s.controllers.at(name);
        const auto decisions = decide_all(state, net, std::span(&config, 1), 0);
        const auto flows = compute_flows(state, net, phase_indices(decisions));
        const auto flags = work_conservation_audit(state, net, decisions, flows);
        EXPECT_EQ(flags[0], expected) << name;
        EXPECT_FALSE(flags[1]);
        EXPECT_FALSE(flags[2]);
    }
}

TEST(ControllerKind, NamesRoundTrip) {
    for (const auto k : {ControllerKind::fixed_cycle, ControllerKind::back_pressure, ControllerKind::capacity_aware}) {
        EXPECT_EQ(parse_controller_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_controller_kind("greedy").has_value());
}

} // namespace
} // namespace capbp
