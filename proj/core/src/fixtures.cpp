#include "capbp/fixtures.hpp"

#include <string>

namespace capbp {

namespace {

ControllerConfig fixed_cycle(std::vector<CycleStep> cycle) {
    ControllerConfig c;
    c.kind = ControllerKind::fixed_cycle;
    c.cycle = std::move(cycle);
    return c;
}

ControllerConfig back_pressure() {
    ControllerConfig c;
    c.kind = ControllerKind::back_pressure;
    c.pressure = PressureFunction::linear();
    return c;
}

ControllerConfig capacity_aware(double m, double c_infinity) {
    ControllerConfig c;
    c.kind = ControllerKind::capacity_aware;
    c.pressure = PressureFunction::normalized({m, c_infinity});
    return c;
}

} // namespace

Scenario fixture_theorem1() {
    Scenario s;
    s.notes = "Single-slot witness: linear pressures pick the blocked movement a->b.";
    auto& t = s.topology;
    t.nodes = {{"a", 200, true}, {"c", 200, true}, {"b", 50, false}, {"d", 200, false}, {"x", 50, false}};
    t.links = {{"a", "b", "J_mid", Turn::unspecified},
               {"c", "d", "J_mid", Turn::unspecified},
               {"b", "x", "J_b", Turn::unspecified},
               {"d", "x", "J_b", Turn::unspecified},
               {"x", "b", "J_x", Turn::unspecified}};
    t.junctions = {
        {"J_mid", {"a", "c"}, {"b", "d"}, {{"p_ab", {{"a", "b", 1}}}, {"p_cd", {{"c", "d", 1}}}}},
        {"J_b", {"b", "d"}, {"x"}, {{"go", {{"b", "x", 1}, {"d", "x", 1}}}}},
        {"J_x", {"x"}, {"b"}, {{"go", {{"x", "b", 1}}}}},
    };
    s.routing.ratios = {{"b", {{"x", 1.0}}}, {"d", {{"x", 1.0}}}, {"x", {{"b", 1.0}}}};

    auto fc = fixed_cycle({{"p_cd", 1}, {"p_ab", 1}});
    fc.junction_cycles = {{"J_b", {{"go", 1}}}, {"J_x", {{"go", 1}}}};
    s.controllers = {{"fc", fc}, {"bp", back_pressure()}, {"bpc", capacity_aware(4.0, 500.0)}};
    s.active_controller = "bpc";
    s.initial = {{"a", "b", 60.0}, {"c", "d", 10.0}, {"b", "x", 50.0}, {"d", "x", 20.0}, {"x", "b", 50.0}};
    s.run.horizon = 1;
    return s;
}

Scenario fixture_deadlock_ring() {
    Scenario s;
    s.notes = "Three-junction ring with full ring nodes and long external queues.";
    constexpr int kSize = 3;
    auto& t = s.topology;
    auto e = [](int i) { return "e" + std::to_string(i); };
    auto n = [](int i) { return "n" + std::to_string(i % kSize); };
    auto sink = [](int i) { return "s" + std::to_string(i); };
    for (int i = 0; i < kSize; ++i) {
        t.nodes.push_back({e(i), 200, true});
        t.nodes.push_back({n(i), 50, false});
        t.nodes.push_back({sink(i), 200, false});
    }
    for (int i = 0; i < kSize; ++i) {
        const std::string junction = "J" + std::to_string(i);
        t.links.push_back({e(i), n(i + 1), junction, Turn::unspecified});
        t.links.push_back({n(i), n(i + 1), junction, Turn::unspecified});
        t.links.push_back({n(i), sink(i), junction, Turn::unspecified});
        t.junctions.push_back({junction,
                               {e(i), n(i)},
                               {n(i + 1), sink(i)},
                               {{"A", {{e(i), n(i + 1), 1}}}, {"B", {{n(i), sink(i), 1}, {n(i), n(i + 1), 1}}}}});
        s.routing.ratios[n(i)] = {{n(i + 1), 0.8}, {sink(i), 0.2}};
        s.routing.ratios[e(i)] = {{n(i + 1), 1.0}};
        s.initial.push_back({e(i), n(i + 1), 120.0});
        s.initial.push_back({n(i), n(i + 1), 40.0});
        s.initial.push_back({n(i), sink(i), 10.0});
    }
    s.controllers = {{"fc", fixed_cycle({{"A", 1}, {"B", 1}})},
                     {"bp", back_pressure()},
                     {"bpc", capacity_aware(2.0, 200.0)}};
    s.active_controller = "bpc";
    s.run.horizon = 60;
    return s;
}

ScenarioDocument grid4x4_peak_document() {
    ScenarioDocument doc;
    doc.notes = "4x4 grid, heavier demand from the north, triangular peak over 720 slots.";
    GridSpec grid;
    grid.rows = 4;
    grid.cols = 4;
    // A dedicated left-turn lane discharging like a through lane.
    grid.mu_left_per_lane = 5;
    doc.topology = grid;

    doc.arrivals.kind = ArrivalKind::poisson;
    doc.arrivals.boundary_rate = 1.25;
    for (int c = 0; c < grid.cols; ++c) doc.arrivals.rates["in_N_J0_" + std::to_string(c)] = 5.0;
    doc.arrivals.profile = TriangularProfile{720, 0.4, 1.0, 360};

    doc.routing.turns = TurnRatios{0.7, 0.1, 0.1};

    doc.controllers = {{"fc", fixed_cycle({{"a", 1}, {"c", 1}, {"b", 1}, {"d", 1}})},
                       {"bp", back_pressure()},
                       {"bpc", capacity_aware(2.0, 200.0)}};
    doc.active_controller = "bpc";
    doc.run.horizon = 720;
    doc.run.seed = 1;
    return doc;
}

Scenario fixture_grid4x4_peak() { return to_scenario(grid4x4_peak_document()); }

std::vector<FixtureFile> canonical_fixtures() {
    return {
        {"theorem1",
         "// One slot. At J_mid the linear controller weighs a->b at 60 - 50 = 10 and\n"
         "// c->d at 0, so it serves a->b into the full node b and moves nothing while\n"
         "// c->d could have moved. With normalized pressures both weights are 0 and\n"
         "// the tie goes to the phase that can move.\n" +
             serialize(to_document(fixture_theorem1()))},
        {"deadlock_ring",
         "// Ring nodes n_i hold 50/50 (40 toward n_i+1, 10 toward the sink s_i) and\n"
         "// the external queues e_i hold 120 toward n_i+1. Phase A serves e_i -> n_i+1,\n"
         "// phase B serves n_i -> s_i and n_i -> n_i+1.\n" +
             serialize(to_document(fixture_deadlock_ring()))},
        {"grid4x4_peak",
         "// 4x4 grid with 150 m roads; lane counts alternate 2/1 by column and 1/2 by\n"
         "// row. Service per slot: 5 per lane straight, 5 for the left-turn lane, 5 right.\n"
         "// Turn ratios 0.7/0.1/0.1, the remaining 0.1 leaves the network. Entries get\n"
         "// 1.25 vehicles/slot (5 on the northern side) at the peak of a triangular\n"
         "// profile; multiplier 1 is heavy peak load, 0.2 is light traffic.\n" +
             serialize(grid4x4_peak_document())},
    };
}

} // namespace capbp
