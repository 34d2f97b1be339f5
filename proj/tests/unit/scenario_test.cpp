#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "capbp/fixtures.hpp"
#include "capbp/scenario.hpp"

namespace capbp {
namespace {

constexpr const char* kMinimal = R"({
  "version": 1,
  "topology": {
    "nodes": [{"id": "a", "C": 10, "boundary": true}, {"id": "b", "C": 10}],
    "links": [{"from": "a", "to": "b", "junction": "J"}],
    "junctions": [{"id": "J", "inputs": ["a"], "outputs": ["b"],
                   "phases": [{"id": "p", "mu": [{"from": "a", "to": "b", "mu": 1}]}]}]
  },
  "controllers": {"active": "bp", "bp": {"kind": "back-pressure"}},
  "run": {"horizon": 10}
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    if (pos != std::string::npos) text.replace(pos, from.size(), to);
    return text;
}

const Diagnostic* find_path(const ParseResult& r, const std::string& path) {
    for (const auto& d : r.errors) {
        if (d.path == path) return &d;
    }
    return nullptr;
}

TEST(Parse, MinimalDocument) {
    const auto r = parse_scenario(kMinimal);
    ASSERT_TRUE(r.ok()) << (r.errors.empty() ? "" : format_diagnostic(r.errors[0]));
    const auto s = to_scenario(*r.document);
    EXPECT_EQ(s.topology.nodes.size(), 2u);
    EXPECT_FALSE(s.topology.nodes[1].is_boundary);
    EXPECT_EQ(s.run.horizon, 10);
    EXPECT_EQ(s.run.seed, 1u);
    EXPECT_EQ(s.arrivals.boundary_rate, 0.0);
    EXPECT_TRUE(validate_scenario(s).empty());
}

TEST(Parse, AcceptsComments) {
    const std::string text = std::string("// header\n/* block */\n") + kMinimal;
    EXPECT_TRUE(parse_scenario(text).ok());
}

TEST(Parse, RoutingSumAboveOneNamesTheNode) {
    const auto text = replace(kMinimal, R"("run")", R"("routing": {"r": {"a": {"b": 1.2}}}, "run")");
    const auto r = parse_scenario(text);
    ASSERT_FALSE(r.ok());
    const auto* d = find_path(r, "/routing/r/a");
    ASSERT_NE(d, nullptr);
    EXPECT_NE(d->message.find("a"), std::string::npos);
}

TEST(Parse, SyntaxErrorCarriesLineAndColumn) {
    const std::string text = "{\n  \"version\": 1,\n  \"run\": {\"horizon\": }\n}";
    const auto r = parse_scenario(text);
    ASSERT_FALSE(r.ok());
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_EQ(r.errors[0].line, 3);
    EXPECT_EQ(r.errors[0].column, 22);
}

TEST(Parse, UnknownFieldIsRejectedWithPath) {
    const auto r = parse_scenario(replace(kMinimal, R"("horizon": 10)", R"("horizon": 10, "speed": 3)"));
    ASSERT_FALSE(r.ok());
    EXPECT_NE(find_path(r, "/run/speed"), nullptr);
}

TEST(Parse, TypeErrorsAndMissingFieldsCarryPaths) {
    auto r = parse_scenario(replace(kMinimal, R"("C": 10, "boundary")", R"("C": "ten", "boundary")"));
    ASSERT_FALSE(r.ok());
    EXPECT_NE(find_path(r, "/topology/nodes/0/C"), nullptr);

    r = parse_scenario(replace(kMinimal, R"("run": {"horizon": 10})", R"("run": {"seed": 3})"));
    ASSERT_FALSE(r.ok());
    EXPECT_NE(find_path(r, "/run/horizon"), nullptr);

    r = parse_scenario(replace(kMinimal, R"("version": 1)", R"("version": 2)"));
    ASSERT_FALSE(r.ok());
    EXPECT_NE(find_path(r, "/version"), nullptr);

    r = parse_scenario(replace(kMinimal, R"("kind": "back-pressure")", R"("kind": "greedy")"));
    ASSERT_FALSE(r.ok());
    EXPECT_NE(find_path(r, "/controllers/bp/kind"), nullptr);
}

TEST(Parse, SemanticErrorsComeFromValidation) {
    const auto r = parse_scenario(replace(kMinimal, R"("C": 10, "boundary")", R"("C": 0, "boundary")"));
    ASSERT_FALSE(r.ok());
    EXPECT_NE(find_path(r, "/topology/nodes/0/C"), nullptr);
}

TEST(Parse, NeverThrowsOnGarbage) {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<int> byte(0, 255);
    const std::string base = kMinimal;
    for (int trial = 0; trial < 500; ++trial) {
        std::string text = base;
        for (int i = 0; i < 3; ++i) {
            text[std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(gen)] = static_cast<char>(byte(gen));
        }
        EXPECT_NO_THROW(parse_scenario(text));
    }
    EXPECT_FALSE(parse_scenario("").ok());
    EXPECT_FALSE(parse_scenario("[]").ok());
}

TEST(RoundTrip, Theorem1Document) {
    const auto doc = to_document(fixture_theorem1());
    const auto r = parse_scenario(serialize(doc));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(*r.document, doc);
    EXPECT_EQ(to_scenario(*r.document), fixture_theorem1());
}

TEST(RoundTrip, GridDocumentKeepsDirectives) {
    const auto doc = grid4x4_peak_document();
    const auto r = parse_scenario(serialize(doc));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(*r.document, doc);
    EXPECT_TRUE(std::holds_alternative<GridSpec>(r.document->topology));
    EXPECT_TRUE(std::holds_alternative<TriangularProfile>(r.document->arrivals.profile));
}

TEST(RoundTrip, FuzzedDocuments) {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Scenario s;
        const int inputs = std::uniform_int_distribution<int>(1, 3)(gen);
        const int outputs = std::uniform_int_distribution<int>(1, 3)(gen);
        JunctionSpec j{"J", {}, {}, {}};
        for (int i = 0; i < inputs; ++i) {
            const std::string id = "in" + std::to_string(i);
            s.topology.nodes.push_back({id, std::uniform_int_distribution<int>(1, 200)(gen), unit(gen) < 0.5});
            j.inputs.push_back(id);
        }
        for (int o = 0; o < outputs; ++o) {
            const std::string id = "out" + std::to_string(o);
            s.topology.nodes.push_back({id, std::uniform_int_distribution<int>(1, 200)(gen), false});
            j.outputs.push_back(id);
        }
        const int phases = std::uniform_int_distribution<int>(1, 4)(gen);
        for (int p = 0; p < phases; ++p) j.phases.push_back({"p" + std::to_string(p), {}});
        for (const auto& in : j.inputs) {
            double left = 1.0;
            for (const auto& out : j.outputs) {
                s.topology.links.push_back({in, out, "J", Turn::unspecified});
                j.phases[std::uniform_int_distribution<int>(0, phases - 1)(gen)].service.push_back(
                    {in, out, std::uniform_int_distribution<int>(1, 9)(gen)});
                const double r = left * unit(gen);
                s.routing.ratios[in][out] = r;
                left -= r;
            }
        }
        s.topology.junctions.push_back(j);
        s.arrivals.boundary_rate = unit(gen) * 3;
        s.arrivals.profile = {unit(gen), unit(gen), 0.1};
        ControllerConfig bpc;
        bpc.kind = ControllerKind::capacity_aware;
        bpc.pressure = PressureFunction::normalized({1.0 + unit(gen) * 3, 200.0 + unit(gen)});
        bpc.tie_epsilon = unit(gen) * 1e-6;
        s.controllers = {{"bpc", bpc}, {"bp", ControllerConfig{}}};
        s.active_controller = unit(gen) < 0.5 ? "bp" : "bpc";
        s.run.horizon = std::uniform_int_distribution<int>(1, 1000)(gen);
        s.run.seed = gen();
        s.run.slot_seconds = 1 + unit(gen) * 20;
        if (unit(gen) < 0.5) s.run.derating = 0.5 + unit(gen) / 2;
        s.initial = {{"in0", "out0", static_cast<double>(std::uniform_int_distribution<int>(0, 30)(gen))}};
        ASSERT_TRUE(validate_scenario(s).empty()) << trial;

        const auto doc = to_document(s);
        const auto first = parse_scenario(serialize(doc));
        ASSERT_TRUE(first.ok()) << trial << ": " << format_diagnostic(first.errors[0]);
        EXPECT_EQ(*first.document, doc) << trial;
        const auto second = parse_scenario(serialize(*first.document));
        ASSERT_TRUE(second.ok());
        EXPECT_EQ(*second.document, *first.document);
        EXPECT_EQ(to_scenario(*second.document), s);
    }
}

TEST(Profile, TriangularRamp) {
    const auto v = expand_profile({5, 0.2, 1.0, 2});
    ASSERT_EQ(v.size(), 5u);
    EXPECT_DOUBLE_EQ(v[0], 0.2);
    EXPECT_DOUBLE_EQ(v[1], 0.6);
    EXPECT_DOUBLE_EQ(v[2], 1.0);
    EXPECT_DOUBLE_EQ(v[3], 0.6);
    EXPECT_DOUBLE_EQ(v[4], 0.2);
    EXPECT_EQ(expand_profile({1, 0.5, 2.0, 0}), std::vector<double>{2.0});
}

TEST(Profile, BadTriangleIsRejected) {
    const auto text = replace(kMinimal, R"("run")",
                              R"("arrivals": {"profile": {"triangular": {"length": 4, "base": 0, "peak": 1, "peak_slot": 4}}}, "run")");
    const auto r = parse_scenario(text);
    ASSERT_FALSE(r.ok());
    EXPECT_NE(find_path(r, "/arrivals/profile/triangular/peak_slot"), nullptr);
}

TEST(Routing, TurnRatiosThenExplicitOverrides) {
    ScenarioDocument doc = grid4x4_peak_document();
    const auto topology = generate_grid(std::get<GridSpec>(doc.topology));
    const std::string from = "J0_0>J0_1";
    std::string straight;
    for (const auto& l : topology.links) {
        if (l.from == from && l.turn == Turn::straight) straight = l.to;
    }
    ASSERT_FALSE(straight.empty());
    doc.routing.ratios[from][straight] = 0.5;
    const auto s = to_scenario(doc);
    int checked = 0;
    for (const auto& l : topology.links) {
        if (l.from != from) continue;
        const double r = s.routing.ratios.at(from).at(l.to);
        if (l.turn == Turn::straight) EXPECT_DOUBLE_EQ(r, 0.5);
        if (l.turn == Turn::left) EXPECT_DOUBLE_EQ(r, 0.1);
        if (l.turn == Turn::right) EXPECT_DOUBLE_EQ(r, 0.1);
        ++checked;
    }
    EXPECT_EQ(checked, 3);
    for (const auto& l : topology.links) {
        if (l.from == "in_N_J0_0" && l.turn == Turn::straight) {
            EXPECT_DOUBLE_EQ(s.routing.ratios.at(l.from).at(l.to), 0.7);
        }
    }
}

TEST(Routing, BadGridDirectiveIsAPositionedError) {
    ScenarioDocument doc = grid4x4_peak_document();
    std::get<GridSpec>(doc.topology).rows = 0;
    const auto r = parse_scenario(serialize(doc));
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.errors[0].path, "/topology/grid");
}

TEST(CanonicalFixtures, ParseToTheEngineFixtures) {
    const auto files = canonical_fixtures();
    ASSERT_EQ(files.size(), 3u);
    for (const auto& f : files) {
        EXPECT_EQ(f.text.rfind("//", 0), 0u) << f.name;
        const auto r = parse_scenario(f.text);
        ASSERT_TRUE(r.ok()) << f.name;
        const auto s = to_scenario(*r.document);
        if (f.name == "theorem1") EXPECT_EQ(s, fixture_theorem1());
        if (f.name == "deadlock_ring") EXPECT_EQ(s, fixture_deadlock_ring());
        if (f.name == "grid4x4_peak") EXPECT_EQ(s, fixture_grid4x4_peak());
    }
}

TEST(CanonicalFixtures, RepositoryCopiesAreCurrent) {
    for (const auto& f : canonical_fixtures()) {
        std::ifstream in(std::string(CAPBP_SOURCE_DIR) + "/fixtures/" + f.name + ".json", std::ios::binary);
        ASSERT_TRUE(in) << f.name;
        std::ostringstream text;
        text << in.rdbuf();
        EXPECT_EQ(text.str(), f.text) << f.name << " is stale; regenerate with `capbp fixtures`";
    }
}

} // namespace
} // namespace capbp
