#include "capbp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <nlohmann/json.hpp>

#include "capbp/errors.hpp"

namespace capbp {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> expand_profile(const TriangularProfile& profile) {
    std::vector<double> values(static_cast<std::size_t>(std::max<std::int64_t>(profile.length, 0)));
    const double rise = profile.peak - profile.base;
    const std::int64_t last = profile.length - 1;
    for (std::int64_t t = 0; t < profile.length; ++t) {
        double fraction = 1.0;
        if (t < profile.peak_slot) {
            fraction = static_cast<double>(t) / static_cast<double>(profile.peak_slot);
        } else if (t > profile.peak_slot) {
            fraction = static_cast<double>(last - t) / static_cast<double>(last - profile.peak_slot);
        }
        values[static_cast<std::size_t>(t)] = profile.base + rise * fraction;
    }
    return values;
}

namespace {

// ---------------------------------------------------------------------------
// Decoding

class Decoder {
  public:
    std::vector<Diagnostic> errors;

    void fail(const std::string& path, const std::string& message) {
        errors.push_back({path.empty() ? "/" : path, message});
    }

    /// Checks that `j` is an object whose keys all belong to `allowed` and
    /// that every key in `required` is present.
    bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required = {}) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        bool ok = true;
        for (const auto& item : j.items()) {
            const bool known = std::any_of(allowed.begin(), allowed.end(),
                                           [&](const char* key) { return item.key() == key; });
            if (!known) {
                fail(path + "/" + item.key(), "unknown field '" + item.key() + "'");
                ok = false;
            }
        }
        for (const char* key : required) {
            if (!j.contains(key)) {
                fail(path + "/" + key, std::string("missing field '") + key + "'");
                ok = false;
            }
        }
        return ok;
    }

    bool array(const json& j, const std::string& path) {
        if (j.is_array()) return true;
        fail(path, "expected an array");
        return false;
    }

    std::string string(const json& j, const std::string& path) {
        if (j.is_string()) return j.get<std::string>();
        fail(path, "expected a string");
        return {};
    }

    double number(const json& j, const std::string& path) {
        if (j.is_number()) return j.get<double>();
        fail(path, "expected a number");
        return 0.0;
    }

    std::int64_t integer(const json& j, const std::string& path) {
        if (j.is_number_integer()) return j.get<std::int64_t>();
        fail(path, "expected an integer");
        return 0;
    }

    std::uint64_t unsigned_integer(const json& j, const std::string& path) {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        fail(path, "expected a non-negative integer");
        return 0;
    }

    int small_integer(const json& j, const std::string& path) {
        const auto value = integer(j, path);
        if (value < -1'000'000'000 || value > 1'000'000'000) {
            fail(path, "integer out of range");
            return 0;
        }
        return static_cast<int>(value);
    }

    bool boolean(const json& j, const std::string& path) {
        if (j.is_boolean()) return j.get<bool>();
        fail(path, "expected true or false");
        return false;
    }

    std::vector<std::string> strings(const json& j, const std::string& path) {
        std::vector<std::string> out;
        if (!array(j, path)) return out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string(j[i], path + "/" + std::to_string(i)));
        return out;
    }

    std::vector<int> ints(const json& j, const std::string& path) {
        std::vector<int> out;
        if (!array(j, path)) return out;
        for (std::size_t i = 0; i < j.size(); ++i) {
            out.push_back(small_integer(j[i], path + "/" + std::to_string(i)));
        }
        return out;
    }

    std::vector<double> numbers(const json& j, const std::string& path) {
        std::vector<double> out;
        if (!array(j, path)) return out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "/" + std::to_string(i)));
        return out;
    }

    NetworkTopology topology(const json& j, const std::string& path) {
        NetworkTopology t;
        if (!object(j, path, {"nodes", "links", "junctions"}, {"nodes", "links", "junctions"})) return t;
        const auto& nodes = j.at("nodes");
        if (array(nodes, path + "/nodes")) {
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const std::string p = path + "/nodes/" + std::to_string(i);
                if (!object(nodes[i], p, {"id", "C", "boundary"}, {"id", "C"})) continue;
                NodeSpec node;
                node.id = string(nodes[i].at("id"), p + "/id");
                node.capacity = small_integer(nodes[i].at("C"), p + "/C");
                if (nodes[i].contains("boundary")) node.is_boundary = boolean(nodes[i].at("boundary"), p + "/boundary");
                t.nodes.push_back(std::move(node));
            }
        }
        const auto& links = j.at("links");
        if (array(links, path + "/links")) {
            for (std::size_t i = 0; i < links.size(); ++i) {
                const std::string p = path + "/links/" + std::to_string(i);
                if (!object(links[i], p, {"from", "to", "junction", "turn"}, {"from", "to", "junction"})) continue;
                LinkSpec link;
                link.from = string(links[i].at("from"), p + "/from");
                link.to = string(links[i].at("to"), p + "/to");
                link.junction = string(links[i].at("junction"), p + "/junction");
                if (links[i].contains("turn")) {
                    const auto text = string(links[i].at("turn"), p + "/turn");
                    const auto turn = parse_turn(text);
                    if (turn) {
                        link.turn = *turn;
                    } else {
                        fail(p + "/turn", "unknown turn '" + text + "'");
                    }
                }
                t.links.push_back(std::move(link));
            }
        }
        const auto& junctions = j.at("junctions");
        if (array(junctions, path + "/junctions")) {
            for (std::size_t i = 0; i < junctions.size(); ++i) {
                const std::string p = path + "/junctions/" + std::to_string(i);
                if (!object(junctions[i], p, {"id", "inputs", "outputs", "phases"},
                            {"id", "inputs", "outputs", "phases"})) {
                    continue;
                }
                const auto& jj = junctions[i];
                JunctionSpec junction;
                junction.id = string(jj.at("id"), p + "/id");
                junction.inputs = strings(jj.at("inputs"), p + "/inputs");
                junction.outputs = strings(jj.at("outputs"), p + "/outputs");
                const auto& phases = jj.at("phases");
                if (array(phases, p + "/phases")) {
                    for (std::size_t k = 0; k < phases.size(); ++k) {
                        const std::string pp = p + "/phases/" + std::to_string(k);
                        if (!object(phases[k], pp, {"id", "mu"}, {"id", "mu"})) continue;
                        PhaseSpec phase;
                        phase.id = string(phases[k].at("id"), pp + "/id");
                        const auto& mu = phases[k].at("mu");
                        if (array(mu, pp + "/mu")) {
                            for (std::size_t e = 0; e < mu.size(); ++e) {
                                const std::string ep = pp + "/mu/" + std::to_string(e);
                                if (!object(mu[e], ep, {"from", "to", "mu"}, {"from", "to", "mu"})) continue;
                                phase.service.push_back({string(mu[e].at("from"), ep + "/from"),
                                                         string(mu[e].at("to"), ep + "/to"),
                                                         small_integer(mu[e].at("mu"), ep + "/mu")});
                            }
                        }
                        junction.phases.push_back(std::move(phase));
                    }
                }
                t.junctions.push_back(std::move(junction));
            }
        }
        return t;
    }

    GridSpec grid(const json& j, const std::string& path) {
        GridSpec g;
        if (!object(j, path,
                    {"rows", "cols", "road_length_m", "vertical_lanes", "horizontal_lanes",
                     "mu_straight_per_lane", "mu_left_per_lane", "mu_right"},
                    {"rows", "cols"})) {
            return g;
        }
        g.rows = small_integer(j.at("rows"), path + "/rows");
        g.cols = small_integer(j.at("cols"), path + "/cols");
        if (j.contains("road_length_m")) g.road_length_m = number(j.at("road_length_m"), path + "/road_length_m");
        if (j.contains("vertical_lanes")) g.vertical_lanes = ints(j.at("vertical_lanes"), path + "/vertical_lanes");
        if (j.contains("horizontal_lanes")) {
            g.horizontal_lanes = ints(j.at("horizontal_lanes"), path + "/horizontal_lanes");
        }
        if (j.contains("mu_straight_per_lane")) {
            g.mu_straight_per_lane = small_integer(j.at("mu_straight_per_lane"), path + "/mu_straight_per_lane");
        }
        if (j.contains("mu_left_per_lane")) {
            g.mu_left_per_lane = small_integer(j.at("mu_left_per_lane"), path + "/mu_left_per_lane");
        }
        if (j.contains("mu_right")) g.mu_right = small_integer(j.at("mu_right"), path + "/mu_right");
        return g;
    }

    ArrivalSection arrivals(const json& j, const std::string& path) {
        ArrivalSection a;
        if (!object(j, path, {"kind", "lambda_boundary", "lambda", "batch", "profile"})) return a;
        if (j.contains("kind")) {
            const auto kind = string(j.at("kind"), path + "/kind");
            if (kind == "poisson") {
                a.kind = ArrivalKind::poisson;
            } else if (kind == "bernoulli-batch") {
                a.kind = ArrivalKind::bernoulli_batch;
            } else if (kind == "deterministic-fluid") {
                a.kind = ArrivalKind::deterministic_fluid;
            } else {
                fail(path + "/kind", "unknown arrival kind '" + kind + "'");
            }
        }
        if (j.contains("lambda_boundary")) a.boundary_rate = number(j.at("lambda_boundary"), path + "/lambda_boundary");
        if (j.contains("lambda")) {
            const auto& rates = j.at("lambda");
            if (rates.is_object()) {
                for (const auto& item : rates.items()) {
                    a.rates[item.key()] = number(item.value(), path + "/lambda/" + item.key());
                }
            } else {
                fail(path + "/lambda", "expected an object of node -> rate");
            }
        }
        if (j.contains("batch")) a.batch = small_integer(j.at("batch"), path + "/batch");
        if (j.contains("profile")) {
            const auto& profile = j.at("profile");
            const std::string pp = path + "/profile";
            if (profile.is_array()) {
                a.profile = numbers(profile, pp);
            } else if (object(profile, pp, {"triangular"}, {"triangular"})) {
                const auto& tri = profile.at("triangular");
                const std::string tp = pp + "/triangular";
                if (object(tri, tp, {"length", "base", "peak", "peak_slot"},
                           {"length", "base", "peak", "peak_slot"})) {
                    TriangularProfile t;
                    t.length = integer(tri.at("length"), tp + "/length");
                    t.base = number(tri.at("base"), tp + "/base");
                    t.peak = number(tri.at("peak"), tp + "/peak");
                    t.peak_slot = integer(tri.at("peak_slot"), tp + "/peak_slot");
                    if (t.length < 1) fail(tp + "/length", "length must be >= 1");
                    if (t.peak_slot < 0 || t.peak_slot >= std::max<std::int64_t>(t.length, 1)) {
                        fail(tp + "/peak_slot", "peak_slot must lie in [0, length)");
                    }
                    a.profile = t;
                }
            }
        }
        return a;
    }

    RoutingSection routing(const json& j, const std::string& path) {
        RoutingSection r;
        if (!object(j, path, {"turns", "r"})) return r;
        if (j.contains("turns")) {
            const auto& t = j.at("turns");
            const std::string tp = path + "/turns";
            if (object(t, tp, {"straight", "left", "right"}, {"straight", "left", "right"})) {
                r.turns = TurnRatios{number(t.at("straight"), tp + "/straight"),
                                     number(t.at("left"), tp + "/left"),
                                     number(t.at("right"), tp + "/right")};
            }
        }
        if (j.contains("r")) {
            const auto& rows = j.at("r");
            if (!rows.is_object()) {
                fail(path + "/r", "expected an object of node -> {node -> ratio}");
                return r;
            }
            for (const auto& row : rows.items()) {
                const std::string rp = path + "/r/" + row.key();
                if (!row.value().is_object()) {
                    fail(rp, "expected an object of node -> ratio");
                    continue;
                }
                auto& out = r.ratios[row.key()];
                for (const auto& item : row.value().items()) {
                    out[item.key()] = number(item.value(), rp + "/" + item.key());
                }
            }
        }
        return r;
    }

    std::vector<CycleStep> cycle(const json& j, const std::string& path) {
        std::vector<CycleStep> steps;
        if (!array(j, path)) return steps;
        for (std::size_t i = 0; i < j.size(); ++i) {
            const std::string p = path + "/" + std::to_string(i);
            if (!object(j[i], p, {"phase", "slots"}, {"phase", "slots"})) continue;
            steps.push_back({string(j[i].at("phase"), p + "/phase"), small_integer(j[i].at("slots"), p + "/slots")});
        }
        return steps;
    }

    PressureFunction pressure(const json& j, const std::string& path) {
        if (!object(j, path, {"kind", "m", "C_inf"}, {"kind"})) return {};
        const auto text = string(j.at("kind"), path + "/kind");
        const auto kind = parse_pressure_kind(text);
        if (!kind) {
            fail(path + "/kind", "unknown pressure kind '" + text + "'");
            return {};
        }
        if (*kind == PressureKind::linear) return PressureFunction::linear();
        if (*kind == PressureKind::relative) return PressureFunction::relative();
        if (!j.contains("m") || !j.contains("C_inf")) {
            fail(path, "normalized pressure needs m and C_inf");
            return {};
        }
        PressureParams params{number(j.at("m"), path + "/m"), number(j.at("C_inf"), path + "/C_inf")};
        try {
            return PressureFunction::normalized(params);
        } catch (const ConfigError& e) {
            fail(path, e.what());
            return {};
        }
    }

    ControllerConfig controller(const json& j, const std::string& path) {
        ControllerConfig c;
        if (!object(j, path, {"kind", "pressure", "cycle", "junction_cycles", "tie_epsilon"}, {"kind"})) {
            return c;
        }
        const auto text = string(j.at("kind"), path + "/kind");
        const auto kind = parse_controller_kind(text);
        if (kind) {
            c.kind = *kind;
        } else {
            fail(path + "/kind", "unknown controller kind '" + text + "'");
        }
        if (j.contains("pressure")) c.pressure = pressure(j.at("pressure"), path + "/pressure");
        if (j.contains("cycle")) c.cycle = cycle(j.at("cycle"), path + "/cycle");
        if (j.contains("junction_cycles")) {
            const auto& jc = j.at("junction_cycles");
            if (jc.is_object()) {
                for (const auto& item : jc.items()) {
                    c.junction_cycles[item.key()] = cycle(item.value(), path + "/junction_cycles/" + item.key());
                }
            } else {
                fail(path + "/junction_cycles", "expected an object of junction -> cycle");
            }
        }
        if (j.contains("tie_epsilon")) c.tie_epsilon = number(j.at("tie_epsilon"), path + "/tie_epsilon");
        return c;
    }

    RunSettings run(const json& j, const std::string& path) {
        RunSettings r;
        if (!object(j, path, {"horizon", "seed", "mode", "slot_seconds", "derating", "cap_inflow"},
                    {"horizon"})) {
            return r;
        }
        r.horizon = integer(j.at("horizon"), path + "/horizon");
        if (j.contains("seed")) r.seed = unsigned_integer(j.at("seed"), path + "/seed");
        if (j.contains("mode")) {
            const auto mode = string(j.at("mode"), path + "/mode");
            if (mode == "integer") {
                r.mode = QueueMode::integer;
            } else if (mode == "fluid") {
                r.mode = QueueMode::fluid;
            } else {
                fail(path + "/mode", "mode must be 'integer' or 'fluid'");
            }
        }
        if (j.contains("slot_seconds")) r.slot_seconds = number(j.at("slot_seconds"), path + "/slot_seconds");
        if (j.contains("derating") && !j.at("derating").is_null()) {
            r.derating = number(j.at("derating"), path + "/derating");
        }
        if (j.contains("cap_inflow")) r.cap_inflow = boolean(j.at("cap_inflow"), path + "/cap_inflow");
        return r;
    }

    ScenarioDocument document(const json& j) {
        ScenarioDocument doc;
        if (!object(j, "", {"version", "notes", "topology", "arrivals", "routing", "controllers", "initial", "run"},
                    {"version", "topology", "controllers", "run"})) {
            return doc;
        }
        doc.version = small_integer(j.at("version"), "/version");
        if (doc.version != kSchemaVersion) {
            fail("/version", "unsupported schema version " + std::to_string(doc.version) + " (expected " +
                                 std::to_string(kSchemaVersion) + ")");
        }
        if (j.contains("notes")) doc.notes = string(j.at("notes"), "/notes");

        const auto& topo = j.at("topology");
        if (topo.is_object() && topo.contains("grid")) {
            if (object(topo, "/topology", {"grid"})) doc.topology = grid(topo.at("grid"), "/topology/grid");
        } else {
            doc.topology = topology(topo, "/topology");
        }
        if (j.contains("arrivals")) doc.arrivals = arrivals(j.at("arrivals"), "/arrivals");
        if (j.contains("routing")) doc.routing = routing(j.at("routing"), "/routing");

        const auto& controllers = j.at("controllers");
        if (!controllers.is_object()) {
            fail("/controllers", "expected an object");
        } else {
            bool has_active = false;
            for (const auto& item : controllers.items()) {
                if (item.key() == "active") {
                    doc.active_controller = string(item.value(), "/controllers/active");
                    has_active = true;
                } else {
                    doc.controllers[item.key()] = controller(item.value(), "/controllers/" + item.key());
                }
            }
            if (!has_active) fail("/controllers/active", "missing field 'active'");
        }

        if (j.contains("initial")) {
            const auto& initial = j.at("initial");
            if (array(initial, "/initial")) {
                for (std::size_t i = 0; i < initial.size(); ++i) {
                    const std::string p = "/initial/" + std::to_string(i);
                    if (!object(initial[i], p, {"from", "to", "Q"}, {"from", "to", "Q"})) continue;
                    doc.initial.push_back({string(initial[i].at("from"), p + "/from"),
                                           string(initial[i].at("to"), p + "/to"),
                                           number(initial[i].at("Q"), p + "/Q")});
                }
            }
        }
        doc.run = run(j.at("run"), "/run");
        return doc;
    }
};

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
    int line = 1;
    int column = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

// ---------------------------------------------------------------------------
// Encoding

ordered_json encode(const std::vector<CycleStep>& cycle) {
    ordered_json out = ordered_json::array();
    for (const auto& step : cycle) out.push_back({{"phase", step.phase}, {"slots", step.slots}});
    return out;
}

ordered_json encode(const PressureFunction& f) {
    ordered_json out;
    out["kind"] = to_string(f.kind());
    if (f.kind() == PressureKind::normalized) {
        out["m"] = f.params().m;
        out["C_inf"] = f.params().c_infinity;
    }
    return out;
}

ordered_json encode(const ControllerConfig& c) {
    ordered_json out;
    out["kind"] = to_string(c.kind);
    out["pressure"] = encode(c.pressure);
    if (!c.cycle.empty()) out["cycle"] = encode(c.cycle);
    if (!c.junction_cycles.empty()) {
        ordered_json jc = ordered_json::object();
        for (const auto& [id, cycle] : c.junction_cycles) jc[id] = encode(cycle);
        out["junction_cycles"] = jc;
    }
    out["tie_epsilon"] = c.tie_epsilon;
    return out;
}

ordered_json encode(const NetworkTopology& t) {
    ordered_json nodes = ordered_json::array();
    for (const auto& n : t.nodes) nodes.push_back({{"id", n.id}, {"C", n.capacity}, {"boundary", n.is_boundary}});
    ordered_json links = ordered_json::array();
    for (const auto& l : t.links) {
        ordered_json link{{"from", l.from}, {"to", l.to}, {"junction", l.junction}};
        if (l.turn != Turn::unspecified) link["turn"] = to_string(l.turn);
        links.push_back(link);
    }
    ordered_json junctions = ordered_json::array();
    for (const auto& j : t.junctions) {
        ordered_json phases = ordered_json::array();
        for (const auto& p : j.phases) {
            ordered_json mu = ordered_json::array();
            for (const auto& e : p.service) mu.push_back({{"from", e.from}, {"to", e.to}, {"mu", e.mu}});
            phases.push_back({{"id", p.id}, {"mu", mu}});
        }
        junctions.push_back({{"id", j.id}, {"inputs", j.inputs}, {"outputs", j.outputs}, {"phases", phases}});
    }
    return {{"nodes", nodes}, {"links", links}, {"junctions", junctions}};
}

ordered_json encode(const GridSpec& g) {
    return {{"rows", g.rows},
            {"cols", g.cols},
            {"road_length_m", g.road_length_m},
            {"vertical_lanes", g.vertical_lanes},
            {"horizontal_lanes", g.horizontal_lanes},
            {"mu_straight_per_lane", g.mu_straight_per_lane},
            {"mu_left_per_lane", g.mu_left_per_lane},
            {"mu_right", g.mu_right}};
}

} // namespace

ParseResult parse_scenario(std::string_view text) {
    ParseResult result;
    json root;
    try {
        root = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte);
        result.errors.push_back({"", std::string("syntax error: ") + e.what(), line, column});
        return result;
    } catch (const std::exception& e) {
        result.errors.push_back({"", std::string("syntax error: ") + e.what(), 1, 1});
        return result;
    }

    Decoder decoder;
    ScenarioDocument doc;
    try {
        doc = decoder.document(root);
    } catch (const std::exception& e) {
        decoder.fail("", e.what());
    }
    if (!decoder.errors.empty()) {
        result.errors = std::move(decoder.errors);
        return result;
    }

    try {
        auto diagnostics = validate_scenario(to_scenario(doc));
        if (!diagnostics.empty()) {
            result.errors = std::move(diagnostics);
            return result;
        }
    } catch (const std::exception& e) {
        const bool grid = std::holds_alternative<GridSpec>(doc.topology);
        result.errors.push_back({grid ? "/topology/grid" : "", e.what()});
        return result;
    }
    result.document = std::move(doc);
    return result;
}

std::string serialize(const ScenarioDocument& doc) {
    ordered_json root;
    root["version"] = doc.version;
    if (!doc.notes.empty()) root["notes"] = doc.notes;

    if (const auto* grid = std::get_if<GridSpec>(&doc.topology)) {
        root["topology"] = {{"grid", encode(*grid)}};
    } else {
        root["topology"] = encode(std::get<NetworkTopology>(doc.topology));
    }

    ordered_json arrivals;
    arrivals["kind"] = to_string(doc.arrivals.kind);
    arrivals["lambda_boundary"] = doc.arrivals.boundary_rate;
    arrivals["lambda"] = ordered_json::object();
    for (const auto& [id, rate] : doc.arrivals.rates) arrivals["lambda"][id] = rate;
    arrivals["batch"] = doc.arrivals.batch;
    if (const auto* tri = std::get_if<TriangularProfile>(&doc.arrivals.profile)) {
        arrivals["profile"] = {{"triangular",
                                {{"length", tri->length},
                                 {"base", tri->base},
                                 {"peak", tri->peak},
                                 {"peak_slot", tri->peak_slot}}}};
    } else {
        arrivals["profile"] = std::get<std::vector<double>>(doc.arrivals.profile);
    }
    root["arrivals"] = arrivals;

    ordered_json routing = ordered_json::object();
    if (doc.routing.turns) {
        routing["turns"] = {{"straight", doc.routing.turns->straight},
                            {"left", doc.routing.turns->left},
                            {"right", doc.routing.turns->right}};
    }
    routing["r"] = ordered_json::object();
    for (const auto& [from, row] : doc.routing.ratios) {
        routing["r"][from] = ordered_json::object();
        for (const auto& [to, ratio] : row) routing["r"][from][to] = ratio;
    }
    root["routing"] = routing;

    ordered_json controllers;
    controllers["active"] = doc.active_controller;
    for (const auto& [name, config] : doc.controllers) controllers[name] = encode(config);
    root["controllers"] = controllers;

    ordered_json initial = ordered_json::array();
    for (const auto& q : doc.initial) initial.push_back({{"from", q.from}, {"to", q.to}, {"Q", q.count}});
    root["initial"] = initial;

    ordered_json run;
    run["horizon"] = doc.run.horizon;
    run["seed"] = doc.run.seed;
    run["mode"] = to_string(doc.run.mode);
    run["slot_seconds"] = doc.run.slot_seconds;
    if (doc.run.derating) run["derating"] = *doc.run.derating;
    run["cap_inflow"] = doc.run.cap_inflow;
    root["run"] = run;

    return root.dump(2) + "\n";
}

Scenario to_scenario(const ScenarioDocument& doc) {
    Scenario s;
    s.notes = doc.notes;
    if (const auto* grid = std::get_if<GridSpec>(&doc.topology)) {
        s.topology = generate_grid(*grid);
    } else {
        s.topology = std::get<NetworkTopology>(doc.topology);
    }

    s.arrivals.kind = doc.arrivals.kind;
    s.arrivals.boundary_rate = doc.arrivals.boundary_rate;
    s.arrivals.rates = doc.arrivals.rates;
    s.arrivals.batch = doc.arrivals.batch;
    if (const auto* tri = std::get_if<TriangularProfile>(&doc.arrivals.profile)) {
        s.arrivals.profile = expand_profile(*tri);
    } else {
        s.arrivals.profile = std::get<std::vector<double>>(doc.arrivals.profile);
    }

    if (doc.routing.turns) {
        const auto& turns = *doc.routing.turns;
        for (const auto& link : s.topology.links) {
            switch (link.turn) {
            case Turn::straight:
                s.routing.ratios[link.from][link.to] = turns.straight;
                break;
            case Turn::left:
                s.routing.ratios[link.from][link.to] = turns.left;
                break;
            case Turn::right:
                s.routing.ratios[link.from][link.to] = turns.right;
                break;
            case Turn::unspecified:
                break;
            }
        }
    }
    for (const auto& [from, row] : doc.routing.ratios) {
        for (const auto& [to, ratio] : row) s.routing.ratios[from][to] = ratio;
    }

    s.controllers = doc.controllers;
    s.active_controller = doc.active_controller;
    s.initial = doc.initial;
    s.run = doc.run;
    return s;
}

ScenarioDocument to_document(const Scenario& s) {
    ScenarioDocument doc;
    doc.notes = s.notes;
    doc.topology = s.topology;
    doc.arrivals.kind = s.arrivals.kind;
    doc.arrivals.boundary_rate = s.arrivals.boundary_rate;
    doc.arrivals.rates = s.arrivals.rates;
    doc.arrivals.batch = s.arrivals.batch;
    doc.arrivals.profile = s.arrivals.profile;
    doc.routing.ratios = s.routing.ratios;
    doc.controllers = s.controllers;
    doc.active_controller = s.active_controller;
    doc.initial = s.initial;
    doc.run = s.run;
    return doc;
}

} // namespace capbp
