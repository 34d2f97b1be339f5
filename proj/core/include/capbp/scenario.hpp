#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "capbp/engine.hpp"
#include "capbp/grid.hpp"

namespace capbp {

inline constexpr int kSchemaVersion = 1;

/// Linear ramp from `base` at slot 0 up to `peak` at `peak_slot`, then back
/// down to `base` at slot length-1.
struct TriangularProfile {
    std::int64_t length = 1;
    double base = 1.0;
    double peak = 1.0;
    std::int64_t peak_slot = 0;

    bool operator==(const TriangularProfile&) const = default;
};

std::vector<double> expand_profile(const TriangularProfile& profile);

struct ArrivalSection {
    ArrivalKind kind = ArrivalKind::poisson;
    double boundary_rate = 0.0;
    std::map<std::string, double> rates;
    int batch = 1;
    std::variant<std::vector<double>, TriangularProfile> profile;

    bool operator==(const ArrivalSection&) const = default;
};

/// Ratios applied to every link carrying the matching turn tag.
struct TurnRatios {
    double straight = 0.0;
    double left = 0.0;
    double right = 0.0;

    bool operator==(const TurnRatios&) const = default;
};

/// Turn ratios (if any) are applied first; explicit r entries override
/// them link by link.
struct RoutingSection {
    std::optional<TurnRatios> turns;
    std::map<std::string, std::map<std::string, double>> ratios;

    bool operator==(const RoutingSection&) const = default;
};

/// In-memory form of a scenario file. The topology is either inline or a
/// grid-generator directive; see docs/scenario-format.md.
struct ScenarioDocument {
    int version = kSchemaVersion;
    std::string notes;
    std::variant<NetworkTopology, GridSpec> topology;
    ArrivalSection arrivals;
    RoutingSection routing;
    std::map<std::string, ControllerConfig> controllers;
    std::string active_controller;
    std::vector<InitialQueue> initial;
    RunSettings run;

    bool operator==(const ScenarioDocument&) const = default;
};

struct ParseResult {
    std::optional<ScenarioDocument> document;
    std::vector<Diagnostic> errors;

    bool ok() const { return document.has_value(); }
};

/// Parses and validates a scenario document. Never throws: syntax errors
/// carry line/column, semantic errors a field path. `//` and `/* */`
/// comments are accepted.
ParseResult parse_scenario(std::string_view text);

/// Canonical JSON text of a document (comments are not preserved).
std::string serialize(const ScenarioDocument& document);

/// Expands grid directives, turn ratios and profile shapes. Throws
/// ConfigError if the grid directive is invalid.
Scenario to_scenario(const ScenarioDocument& document);

/// Inline document equivalent to a resolved scenario.
ScenarioDocument to_document(const Scenario& scenario);

struct FixtureFile {
    std::string name;
    std::string text;
};

/// theorem1, deadlock_ring and grid4x4_peak as scenario files, each with a
/// comment header describing how it was built.
std::vector<FixtureFile> canonical_fixtures();

} // namespace capbp
