#include "capbp/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "capbp/errors.hpp"

namespace capbp {

const char* to_string(PressureKind kind) {
    switch (kind) {
    case PressureKind::linear:
        return "linear";
    case PressureKind::relative:
        return "relative";
    case PressureKind::normalized:
        break;
    }
    return "normalized";
}

std::optional<PressureKind> parse_pressure_kind(const std::string& text) {
    if (text == "linear") return PressureKind::linear;
    if (text == "relative") return PressureKind::relative;
    if (text == "normalized") return PressureKind::normalized;
    return std::nullopt;
}

PressureFunction PressureFunction::normalized(PressureParams params) {
    if (!(params.m > 1.0)) throw ConfigError("normalized pressure needs m > 1");
    if (!(params.c_infinity > 0.0)) throw ConfigError("normalized pressure needs C_inf > 0");
    return PressureFunction(PressureKind::normalized, params);
}

double PressureFunction::operator()(double q, double c) const {
    if (!(c >= 1.0)) throw ConfigError("pressure evaluated with capacity below 1");
    q = std::max(q, 0.0);
    switch (kind_) {
    case PressureKind::linear:
        return q;
    case PressureKind::relative:
        return q / c;
    case PressureKind::normalized:
        break;
    }

    const double c_inf = params_.c_infinity;
    if (c > c_inf) {
        std::ostringstream msg;
        msg << "capacity " << c << " exceeds C_inf " << c_inf;
        throw ConfigError(msg.str());
    }
    // At and above capacity the clamped value is exactly 1.
    if (q >= c) return 1.0;
    const double occupancy = q / c;
    const double m = params_.m;
    const double numerator = q / c_inf + (2.0 - c / c_inf) * std::pow(occupancy, m);
    const double denominator = 1.0 + std::pow(occupancy, m - 1.0);
    return std::min(1.0, numerator / denominator);
}

FairnessReport check_fairness(const PressureFunction& f, const std::vector<double>& capacities,
                              std::optional<double> step, double rel_tol) {
    const bool normalized = f.kind() == PressureKind::normalized;
    const double h = step.value_or(normalized ? 1e-8 * f.params().c_infinity : 1e-6);

    FairnessReport report;
    for (const double c : capacities) {
        report.slopes.push_back({c, (f(h, c) - f(0.0, c)) / h});
    }
    if (normalized) {
        report.reference = 1.0 / f.params().c_infinity;
    } else if (f.kind() == PressureKind::linear) {
        report.reference = 1.0;
    } else if (!report.slopes.empty()) {
        report.reference = report.slopes.front().slope;
    }

    report.fair = std::all_of(report.slopes.begin(), report.slopes.end(), [&](const SlopeSample& s) {
        return std::abs(s.slope - report.reference) <= rel_tol * std::abs(report.reference);
    });
    return report;
}

ConvexityReport check_convexity(const PressureFunction& f, double c, int samples, double tolerance) {
    ConvexityReport report{true, std::numeric_limits<double>::infinity()};
    if (samples < 3) return report;
    std::vector<double> values(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) values[i] = f(c * i / (samples - 1), c);
    for (int i = 1; i + 1 < samples; ++i) {
        const double second = values[i - 1] - 2.0 * values[i] + values[i + 1];
        report.worst_second_difference = std::min(report.worst_second_difference, second);
    }
    report.convex = report.worst_second_difference >= -tolerance;
    return report;
}

} // namespace capbp
