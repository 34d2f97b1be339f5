#include "capbp/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "capbp/errors.hpp"

namespace capbp {

std::string format_number(double value) {
    if (value == 0.0) return "0"; // folds -0
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (const char ch : text) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
    out << kTraceHeader << '\n';
    for (const auto& row : trace.rows) {
        out << row.slot << ',' << format_number(row.total_queue) << ',' << format_number(row.avg_time_spent_slots)
            << ',' << format_number(row.avg_time_spent_seconds) << ',' << format_number(row.served_flow) << ','
            << format_number(row.arrivals) << ',' << format_number(row.exits) << ',' << row.wc_violations << '\n';
    }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells) {
    out << kSweepHeader << '\n';
    for (const auto& cell : cells) {
        out << format_number(cell.multiplier) << ',' << cell.seed << ',' << csv_field(cell.controller) << ','
            << format_number(cell.mean_total_queue) << ',' << format_number(cell.final_avg_time_spent_slots) << ','
            << format_number(cell.final_avg_time_spent_seconds) << ',' << cell.total_wc_violations << '\n';
    }
}

std::vector<PressureSample> pressure_table(const PressureFunction& f, std::span<const int> capacities,
                                           int samples) {
    if (samples < 2) throw ConfigError("pressure table needs at least 2 samples per curve");
    std::vector<PressureSample> rows;
    for (const int capacity : capacities) {
        if (capacity < 1) throw ConfigError("capacity must be >= 1");
        const double limit =
            f.kind() == PressureKind::normalized ? f.params().c_infinity : static_cast<double>(capacity);
        if (capacity > limit) throw ConfigError("capacity " + std::to_string(capacity) + " exceeds C_inf");
        std::vector<double> qs;
        for (int i = 0; i < samples; ++i) qs.push_back(limit * i / (samples - 1));
        qs.push_back(static_cast<double>(capacity));
        std::sort(qs.begin(), qs.end());
        qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
        for (const double q : qs) rows.push_back({capacity, q, f(q, capacity)});
    }
    return rows;
}

void write_pressure_csv(std::ostream& out, std::span<const PressureSample> rows) {
    out << kPressureHeader << '\n';
    for (const auto& row : rows) {
        out << row.capacity << ',' << format_number(row.q) << ',' << format_number(row.p) << '\n';
    }
}

} // namespace capbp
