#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "capbp/engine.hpp"
#include "capbp/pressure.hpp"

namespace capbp {

inline constexpr const char* kTraceHeader =
    "slot,total_queue,avg_time_spent_slots,avg_time_spent_seconds,served_flow,arrivals,exits,wc_violations";
inline constexpr const char* kSweepHeader =
    "multiplier,seed,controller,mean_total_queue,final_avg_time_spent_slots,"
    "final_avg_time_spent_seconds,total_wc_violations";
inline constexpr const char* kPressureHeader = "capacity,q,P";

/// Shortest round-trip decimal form; never uses the locale.
std::string format_number(double value);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(const std::string& text);

void write_trace_csv(std::ostream& out, const SimulationTrace& trace);
void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);

struct PressureSample {
    int capacity;
    double q;
    double p;
};

/// `samples` evenly spaced q values on [0, C_inf] per capacity (linear and
/// relative pressures use [0, capacity]); q = capacity itself is always
/// included. Throws ConfigError for samples < 2 or a capacity outside
/// [1, C_inf].
std::vector<PressureSample> pressure_table(const PressureFunction& f, std::span<const int> capacities,
                                           int samples);
void write_pressure_csv(std::ostream& out, std::span<const PressureSample> rows);

} // namespace capbp
