#include <gtest/gtest.h>

#include <sstream>

#include "capbp/csv.hpp"
#include "capbp/errors.hpp"
#include "capbp/fixtures.hpp"

namespace capbp {
namespace {

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(3.0), "3");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
    EXPECT_EQ(std::stod(format_number(2.0 / 7.0)), 2.0 / 7.0);
}

TEST(CsvField, QuotesOnlyWhenNeeded) {
    EXPECT_EQ(csv_field("bp"), "bp");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(TraceCsv, HeaderAndOneRowPerSlot) {
    const auto trace = run(fixture_deadlock_ring(), "bpc");
    std::ostringstream out;
    write_trace_csv(out, trace);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kTraceHeader);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (rows == 1) EXPECT_EQ(line.rfind("0,", 0), 0u) << line;
    }
    EXPECT_EQ(rows, 60);
}

TEST(SweepCsv, Header) {
    SweepCell cell{0.5, 3, "fc", 1.5, 2.0, 30.0, 0};
    std::ostringstream out;
    write_sweep_csv(out, std::span<const SweepCell>(&cell, 1));
    EXPECT_EQ(out.str(), std::string(kSweepHeader) + "\n0.5,3,fc,1.5,2,30,0\n");
}

TEST(PressureTable, NormalizedCurves) {
    const auto f = PressureFunction::normalized({4.0, 500.0});
    const std::vector<int> caps{50, 100, 500};
    const auto rows = pressure_table(f, caps, 11);
    bool hit50 = false;
    for (const auto& r : rows) {
        if (r.q == 0.0) EXPECT_EQ(r.p, 0.0);
        if (r.q >= r.capacity) EXPECT_EQ(r.p, 1.0);
        if (r.capacity == 500) EXPECT_NEAR(r.p, r.q / 500.0, 1e-12);
        if (r.capacity == 50 && r.q == 50.0) hit50 = true;
    }
    EXPECT_TRUE(hit50);
    // q = 50 and q = 100 already lie on the 50-step grid.
    EXPECT_EQ(rows.size(), 33u);
    EXPECT_EQ(pressure_table(f, caps, 4).size(), 4u * 3 + 2);
}

TEST(PressureTable, LinearUsesOwnRange) {
    const std::vector<int> caps{10};
    const auto rows = pressure_table(PressureFunction::linear(), caps, 3);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].q, 5.0);
    EXPECT_EQ(rows[2].p, 10.0);
    std::ostringstream out;
    write_pressure_csv(out, rows);
    EXPECT_EQ(out.str(), "capacity,q,P\n10,0,0\n10,5,5\n10,10,10\n");
}

TEST(PressureTable, RejectsBadInput) {
    const auto f = PressureFunction::normalized({2.0, 200.0});
    const std::vector<int> too_big{201};
    const std::vector<int> ok{50};
    EXPECT_THROW(pressure_table(f, too_big, 10), ConfigError);
    EXPECT_THROW(pressure_table(f, ok, 1), ConfigError);
}

} // namespace
} // namespace capbp
