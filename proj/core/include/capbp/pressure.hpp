#pragma once

#include <optional>
#include <string>
#include <vector>

namespace capbp {

enum class PressureKind { linear, relative, normalized };

const char* to_string(PressureKind kind);
std::optional<PressureKind> parse_pressure_kind(const std::string& text);

/// Shape parameters of the normalized pressure. Every node capacity must
/// stay at or below c_infinity, and m must exceed 1.
struct PressureParams {
    double m = 2.0;
    double c_infinity = 200.0;

    bool operator==(const PressureParams&) const = default;
};

/// Map from (queue length, capacity) to a node pressure.
///
///   linear      P = q
///   relative    P = q / c
///   normalized  P = min(1, (q/Cinf + (2 - c/Cinf) (q/c)^m) / (1 + (q/c)^(m-1)))
///
/// The normalized form starts with slope 1/Cinf for every capacity, is
/// convex on [0, c], and equals 1 from q = c on. For c = Cinf it reduces to
/// q / Cinf.
class PressureFunction {
  public:
    PressureFunction() = default;

    static PressureFunction linear() { return PressureFunction(PressureKind::linear, {}); }
    static PressureFunction relative() { return PressureFunction(PressureKind::relative, {}); }
    /// Throws ConfigError unless m > 1 and c_infinity > 0.
    static PressureFunction normalized(PressureParams params);

    PressureKind kind() const { return kind_; }
    const PressureParams& params() const { return params_; }

    /// Throws ConfigError when c < 1, or c > Cinf for the normalized kind.
    double operator()(double q, double c) const;

    bool operator==(const PressureFunction&) const = default;

  private:
    PressureFunction(PressureKind kind, PressureParams params) : kind_(kind), params_(params) {}

    PressureKind kind_ = PressureKind::linear;
    PressureParams params_{};
};

inline double evaluate(const PressureFunction& f, double q, double c) { return f(q, c); }

struct SlopeSample {
    double capacity;
    double slope;
};

struct FairnessReport {
    std::vector<SlopeSample> slopes;
    /// Expected common slope: 1/Cinf (normalized), 1 (linear), otherwise
    /// the first measured slope.
    double reference = 0.0;
    bool fair = false;
};

/// Forward-difference slope dP/dq at q = 0 for each capacity. The family is
/// fair when every slope is within `rel_tol` of the reference. The default
/// step is 1e-8 * Cinf for the normalized kind (small enough that the
/// (q/c)^m term stays below 1e-4 relative for m = 2) and 1e-6 otherwise.
FairnessReport check_fairness(const PressureFunction& f, const std::vector<double>& capacities,
                              std::optional<double> step = std::nullopt, double rel_tol = 1e-4);

struct ConvexityReport {
    bool convex = false;
    /// Smallest second difference P(x-h) - 2P(x) + P(x+h) seen on the grid.
    double worst_second_difference = 0.0;
};

/// Samples P at `samples` uniform points of [0, c] and checks that every
/// discrete second difference is >= -tolerance.
ConvexityReport check_convexity(const PressureFunction& f, double c, int samples = 1000,
                                double tolerance = 1e-9);

} // namespace capbp
