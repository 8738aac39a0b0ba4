#pragma once

#include <optional>
#include <string>
#include <vector>

#include "walshms/gate_model.hpp"
#include "walshms/oracle.hpp"

namespace walshms {

enum class ScanAxis { delta, delta_error, nbar, gate_time };
enum class ScanEngine { analytic, oracle, both };
enum class ScanObservable { spin_revival, bell_fidelity, alpha_magnitude };

std::string to_string(ScanAxis axis);
std::string to_string(ScanEngine engine);
std::string to_string(ScanObservable obs);

/// One sweep: vary a single axis of the base parameters over the grid and
/// evaluate the observable with the chosen engine(s). Grid values are in
/// internal units (rad/s for the detuning axes, seconds for gate_time).
struct ScanSpec {
    GateParams base;
    ScanAxis axis = ScanAxis::delta;
    std::vector<double> grid;
    ScanEngine engine = ScanEngine::analytic;
    ScanObservable observable = ScanObservable::spin_revival;
    OracleConfig oracle;
};

void validate(const ScanSpec& spec);

struct ScanPoint {
    double axis_value = 0.0;
    std::optional<double> analytic;
    std::optional<double> oracle;
    std::string status = "ok";  // per-point failures are recorded, never fatal
};

struct ScanMetadata {
    std::string engine_version;
    double oracle_tol = 0.0;
    std::string timestamp;  // never serialized into the CSV
};

struct ScanResult {
    ScanSpec spec;
    std::vector<ScanPoint> values;
    ScanMetadata metadata;
};

ScanResult run_scan(const ScanSpec& spec);

/// Fit of log(1 - F1) against log(delta_error) at the planned closure point
/// for W(2^n - 1). The grid is in units of delta_error * gate_time and must be
/// log-spaced inside [1e-3, 1e-1]. The Rabi rate is rescaled internally so the
/// sampled infidelities land inside [1e-12, 1e-3]; points outside that window
/// (floating-point floor below, non-asymptotic regime above) are excluded.
struct SlopeFit {
    double slope = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
};
SlopeFit suppression_slope(unsigned n, const std::vector<double>& delta_error_grid);

/// Width (in units of delta * gate_time / 2 pi) of the contiguous detuning
/// interval around the planned gate point where the two-ion fidelity stays at
/// or above the threshold. Edges located by bisection to 1e-6 relative.
struct WindowResult {
    double width = 0.0;
    std::string note;  // non-empty when the threshold was never reached
};
WindowResult fidelity_window(unsigned n, double threshold, double nbar);

}  // namespace walshms
