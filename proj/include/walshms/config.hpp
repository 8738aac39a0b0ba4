#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "walshms/oracle.hpp"
#include "walshms/scan.hpp"

namespace walshms {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grid description as written in the config: either explicit values or a
/// min/max/points/spacing rule. Units are the axis' external units (Hz for
/// the detuning axes, seconds for gate_time, plain number for nbar).
struct GridSpec {
    bool explicit_values = false;
    std::vector<double> values;
    double min = 1000.0;
    double max = 40000.0;
    int points = 201;
    std::string spacing = "linear";  // or "log"

    std::vector<double> expand() const;
};

/// Human-editable mirror of GateParams + ScanSpec + OracleConfig. All
/// frequencies are cycles/s here; the single place where they are multiplied
/// by 2 pi is the to_* converters below.
struct RunConfig {
    // gate
    double omega_hz = 1470.0;
    double delta_hz = 10000.0;
    double delta_error_hz = 0.0;
    double gate_time_s = 1e-4;
    double nbar = 0.0;
    std::uint32_t walsh_index = 0;
    int ion_count = 1;
    double phi_s_rad = 0.0;
    double phi_m_rad = 0.0;

    // scan
    std::string axis = "delta";
    std::string observable = "spin_revival";
    std::string engine = "analytic";
    std::vector<std::uint32_t> walsh_indices;  // optional fan-out, one series per index
    GridSpec grid;

    // oracle
    int oracle_n_max = 0;
    double oracle_dt_init_s = 0.0;
    double oracle_tol = 1e-8;
    double thermal_weight_cutoff = 1e-6;

    // trajectory
    int trajectory_samples = 500;
};

/// Strict parse: unknown keys are rejected with their JSON path, missing keys
/// take the defaults above. Throws ConfigError with a line diagnostic on
/// malformed documents.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Canonical JSON echo of the parsed config (all defaults made explicit,
/// fixed key order). Re-parsing the echo reproduces the RunConfig exactly.
std::string canonical_json(const RunConfig& config);

GateParams to_gate_params(const RunConfig& config);
OracleConfig to_oracle_config(const RunConfig& config);
ScanSpec to_scan_spec(const RunConfig& config);

ScanAxis parse_axis(const std::string& name);
ScanEngine parse_engine(const std::string& name);
ScanObservable parse_observable(const std::string& name);

}  // namespace walshms
