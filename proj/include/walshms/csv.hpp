#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "walshms/gate_model.hpp"

namespace walshms {

/// Shortest-round-trip decimal form with 17 significant digits, independent
/// of the global locale.
std::string format_double(double v);

struct CsvRow {
    std::string axis;
    double axis_value = 0.0;
    std::optional<double> analytic;
    std::optional<double> oracle;
    std::string status = "ok";
};

/// Header is exactly "axis,axis_value,analytic,oracle,status"; absent engine
/// values are left empty.
void write_scan_csv(std::ostream& out, const std::vector<CsvRow>& rows);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace walshms
