#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "walshms/config.hpp"
#include "walshms/csv.hpp"
#include "walshms/svg.hpp"

namespace {

using namespace walshms;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEngine = 3;

constexpr double kTwoPi = 2.0 * M_PI;

// CSV axis values are reported in the config's units: Hz for the detuning
// axes, seconds / plain numbers otherwise.
double display_value(ScanAxis axis, double internal) {
    return (axis == ScanAxis::delta || axis == ScanAxis::delta_error) ? internal / kTwoPi
                                                                      : internal;
}

bool write_file(const std::string& path, const std::string& content, std::string& err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err = "cannot open " + path + " for writing";
        return false;
    }
    out << content;
    out.flush();
    if (!out) {
        err = "failed writing " + path;
        return false;
    }
    return true;
}

int cmd_scan(const std::string& config_path, const std::string& csv_path,
             const std::string& svg_path, const std::string& engine_override, bool echo_config) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!engine_override.empty()) {
            parse_engine(engine_override);
            cfg.engine = engine_override;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    if (echo_config) {
        std::cout << canonical_json(cfg);
        return kExitOk;
    }

    std::vector<std::uint32_t> indices = cfg.walsh_indices;
    if (indices.empty()) indices.push_back(cfg.walsh_index);
    const bool fan_out = indices.size() > 1;

    std::vector<CsvRow> rows;
    std::vector<SvgSeries> series;
    std::size_t points_with_values = 0;
    std::size_t total_points = 0;

    try {
        const ScanSpec base_spec = to_scan_spec(cfg);
        for (const std::uint32_t k : indices) {
            ScanSpec spec = base_spec;
            spec.base.walsh_index = k;
            const ScanResult result = run_scan(spec);

            std::string axis_label = to_string(spec.axis);
            if (fan_out) axis_label += "#k=" + std::to_string(k);

            SvgSeries analytic_series{fan_out ? "k=" + std::to_string(k) : "analytic", {}};
            SvgSeries oracle_series{fan_out ? "k=" + std::to_string(k) + " oracle" : "oracle", {}};
            for (const ScanPoint& pt : result.values) {
                CsvRow row;
                row.axis = axis_label;
                row.axis_value = display_value(spec.axis, pt.axis_value);
                row.analytic = pt.analytic;
                row.oracle = pt.oracle;
                row.status = pt.status;
                rows.push_back(row);
                ++total_points;
                if (pt.analytic || pt.oracle) ++points_with_values;
                if (pt.analytic) analytic_series.points.emplace_back(row.axis_value, *pt.analytic);
                if (pt.oracle) oracle_series.points.emplace_back(row.axis_value, *pt.oracle);
            }
            if (!analytic_series.points.empty()) series.push_back(std::move(analytic_series));
            if (!oracle_series.points.empty()) series.push_back(std::move(oracle_series));
        }
    } catch (const std::exception& e) {
        std::cerr << "scan failed: " << e.what() << "\n";
        return kExitEngine;
    }

    if (total_points > 0 && points_with_values == 0) {
        std::cerr << "scan failed: no grid point produced a value\n";
        return kExitEngine;
    }

    std::string err;
    if (!csv_path.empty()) {
        std::ostringstream buf;
        write_scan_csv(buf, rows);
        if (!write_file(csv_path, buf.str(), err)) {
            std::cerr << err << "\n";
            return kExitConfig;
        }
    }
    if (!svg_path.empty()) {
        const std::string plot = render_line_plot(
            "scan: " + cfg.observable, cfg.axis + " (config units)", cfg.observable, series);
        if (!write_file(svg_path, plot, err)) {
            std::cerr << err << "\n";
            return kExitConfig;
        }
    }
    return kExitOk;
}

int cmd_verify(unsigned order) {
    bool all_ok = true;
    std::printf("%-28s %-22s %s\n", "check", "residual", "result");
    for (unsigned n = 1; n <= order; ++n) {
        for (unsigned l = 0; l <= n; ++l) {
            const double residual = verify_identity(n, l);
            const bool ok = residual <= 1e-12;
            all_ok = all_ok && ok;
            std::printf("identity n=%-2u l=%-2u          %-22.3e %s\n", n, l, residual,
                        ok ? "pass" : "FAIL");
        }
    }
    bool ortho_ok = true;
    for (std::uint32_t j = 0; j <= 31 && ortho_ok; ++j)
        for (std::uint32_t k = 0; k <= 31 && ortho_ok; ++k) {
            const auto [num, log2_den] = walsh_product_integral(j, k);
            const bool expect_one = j == k;
            ortho_ok = expect_one ? (num == 1 && log2_den == 0) : (num == 0);
        }
    std::printf("%-28s %-22s %s\n", "orthonormality j,k<=31", "exact", ortho_ok ? "pass" : "FAIL");
    all_ok = all_ok && ortho_ok;
    return all_ok ? kExitOk : 1;
}

int cmd_trajectory(const std::string& config_path, const std::string& csv_path,
                   const std::string& svg_path, bool echo_config) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    if (echo_config) {
        std::cout << canonical_json(cfg);
        return kExitOk;
    }
    Trajectory traj;
    try {
        traj = trajectory(to_gate_params(cfg), static_cast<std::size_t>(cfg.trajectory_samples));
    } catch (const std::exception& e) {
        std::cerr << "trajectory failed: " << e.what() << "\n";
        return kExitEngine;
    }
    std::string err;
    if (!csv_path.empty()) {
        std::ostringstream buf;
        write_trajectory_csv(buf, traj);
        if (!write_file(csv_path, buf.str(), err)) {
            std::cerr << err << "\n";
            return kExitConfig;
        }
    }
    if (!svg_path.empty()) {
        SvgSeries up{"alpha_up", {}}, down{"alpha_down", {}};
        for (const auto& s : traj.samples) {
            up.points.emplace_back(s.alpha_up.real(), s.alpha_up.imag());
            down.points.emplace_back(s.alpha_down.real(), s.alpha_down.imag());
        }
        const std::string plot =
            render_line_plot("phase-space trajectory", "Re alpha", "Im alpha", {up, down});
        if (!write_file(svg_path, plot, err)) {
            std::cerr << err << "\n";
            return kExitConfig;
        }
    }
    return kExitOk;
}

int cmd_plan(unsigned order, double omega_hz) {
    if (!(omega_hz > 0.0)) {
        std::cerr << "plan: --omega-hz must be > 0\n";
        return kExitConfig;
    }
    try {
        const GatePlan plan = plan_gate(order, kTwoPi * omega_hz);
        std::printf("walsh_index = %u\n", (1u << order) - 1u);
        std::printf("gate_time_s = %s\n", format_double(plan.gate_time).c_str());
        std::printf("delta_hz = %s\n", format_double(plan.delta / kTwoPi).c_str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "plan failed: " << e.what() << "\n";
        return kExitEngine;
    }
}

int cmd_slope(unsigned order, int points, double grid_min, double grid_max) {
    try {
        std::vector<double> grid;
        grid.reserve(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i)
            grid.push_back(grid_min * std::pow(grid_max / grid_min,
                                               static_cast<double>(i) / (points - 1)));
        const SlopeFit fit = suppression_slope(order, grid);
        std::printf("slope = %s\n", format_double(fit.slope).c_str());
        std::printf("r_squared = %s\n", format_double(fit.r_squared).c_str());
        std::printf("points_used = %d\n", fit.points_used);
        std::printf("expected = %u\n", 2 * order + 2);
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "slope: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "slope failed: " << e.what() << "\n";
        return kExitEngine;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Walsh-modulated spin-dependent-force gate toolkit.\n"
        "Config frequencies are in Hz (cycles/s) and are converted to angular\n"
        "units internally; times are in seconds."};
    app.require_subcommand(1);

    std::string config_path, csv_path, svg_path, engine_override;
    bool echo_config = false;
    unsigned order = 6;
    double omega_hz = 1470.0;
    int points = 25;
    double grid_min = 1e-3, grid_max = 1e-1;

    CLI::App* scan = app.add_subcommand("scan", "Run a parameter sweep and emit CSV/SVG");
    scan->add_option("--config", config_path, "JSON config path")->required();
    scan->add_option("--csv", csv_path, "CSV output path");
    scan->add_option("--svg", svg_path, "SVG line-plot output path");
    scan->add_option("--engine", engine_override, "analytic|oracle|both (overrides config)");
    scan->add_flag("--echo-config", echo_config, "Print the canonical config and exit");

    CLI::App* verify = app.add_subcommand("verify", "Check the Walsh integral identities");
    verify->add_option("--order", order, "Largest order n to verify")->check(CLI::Range(1, 10));

    CLI::App* traj = app.add_subcommand("trajectory", "Emit the phase-space trajectory");
    traj->add_option("--config", config_path, "JSON config path")->required();
    traj->add_option("--csv", csv_path, "CSV output path");
    traj->add_option("--svg", svg_path, "SVG output path");
    traj->add_flag("--echo-config", echo_config, "Print the canonical config and exit");

    CLI::App* plan = app.add_subcommand("plan", "Gate time and detuning for W(2^n-1)");
    plan->add_option("--order", order, "Walsh order n")->required()->check(CLI::Range(0, 19));
    plan->add_option("--omega-hz", omega_hz, "Sideband Rabi rate, Hz");

    CLI::App* slope = app.add_subcommand("slope", "Infidelity suppression-order fit");
    slope->add_option("--order", order, "Walsh order n")->required()->check(CLI::Range(0, 10));
    slope->add_option("--points", points, "Grid points")->check(CLI::Range(8, 1000));
    slope->add_option("--min", grid_min, "Smallest delta_error * gate_time");
    slope->add_option("--max", grid_max, "Largest delta_error * gate_time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (scan->parsed()) return cmd_scan(config_path, csv_path, svg_path, engine_override,
                                        echo_config);
    if (verify->parsed()) return cmd_verify(order);
    if (traj->parsed()) return cmd_trajectory(config_path, csv_path, svg_path, echo_config);
    if (plan->parsed()) return cmd_plan(order, omega_hz);
    if (slope->parsed()) return cmd_slope(order, points, grid_min, grid_max);
    return kExitConfig;
}
