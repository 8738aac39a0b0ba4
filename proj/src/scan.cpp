#include "walshms/scan.hpp"

#include <cmath>
#include <ctime>
#include <stdexcept>

#include "walshms/parallel.hpp"

namespace walshms {

namespace {

constexpr const char* kEngineVersion = "walshms 1.0.0";

GateParams with_axis(const GateParams& base, ScanAxis axis, double value) {
    GateParams p = base;
    switch (axis) {
        case ScanAxis::delta: p.delta = value; break;
        case ScanAxis::delta_error: p.delta_error = value; break;
        case ScanAxis::nbar: p.nbar = value; break;
        case ScanAxis::gate_time: p.gate_time = value; break;
    }
    return p;
}

double analytic_value(const GateParams& p, ScanObservable obs) {
    switch (obs) {
        case ScanObservable::spin_revival: return fidelity_one_ion(p);
        case ScanObservable::bell_fidelity: return fidelity_two_ion(p);
        case ScanObservable::alpha_magnitude: return std::abs(alpha_k(p));
    }
    throw std::logic_error("unknown observable");
}

double oracle_value(const GateParams& p, const OracleConfig& config, ScanObservable obs) {
    switch (obs) {
        case ScanObservable::spin_revival:
            return thermal_fidelity(p, config, Observable::spin_revival);
        case ScanObservable::bell_fidelity:
            return thermal_fidelity(p, config, Observable::bell_fidelity);
        case ScanObservable::alpha_magnitude: return alpha_magnitude(p, config);
    }
    throw std::logic_error("unknown observable");
}

std::string iso_timestamp() {
    char buf[32];
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

std::string to_string(ScanAxis axis) {
    switch (axis) {
        case ScanAxis::delta: return "delta";
        case ScanAxis::delta_error: return "delta_error";
        case ScanAxis::nbar: return "nbar";
        case ScanAxis::gate_time: return "gate_time";
    }
    return "?";
}

std::string to_string(ScanEngine engine) {
    switch (engine) {
        case ScanEngine::analytic: return "analytic";
        case ScanEngine::oracle: return "oracle";
        case ScanEngine::both: return "both";
    }
    return "?";
}

std::string to_string(ScanObservable obs) {
    switch (obs) {
        case ScanObservable::spin_revival: return "spin_revival";
        case ScanObservable::bell_fidelity: return "bell_fidelity";
        case ScanObservable::alpha_magnitude: return "alpha_magnitude";
    }
    return "?";
}

void validate(const ScanSpec& spec) {
    if (spec.grid.empty()) throw std::invalid_argument("ScanSpec: grid must be non-empty");
    for (std::size_t i = 1; i < spec.grid.size(); ++i) {
        const bool increasing = spec.grid[1] > spec.grid[0];
        if (increasing ? spec.grid[i] <= spec.grid[i - 1] : spec.grid[i] >= spec.grid[i - 1])
            throw std::invalid_argument("ScanSpec: grid must be strictly monotone");
    }
    validate(spec.oracle);
}

ScanResult run_scan(const ScanSpec& spec) {
    validate(spec);
    ScanResult result;
    result.spec = spec;
    result.metadata.engine_version = kEngineVersion;
    result.metadata.oracle_tol = spec.oracle.tol;
    result.metadata.timestamp = iso_timestamp();
    result.values.resize(spec.grid.size());

    const bool want_analytic =
        spec.engine == ScanEngine::analytic || spec.engine == ScanEngine::both;
    const bool want_oracle = spec.engine == ScanEngine::oracle || spec.engine == ScanEngine::both;

    parallel_for(spec.grid.size(), [&](std::size_t i) {
        ScanPoint& point = result.values[i];
        point.axis_value = spec.grid[i];
        const GateParams p = with_axis(spec.base, spec.axis, spec.grid[i]);
        std::string status;
        if (want_analytic) {
            try {
                point.analytic = analytic_value(p, spec.observable);
            } catch (const std::exception& e) {
                status += std::string("analytic: ") + e.what();
            }
        }
        if (want_oracle) {
            try {
                point.oracle = oracle_value(p, spec.oracle, spec.observable);
            } catch (const std::exception& e) {
                if (!status.empty()) status += "; ";
                status += std::string("oracle: ") + e.what();
            }
        }
        point.status = status.empty() ? "ok" : status;
    });
    return result;
}

SlopeFit suppression_slope(unsigned n, const std::vector<double>& delta_error_grid) {
    if (n > 10) throw std::invalid_argument("suppression_slope: order too large");
    if (delta_error_grid.size() < 8)
        throw std::invalid_argument("suppression_slope: need at least 8 grid points");
    for (std::size_t i = 0; i < delta_error_grid.size(); ++i) {
        const double x = delta_error_grid[i];
        if (!(x >= 1e-3 && x <= 1e-1))
            throw std::invalid_argument(
                "suppression_slope: grid must lie within delta_error * gate_time in [1e-3, 1e-1]");
        if (i > 0 && x <= delta_error_grid[i - 1])
            throw std::invalid_argument("suppression_slope: grid must be increasing");
    }

    // Work at gate_time = 1 so grid values are delta_error * gate_time directly.
    GateParams p;
    p.gate_time = 1.0;
    p.delta = std::exp2(static_cast<double>(n) + 1.0) * M_PI;
    p.walsh_index = (1u << n) - 1u;
    p.ion_count = 1;
    p.nbar = 0.0;

    // The slope does not depend on omega, so pick it to land the largest
    // sampled infidelity near 3e-4, safely inside the fit window.
    p.omega = 1.0;
    p.delta_error = delta_error_grid.back();
    const double a_top = std::abs(2.0 * alpha_k(p));
    if (a_top <= 0.0) throw std::runtime_error("suppression_slope: degenerate displacement");
    p.omega = std::sqrt(6e-4 / ((p.nbar + 0.5) * a_top * a_top));

    std::vector<double> log_x, log_y;
    for (const double d : delta_error_grid) {
        p.delta_error = d;
        const double infid = infidelity_one_ion(p);
        if (infid < 1e-14) continue;           // floating-point floor
        if (infid < 1e-12 || infid > 1e-3) continue;  // outside the asymptotic fit window
        log_x.push_back(std::log(d));
        log_y.push_back(std::log(infid));
    }
    if (log_x.size() < 4)
        throw std::runtime_error(
            "suppression_slope: fewer than 4 grid points inside the fit window");

    const auto m = static_cast<double>(log_x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < log_x.size(); ++i) {
        sx += log_x[i];
        sy += log_y[i];
        sxx += log_x[i] * log_x[i];
        sxy += log_x[i] * log_y[i];
        syy += log_y[i] * log_y[i];
    }
    const double cov = sxy - sx * sy / m;
    const double var_x = sxx - sx * sx / m;
    const double var_y = syy - sy * sy / m;

    SlopeFit fit;
    fit.slope = cov / var_x;
    fit.r_squared = var_y > 0.0 ? (cov * cov) / (var_x * var_y) : 1.0;
    fit.points_used = static_cast<int>(log_x.size());
    return fit;
}

WindowResult fidelity_window(unsigned n, double threshold, double nbar) {
    if (!(threshold >= 0.9 && threshold < 1.0))
        throw std::invalid_argument("fidelity_window: threshold must lie in [0.9, 1)");
    if (!(nbar >= 0.0)) throw std::invalid_argument("fidelity_window: nbar must be >= 0");

    const double omega = 1.0;  // width in scaled units is omega-independent
    const GatePlan plan = plan_gate(n, omega);
    GateParams p;
    p.omega = omega;
    p.gate_time = plan.gate_time;
    p.walsh_index = (1u << n) - 1u;
    p.ion_count = 2;
    p.nbar = nbar;

    const auto fidelity_at = [&](double delta) {
        GateParams q = p;
        q.delta = delta;
        return fidelity_two_ion(q);
    };

    const double delta0 = plan.delta;
    if (fidelity_at(delta0) < threshold)
        return {0.0, "threshold not reached at the planned detuning"};

    // March outward in steps of 0.01 (delta * t_g / 2pi units) to bracket each
    // edge, then bisect.
    const double step = 0.01 * 2.0 * M_PI / plan.gate_time;
    const auto find_edge = [&](double direction) {
        double good = delta0;
        double bad = delta0;
        bool bracketed = false;
        for (int i = 1; i <= 400; ++i) {
            bad = delta0 + direction * step * i;
            if (fidelity_at(bad) < threshold) {
                bracketed = true;
                break;
            }
            good = bad;
        }
        if (!bracketed) return bad;  // window wider than the search span
        while (std::abs(bad - good) > 1e-6 * delta0) {
            const double mid = 0.5 * (good + bad);
            (fidelity_at(mid) >= threshold ? good : bad) = mid;
        }
        return 0.5 * (good + bad);
    };

    const double hi = find_edge(+1.0);
    const double lo = find_edge(-1.0);
    return {(hi - lo) * plan.gate_time / (2.0 * M_PI), ""};
}

}  // namespace walshms
