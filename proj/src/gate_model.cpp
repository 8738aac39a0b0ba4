#include "walshms/gate_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace walshms {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Segment integral of e^{-i w t} over [a, b]. Below the threshold the direct
// difference quotient cancels catastrophically; a 4-term series keeps the
// truncation error under 1e-26 relative.
cplx segment_integral(double a, double b, double w) {
    const double h = b - a;
    if (std::abs(w * h) < 1e-6) {
        const cplx z(0.0, -w * h);
        const cplx series = 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)));
        return std::exp(cplx(0.0, -w * a)) * h * series;
    }
    return (std::exp(cplx(0.0, -w * a)) - std::exp(cplx(0.0, -w * b))) / cplx(0.0, w);
}

// (1 - sin(x)/x), stable near x = 0.
double one_minus_sinc(double x) {
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
    }
    return 1.0 - std::sin(x) / x;
}

double wrap_two_pi(double phi) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    return phi;
}

}  // namespace

GateParams& GateParams::normalize_phases() {
    phi_s = wrap_two_pi(phi_s);
    phi_m = wrap_two_pi(phi_m);
    return *this;
}

void validate(const GateParams& p) {
    if (!(p.gate_time > 0.0)) throw std::invalid_argument("GateParams: gate_time must be > 0");
    if (!(p.omega >= 0.0)) throw std::invalid_argument("GateParams: omega must be >= 0");
    if (!(p.nbar >= 0.0)) throw std::invalid_argument("GateParams: nbar must be >= 0");
    if (p.ion_count != 1 && p.ion_count != 2)
        throw std::invalid_argument("GateParams: ion_count must be 1 or 2");
    if (p.walsh_index > kMaxWalshIndex)
        throw std::invalid_argument("GateParams: walsh_index exceeds 2^20 - 1");
}

SegmentDecomposition segment_decompose(std::uint32_t k, double gate_time) {
    if (!(gate_time > 0.0))
        throw std::invalid_argument("segment_decompose: gate_time must be > 0");
    const WalshSequence seq = build_sequence(k);
    SegmentDecomposition d;
    d.boundaries.reserve(seq.switch_points.size() + 2);
    d.signs.reserve(seq.segment_count());
    d.boundaries.push_back(0.0);
    for (const auto& s : seq.switch_points) d.boundaries.push_back(s.to_double() * gate_time);
    d.boundaries.push_back(gate_time);
    for (std::size_t i = 0; i < seq.segment_count(); ++i) d.signs.push_back(seq.sign_of_segment(i));
    return d;
}

cplx alpha_k(const GateParams& p) {
    validate(p);
    const SegmentDecomposition d = segment_decompose(p.walsh_index, p.gate_time);
    const double w = p.delta + p.delta_error;
    cplx sum = 0.0;
    for (std::size_t i = 0; i < d.signs.size(); ++i)
        sum += static_cast<double>(d.signs[i]) *
               segment_integral(d.boundaries[i], d.boundaries[i + 1], w);
    return 0.5 * p.omega * std::exp(cplx(0.0, p.phi_m)) * sum;
}

Trajectory trajectory(const GateParams& p, std::size_t n_samples) {
    validate(p);
    if (n_samples < 2) throw std::invalid_argument("trajectory: need at least 2 samples");
    const SegmentDecomposition d = segment_decompose(p.walsh_index, p.gate_time);
    const double w = p.delta + p.delta_error;
    const cplx scale = 0.5 * p.omega * std::exp(cplx(0.0, p.phi_m));

    Trajectory traj;
    traj.samples.reserve(n_samples);
    cplx prefix = 0.0;     // integral over segments fully before the cursor
    std::size_t seg = 0;
    for (std::size_t j = 0; j < n_samples; ++j) {
        const double t =
            p.gate_time * static_cast<double>(j) / static_cast<double>(n_samples - 1);
        while (seg + 1 < d.signs.size() && d.boundaries[seg + 1] <= t) {
            prefix += static_cast<double>(d.signs[seg]) *
                      segment_integral(d.boundaries[seg], d.boundaries[seg + 1], w);
            ++seg;
        }
        const cplx a = scale * (prefix + static_cast<double>(d.signs[seg]) *
                                             segment_integral(d.boundaries[seg], t, w));
        traj.samples.push_back({t, a, -a});
    }
    return traj;
}

double phi_k(const GateParams& p, PhaseDetuning variant) {
    validate(p);
    const double w = variant == PhaseDetuning::printed ? p.delta : p.delta + p.delta_error;
    if (w == 0.0)
        throw std::domain_error("phi_k: singular at zero detuning; use the oracle instead");

    const SegmentDecomposition d = segment_decompose(p.walsh_index, p.gate_time);

    // sum_{i>j} Im[phi_i^* phi_j] via a running prefix sum, plus the
    // duration term (1/w) sum_i L_i (1 - sinc(w L_i)).
    double cross = 0.0;
    cplx prefix = 0.0;
    double durations = 0.0;
    for (std::size_t i = 0; i < d.signs.size(); ++i) {
        const cplx phi = static_cast<double>(d.signs[i]) *
                         segment_integral(d.boundaries[i], d.boundaries[i + 1], w);
        cross += std::imag(std::conj(phi) * prefix);
        prefix += phi;
        const double len = d.boundaries[i + 1] - d.boundaries[i];
        durations += len * one_minus_sinc(w * len);
    }
    return cross + durations / w;
}

DisplacementResult displacement(const GateParams& p, PhaseDetuning variant) {
    DisplacementResult r;
    r.alpha = alpha_k(p);
    r.residual_magnitude_sq = std::norm(2.0 * r.alpha);
    if (p.delta != 0.0) {
        r.phi_geom = phi_k(p, variant);
        r.entangling_phase = p.omega * p.omega * r.phi_geom;
    } else {
        r.phi_geom = std::numeric_limits<double>::quiet_NaN();
        r.entangling_phase = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

double fidelity_one_ion(const GateParams& p) {
    validate(p);
    if (p.ion_count != 1) throw std::invalid_argument("fidelity_one_ion: ion_count must be 1");
    const double x = (p.nbar + 0.5) * std::norm(2.0 * alpha_k(p));
    return 0.5 * (1.0 + std::exp(-x));
}

double infidelity_one_ion(const GateParams& p) {
    validate(p);
    if (p.ion_count != 1) throw std::invalid_argument("infidelity_one_ion: ion_count must be 1");
    const double x = (p.nbar + 0.5) * std::norm(2.0 * alpha_k(p));
    return -0.5 * std::expm1(-x);
}

double fidelity_two_ion(const GateParams& p, PhaseDetuning variant) {
    validate(p);
    if (p.ion_count != 2) throw std::invalid_argument("fidelity_two_ion: ion_count must be 2");
    const double coherence = std::exp(-(p.nbar + 0.5) * std::norm(2.0 * alpha_k(p)));
    const double theta = p.omega * p.omega * phi_k(p, variant);
    // 1/4 |E + i e^{-i theta}|^2 = (E^2 + 1 + 2 E sin(theta)) / 4
    return 0.25 * (coherence * coherence + 1.0 + 2.0 * coherence * std::sin(theta));
}

double gaussian_overlap(double q, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("gaussian_overlap: dx must be > 0");
    const double qdx = q * dx;
    return std::exp(-0.5 * qdx * qdx);
}

GatePlan plan_gate(unsigned n, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("plan_gate: omega must be > 0");
    if (n > 19) throw std::invalid_argument("plan_gate: order must be <= 19");
    GatePlan plan{};
    plan.gate_time = std::exp2(0.5 * static_cast<double>(n)) * M_PI / omega;
    plan.delta = std::exp2(static_cast<double>(n) + 1.0) * M_PI / plan.gate_time;

    GateParams check;
    check.omega = omega;
    check.delta = plan.delta;
    check.gate_time = plan.gate_time;
    check.walsh_index = (1u << n) - 1u;
    check.ion_count = 2;
    const double phase = omega * omega * phi_k(check);
    if (std::abs(phase - 0.5 * M_PI) > 1e-9)
        throw std::logic_error("plan_gate: internal phase check failed");
    return plan;
}

}  // namespace walshms
