#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "walshms/walsh.hpp"

namespace walshms {

using cplx = std::complex<double>;

/// Physical parameters of one gate execution. Detunings are angular
/// frequencies (rad/s); conversion from cycles/s happens at the CLI boundary.
struct GateParams {
    double omega = 0.0;        // sideband Rabi rate, rad/s
    double delta = 0.0;        // symmetric detuning, rad/s
    double delta_error = 0.0;  // detuning error, rad/s
    double gate_time = 0.0;    // total sequence duration, s
    double nbar = 0.0;         // thermal mean occupation
    std::uint32_t walsh_index = 0;
    int ion_count = 1;
    double phi_s = 0.0;  // sum phase, rad, stored in [0, 2pi)
    double phi_m = 0.0;  // difference phase, rad, stored in [0, 2pi)

    GateParams& normalize_phases();
};

void validate(const GateParams& p);

/// Walsh switch points scaled onto [0, gate_time].
struct SegmentDecomposition {
    std::vector<double> boundaries;  // t_-1 = 0, ..., t_K = gate_time
    std::vector<int> signs;          // one per segment, alternating from +1
};

SegmentDecomposition segment_decompose(std::uint32_t k, double gate_time);

/// Which detuning enters the geometric-phase sum: the printed formula uses
/// delta alone; the shifted variant substitutes delta + delta_error.
enum class PhaseDetuning { printed, shifted };

/// Residual displacement alpha_k(t_g) of the Walsh-modulated drive.
cplx alpha_k(const GateParams& p);

/// Running displacement alpha(t) sampled at n uniform times, plus the end point.
struct TrajectorySample {
    double t;
    cplx alpha_up;
    cplx alpha_down;  // always -alpha_up: the two spin branches are mirrored
};
struct Trajectory {
    std::vector<TrajectorySample> samples;
};
Trajectory trajectory(const GateParams& p, std::size_t n_samples);

/// Geometric phase sum Phi_k(t_g) in s^2; the entangling phase is
/// omega^2 * Phi_k. Singular at delta = 0 (use the oracle there).
double phi_k(const GateParams& p, PhaseDetuning variant = PhaseDetuning::printed);

/// alpha_k, Phi_k and derived quantities bundled for one parameter set.
struct DisplacementResult {
    cplx alpha;
    double phi_geom;               // s^2; NaN when delta == 0
    double entangling_phase;       // rad; NaN when delta == 0
    double residual_magnitude_sq;  // |2 alpha|^2
};
DisplacementResult displacement(const GateParams& p,
                                PhaseDetuning variant = PhaseDetuning::printed);

double fidelity_one_ion(const GateParams& p);
/// 1 - F1 evaluated without cancellation (expm1), for suppression-order fits.
double infidelity_one_ion(const GateParams& p);

double fidelity_two_ion(const GateParams& p, PhaseDetuning variant = PhaseDetuning::printed);

/// Wavepacket overlap exp[-(q dx)^2 / 2] after a momentum kick hbar*q.
double gaussian_overlap(double q, double dx);

/// Gate time and detuning for the maximally entangling W(2^n - 1) gate.
struct GatePlan {
    double gate_time;  // s
    double delta;      // rad/s
};
GatePlan plan_gate(unsigned n, double omega);

}  // namespace walshms
