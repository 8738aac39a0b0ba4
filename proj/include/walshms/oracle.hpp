#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

#include "walshms/gate_model.hpp"

namespace walshms {

/// Joint spin (x) truncated-oscillator state. Amplitudes are stored with the
/// Fock index fastest: index = spin * (n_max + 1) + n, spin bits read ion by
/// ion with bit i = 1 meaning ion i in the upper state.
struct QuantumState {
    Eigen::VectorXcd amplitudes;
    int n_ions = 1;
    int n_max = 0;

    int fock_dim() const { return n_max + 1; }
    int spin_dim() const { return 1 << n_ions; }

    cplx& at(int spin, int n) { return amplitudes[spin * fock_dim() + n]; }
    cplx at(int spin, int n) const { return amplitudes[spin * fock_dim() + n]; }

    double norm() const { return amplitudes.norm(); }

    /// Total population of one spin configuration, motion traced out.
    double spin_population(int spin) const {
        return amplitudes.segment(spin * fock_dim(), fock_dim()).squaredNorm();
    }
};

/// |down...down> (x) |m>.
QuantumState make_fock_state(int n_ions, int n_max, int m);

struct OracleConfig {
    int n_max = 0;          // Fock cutoff; 0 = choose automatically
    double dt_init = 0.0;   // initial step, s; 0 = gate_time / 64
    double tol = 1e-8;      // step-halving target on the final-state difference
    double thermal_weight_cutoff = 1e-6;  // thermal tail mass excluded
};

void validate(const OracleConfig& c);

/// Raised when population reaches the top of the Fock ladder; callers that own
/// the basis size react by enlarging n_max and retrying.
struct CutoffError : std::runtime_error {
    int n_max;
    double top_population;
    CutoffError(int n_max_, double pop);
};

/// Direct time integration of the bichromatic interaction Hamiltonian from
/// the given initial state to t = gate_time. Fixed-step RK4 with substeps
/// aligned to the Walsh switch times, halved until the final states of two
/// successive refinements differ by less than config.tol.
QuantumState evolve(const GateParams& params, const OracleConfig& config,
                    const QuantumState& initial);

/// Same dynamics with red/blue detunings delta -/+ qubit_shift: the spin
/// raising/lowering operators precess at +/- qubit_shift.
QuantumState asymmetric_evolve(const GateParams& params, double qubit_shift,
                               const OracleConfig& config, const QuantumState& initial);

/// One integration pass at a fixed nominal step, no halving loop; entry point
/// for step-refinement studies of the integrator itself.
QuantumState evolve_fixed_step(const GateParams& params, double dt, const QuantumState& initial,
                               double qubit_shift = 0.0);

enum class Observable { spin_revival, bell_fidelity };

/// Probability of recovering the initial all-down spin state.
double spin_revival_probability(const QuantumState& state);

/// Overlap with (|dd> + e^{i theta} |uu>)/sqrt2; fixed theta and max over theta.
double bell_fidelity_fixed(const QuantumState& state, double theta);
double bell_fidelity_max(const QuantumState& state);

/// Thermal mixture over initial Fock states: sum of p_m f(|down..down,m>) with
/// p_m = nbar^m/(nbar+1)^{m+1}, truncated once the cumulative weight reaches
/// 1 - thermal_weight_cutoff. Grows the Fock cutoff automatically when the
/// config leaves it at zero.
double thermal_fidelity(const GateParams& params, const OracleConfig& config,
                        Observable observable);

/// Entangling phase extracted from the evolved |++> (x) |0> state: the
/// argument of the surviving vacuum amplitude equals omega^2 Phi. N = 2,
/// phi_s = 0 only; arbitration tool for the closed-form phase conventions.
double entangling_phase(const GateParams& params, const OracleConfig& config);

/// |alpha| recovered from the vacuum survival amplitude of an evolved
/// single-ion |+> state; requires nbar = 0.
double alpha_magnitude(const GateParams& params, const OracleConfig& config);

}  // namespace walshms
