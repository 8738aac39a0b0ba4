#include "walshms/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "walshms/parallel.hpp"

namespace walshms {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

constexpr double kTopPopulationLimit = 1e-8;

// Spin raising part S+ = sum_i sigma_+^{(i)} e^{i phi_s}; bit i set = ion i up.
MatrixXcd spin_raising(int n_ions, double phi_s) {
    const int dim = 1 << n_ions;
    MatrixXcd sp = MatrixXcd::Zero(dim, dim);
    const cplx phase = std::exp(cplx(0.0, phi_s));
    for (int s = 0; s < dim; ++s)
        for (int i = 0; i < n_ions; ++i)
            if (!(s >> i & 1)) sp(s | (1 << i), s) += phase;
    return sp;
}

// One full integration pass at a fixed nominal step. The state is advanced
// segment by segment so that no substep straddles a Walsh switch time.
class Propagator {
  public:
    Propagator(const GateParams& params, double qubit_shift, int fock_dim, int spin_dim)
        : omega_half_(0.5 * params.omega),
          detuning_(params.delta + params.delta_error),
          qubit_shift_(qubit_shift),
          phi_m_(params.phi_m),
          segments_(segment_decompose(params.walsh_index, params.gate_time)),
          s_plus_(spin_raising(params.ion_count, params.phi_s)),
          s_minus_(s_plus_.adjoint()),
          sqrt_(fock_dim),
          fock_dim_(fock_dim),
          spin_dim_(spin_dim) {
        for (int n = 0; n < fock_dim; ++n) sqrt_[n] = std::sqrt(static_cast<double>(n));
        w_.resize(fock_dim, spin_dim);
        st_.resize(spin_dim, spin_dim);
        k1_.resize(fock_dim, spin_dim);
        k2_.resize(fock_dim, spin_dim);
        k3_.resize(fock_dim, spin_dim);
        k4_.resize(fock_dim, spin_dim);
        tmp_.resize(fock_dim, spin_dim);
    }

    // dV/dt = -i H(t) V with the Walsh sign supplied by the caller.
    void derivative(double t, double sign, const MatrixXcd& v, MatrixXcd& out) {
        const cplx c = std::exp(cplx(0.0, -detuning_ * t + phi_m_));
        const cplx cc = std::conj(c);
        // B(t) v: annihilation shifts rows down, creation shifts them up.
        const int f = fock_dim_;
        w_.row(f - 1).setZero();
        for (int n = 0; n < f - 1; ++n) w_.row(n) = (c * sqrt_[n + 1]) * v.row(n + 1);
        for (int n = f - 1; n >= 1; --n) w_.row(n) += (cc * sqrt_[n]) * v.row(n - 1);
        if (qubit_shift_ != 0.0) {
            const cplx q = std::exp(cplx(0.0, qubit_shift_ * t));
            st_ = q * s_plus_ + std::conj(q) * s_minus_;
        } else {
            st_ = s_plus_ + s_minus_;
        }
        out.noalias() = w_ * st_.transpose();
        out *= cplx(0.0, -omega_half_ * sign);
    }

    // Returns the peak population seen in the top two Fock levels.
    double run(double dt, MatrixXcd& v) {
        double top_pop = 0.0;
        for (std::size_t s = 0; s < segments_.signs.size(); ++s) {
            const double a = segments_.boundaries[s];
            const double b = segments_.boundaries[s + 1];
            const double sign = segments_.signs[s];
            const auto steps = static_cast<long>(std::ceil((b - a) / dt - 1e-12));
            const double h = (b - a) / static_cast<double>(std::max<long>(steps, 1));
            double t = a;
            for (long i = 0; i < std::max<long>(steps, 1); ++i) {
                rk4_step(t, h, sign, v);
                t = a + h * static_cast<double>(i + 1);
                const double pop =
                    v.row(fock_dim_ - 1).squaredNorm() + v.row(fock_dim_ - 2).squaredNorm();
                top_pop = std::max(top_pop, pop);
                if (top_pop >= kTopPopulationLimit) throw CutoffError(fock_dim_ - 1, top_pop);
            }
        }
        return top_pop;
    }

  private:
    void rk4_step(double t, double h, double sign, MatrixXcd& v) {
        derivative(t, sign, v, k1_);
        tmp_ = v + (0.5 * h) * k1_;
        derivative(t + 0.5 * h, sign, tmp_, k2_);
        tmp_ = v + (0.5 * h) * k2_;
        derivative(t + 0.5 * h, sign, tmp_, k3_);
        tmp_ = v + h * k3_;
        derivative(t + h, sign, tmp_, k4_);
        v += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

    double omega_half_, detuning_, qubit_shift_, phi_m_;
    SegmentDecomposition segments_;
    MatrixXcd s_plus_, s_minus_;
    VectorXd sqrt_;
    int fock_dim_, spin_dim_;
    MatrixXcd w_, st_, k1_, k2_, k3_, k4_, tmp_;
};

QuantumState evolve_impl(const GateParams& params, double qubit_shift,
                         const OracleConfig& config, const QuantumState& initial) {
    validate(params);
    validate(config);
    if (initial.n_ions != params.ion_count)
        throw std::invalid_argument("evolve: initial state ion count mismatch");
    if (initial.n_max < 2) throw std::invalid_argument("evolve: n_max must be >= 2");
    if (std::abs(initial.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("evolve: initial state must be normalized");

    const int fock = initial.fock_dim();
    const int spin = initial.spin_dim();
    Propagator prop(params, qubit_shift, fock, spin);

    // Keep the first pass inside the stable, sensible-accuracy region: the
    // step must resolve the fastest phase in the problem.
    const double fmax = std::max({std::abs(params.delta + params.delta_error), params.omega,
                                  std::abs(qubit_shift), 1.0 / params.gate_time});
    double dt = config.dt_init > 0.0 ? config.dt_init : params.gate_time / 64.0;
    dt = std::min(dt, 0.5 / fmax);

    using MapT = Eigen::Map<const MatrixXcd>;
    const MapT v0(initial.amplitudes.data(), fock, spin);

    MatrixXcd prev = v0;
    prop.run(dt, prev);
    for (int iter = 0; iter < 24; ++iter) {
        dt *= 0.5;
        MatrixXcd cur = v0;
        prop.run(dt, cur);
        const double diff = (cur - prev).norm();
        if (diff <= config.tol) {
            QuantumState out;
            out.n_ions = initial.n_ions;
            out.n_max = initial.n_max;
            out.amplitudes = Eigen::Map<const Eigen::VectorXcd>(cur.data(), cur.size());
            return out;
        }
        prev.swap(cur);
    }
    throw std::runtime_error("evolve: step halving did not reach the requested tolerance");
}

// Largest spin-dependent displacement reached along the drive, used only to
// size the Fock basis; adequacy is verified independently during integration.
double displacement_bound(const GateParams& params) {
    double peak = 0.0;
    for (const auto& s : trajectory(params, 257).samples)
        peak = std::max(peak, std::abs(s.alpha_up));
    return peak * static_cast<double>(params.ion_count);
}

int auto_n_max(const GateParams& params, int m, double beta) {
    const double base = 10.0 * (params.nbar + 1.0) + 8.0 * beta;
    const double per_m = m + beta * beta + 6.0 * beta * std::sqrt(m + 1.0) + 12.0;
    return static_cast<int>(std::ceil(std::max(base, per_m))) + 4;
}

// Evolve |down..down> (x) |m>, growing the basis on cutoff failures when the
// config does not pin n_max.
QuantumState evolve_fock_auto(const GateParams& params, const OracleConfig& config, int m,
                              double beta) {
    if (config.n_max > 0)
        return evolve(params, config, make_fock_state(params.ion_count, config.n_max, m));
    int n_max = auto_n_max(params, m, beta);
    for (int attempt = 0;; ++attempt) {
        try {
            return evolve(params, config, make_fock_state(params.ion_count, n_max, m));
        } catch (const CutoffError&) {
            if (attempt >= 6) throw;
            n_max = n_max + n_max / 2 + 8;
        }
    }
}

}  // namespace

CutoffError::CutoffError(int n_max_, double pop)
    : std::runtime_error("oracle: population " + std::to_string(pop) +
                         " in the top Fock levels at n_max " + std::to_string(n_max_) +
                         "; enlarge the cutoff"),
      n_max(n_max_),
      top_population(pop) {}

void validate(const OracleConfig& c) {
    if (!(c.tol > 0.0)) throw std::invalid_argument("OracleConfig: tol must be > 0");
    if (!(c.thermal_weight_cutoff > 0.0) || c.thermal_weight_cutoff > 1e-6)
        throw std::invalid_argument("OracleConfig: thermal_weight_cutoff must be in (0, 1e-6]");
    if (c.n_max < 0) throw std::invalid_argument("OracleConfig: n_max must be >= 0");
}

QuantumState make_fock_state(int n_ions, int n_max, int m) {
    if (n_ions != 1 && n_ions != 2) throw std::invalid_argument("make_fock_state: 1 or 2 ions");
    if (m < 0 || m > n_max) throw std::invalid_argument("make_fock_state: m out of range");
    QuantumState s;
    s.n_ions = n_ions;
    s.n_max = n_max;
    s.amplitudes = Eigen::VectorXcd::Zero((1 << n_ions) * (n_max + 1));
    s.at(0, m) = 1.0;
    return s;
}

QuantumState evolve(const GateParams& params, const OracleConfig& config,
                    const QuantumState& initial) {
    return evolve_impl(params, 0.0, config, initial);
}

QuantumState asymmetric_evolve(const GateParams& params, double qubit_shift,
                               const OracleConfig& config, const QuantumState& initial) {
    return evolve_impl(params, qubit_shift, config, initial);
}

QuantumState evolve_fixed_step(const GateParams& params, double dt, const QuantumState& initial,
                               double qubit_shift) {
    validate(params);
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_fixed_step: dt must be > 0");
    const int fock = initial.fock_dim();
    const int spin = initial.spin_dim();
    Propagator prop(params, qubit_shift, fock, spin);
    MatrixXcd v = Eigen::Map<const MatrixXcd>(initial.amplitudes.data(), fock, spin);
    prop.run(dt, v);
    QuantumState out;
    out.n_ions = initial.n_ions;
    out.n_max = initial.n_max;
    out.amplitudes = Eigen::Map<const Eigen::VectorXcd>(v.data(), v.size());
    return out;
}

double spin_revival_probability(const QuantumState& state) { return state.spin_population(0); }

double bell_fidelity_fixed(const QuantumState& state, double theta) {
    if (state.n_ions != 2) throw std::invalid_argument("bell_fidelity: two ions required");
    const int f = state.fock_dim();
    double acc = 0.0;
    const cplx phase = std::exp(cplx(0.0, -theta));
    for (int n = 0; n < f; ++n) acc += std::norm(state.at(0, n) + phase * state.at(3, n));
    return 0.5 * acc;
}

double bell_fidelity_max(const QuantumState& state) {
    if (state.n_ions != 2) throw std::invalid_argument("bell_fidelity: two ions required");
    const int f = state.fock_dim();
    double down = 0.0, up = 0.0;
    cplx cross = 0.0;
    for (int n = 0; n < f; ++n) {
        down += std::norm(state.at(0, n));
        up += std::norm(state.at(3, n));
        cross += std::conj(state.at(0, n)) * state.at(3, n);
    }
    return 0.5 * (down + up) + std::abs(cross);
}

double thermal_fidelity(const GateParams& params, const OracleConfig& config,
                        Observable observable) {
    validate(params);
    validate(config);
    if (observable == Observable::bell_fidelity && params.ion_count != 2)
        throw std::invalid_argument("thermal_fidelity: bell fidelity requires two ions");

    // Fock weights of the initial thermal state, cut once the retained mass
    // reaches 1 - thermal_weight_cutoff.
    std::vector<double> weights;
    if (params.nbar == 0.0) {
        weights.push_back(1.0);
    } else {
        const double ratio = params.nbar / (params.nbar + 1.0);
        double w = 1.0 / (params.nbar + 1.0);
        double cumulative = 0.0;
        while (cumulative < 1.0 - config.thermal_weight_cutoff) {
            weights.push_back(w);
            cumulative += w;
            w *= ratio;
            if (weights.size() > 100000)
                throw std::runtime_error("thermal_fidelity: weight series failed to converge");
        }
    }

    const double beta = displacement_bound(params);
    std::vector<double> values(weights.size());
    parallel_for(weights.size(), [&](std::size_t m) {
        const QuantumState final_state =
            evolve_fock_auto(params, config, static_cast<int>(m), beta);
        values[m] = observable == Observable::spin_revival
                        ? spin_revival_probability(final_state)
                        : bell_fidelity_max(final_state);
    });

    double result = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) result += weights[m] * values[m];
    return result;
}

double entangling_phase(const GateParams& params, const OracleConfig& config) {
    validate(params);
    if (params.ion_count != 2) throw std::invalid_argument("entangling_phase: two ions required");

    const double beta = displacement_bound(params);
    const int n_max = config.n_max > 0 ? config.n_max : auto_n_max(params, 0, beta);

    // |+>|+> (x) |0> with |+> the +1 eigenstate of the phi_s-rotated spin flip.
    QuantumState init;
    init.n_ions = 2;
    init.n_max = n_max;
    init.amplitudes = Eigen::VectorXcd::Zero(4 * (n_max + 1));
    const cplx e = std::exp(cplx(0.0, params.phi_s));
    init.at(0, 0) = 0.5;
    init.at(1, 0) = 0.5 * e;
    init.at(2, 0) = 0.5 * e;
    init.at(3, 0) = 0.5 * e * e;

    const QuantumState out = evolve(params, config, init);
    const cplx amp = 0.5 * (out.at(0, 0) + std::conj(e) * (out.at(1, 0) + out.at(2, 0)) +
                            std::conj(e * e) * out.at(3, 0));
    if (std::abs(amp) < 1e-10)
        throw std::runtime_error("entangling_phase: vacuum amplitude too small to resolve");
    return std::arg(amp);
}

double alpha_magnitude(const GateParams& params, const OracleConfig& config) {
    validate(params);
    if (params.ion_count != 1) throw std::invalid_argument("alpha_magnitude: one ion required");
    if (params.nbar != 0.0) throw std::invalid_argument("alpha_magnitude: requires nbar = 0");

    const double beta = displacement_bound(params);
    const int n_max = config.n_max > 0 ? config.n_max : auto_n_max(params, 0, beta);

    QuantumState init;
    init.n_ions = 1;
    init.n_max = n_max;
    init.amplitudes = Eigen::VectorXcd::Zero(2 * (n_max + 1));
    const cplx e = std::exp(cplx(0.0, params.phi_s));
    init.at(0, 0) = M_SQRT1_2;
    init.at(1, 0) = M_SQRT1_2 * e;

    const QuantumState out = evolve(params, config, init);
    const cplx amp = M_SQRT1_2 * (out.at(0, 0) + std::conj(e) * out.at(1, 0));
    const double survival = std::abs(amp);
    if (survival < 1e-12)
        throw std::runtime_error("alpha_magnitude: vacuum survival underflow; |alpha| too large");
    return std::sqrt(std::max(0.0, -2.0 * std::log(survival)));
}

}  // namespace walshms
