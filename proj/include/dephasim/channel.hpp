#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dephasim/density_matrix.hpp"
#include "dephasim/stochastic.hpp"

namespace dephasim::channel {

/// H(t) = epsilon sigma_z + X(t) sigma_z. The simulation runs in the
/// interaction picture, where epsilon drops out of every coherence.
struct HamiltonianParams {
    double epsilon = 0.0;
};

enum class Provenance { Analytic, MonteCarlo, CountEstimated, Tomographic };

/// Time-indexed complex coherence <exp(-2i Phi)>. `stderr_values` is either
/// empty or holds one standard error per entry.
struct CoherenceSeries {
    std::vector<double> times;
    std::vector<Complex> values;
    std::vector<double> stderr_values;
    Provenance provenance = Provenance::MonteCarlo;

    void validate() const;
};

/// exp(-2i phi).
inline Complex phase_factor(double phi) { return {std::cos(2.0 * phi), -std::sin(2.0 * phi)}; }

/// (sum_r w_r exp(-2i Phi_r)) / (sum_r w_r), both sums in the canonical
/// blocked order. Weights are expected to sum to one; dividing by the
/// computed total makes C(0) = 1 exactly.
Complex weighted_coherence(std::span<const double> weights, std::span<const double> phases);

/// Final step of every ensemble reduction: divide by the weight total and
/// cap the modulus at one.
Complex normalize_coherence(Complex weighted_sum, double weight_total);

/// (1/n) sum_r exp(-2i Phi_r(t_index)).
Complex ensemble_coherence(std::span<const stochastic::PhasePath> phases, std::size_t t_index);

/// Same reduction over phases already sampled at a single time.
Complex ensemble_coherence(std::span<const double> phases_at_t);

/// Standard error of an n-path ensemble mean of unit phasors with mean `c`.
/// Every term has modulus one, so the sample variance is n(1-|c|^2)/(n-1).
double ensemble_stderr(Complex c, std::size_t n_paths);

/// rho = p rho_S + (1-p) I/2 with <H|rho_S|V> = coherence / 2.
DensityMatrix dephasing_state(Complex coherence, double p);

/// Rotate an interaction-picture state back to the lab frame at time t.
DensityMatrix to_lab_frame(const DensityMatrix& rho, const HamiltonianParams& h, double t);

/// Exact RTN coherence for unit amplitude, switching rate gamma and
/// stationary (equiprobable) initial values.
double analytic_rtn_coherence(double gamma, double t);

/// Var[Phi(t)] for the OU field dX = -2 gamma X dt + 2 sqrt(gamma) dW, X(0) = 0.
double ou_phase_variance(double gamma, double t);

/// exp(-2 Var[Phi(t)]); exact since Phi is a zero-mean Gaussian.
double analytic_ou_coherence(double gamma, double t);

/// Dispatch on process kind. RTN with gamma = 0 returns cos(2t).
double analytic_coherence(const stochastic::ProcessSpec& spec, double t);

}  // namespace dephasim::channel
