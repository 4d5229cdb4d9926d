#include "dephasim/channel.hpp"

#include <cmath>
#include <string>

#include "dephasim/errors.hpp"
#include "dephasim/reduction.hpp"

namespace dephasim::channel {

void CoherenceSeries::validate() const {
    if (times.empty()) throw ParameterError("coherence series: empty");
    if (values.size() != times.size()) throw ParameterError("coherence series: times/values length mismatch");
    if (!stderr_values.empty() && stderr_values.size() != times.size()) {
        throw ParameterError("coherence series: stderr length mismatch");
    }
}

Complex weighted_coherence(std::span<const double> weights, std::span<const double> phases) {
    if (weights.size() != phases.size()) {
        throw ParameterError("weighted_coherence: " + std::to_string(weights.size()) + " weights for " +
                             std::to_string(phases.size()) + " phases");
    }
    if (phases.empty()) throw ParameterError("weighted_coherence: empty ensemble");
    std::vector<Complex> terms(phases.size());
    for (std::size_t r = 0; r < phases.size(); ++r) terms[r] = weights[r] * phase_factor(phases[r]);
    return normalize_coherence(blocked_sum<Complex>(terms), blocked_sum<double>(weights));
}

Complex normalize_coherence(Complex weighted_sum, double weight_total) {
    if (!(weight_total > 0.0)) throw ParameterError("coherence: weights must have a positive total");
    Complex c = weighted_sum / weight_total;
    // A convex combination of unit phasors; only rounding can push it past 1.
    const double mod = std::abs(c);
    if (mod > 1.0) c /= mod;
    return c;
}

Complex ensemble_coherence(std::span<const double> phases_at_t) {
    if (phases_at_t.empty()) throw ParameterError("ensemble_coherence: empty ensemble");
    const std::vector<double> weights(phases_at_t.size(), 1.0 / static_cast<double>(phases_at_t.size()));
    return weighted_coherence(weights, phases_at_t);
}

Complex ensemble_coherence(std::span<const stochastic::PhasePath> phases, std::size_t t_index) {
    if (phases.empty()) throw ParameterError("ensemble_coherence: empty ensemble");
    std::vector<double> at_t(phases.size());
    for (std::size_t r = 0; r < phases.size(); ++r) {
        if (t_index >= phases[r].samples.size()) throw ParameterError("ensemble_coherence: t_index outside grid");
        at_t[r] = phases[r].samples[t_index];
    }
    return ensemble_coherence(at_t);
}

double ensemble_stderr(Complex c, std::size_t n_paths) {
    if (n_paths < 2) return 0.0;
    const double spread = std::max(0.0, 1.0 - std::norm(c));
    return std::sqrt(spread / static_cast<double>(n_paths - 1));
}

DensityMatrix dephasing_state(Complex coherence, double p) {
    if (!std::isfinite(coherence.real()) || !std::isfinite(coherence.imag()) ||
        std::abs(coherence) > 1.0 + 1e-12) {
        throw ParameterError("dephasing_state: |coherence| > 1");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("dephasing_state: p outside [0, 1]");
    const Complex off = 0.5 * p * coherence;
    Matrix2c m;
    m << 0.5, off, std::conj(off), 0.5;
    return DensityMatrix::from_matrix(m);
}

DensityMatrix to_lab_frame(const DensityMatrix& rho, const HamiltonianParams& h, double t) {
    Matrix2c m = rho.matrix();
    const Complex rot = phase_factor(h.epsilon * t);
    m(0, 1) *= rot;
    m(1, 0) = std::conj(m(0, 1));
    return DensityMatrix::from_matrix(m);
}

namespace {

// sin(x t) / x, continuous through x = 0.
double sinc_t(double x, double t) {
    const double z = x * t;
    if (std::abs(z) < 1e-4) return t * (1.0 - z * z / 6.0);
    return std::sin(z) / x;
}

// sinh(x t) / x, continuous through x = 0.
double sinhc_t(double x, double t) {
    const double z = x * t;
    if (std::abs(z) < 1e-4) return t * (1.0 + z * z / 6.0);
    return std::sinh(z) / x;
}

}  // namespace

double analytic_rtn_coherence(double gamma, double t) {
    if (!(gamma >= 0.0)) throw ParameterError("analytic_rtn_coherence: gamma must be >= 0");
    if (!(t >= 0.0)) throw ParameterError("analytic_rtn_coherence: t must be >= 0");
    if (gamma == 0.0) return std::cos(2.0 * t);
    const double disc = 4.0 - gamma * gamma;
    if (disc > 0.0) {
        const double mu = std::sqrt(disc);
        return std::exp(-gamma * t) * (std::cos(mu * t) + gamma * sinc_t(mu, t));
    }
    const double mu = std::sqrt(-disc);
    if (mu * t < 20.0) {
        return std::exp(-gamma * t) * (std::cosh(mu * t) + gamma * sinhc_t(mu, t));
    }
    // Large mu t: expand cosh/sinh so the exponentials never overflow.
    const double slow = std::exp((mu - gamma) * t);
    const double fast = std::exp(-(mu + gamma) * t);
    return 0.5 * ((1.0 + gamma / mu) * slow + (1.0 - gamma / mu) * fast);
}

double ou_phase_variance(double gamma, double t) {
    if (!(gamma > 0.0)) throw ParameterError("ou_phase_variance: gamma must be > 0");
    if (!(t >= 0.0)) throw ParameterError("ou_phase_variance: t must be >= 0");
    // Var = g(x) / (4 gamma^2), x = 2 gamma t,
    // g(x) = 2x - 3 + 4 e^{-x} - e^{-2x} = sum_{n>=3} (-1)^n (4 - 2^n) x^n / n!.
    const double x = 2.0 * gamma * t;
    double g = 0.0;
    if (x < 0.5) {
        double power = x * x / 2.0;  // x^n / n! at n = 2
        for (int n = 3; n < 40; ++n) {
            power *= x / n;
            const double term = ((n % 2 == 0) ? 1.0 : -1.0) * (4.0 - std::ldexp(1.0, n)) * power;
            g += term;
            if (std::abs(term) < 1e-18 * std::abs(g)) break;
        }
    } else {
        const double e1 = std::exp(-x);
        g = 2.0 * x - 3.0 + 4.0 * e1 - e1 * e1;
    }
    return g / (4.0 * gamma * gamma);
}

double analytic_ou_coherence(double gamma, double t) { return std::exp(-2.0 * ou_phase_variance(gamma, t)); }

double analytic_coherence(const stochastic::ProcessSpec& spec, double t) {
    if (spec.kind == stochastic::ProcessKind::RTN) return analytic_rtn_coherence(spec.gamma, t);
    if (spec.gamma == 0.0) return 1.0;
    return analytic_ou_coherence(spec.gamma, t);
}

}  // namespace dephasim::channel
