#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "dephasim/rng.hpp"

namespace dephasim::stochastic {

/// Uniform grid t_k = k * dt, k = 0..n_steps.
struct TimeGrid {
    double dt = 0.001;
    std::size_t n_steps = 1;

    [[nodiscard]] double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt; }
    [[nodiscard]] std::size_t n_points() const noexcept { return n_steps + 1; }
    void validate() const;
};

enum class ProcessKind { RTN, OU };

enum class RtnInitial {
    RandomEquiprobable,  ///< X(0) = +-1 with probability 1/2 each
    ForcedBalanced,      ///< X(0) = (-1)^path_index
};

struct ProcessSpec {
    ProcessKind kind = ProcessKind::RTN;
    double gamma = 0.1;
    RtnInitial rtn_initial = RtnInitial::RandomEquiprobable;

    void validate() const;
};

struct SeedSpec {
    std::uint64_t master_seed = 0;
};

/// One realization X[0..n_steps] of the field on a TimeGrid.
struct NoisePath {
    std::vector<double> samples;
};

/// Accumulated phase Phi[0..n_steps], Phi[0] = 0.
struct PhasePath {
    std::vector<double> samples;
};

/// Per-step switching probability 1 - exp(-gamma * dt).
double rtn_flip_probability(double gamma, double dt);

/// Incremental generator for a single path. Materialized paths and the
/// streaming ensemble engine both go through this class, so they agree
/// sample for sample.
class NoiseStepper {
public:
    NoiseStepper(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index);

    [[nodiscard]] double value() const noexcept { return x_; }

    void advance() {
        if (kind_ == ProcessKind::RTN) {
            // Bernoulli(flip probability): uniform 64-bit draw below the threshold.
            if (engine_() < flip_threshold_) x_ = -x_;
        } else if (diffusion_ != 0.0) {
            x_ = drift_ * x_ + diffusion_ * normal_(engine_);
        }
    }

private:
    ProcessKind kind_;
    Engine engine_;
    std::uint64_t flip_threshold_ = 0;
    boost::random::normal_distribution<double> normal_;
    double drift_ = 1.0;
    double diffusion_ = 0.0;
    double x_ = 0.0;
};

/// Random telegraph path: one Bernoulli(flip probability) draw per step.
NoisePath sample_rtn_path(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index);

/// Ornstein-Uhlenbeck path from X(0) = 0 by the explicit update
/// X[k+1] = (1 - 2 gamma dt) X[k] + 2 sqrt(gamma) w,  w ~ N(0, dt).
NoisePath sample_ou_path(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index);

/// Dispatches on spec.kind.
NoisePath sample_path(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index);

/// Left-endpoint Riemann sum: Phi[k+1] = Phi[k] + X[k] dt.
PhasePath accumulate_phase(const NoisePath& path, const TimeGrid& grid);

}  // namespace dephasim::stochastic
