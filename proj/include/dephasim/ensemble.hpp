#pragma once

#include <cstddef>
#include <vector>

#include "dephasim/channel.hpp"
#include "dephasim/stochastic.hpp"

namespace dephasim {

/// Streaming Monte Carlo over n_paths realizations. Paths are never stored:
/// each worker advances one path at a time and folds its phase factors into
/// the block partial sums for every report time.
struct EnsembleRequest {
    stochastic::ProcessSpec process;
    stochastic::TimeGrid grid;
    std::size_t report_stride = 50;
    std::size_t n_paths = 100;
    stochastic::SeedSpec seed;
    channel::HamiltonianParams hamiltonian;
    /// Per-path weights (pixel weights A_rr). Empty means uniform 1/n.
    std::vector<double> weights;
    unsigned workers = 1;

    void validate() const;
};

struct EnsembleResult {
    std::vector<std::size_t> steps;
    std::vector<double> times;
    /// Weighted ensemble coherence sum_r w_r exp(-2i Phi_r), interaction picture.
    std::vector<Complex> coherence;
    std::vector<double> stderr_values;
    /// Same coherence rotated into the lab frame by exp(-2i epsilon t).
    std::vector<Complex> lab_coherence;

    [[nodiscard]] channel::CoherenceSeries series() const;
};

EnsembleResult run_ensemble(const EnsembleRequest& request);

/// Report step indices 0, stride, 2 stride, ... <= n_steps.
std::vector<std::size_t> report_steps(const stochastic::TimeGrid& grid, std::size_t stride);

}  // namespace dephasim
