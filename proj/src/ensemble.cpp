#include "dephasim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "dephasim/errors.hpp"
#include "dephasim/reduction.hpp"

namespace dephasim {

void EnsembleRequest::validate() const {
    process.validate();
    grid.validate();
    if (report_stride < 1) throw ParameterError("ensemble: report_stride must be >= 1");
    if (n_paths < 1) throw ParameterError("ensemble: n_paths must be >= 1");
    if (!weights.empty()) {
        if (weights.size() != n_paths) throw ParameterError("ensemble: one weight per path required");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("ensemble: weights must be finite and >= 0");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-10) throw ParameterError("ensemble: weights must sum to 1");
    }
}

std::vector<std::size_t> report_steps(const stochastic::TimeGrid& grid, std::size_t stride) {
    if (stride < 1) throw ParameterError("report stride must be >= 1");
    std::vector<std::size_t> steps;
    for (std::size_t k = 0; k <= grid.n_steps; k += stride) steps.push_back(k);
    return steps;
}

channel::CoherenceSeries EnsembleResult::series() const {
    return {times, coherence, stderr_values, channel::Provenance::MonteCarlo};
}

EnsembleResult run_ensemble(const EnsembleRequest& request) {
    request.validate();
    // Fail on bad parameters before spawning workers.
    stochastic::NoiseStepper probe(request.process, request.grid, request.seed, 0);

    EnsembleResult result;
    result.steps = report_steps(request.grid, request.report_stride);
    const std::size_t n_reports = result.steps.size();
    const std::size_t n_paths = request.n_paths;
    const std::size_t n_blocks = (n_paths + kReductionBlock - 1) / kReductionBlock;
    const double uniform = 1.0 / static_cast<double>(n_paths);
    const double weight_total =
        request.weights.empty() ? blocked_sum<double>(std::vector<double>(n_paths, uniform))
                                : blocked_sum<double>(request.weights);

    std::vector<std::vector<Complex>> partials(n_blocks, std::vector<Complex>(n_reports));
    std::atomic<std::size_t> next_block{0};

    auto worker = [&] {
        std::vector<double> phase_at_report(n_reports);
        for (std::size_t b = next_block++; b < n_blocks; b = next_block++) {
            auto& partial = partials[b];
            const std::size_t end = std::min(n_paths, (b + 1) * kReductionBlock);
            for (std::size_t r = b * kReductionBlock; r < end; ++r) {
                stochastic::NoiseStepper stepper(request.process, request.grid, request.seed, r);
                const double dt = request.grid.dt;
                double area = 0.0;
                phase_at_report[0] = 0.0;
                for (std::size_t i = 1; i < n_reports; ++i) {
                    for (std::size_t k = result.steps[i - 1]; k < result.steps[i]; ++k) {
                        area += stepper.value();
                        stepper.advance();
                    }
                    phase_at_report[i] = area * dt;
                }
                const double w = request.weights.empty() ? uniform : request.weights[r];
                for (std::size_t i = 0; i < n_reports; ++i) partial[i] += w * channel::phase_factor(phase_at_report[i]);
            }
        }
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(request.workers, static_cast<unsigned>(n_blocks)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    }

    result.times.resize(n_reports);
    result.coherence.resize(n_reports);
    result.stderr_values.resize(n_reports);
    result.lab_coherence.resize(n_reports);
    for (std::size_t i = 0; i < n_reports; ++i) {
        Complex total{};
        for (std::size_t b = 0; b < n_blocks; ++b) total += partials[b][i];
        result.coherence[i] = channel::normalize_coherence(total, weight_total);
        const double t = request.grid.time(result.steps[i]);
        result.times[i] = t;
        result.stderr_values[i] = channel::ensemble_stderr(result.coherence[i], n_paths);
        result.lab_coherence[i] = channel::phase_factor(request.hamiltonian.epsilon * t) * result.coherence[i];
    }
    return result;
}

}  // namespace dephasim
