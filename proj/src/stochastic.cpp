#include "dephasim/stochastic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dephasim/errors.hpp"

namespace dephasim::stochastic {

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("time grid: dt must be positive and finite");
    if (n_steps < 1) throw ParameterError("time grid: n_steps must be >= 1");
}

void ProcessSpec::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("process: gamma must be finite and >= 0");
}

double rtn_flip_probability(double gamma, double dt) {
    if (!(gamma >= 0.0)) throw ParameterError("rtn_flip_probability: gamma must be >= 0");
    if (!(dt > 0.0)) throw ParameterError("rtn_flip_probability: dt must be > 0");
    return -std::expm1(-gamma * dt);
}

NoiseStepper::NoiseStepper(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index)
    : kind_(spec.kind), engine_(make_stream(seed.master_seed, StreamDomain::Path, path_index)) {
    spec.validate();
    grid.validate();
    if (kind_ == ProcessKind::RTN) {
        const double q = rtn_flip_probability(spec.gamma, grid.dt);
        const double scaled = std::ldexp(q, 64);
        flip_threshold_ = scaled >= 0x1p64 ? std::numeric_limits<std::uint64_t>::max()
                                           : static_cast<std::uint64_t>(scaled);
        if (spec.rtn_initial == RtnInitial::ForcedBalanced) {
            x_ = (path_index % 2 == 0) ? 1.0 : -1.0;
        } else {
            x_ = (engine_() >> 63) == 0 ? 1.0 : -1.0;
        }
    } else {
        if (spec.gamma * grid.dt >= 1.0) {
            throw ParameterError("OU: gamma*dt = " + std::to_string(spec.gamma * grid.dt) +
                                 " >= 1 makes the explicit update unstable");
        }
        drift_ = 1.0 - 2.0 * spec.gamma * grid.dt;
        diffusion_ = 2.0 * std::sqrt(spec.gamma) * std::sqrt(grid.dt);
        x_ = 0.0;
    }
}

namespace {

NoisePath materialize(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index) {
    NoiseStepper stepper(spec, grid, seed, path_index);
    NoisePath path;
    path.samples.resize(grid.n_points());
    path.samples[0] = stepper.value();
    for (std::size_t k = 1; k < path.samples.size(); ++k) {
        stepper.advance();
        path.samples[k] = stepper.value();
    }
    return path;
}

}  // namespace

NoisePath sample_rtn_path(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index) {
    if (spec.kind != ProcessKind::RTN) throw ParameterError("sample_rtn_path: process kind is not RTN");
    return materialize(spec, grid, seed, path_index);
}

NoisePath sample_ou_path(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index) {
    if (spec.kind != ProcessKind::OU) throw ParameterError("sample_ou_path: process kind is not OU");
    return materialize(spec, grid, seed, path_index);
}

NoisePath sample_path(const ProcessSpec& spec, const TimeGrid& grid, SeedSpec seed, std::uint64_t path_index) {
    return spec.kind == ProcessKind::RTN ? sample_rtn_path(spec, grid, seed, path_index)
                                         : sample_ou_path(spec, grid, seed, path_index);
}

PhasePath accumulate_phase(const NoisePath& path, const TimeGrid& grid) {
    grid.validate();
    if (path.samples.size() != grid.n_points()) {
        throw ParameterError("accumulate_phase: path has " + std::to_string(path.samples.size()) +
                             " samples, grid expects " + std::to_string(grid.n_points()));
    }
    PhasePath phase;
    phase.samples.resize(path.samples.size());
    double area = 0.0;
    phase.samples[0] = 0.0;
    for (std::size_t k = 0; k + 1 < path.samples.size(); ++k) {
        area += path.samples[k];
        phase.samples[k + 1] = area * grid.dt;
    }
    return phase;
}

}  // namespace dephasim::stochastic
