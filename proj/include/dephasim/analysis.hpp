#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dephasim/channel.hpp"
#include "dephasim/density_matrix.hpp"

namespace dephasim::analysis {

/// Half the trace norm of rho1 - rho2.
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

struct DistancePoint {
    double t = 0.0;
    double d = 0.0;
};

/// D(t) = |C(t)|: the trace distance between the pair of dephased states
/// with opposite initial coherences.
std::vector<DistancePoint> coherence_trace_distance(const channel::CoherenceSeries& series);

struct RevivalInterval {
    double t_start = 0.0;
    double t_end = 0.0;
    double rise = 0.0;
};

enum class Classification { Markovian, NonMarkovian };

std::string_view classification_name(Classification c);

struct MarkovianityReport {
    /// Sum of positive increments over the sampled grid.
    double blp_value = 0.0;
    /// Sum of the rises of revivals that clear the tolerance.
    double significant_blp = 0.0;
    double tolerance = 0.0;
    std::vector<RevivalInterval> revival_intervals;
    Classification classification = Classification::Markovian;
};

/// Discrete positive variation of D plus revival detection. A revival opens
/// once D climbs more than `tolerance` above its running minimum and closes
/// once D falls more than `tolerance` below the peak. With tolerance 0 the
/// revivals are exactly the maximal runs of positive increments.
MarkovianityReport blp_measure(std::span<const DistancePoint> d_series, double tolerance = 0.0);

/// factor * (largest standard error in the series), never below `floor`.
double noise_tolerance(const channel::CoherenceSeries& series, double factor = 3.0, double floor = 1e-9);

}  // namespace dephasim::analysis
