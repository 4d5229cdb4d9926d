#include "dephasim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dephasim/errors.hpp"

namespace dephasim::analysis {

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    const Matrix2c diff = rho1.matrix() - rho2.matrix();
    // Traceless Hermitian up to rounding: eigenvalues tr/2 +- sqrt(((a-d)/2)^2 + |b|^2).
    const double a = diff(0, 0).real();
    const double d = diff(1, 1).real();
    const double half_gap = std::hypot(0.5 * (a - d), std::abs(diff(0, 1)));
    const double mid = 0.5 * (a + d);
    return std::min(1.0, 0.5 * (std::abs(mid + half_gap) + std::abs(mid - half_gap)));
}

std::vector<DistancePoint> coherence_trace_distance(const channel::CoherenceSeries& series) {
    series.validate();
    std::vector<DistancePoint> out(series.times.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {series.times[i], std::abs(series.values[i])};
    return out;
}

std::string_view classification_name(Classification c) {
    return c == Classification::NonMarkovian ? "NonMarkovian" : "Markovian";
}

MarkovianityReport blp_measure(std::span<const DistancePoint> d_series, double tolerance) {
    if (d_series.size() < 2) throw ParameterError("blp_measure: need at least two points");
    if (!(tolerance >= 0.0)) throw ParameterError("blp_measure: tolerance must be >= 0");
    for (std::size_t k = 0; k < d_series.size(); ++k) {
        if (!std::isfinite(d_series[k].t) || !std::isfinite(d_series[k].d)) {
            throw ParameterError("blp_measure: non-finite entry at index " + std::to_string(k));
        }
        if (k > 0 && !(d_series[k].t > d_series[k - 1].t)) {
            throw ParameterError("blp_measure: times not strictly increasing at index " + std::to_string(k));
        }
    }

    MarkovianityReport rep;
    rep.tolerance = tolerance;
    for (std::size_t k = 0; k + 1 < d_series.size(); ++k) {
        rep.blp_value += std::max(0.0, d_series[k + 1].d - d_series[k].d);
    }

    bool rising = false;
    DistancePoint low = d_series[0];
    DistancePoint peak = d_series[0];
    auto close = [&] {
        rep.revival_intervals.push_back({low.t, peak.t, peak.d - low.d});
        rep.significant_blp += peak.d - low.d;
    };
    for (std::size_t k = 1; k < d_series.size(); ++k) {
        const DistancePoint& p = d_series[k];
        if (!rising) {
            if (p.d <= low.d) {
                low = p;
            } else if (p.d - low.d > tolerance) {
                rising = true;
                peak = p;
            }
        } else if (p.d > peak.d) {
            peak = p;
        } else if (peak.d - p.d > tolerance || tolerance == 0.0) {
            // With zero tolerance a flat or falling step ends the run.
            close();
            rising = false;
            low = p;
        }
    }
    if (rising) close();
    rep.classification = rep.revival_intervals.empty() ? Classification::Markovian : Classification::NonMarkovian;
    return rep;
}

double noise_tolerance(const channel::CoherenceSeries& series, double factor, double floor) {
    double worst = 0.0;
    for (double s : series.stderr_values) {
        if (std::isfinite(s)) worst = std::max(worst, s);
    }
    return std::max(floor, factor * worst);
}

}  // namespace dephasim::analysis
