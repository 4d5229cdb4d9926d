#include "dephasim/apparatus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/random/poisson_distribution.hpp>

#include "dephasim/channel.hpp"
#include "dephasim/errors.hpp"

namespace dephasim::apparatus {

double TabulatedSpectrum::operator()(double x_mm) const {
    if (position_mm.empty() || x_mm < position_mm.front() || x_mm > position_mm.back()) return 0.0;
    const auto hi = std::upper_bound(position_mm.begin(), position_mm.end(), x_mm);
    if (hi == position_mm.end()) return intensity.back();
    const auto i = static_cast<std::size_t>(hi - position_mm.begin());
    const double x0 = position_mm[i - 1];
    const double x1 = position_mm[i];
    const double u = (x_mm - x0) / (x1 - x0);
    return (1.0 - u) * intensity[i - 1] + u * intensity[i];
}

TabulatedSpectrum parse_tabulated_spectrum(std::istream& in) {
    TabulatedSpectrum s;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::string a, b, extra;
        fields >> a >> b;
        if (fields >> extra) throw DataError("spectrum line " + std::to_string(line_no) + ": expected two columns");
        double x = 0.0, y = 0.0;
        try {
            std::size_t used_a = 0, used_b = 0;
            x = std::stod(a, &used_a);
            y = std::stod(b, &used_b);
            if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            if (!seen_data && s.position_mm.empty()) {
                seen_data = true;  // header line
                continue;
            }
            throw DataError("spectrum line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
        }
        seen_data = true;
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw DataError("spectrum line " + std::to_string(line_no) + ": non-finite value");
        }
        if (y < 0.0) throw DataError("spectrum line " + std::to_string(line_no) + ": negative intensity");
        if (!s.position_mm.empty() && x <= s.position_mm.back()) {
            throw DataError("spectrum line " + std::to_string(line_no) + ": positions must increase");
        }
        s.position_mm.push_back(x);
        s.intensity.push_back(y);
    }
    if (s.position_mm.size() < 2) throw DataError("spectrum: need at least two samples");
    return s;
}

TabulatedSpectrum load_tabulated_spectrum(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open spectrum file '" + path + "'");
    return parse_tabulated_spectrum(in);
}

void SpectralModel::validate() const {
    if (n_pixels < 1) throw ParameterError("spectral model: n_pixels must be >= 1");
    if (!(pixel_pitch_mm > 0.0)) throw ParameterError("spectral model: pixel pitch must be > 0");
    if (!(component_fwhm_mm > 0.0)) throw ParameterError("spectral model: component FWHM must be > 0");
    if (!(dispersion_nm_per_mm > 0.0)) throw ParameterError("spectral model: dispersion must be > 0");
    if (samples_per_pixel < 32) throw ParameterError("spectral model: need >= 32 quadrature nodes per pixel");
    if (spectrum_kind == SpectrumKind::Tabulated) {
        if (spectrum.position_mm.size() != spectrum.intensity.size() || spectrum.position_mm.size() < 2) {
            throw DataError("spectral model: tabulated spectrum is malformed");
        }
        for (std::size_t i = 0; i < spectrum.position_mm.size(); ++i) {
            if (!std::isfinite(spectrum.position_mm[i]) || !std::isfinite(spectrum.intensity[i])) {
                throw DataError("spectral model: tabulated spectrum has non-finite values");
            }
            if (spectrum.intensity[i] < 0.0) throw DataError("spectral model: negative spectral intensity");
        }
    }
}

double SpectralModel::array_left_mm() const noexcept {
    return -0.5 * static_cast<double>(n_pixels) * pixel_pitch_mm;
}

std::vector<double> PixelOverlapMatrix::weights() const {
    std::vector<double> w(size());
    for (std::size_t r = 0; r < w.size(); ++r) w[r] = entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)).real();
    return w;
}

PixelOverlapMatrix build_overlap_matrix(const SpectralModel& model) {
    model.validate();
    const std::size_t n = model.n_pixels;
    const std::size_t m = model.samples_per_pixel;
    const double pitch = model.pixel_pitch_mm;
    const double left = model.array_left_mm();
    const double h = pitch / static_cast<double>(m);

    // Midpoint nodes and normalized spectral density on them.
    std::vector<double> nodes(n * m);
    std::vector<double> density(n * m);
    double norm = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        nodes[q] = left + (static_cast<double>(q) + 0.5) * h;
        density[q] = model.spectrum_kind == SpectrumKind::Rectangular ? 1.0 : model.spectrum(nodes[q]);
        norm += h * density[q];
    }
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DataError("spectral model: spectrum has no weight on the pixel array");
    for (double& d : density) d /= norm;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    if (model.response == PixelResponse::Indicator) {
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const auto r = static_cast<Eigen::Index>(q / m);
            a(r, r) += h * density[q];
        }
    } else {
        const double sigma = model.component_fwhm_mm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
        const double scale = 1.0 / (sigma * std::numbers::sqrt2);
        const auto reach = static_cast<std::ptrdiff_t>(std::ceil(10.0 * sigma / pitch)) + 1;
        std::vector<double> eta;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const auto home = static_cast<std::ptrdiff_t>(q / m);
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, home - reach);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, home + reach);
            eta.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
            double total = 0.0;
            for (std::ptrdiff_t r = lo; r <= hi; ++r) {
                const double a_r = left + static_cast<double>(r) * pitch;
                const double b_r = a_r + pitch;
                // Fraction of the Gaussian component at x landing in [a_r, b_r].
                const double frac = 0.5 * (std::erf((b_r - nodes[q]) * scale) - std::erf((a_r - nodes[q]) * scale));
                eta[static_cast<std::size_t>(r - lo)] = std::max(0.0, frac);
                total += eta[static_cast<std::size_t>(r - lo)];
            }
            // Completeness over the detectable pixels: sum_r |eta_r(x)|^2 = 1.
            for (double& e : eta) e = std::sqrt(e / total);
            const double w = h * density[q];
            for (std::ptrdiff_t r = lo; r <= hi; ++r) {
                const double er = eta[static_cast<std::size_t>(r - lo)];
                if (er == 0.0) continue;
                for (std::ptrdiff_t s = lo; s <= hi; ++s) {
                    a(r, s) += w * er * eta[static_cast<std::size_t>(s - lo)];
                }
            }
        }
    }
    return PixelOverlapMatrix{a.cast<Complex>()};
}

DensityMatrix apparatus_state(std::span<const double> weights, std::span<const double> phases, double p) {
    if (weights.size() != phases.size()) {
        throw ParameterError("apparatus_state: " + std::to_string(weights.size()) + " weights for " +
                             std::to_string(phases.size()) + " phases");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ParameterError("apparatus_state: negative pixel weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) throw ParameterError("apparatus_state: pixel weights must sum to 1");
    return channel::dephasing_state(channel::weighted_coherence(weights, phases), p);
}

void DetectorModel::validate() const {
    if (!(n_mean > 0.0) || !std::isfinite(n_mean)) throw ParameterError("detector: N must be > 0");
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("detector: p must lie in [0, 1]");
}

double DetectorModel::mean_counts(double coherence_real) const {
    validate();
    if (!(std::abs(coherence_real) <= 1.0 + 1e-12)) throw ParameterError("detector: |coherence| > 1");
    return n_mean * (1.0 + p * coherence_real);
}

std::int64_t simulate_coincidence_counts(const DetectorModel& detector, double coherence_real, Engine& rng) {
    const double mean = detector.mean_counts(coherence_real);
    if (!(mean > 0.0)) throw ParameterError("coincidence counts: Poisson mean must be > 0");
    boost::random::poisson_distribution<std::int64_t, double> poisson(mean);
    return poisson(rng);
}

CalibrationResult calibrate_static_rtn(std::span<const CountSample> counts) {
    std::set<double> distinct;
    double t_min = 0.0, t_max = 0.0;
    for (const auto& c : counts) {
        if (!std::isfinite(c.t) || !std::isfinite(c.counts)) throw FitError("calibration: non-finite sample");
        if (distinct.empty()) t_min = t_max = c.t;
        t_min = std::min(t_min, c.t);
        t_max = std::max(t_max, c.t);
        distinct.insert(c.t);
    }
    if (distinct.size() < 3) throw FitError("calibration: need at least 3 distinct times");
    if (t_max - t_min < 0.5 * std::numbers::pi - 1e-12) {
        throw FitError("calibration: times must span at least half a period of cos(2t)");
    }

    const auto m = static_cast<Eigen::Index>(counts.size());
    Eigen::MatrixXd design(m, 2);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& c = counts[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(2.0 * c.t);
        y(i) = c.counts;
    }
    const Eigen::Matrix2d normal = design.transpose() * design;
    // Degenerate when all cos(2t) coincide: the normal matrix loses rank.
    if (normal.determinant() <= 1e-10 * normal(0, 0) * normal(1, 1)) {
        throw FitError("calibration: degenerate design (cos(2t) is constant over the samples)");
    }
    const Eigen::Matrix2d inverse = normal.inverse();
    const Eigen::Vector2d coef = inverse * (design.transpose() * y);
    const double rss = (y - design * coef).squaredNorm();
    const Eigen::Matrix2d cov = (m > 2 ? rss / static_cast<double>(m - 2) : 0.0) * inverse;

    const double a = coef(0);
    const double b = coef(1);
    if (!(a > 0.0)) throw FitError("calibration: fitted baseline N is not positive");

    CalibrationResult res;
    res.n_hat = a;
    res.n_err = std::sqrt(std::max(0.0, cov(0, 0)));
    res.p_hat = b / a;
    const double var_p = cov(1, 1) / (a * a) + b * b * cov(0, 0) / (a * a * a * a) - 2.0 * b * cov(0, 1) / (a * a * a);
    res.p_err = std::sqrt(std::max(0.0, var_p));
    res.residual_norm = std::sqrt(rss);
    res.p_out_of_range = res.p_hat < 0.0 || res.p_hat > 1.0;
    res.p_consistent_with_zero = std::abs(res.p_hat) <= 3.0 * res.p_err;
    return res;
}

double coherence_from_counts(double count, const CalibrationResult& calibration, EstimatorConvention convention) {
    if (calibration.p_hat == 0.0) throw EstimationError("coherence_from_counts: calibrated p is zero");
    if (!(calibration.n_hat > 0.0)) throw EstimationError("coherence_from_counts: calibrated N must be > 0");
    if (convention == EstimatorConvention::Literal) return (count - calibration.n_hat) / calibration.p_hat;
    return (count / calibration.n_hat - 1.0) / calibration.p_hat;
}

double coherence_from_counts_stderr(double count, const CalibrationResult& calibration) {
    if (calibration.p_hat == 0.0 || !(calibration.n_hat > 0.0)) {
        throw EstimationError("coherence_from_counts_stderr: invalid calibration");
    }
    return std::sqrt(std::max(count, 1.0)) / (calibration.n_hat * std::abs(calibration.p_hat));
}

}  // namespace dephasim::apparatus
