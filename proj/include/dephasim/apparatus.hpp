#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dephasim/density_matrix.hpp"
#include "dephasim/rng.hpp"

namespace dephasim::apparatus {

/// Intensity profile |f(x)|^2 across the modulator, x in mm.
struct TabulatedSpectrum {
    std::vector<double> position_mm;
    std::vector<double> intensity;

    /// Linear interpolation, zero outside the tabulated range.
    [[nodiscard]] double operator()(double x_mm) const;
};

/// Two-column text: position_mm, relative_intensity. Blank lines and lines
/// starting with '#' are skipped; a non-numeric first line is a header.
TabulatedSpectrum parse_tabulated_spectrum(std::istream& in);
TabulatedSpectrum load_tabulated_spectrum(const std::string& path);

enum class SpectrumKind { Rectangular, Tabulated };

/// How a spectral component at x couples into pixel r.
enum class PixelResponse {
    Indicator,        ///< |eta_r(x)|^2 = 1 inside pixel r, 0 elsewhere
    GaussianBlurred,  ///< pixel window convolved with the component's Gaussian profile
};

struct SpectralModel {
    std::size_t n_pixels = 100;
    double pixel_pitch_mm = 0.1;
    double component_fwhm_mm = 0.06;
    double dispersion_nm_per_mm = 1.82;
    SpectrumKind spectrum_kind = SpectrumKind::Rectangular;
    PixelResponse response = PixelResponse::GaussianBlurred;
    TabulatedSpectrum spectrum;
    /// Quadrature nodes per pixel width; at least 32.
    std::size_t samples_per_pixel = 64;

    void validate() const;
    /// Pixels are laid out symmetrically about x = 0.
    [[nodiscard]] double array_left_mm() const noexcept;
    /// Wavelength offset omega = alpha x, in nm.
    [[nodiscard]] double wavelength_offset_nm(double x_mm) const noexcept { return dispersion_nm_per_mm * x_mm; }
};

/// A_rs = int dx |f(x)|^2 eta_r(x) eta_s(x)^*.
struct PixelOverlapMatrix {
    Eigen::MatrixXcd entries;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(entries.rows()); }
    [[nodiscard]] std::vector<double> weights() const;
};

PixelOverlapMatrix build_overlap_matrix(const SpectralModel& model);

/// rho with <H|rho|V> = (p/2) sum_r A_rr exp(-2i Phi_r) and diagonal 1/2.
DensityMatrix apparatus_state(std::span<const double> weights, std::span<const double> phases, double p);

struct DetectorModel {
    double n_mean = 186.0;           ///< baseline coincidence count N per acquisition
    double p = 0.88;                 ///< purity parameter
    double acquisition_time_s = 10;  ///< metadata only

    void validate() const;
    /// N (1 + p Re C).
    [[nodiscard]] double mean_counts(double coherence_real) const;
};

/// One Poisson draw with mean N (1 + p coherence_real).
std::int64_t simulate_coincidence_counts(const DetectorModel& detector, double coherence_real, Engine& rng);

struct CountSample {
    double t = 0.0;
    double counts = 0.0;
};

struct CalibrationResult {
    double n_hat = 0.0;
    double n_err = 0.0;
    double p_hat = 0.0;
    double p_err = 0.0;
    double residual_norm = 0.0;
    /// p_hat fell outside [0, 1]; the value is reported unclamped.
    bool p_out_of_range = false;
    /// |p_hat| <= 3 p_err.
    bool p_consistent_with_zero = false;
};

/// Least squares of N_cc = a + b cos(2t); N = a, p = b / a.
CalibrationResult calibrate_static_rtn(std::span<const CountSample> counts);

enum class EstimatorConvention {
    Normalized,  ///< (N_cc / N - 1) / p
    Literal,     ///< (N_cc - N) / p, only meaningful for counts pre-divided by N
};

double coherence_from_counts(double count, const CalibrationResult& calibration,
                             EstimatorConvention convention = EstimatorConvention::Normalized);

/// Poisson standard error of the normalized estimator for a single count.
double coherence_from_counts_stderr(double count, const CalibrationResult& calibration);

}  // namespace dephasim::apparatus
