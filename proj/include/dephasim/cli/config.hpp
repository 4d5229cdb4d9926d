#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dephasim/apparatus.hpp"
#include "dephasim/channel.hpp"
#include "dephasim/stochastic.hpp"

namespace dephasim::cli {

/// Invalid or unknown configuration input. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ApparatusConfig {
    bool enabled = false;
    apparatus::DetectorModel detector;
    /// "rectangular" or the path of a two-column spectrum file.
    std::string spectrum = "rectangular";
    apparatus::PixelResponse pixel_response = apparatus::PixelResponse::GaussianBlurred;
    double pixel_pitch_mm = 0.1;
    double component_fwhm_mm = 0.06;
    double dispersion_nm_per_mm = 1.82;
    bool noiseless = false;
    apparatus::EstimatorConvention estimator = apparatus::EstimatorConvention::Normalized;
    /// Calibration JSON from `calibrate`; empty means the detector ground truth.
    std::string calibration_file;
};

struct CalibrationConfig {
    std::size_t n_points = 301;
    std::size_t repetitions = 1;
    double p_tolerance = 0.02;
    double n_tolerance = 2.0;
};

struct TomographyConfig {
    bool enabled = false;
    double baseline = 372.0;
};

struct AnalysisConfig {
    double noise_factor = 3.0;
    double tolerance_floor = 1e-9;
    std::string column = "D";
};

struct OutputConfig {
    std::string dir = ".";
    bool plot_script = false;
};

struct RunConfig {
    stochastic::ProcessSpec process;
    channel::HamiltonianParams model;
    stochastic::TimeGrid grid{0.001, 8000};
    std::size_t report_stride = 50;
    std::size_t n_paths = 100;
    std::uint64_t master_seed = 1;
    ApparatusConfig apparatus;
    CalibrationConfig calibration;
    TomographyConfig tomography;
    AnalysisConfig analysis;
    OutputConfig output;

    void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Every key must already exist in the defaults; types are checked.
RunConfig from_json(const nlohmann::json& doc);

/// Apply `--a.b.c=value`; value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& doc, const std::string& dotted_key, const std::string& value);

/// Defaults, then `file_doc` (a config or an emitted metadata document), then overrides.
RunConfig resolve_config(const nlohmann::json& file_doc, const std::vector<std::string>& overrides);

nlohmann::json load_json_file(const std::string& path);

}  // namespace dephasim::cli
