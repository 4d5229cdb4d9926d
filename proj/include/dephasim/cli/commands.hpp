#pragma once

#include <iosfwd>

#include <json.hpp>

#include "dephasim/apparatus.hpp"
#include "dephasim/cli/config.hpp"
#include "dephasim/cli/table.hpp"

namespace dephasim::cli {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct SimulationOutput {
    /// t, C_analytic, C_mc_real, C_mc_imag, C_mc_abs, mc_stderr, D
    /// [, C_counts, counts_raw, counts_stderr] [, C_tomo_real, C_tomo_imag, tomo_stderr]
    Table table;
    nlohmann::json metadata;
};

/// Run the configured experiment. `workers` only changes wall time.
SimulationOutput simulate(const RunConfig& cfg, unsigned workers = 1);

struct CalibrationOutput {
    nlohmann::json result;
    Table counts;  ///< t, counts of the first repetition
};

/// Static-noise (gamma = 0) calibration run on the report grid.
CalibrationOutput calibrate(const RunConfig& cfg, unsigned workers = 1);

/// BLP analysis of a coherence table.
nlohmann::json analyze(const Table& table, const AnalysisConfig& cfg);

apparatus::CalibrationResult calibration_from_json(const nlohmann::json& doc);
nlohmann::json calibration_to_json(const apparatus::CalibrationResult& c);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dephasim::cli
