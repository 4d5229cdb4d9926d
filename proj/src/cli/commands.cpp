#include "dephasim/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "dephasim/analysis.hpp"
#include "dephasim/ensemble.hpp"
#include "dephasim/errors.hpp"
#include "dephasim/tomography.hpp"

namespace dephasim::cli {

using nlohmann::json;

namespace {

apparatus::SpectralModel spectral_model(const RunConfig& cfg) {
    apparatus::SpectralModel m;
    m.n_pixels = cfg.n_paths;
    m.pixel_pitch_mm = cfg.apparatus.pixel_pitch_mm;
    m.component_fwhm_mm = cfg.apparatus.component_fwhm_mm;
    m.dispersion_nm_per_mm = cfg.apparatus.dispersion_nm_per_mm;
    m.response = cfg.apparatus.pixel_response;
    if (cfg.apparatus.spectrum != "rectangular") {
        m.spectrum_kind = apparatus::SpectrumKind::Tabulated;
        m.spectrum = apparatus::load_tabulated_spectrum(cfg.apparatus.spectrum);
    }
    return m;
}

EnsembleRequest ensemble_request(const RunConfig& cfg, unsigned workers) {
    EnsembleRequest req;
    req.process = cfg.process;
    req.grid = cfg.grid;
    req.report_stride = cfg.report_stride;
    req.n_paths = cfg.n_paths;
    req.seed = {cfg.master_seed};
    req.hamiltonian = cfg.model;
    req.workers = workers;
    if (cfg.apparatus.enabled) {
        auto w = apparatus::build_overlap_matrix(spectral_model(cfg)).weights();
        double total = 0.0;
        for (double x : w) total += x;
        for (double& x : w) x /= total;
        req.weights = std::move(w);
    }
    return req;
}

json report_to_json(const analysis::MarkovianityReport& rep) {
    json intervals = json::array();
    for (const auto& iv : rep.revival_intervals) {
        intervals.push_back({{"t_start", iv.t_start}, {"t_end", iv.t_end}, {"rise", iv.rise}});
    }
    return {{"blp_value", rep.blp_value},
            {"significant_blp", rep.significant_blp},
            {"tolerance", rep.tolerance},
            {"revival_intervals", intervals},
            {"classification", std::string(analysis::classification_name(rep.classification))}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

constexpr const char* kPlotScript = R"PY(# Plot the coherence table written by `dephasim simulate`.
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "coherence.csv"
with open(path) as f:
    rows = list(csv.DictReader(f))
t = [float(r["t"]) for r in rows]
an = [abs(float(r["C_analytic"])) for r in rows]
mc = [float(r["C_mc_abs"]) for r in rows]
se = [float(r["mc_stderr"]) for r in rows]
fig, ax = plt.subplots()
for k, alpha in ((2, 0.2), (1, 0.4)):
    ax.fill_between(t, [a - k * s for a, s in zip(an, se)], [a + k * s for a, s in zip(an, se)],
                    color="tab:blue", alpha=alpha, lw=0)
ax.plot(t, an, color="tab:blue", label="analytic")
ax.plot(t, mc, "o", ms=3, color="tab:green", label="Monte Carlo")
if "C_counts" in rows[0]:
    ax.plot(t, [abs(float(r["C_counts"])) for r in rows], "D", ms=3, color="tab:olive", label="|+> counts")
if "C_tomo_real" in rows[0]:
    ax.plot(t, [abs(complex(float(r["C_tomo_real"]), float(r["C_tomo_imag"]))) for r in rows], "o", ms=3,
            mfc="none", color="tab:red", label="tomography")
ax.set_xlabel("t")
ax.set_ylabel("C(t)")
ax.legend()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
)PY";

}  // namespace

json calibration_to_json(const apparatus::CalibrationResult& c) {
    return {{"n_hat", c.n_hat},
            {"n_err", c.n_err},
            {"p_hat", c.p_hat},
            {"p_err", c.p_err},
            {"residual_norm", c.residual_norm},
            {"flags", {{"p_out_of_range", c.p_out_of_range}, {"p_consistent_with_zero", c.p_consistent_with_zero}}}};
}

apparatus::CalibrationResult calibration_from_json(const json& doc) {
    try {
        apparatus::CalibrationResult c;
        c.n_hat = doc.at("n_hat").get<double>();
        c.n_err = doc.value("n_err", 0.0);
        c.p_hat = doc.at("p_hat").get<double>();
        c.p_err = doc.value("p_err", 0.0);
        c.residual_norm = doc.value("residual_norm", 0.0);
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("calibration file: ") + e.what());
    }
}

SimulationOutput simulate(const RunConfig& cfg, unsigned workers) {
    cfg.validate();
    const EnsembleRequest req = ensemble_request(cfg, workers);
    const EnsembleResult ens = run_ensemble(req);

    std::optional<apparatus::CalibrationResult> calib;
    if (cfg.apparatus.enabled) {
        if (cfg.apparatus.calibration_file.empty()) {
            calib = apparatus::CalibrationResult{};
            calib->n_hat = cfg.apparatus.detector.n_mean;
            calib->p_hat = cfg.apparatus.detector.p;
        } else {
            calib = calibration_from_json(load_json_file(cfg.apparatus.calibration_file));
        }
    }

    SimulationOutput out;
    Table& table = out.table;
    table.header = {"t", "C_analytic", "C_mc_real", "C_mc_imag", "C_mc_abs", "mc_stderr", "D"};
    if (cfg.apparatus.enabled) {
        for (const char* h : {"C_counts", "counts_raw", "counts_stderr"}) table.header.emplace_back(h);
    }
    if (cfg.tomography.enabled) {
        for (const char* h : {"C_tomo_real", "C_tomo_imag", "tomo_stderr"}) table.header.emplace_back(h);
    }

    const double state_p = cfg.apparatus.enabled ? cfg.apparatus.detector.p : 1.0;
    for (std::size_t i = 0; i < ens.times.size(); ++i) {
        const double t = ens.times[i];
        const Complex c = ens.coherence[i];
        std::vector<double> row{t, channel::analytic_coherence(cfg.process, t), c.real(), c.imag(), std::abs(c),
                                ens.stderr_values[i], std::abs(c)};
        if (cfg.apparatus.enabled) {
            const double re = std::clamp(c.real(), -1.0, 1.0);
            double counts = 0.0;
            if (cfg.apparatus.noiseless) {
                counts = cfg.apparatus.detector.mean_counts(re);
            } else {
                Engine rng = make_stream(cfg.master_seed, StreamDomain::Counts, i);
                counts = static_cast<double>(apparatus::simulate_coincidence_counts(cfg.apparatus.detector, re, rng));
            }
            row.push_back(apparatus::coherence_from_counts(counts, *calib, cfg.apparatus.estimator));
            row.push_back(counts);
            row.push_back(apparatus::coherence_from_counts_stderr(counts, *calib));
        }
        if (cfg.tomography.enabled) {
            const DensityMatrix state = channel::dephasing_state(c, state_p);
            tomography::TomographyCounts counts;
            if (cfg.apparatus.noiseless) {
                counts = tomography::expected_counts(state, cfg.tomography.baseline);
            } else {
                Engine rng = make_stream(cfg.master_seed, StreamDomain::Tomography, i);
                counts = tomography::simulate_tomography_counts(state, cfg.tomography.baseline, rng);
            }
            const DensityMatrix rho = tomography::reconstruct_linear_inversion(counts);
            const double p_div = calib ? calib->p_hat : 1.0;
            const Complex c_tomo = 2.0 * rho.coherence() / p_div;
            row.push_back(c_tomo.real());
            row.push_back(c_tomo.imag());
            row.push_back(tomography::stokes_stderr(counts)[0] / std::abs(p_div));
        }
        table.rows.push_back(std::move(row));
    }

    json projectors = json::array();
    for (auto k : tomography::kProjectors) projectors.push_back(std::string(tomography::projector_name(k)));
    out.metadata = {{"format", "dephasim-metadata/1"},
                    {"version", kVersion},
                    {"command", "simulate"},
                    {"master_seed", cfg.master_seed},
                    {"n_reports", ens.times.size()},
                    {"config", to_json(cfg)},
                    {"analysis", analyze(table, cfg.analysis)}};
    if (cfg.tomography.enabled) out.metadata["tomography_projectors"] = projectors;
    if (calib) out.metadata["calibration_used"] = calibration_to_json(*calib);
    if (!req.weights.empty()) {
        const auto [lo, hi] = std::minmax_element(req.weights.begin(), req.weights.end());
        out.metadata["pixel_weights"] = {{"min", *lo}, {"max", *hi}};
    }
    return out;
}

CalibrationOutput calibrate(const RunConfig& cfg, unsigned workers) {
    cfg.validate();
    if (!cfg.apparatus.enabled) throw ConfigError("config: calibrate requires apparatus.enabled=true");

    RunConfig static_cfg = cfg;
    static_cfg.process.kind = stochastic::ProcessKind::RTN;
    static_cfg.process.gamma = 0.0;
    static_cfg.grid.n_steps = (cfg.calibration.n_points - 1) * cfg.report_stride;
    const EnsembleResult ens = run_ensemble(ensemble_request(static_cfg, workers));

    const auto& detector = cfg.apparatus.detector;
    std::vector<double> means(ens.times.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        means[i] = detector.mean_counts(std::clamp(ens.coherence[i].real(), -1.0, 1.0));
    }

    CalibrationOutput out;
    out.counts.header = {"t", "counts"};
    json fits = json::array();
    std::size_t p_hits = 0, n_hits = 0, both_hits = 0;
    std::optional<apparatus::CalibrationResult> first;
    for (std::size_t rep = 0; rep < cfg.calibration.repetitions; ++rep) {
        Engine rng = make_stream(cfg.master_seed, StreamDomain::Calibration, rep);
        std::vector<apparatus::CountSample> samples(means.size());
        for (std::size_t i = 0; i < means.size(); ++i) {
            double counts = means[i];
            if (!cfg.apparatus.noiseless) {
                boost::random::poisson_distribution<std::int64_t, double> poisson(means[i]);
                counts = static_cast<double>(poisson(rng));
            }
            samples[i] = {ens.times[i], counts};
            if (rep == 0) out.counts.rows.push_back({ens.times[i], counts});
        }
        const auto fit = apparatus::calibrate_static_rtn(samples);
        if (!first) first = fit;
        const bool p_ok = std::abs(fit.p_hat - detector.p) <= cfg.calibration.p_tolerance;
        const bool n_ok = std::abs(fit.n_hat - detector.n_mean) <= cfg.calibration.n_tolerance;
        p_hits += p_ok;
        n_hits += n_ok;
        both_hits += p_ok && n_ok;
        fits.push_back({{"n_hat", fit.n_hat}, {"p_hat", fit.p_hat}});
    }
    const double reps = static_cast<double>(cfg.calibration.repetitions);
    out.result = calibration_to_json(*first);
    out.result["format"] = "dephasim-calibration/1";
    out.result["version"] = kVersion;
    out.result["truth"] = {{"N", detector.n_mean}, {"p", detector.p}};
    out.result["n_points"] = means.size();
    out.result["repetitions"] = cfg.calibration.repetitions;
    out.result["coverage"] = {{"p_tolerance", cfg.calibration.p_tolerance},
                              {"n_tolerance", cfg.calibration.n_tolerance},
                              {"p_within", static_cast<double>(p_hits) / reps},
                              {"n_within", static_cast<double>(n_hits) / reps},
                              {"both_within", static_cast<double>(both_hits) / reps}};
    out.result["fits"] = fits;
    out.result["config"] = to_json(cfg);
    return out;
}

json analyze(const Table& table, const AnalysisConfig& cfg) {
    const auto t_col = table.column("t");
    if (!t_col) throw DataError("analyze: table has no 't' column");
    std::optional<std::size_t> d_col = table.column(cfg.column);
    std::optional<std::size_t> re_col, im_col;
    if (!d_col) {
        re_col = table.column("C_mc_real");
        im_col = table.column("C_mc_imag");
        if (!(cfg.column == "D" && re_col && im_col)) throw DataError("analyze: table has no '" + cfg.column + "' column");
    }
    const auto se_col = table.column("mc_stderr");
    if (table.rows.size() < 2) throw DataError("analyze: need at least two data rows");

    channel::CoherenceSeries series;
    series.provenance = channel::Provenance::MonteCarlo;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "analyze: data row " + std::to_string(r + 1);
        const double t = row[*t_col];
        const double d = d_col ? std::abs(row[*d_col]) : std::hypot(row[*re_col], row[*im_col]);
        if (!std::isfinite(t) || !std::isfinite(d)) throw DataError(where + ": non-finite value");
        if (!series.times.empty() && !(t > series.times.back())) throw DataError(where + ": time is not increasing");
        series.times.push_back(t);
        series.values.emplace_back(d, 0.0);
        if (se_col) series.stderr_values.push_back(row[*se_col]);
    }
    const double tol = analysis::noise_tolerance(series, cfg.noise_factor, cfg.tolerance_floor);
    const auto d_series = analysis::coherence_trace_distance(series);
    json rep = report_to_json(analysis::blp_measure(d_series, tol));
    rep["n_points"] = d_series.size();
    rep["column"] = d_col ? table.header[*d_col] : std::string("|C_mc_real + i C_mc_imag|");
    return rep;
}

namespace {

void emit_error(std::ostream& err, int code, const std::string& kind, const std::string& message) {
    err << json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    // Dotted --section.key=value arguments are config overrides; everything
    // else goes to the option parser.
    std::vector<std::string> overrides;
    std::vector<std::string> passthrough;
    for (int i = 0; i < argc; ++i) {
        const std::string a = argv[i];
        const auto eq = a.find('=');
        const std::string name = a.substr(0, eq);
        if (i > 0 && a.rfind("--", 0) == 0 && name.find('.') != std::string::npos) {
            if (eq != std::string::npos) {
                overrides.push_back(a);
            } else if (i + 1 < argc) {
                overrides.push_back(a + "=" + argv[++i]);
            } else {
                emit_error(err, kExitConfig, "config", "override '" + a + "' has no value");
                return kExitConfig;
            }
        } else {
            passthrough.push_back(a);
        }
    }

    CLI::App app{"Simulate qubit dephasing channels driven by classical noise", "dephasim"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.footer("Config keys may be overridden as --section.key=value, e.g. --process.gamma=0.1");

    std::string config_path, out_dir, input_path;
    unsigned workers = 1;
    bool plot = false;

    auto* sim = app.add_subcommand("simulate", "Run the trajectory ensemble and write coherence.csv + metadata.json");
    auto* cal = app.add_subcommand("calibrate", "Fit N and p from simulated static-noise counts");
    auto* ana = app.add_subcommand("analyze", "Compute the BLP measure of a coherence table");
    for (auto* sub : {sim, cal, ana}) {
        sub->add_option("-c,--config", config_path, "JSON config or metadata document");
        sub->add_option("-o,--out", out_dir, "Output directory (overrides output.dir)");
    }
    for (auto* sub : {sim, cal}) sub->add_option("-j,--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sim->add_flag("--plot-script", plot, "Also write plot_coherence.py");
    ana->add_option("input", input_path, "Coherence table (CSV)")->required();

    std::vector<const char*> args;
    for (const auto& s : passthrough) args.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(args.size()), args.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        emit_error(err, kExitConfig, "usage", e.what());
        return kExitConfig;
    }

    try {
        const json file_doc = config_path.empty() ? json::object() : load_json_file(config_path);
        RunConfig cfg = resolve_config(file_doc, overrides);
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        if (plot) cfg.output.plot_script = true;
        const std::filesystem::path dir(cfg.output.dir);
        std::filesystem::create_directories(dir);

        if (sim->parsed()) {
            const auto res = simulate(cfg, workers);
            write_table((dir / "coherence.csv").string(), res.table);
            write_json(dir / "metadata.json", res.metadata);
            if (cfg.output.plot_script) {
                std::ofstream script(dir / "plot_coherence.py");
                script << kPlotScript;
            }
            out << res.metadata["analysis"].dump() << '\n';
        } else if (cal->parsed()) {
            const auto res = calibrate(cfg, workers);
            write_json(dir / "calibration.json", res.result);
            write_table((dir / "calibration_counts.csv").string(), res.counts);
            json summary = res.result;
            summary.erase("fits");
            summary.erase("config");
            out << summary.dump() << '\n';
        } else {
            const auto rep = analyze(read_table(input_path), cfg.analysis);
            write_json(dir / "report.json", rep);
            out << rep.dump() << '\n';
        }
    } catch (const ConfigError& e) {
        emit_error(err, kExitConfig, "config", e.what());
        return kExitConfig;
    } catch (const FitError& e) {
        emit_error(err, kExitRuntime, "fit", e.what());
        return kExitRuntime;
    } catch (const DataError& e) {
        emit_error(err, kExitRuntime, "data", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        emit_error(err, kExitRuntime, "runtime", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace dephasim::cli
