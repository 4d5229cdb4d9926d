#include "dephasim/cli/config.hpp"

#include <cmath>
#include <fstream>

#include "dephasim/errors.hpp"

namespace dephasim::cli {

using nlohmann::json;

namespace {

std::string kind_name(stochastic::ProcessKind k) { return k == stochastic::ProcessKind::RTN ? "rtn" : "ou"; }

std::string initial_name(stochastic::RtnInitial i) {
    return i == stochastic::RtnInitial::ForcedBalanced ? "forced_balanced" : "random_equiprobable";
}

std::string response_name(apparatus::PixelResponse r) {
    return r == apparatus::PixelResponse::Indicator ? "indicator" : "gaussian";
}

std::string estimator_name(apparatus::EstimatorConvention e) {
    return e == apparatus::EstimatorConvention::Literal ? "literal" : "normalized";
}

// Reject keys in `doc` that are absent from `schema`, recursively.
void check_keys(const json& schema, const json& doc, const std::string& prefix) {
    if (!doc.is_object()) throw ConfigError("config: '" + prefix + "' must be an object");
    for (const auto& [key, value] : doc.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (!schema.contains(key)) throw ConfigError("config: unknown key '" + path + "'");
        if (schema[key].is_object()) check_keys(schema[key], value, path);
    }
}

void merge(json& base, const json& patch) {
    for (const auto& [key, value] : patch.items()) {
        if (value.is_object() && base.contains(key) && base[key].is_object()) {
            merge(base[key], value);
        } else {
            base[key] = value;
        }
    }
}

template <typename T>
T get(const json& doc, const char* section, const char* key) {
    const json& v = doc.at(section).at(key);
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && v.get<long long>() < 0) throw ConfigError("");
            }
        } else {
            if (!v.is_number()) throw ConfigError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw ConfigError(std::string("config: '") + section + "." + key + "' has the wrong type: " + v.dump());
    }
}

}  // namespace

void RunConfig::validate() const {
    try {
        process.validate();
        grid.validate();
        if (process.kind == stochastic::ProcessKind::OU && process.gamma * grid.dt >= 1.0) {
            throw ParameterError("OU requires gamma*dt < 1");
        }
        if (report_stride < 1) throw ParameterError("grid.report_stride must be >= 1");
        if (n_paths < 1) throw ParameterError("ensemble.n_paths must be >= 1");
        if (!std::isfinite(model.epsilon)) throw ParameterError("model.epsilon must be finite");
        if (apparatus.enabled) {
            apparatus.detector.validate();
            if (!(apparatus.pixel_pitch_mm > 0.0) || !(apparatus.component_fwhm_mm > 0.0) ||
                !(apparatus.dispersion_nm_per_mm > 0.0)) {
                throw ParameterError("apparatus geometry values must be > 0");
            }
        }
        if (calibration.n_points < 3) throw ParameterError("calibration.n_points must be >= 3");
        if (calibration.repetitions < 1) throw ParameterError("calibration.repetitions must be >= 1");
        if (tomography.enabled && !(tomography.baseline > 0.0)) throw ParameterError("tomography.baseline must be > 0");
        if (!(analysis.noise_factor >= 0.0) || !(analysis.tolerance_floor >= 0.0)) {
            throw ParameterError("analysis tolerances must be >= 0");
        }
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

json to_json(const RunConfig& c) {
    return json{
        {"process", {{"kind", kind_name(c.process.kind)}, {"gamma", c.process.gamma}, {"rtn_initial", initial_name(c.process.rtn_initial)}}},
        {"model", {{"epsilon", c.model.epsilon}}},
        {"grid", {{"dt", c.grid.dt}, {"n_steps", c.grid.n_steps}, {"report_stride", c.report_stride}}},
        {"ensemble", {{"n_paths", c.n_paths}, {"master_seed", c.master_seed}}},
        {"apparatus",
         {{"enabled", c.apparatus.enabled},
          {"N", c.apparatus.detector.n_mean},
          {"p", c.apparatus.detector.p},
          {"acquisition_time_s", c.apparatus.detector.acquisition_time_s},
          {"spectrum", c.apparatus.spectrum},
          {"pixel_response", response_name(c.apparatus.pixel_response)},
          {"pixel_pitch_mm", c.apparatus.pixel_pitch_mm},
          {"component_fwhm_mm", c.apparatus.component_fwhm_mm},
          {"dispersion_nm_per_mm", c.apparatus.dispersion_nm_per_mm},
          {"noiseless", c.apparatus.noiseless},
          {"estimator", estimator_name(c.apparatus.estimator)},
          {"calibration_file", c.apparatus.calibration_file}}},
        {"calibration",
         {{"n_points", c.calibration.n_points},
          {"repetitions", c.calibration.repetitions},
          {"p_tolerance", c.calibration.p_tolerance},
          {"n_tolerance", c.calibration.n_tolerance}}},
        {"tomography", {{"enabled", c.tomography.enabled}, {"baseline", c.tomography.baseline}}},
        {"analysis",
         {{"noise_factor", c.analysis.noise_factor},
          {"tolerance_floor", c.analysis.tolerance_floor},
          {"column", c.analysis.column}}},
        {"output", {{"dir", c.output.dir}, {"plot_script", c.output.plot_script}}},
    };
}

RunConfig from_json(const json& doc) {
    check_keys(to_json(RunConfig{}), doc, "");
    json full = to_json(RunConfig{});
    merge(full, doc);

    RunConfig c;
    const auto kind = get<std::string>(full, "process", "kind");
    if (kind == "rtn") {
        c.process.kind = stochastic::ProcessKind::RTN;
    } else if (kind == "ou") {
        c.process.kind = stochastic::ProcessKind::OU;
    } else {
        throw ConfigError("config: process.kind must be 'rtn' or 'ou', got '" + kind + "'");
    }
    c.process.gamma = get<double>(full, "process", "gamma");
    const auto initial = get<std::string>(full, "process", "rtn_initial");
    if (initial == "random_equiprobable") {
        c.process.rtn_initial = stochastic::RtnInitial::RandomEquiprobable;
    } else if (initial == "forced_balanced") {
        c.process.rtn_initial = stochastic::RtnInitial::ForcedBalanced;
    } else {
        throw ConfigError("config: process.rtn_initial must be 'random_equiprobable' or 'forced_balanced'");
    }
    c.model.epsilon = get<double>(full, "model", "epsilon");
    c.grid.dt = get<double>(full, "grid", "dt");
    c.grid.n_steps = get<std::size_t>(full, "grid", "n_steps");
    c.report_stride = get<std::size_t>(full, "grid", "report_stride");
    c.n_paths = get<std::size_t>(full, "ensemble", "n_paths");
    c.master_seed = get<std::uint64_t>(full, "ensemble", "master_seed");

    auto& a = c.apparatus;
    a.enabled = get<bool>(full, "apparatus", "enabled");
    a.detector.n_mean = get<double>(full, "apparatus", "N");
    a.detector.p = get<double>(full, "apparatus", "p");
    a.detector.acquisition_time_s = get<double>(full, "apparatus", "acquisition_time_s");
    a.spectrum = get<std::string>(full, "apparatus", "spectrum");
    const auto response = get<std::string>(full, "apparatus", "pixel_response");
    if (response == "gaussian") {
        a.pixel_response = apparatus::PixelResponse::GaussianBlurred;
    } else if (response == "indicator") {
        a.pixel_response = apparatus::PixelResponse::Indicator;
    } else {
        throw ConfigError("config: apparatus.pixel_response must be 'gaussian' or 'indicator'");
    }
    a.pixel_pitch_mm = get<double>(full, "apparatus", "pixel_pitch_mm");
    a.component_fwhm_mm = get<double>(full, "apparatus", "component_fwhm_mm");
    a.dispersion_nm_per_mm = get<double>(full, "apparatus", "dispersion_nm_per_mm");
    a.noiseless = get<bool>(full, "apparatus", "noiseless");
    const auto estimator = get<std::string>(full, "apparatus", "estimator");
    if (estimator == "normalized") {
        a.estimator = apparatus::EstimatorConvention::Normalized;
    } else if (estimator == "literal") {
        a.estimator = apparatus::EstimatorConvention::Literal;
    } else {
        throw ConfigError("config: apparatus.estimator must be 'normalized' or 'literal'");
    }
    a.calibration_file = get<std::string>(full, "apparatus", "calibration_file");

    c.calibration.n_points = get<std::size_t>(full, "calibration", "n_points");
    c.calibration.repetitions = get<std::size_t>(full, "calibration", "repetitions");
    c.calibration.p_tolerance = get<double>(full, "calibration", "p_tolerance");
    c.calibration.n_tolerance = get<double>(full, "calibration", "n_tolerance");
    c.tomography.enabled = get<bool>(full, "tomography", "enabled");
    c.tomography.baseline = get<double>(full, "tomography", "baseline");
    c.analysis.noise_factor = get<double>(full, "analysis", "noise_factor");
    c.analysis.tolerance_floor = get<double>(full, "analysis", "tolerance_floor");
    c.analysis.column = get<std::string>(full, "analysis", "column");
    c.output.dir = get<std::string>(full, "output", "dir");
    c.output.plot_script = get<bool>(full, "output", "plot_script");

    c.validate();
    return c;
}

void apply_override(json& doc, const std::string& dotted_key, const std::string& value) {
    if (dotted_key.empty()) throw ConfigError("config: empty override key");
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("config: malformed override key '" + dotted_key + "'");
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        if (!node->contains(part)) (*node)[part] = json::object();
        node = &(*node)[part];
        if (!node->is_object()) throw ConfigError("config: override '" + dotted_key + "' descends into a value");
        start = dot + 1;
    }
}

RunConfig resolve_config(const json& file_doc, const std::vector<std::string>& overrides) {
    json doc = file_doc.is_null() ? json::object() : file_doc;
    if (doc.is_object() && doc.contains("format") && doc["format"].is_string() &&
        doc["format"].get<std::string>().rfind("dephasim-metadata", 0) == 0) {
        if (!doc.contains("config")) throw ConfigError("config: metadata document has no 'config' section");
        doc = doc["config"];
    }
    for (const auto& ov : overrides) {
        std::string s = ov;
        if (s.rfind("--", 0) == 0) s = s.substr(2);
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("config: override '" + ov + "' must look like --key.path=value");
        apply_override(doc, s.substr(0, eq), s.substr(eq + 1));
    }
    return from_json(doc);
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config: '" + path + "' is not valid JSON");
    return doc;
}

}  // namespace dephasim::cli
