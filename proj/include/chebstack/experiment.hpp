#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "chebstack/activation.hpp"
#include "chebstack/bisection.hpp"
#include "chebstack/dataset.hpp"
#include "chebstack/errors.hpp"
#include "chebstack/io.hpp"
#include "chebstack/stationarity.hpp"
#include "chebstack/stepwise.hpp"

namespace chebstack {

struct ExperimentConfig {
    std::string activation = "leaky_relu";
    double alpha = 0.01;
    double eps = 1e-6;
    double tau = -1.0;        // negative: derive per step from the deviation scale
    std::size_t max_units = 5;
    double stall_tol = -1.0;  // negative: use eps
    bool continue_past_tolerance = false;
    bool normalize = false;
    std::string input_path;
    std::string format = "csv";
    std::string target_column;
    std::string report_path;  // empty: return the report without writing
    std::uint64_t seed = 0;
    bool include_timings = true;
};

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

inline nlohmann::json weights_json(const WeightVector& w) {
    return {{"bias", w.bias}, {"weights", w.weights}};
}

inline nlohmann::json config_json(const ExperimentConfig& c) {
    return {{"activation", c.activation},
            {"alpha", c.alpha},
            {"eps", c.eps},
            {"tau", c.tau},
            {"steps", c.max_units},
            {"stall_tol", c.stall_tol},
            {"continue_past_tolerance", c.continue_past_tolerance},
            {"normalize", c.normalize},
            {"input", c.input_path},
            {"format", c.format},
            {"target", c.target_column},
            {"seed", c.seed}};
}

inline nlohmann::json certificate_json(const StationarityCertificate& cert) {
    nlohmann::json out{
        {"outcome", "certified"},
        {"verdict", cert.stationary() ? "stationary" : "not-stationary"},
        {"method", cert.method == CertificateMethod::SmoothHull ? "smooth-hull"
                                                                : "leaky-inclusion"},
        {"tau", cert.tau},
        {"max_deviation", cert.profile.max_deviation},
        {"pos_idx", cert.profile.pos_idx},
        {"neg_idx", cert.profile.neg_idx}};
    if (cert.method == CertificateMethod::SmoothHull) {
        if (cert.stationary()) {
            out["pos_coefficients"] = cert.pos_coefficients;
            out["neg_coefficients"] = cert.neg_coefficients;
            out["common_point"] = cert.common_point;
        } else {
            out["descent"] = cert.descent;
            out["descent_margin"] = cert.descent_margin;
        }
    } else if (!cert.stationary()) {
        out["failing_vertex"] = cert.failing_vertex;
        out["failing_mask"] = cert.failing_mask;
    }
    return out;
}

// Certificate at a step's terminal weights against that step's residual
// targets; exact interpolation is an outcome of its own, not a verdict.
inline nlohmann::json step_certificate(const Dataset& residual_data, const Activation& act,
                                       const WeightVector& w, double config_tau) {
    const double deviation = objective(residual_data, act, w);
    const double tau = config_tau >= 0.0 ? config_tau : default_tau(deviation);
    try {
        const StationarityCertificate cert =
            act.smooth() ? smooth_certificate(residual_data, act, w, tau)
                         : leaky_certificate(residual_data, act.alpha(), w, tau);
        return certificate_json(cert);
    } catch (const ZeroDeviationError&) {
        return {{"outcome", "interpolating"}, {"tau", tau}, {"max_deviation", deviation}};
    }
}

// Columns rescaled to [0, 1]; constant columns collapse to 0.
inline Dataset min_max_normalize(const Dataset& data, nlohmann::json& ranges) {
    const std::size_t d = data.dimension();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (const DataPoint& p : data) {
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], p.features[k]);
            hi[k] = std::max(hi[k], p.features[k]);
        }
    }
    ranges = nlohmann::json::array();
    for (std::size_t k = 0; k < d; ++k) ranges.push_back({lo[k], hi[k]});
    std::vector<DataPoint> pts(data.points());
    for (DataPoint& p : pts) {
        for (std::size_t k = 0; k < d; ++k) {
            const double span = hi[k] - lo[k];
            p.features[k] = span > 0.0 ? (p.features[k] - lo[k]) / span : 0.0;
        }
    }
    return Dataset(std::move(pts));
}

inline double ms_between(std::chrono::steady_clock::time_point a,
                         std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace detail

inline void write_report(const nlohmann::json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out.is_open()) throw ParseError("cannot open file for writing: " + path);
    out << report.dump(2) << '\n';
    if (!out.good()) throw ParseError("failed writing " + path);
}

/// Loads the configured dataset, fits the stacked model, certifies each
/// step's terminal weights, and returns (optionally writing) the report.
inline nlohmann::json run_experiment(const ExperimentConfig& config) {
    if (!(config.eps > 0.0))
        throw ConfigError("eps must be positive, got " + std::to_string(config.eps));
    if (config.max_units < 1) throw ConfigError("steps must be at least 1");
    const Activation act = Activation::from_name(config.activation, config.alpha);
    const auto t0 = std::chrono::steady_clock::now();

    Dataset data = load_dataset(config.input_path, parse_format(config.format),
                                config.target_column);
    nlohmann::json feature_ranges;
    if (config.normalize) data = detail::min_max_normalize(data, feature_ranges);
    const auto t_loaded = std::chrono::steady_clock::now();

    const double stall = config.stall_tol >= 0.0 ? config.stall_tol : config.eps;
    const StackedModel model = fit_stepwise(data, act, config.max_units, config.eps, stall,
                                            config.continue_past_tolerance);
    const auto t_fitted = std::chrono::steady_clock::now();

    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t s = 0; s < model.steps.size(); ++s) {
        const StepRecord& rec = model.steps[s];
        const Dataset residual = data.with_targets(rec.residual_targets);
        nlohmann::json step{
            {"index", s + 1},
            {"objective", rec.objective},
            {"improvement", rec.improvement},
            {"stalled", rec.stalled},
            {"iterations", rec.trace.iterations.size()},
            {"initial_bracket", {rec.trace.initial_lower, rec.trace.initial_upper}},
            {"weights", detail::weights_json(rec.trace.final_weights)},
            {"certificate", detail::step_certificate(residual, act,
                                                     rec.trace.final_weights, config.tau)}};
        steps.push_back(std::move(step));
    }
    const auto t_certified = std::chrono::steady_clock::now();

    double target_min = std::numeric_limits<double>::infinity();
    double target_max = -std::numeric_limits<double>::infinity();
    for (const DataPoint& p : data) {
        target_min = std::min(target_min, p.target);
        target_max = std::max(target_max, p.target);
    }

    double final_objective = 0.0;
    for (const DataPoint& p : data)
        final_objective =
            std::max(final_objective, std::abs(model.predict(p.features) - p.target));

    nlohmann::json units = nlohmann::json::array();
    for (const Unit& u : model.units) {
        units.push_back({{"activation", u.activation.name()},
                         {"bias", u.weights.bias},
                         {"weights", u.weights.weights},
                         {"coefficient", u.coefficient}});
        if (u.activation.kind() == ActivationKind::LeakyRelu)
            units.back()["alpha"] = u.activation.alpha();
    }

    nlohmann::json report{
        {"schema_version", kReportSchemaVersion},
        {"outcome", final_objective <= config.eps ? "interpolating" : "completed"},
        {"config", detail::config_json(config)},
        {"dataset",
         {{"path", config.input_path},
          {"format", config.format},
          {"rows", data.size()},
          {"dimension", data.dimension()},
          {"target_min", target_min},
          {"target_max", target_max},
          {"normalized", config.normalize}}},
        {"steps", std::move(steps)},
        {"model", {{"final_objective", final_objective}, {"units", std::move(units)}}}};
    if (config.normalize) report["dataset"]["feature_ranges"] = feature_ranges;
    if (config.include_timings) {
        const auto t_end = std::chrono::steady_clock::now();
        report["timings_ms"] = {{"load", detail::ms_between(t0, t_loaded)},
                                {"fit", detail::ms_between(t_loaded, t_fitted)},
                                {"certify", detail::ms_between(t_fitted, t_certified)},
                                {"total", detail::ms_between(t0, t_end)}};
    }
    if (!config.report_path.empty()) write_report(report, config.report_path);
    return report;
}

/// Certificate for externally supplied weights against the raw targets.
inline nlohmann::json certify_weights(const ExperimentConfig& config,
                                      const std::string& weights_path) {
    const Activation act = Activation::from_name(config.activation, config.alpha);
    const auto t0 = std::chrono::steady_clock::now();
    Dataset data = load_dataset(config.input_path, parse_format(config.format),
                                config.target_column);
    nlohmann::json feature_ranges;
    if (config.normalize) data = detail::min_max_normalize(data, feature_ranges);
    const WeightVector w = load_weights(weights_path);

    nlohmann::json report{
        {"schema_version", kReportSchemaVersion},
        {"outcome", "certified"},
        {"config", detail::config_json(config)},
        {"weights_file", weights_path},
        {"weights", detail::weights_json(w)},
        {"dataset",
         {{"path", config.input_path},
          {"format", config.format},
          {"rows", data.size()},
          {"dimension", data.dimension()},
          {"normalized", config.normalize}}},
        {"certificate", detail::step_certificate(data, act, w, config.tau)}};
    if (config.normalize) report["dataset"]["feature_ranges"] = feature_ranges;
    if (report["certificate"]["outcome"] == "interpolating")
        report["outcome"] = "interpolating";
    if (config.include_timings) {
        const auto t_end = std::chrono::steady_clock::now();
        report["timings_ms"] = {{"total", detail::ms_between(t0, t_end)}};
    }
    if (!config.report_path.empty()) write_report(report, config.report_path);
    return report;
}

}  // namespace chebstack
