#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chebstack/experiment.hpp"
#include "chebstack/io.hpp"
#include "chebstack/synthetic.hpp"

namespace {

void add_data_options(CLI::App& cmd, chebstack::ExperimentConfig& cfg) {
    cmd.add_option("--input", cfg.input_path, "Dataset file")->required();
    cmd.add_option("--format", cfg.format, "Dataset format: ucr or csv")->required();
    cmd.add_option("--target", cfg.target_column, "Target column name (csv format)");
    cmd.add_flag("--normalize", cfg.normalize, "Min-max scale features to [0, 1]");
}

void add_model_options(CLI::App& cmd, chebstack::ExperimentConfig& cfg) {
    cmd.add_option("--activation", cfg.activation,
                   "Activation: sigmoid, identity, or leaky_relu")
        ->required();
    cmd.add_option("--alpha", cfg.alpha, "Leaky ReLU slope (default 0.01)");
    cmd.add_option("--tau", cfg.tau,
                   "Stationarity tolerance (default: scaled to the deviation)");
}

void add_report_options(CLI::App& cmd, chebstack::ExperimentConfig& cfg) {
    cmd.add_option("--report", cfg.report_path, "Report JSON output path")->required();
    cmd.add_flag("--no-timings",
                 [&cfg](std::int64_t) { cfg.include_timings = false; },
                 "Omit timings for byte-identical reports");
}

// Errors land in the report too, so scripted runs can read one artifact.
int report_error(const chebstack::Error& e, const std::string& report_path) {
    std::cerr << "error: " << e.what() << '\n';
    if (!report_path.empty()) {
        const nlohmann::json doc{{"schema_version", chebstack::kReportSchemaVersion},
                                 {"outcome", "error"},
                                 {"error", {{"message", e.what()},
                                            {"exit_code", e.exit_code()}}}};
        try {
            chebstack::write_report(doc, report_path);
        } catch (const std::exception&) {
            // The original failure matters more than a broken report path.
        }
    }
    return e.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uniform-error fitting of stacked single-neuron units"};
    app.require_subcommand(1);

    chebstack::ExperimentConfig fit_cfg;
    CLI::App* fit = app.add_subcommand("fit", "Fit a stacked model and write a report");
    add_data_options(*fit, fit_cfg);
    add_model_options(*fit, fit_cfg);
    fit->add_option("--eps", fit_cfg.eps, "Bisection tolerance (default 1e-6)");
    fit->add_option("--steps", fit_cfg.max_units, "Maximum number of units (default 5)");
    fit->add_option("--stall-tol", fit_cfg.stall_tol,
                    "Minimum per-step improvement (default: eps)");
    fit->add_flag("--continue-past-tolerance", fit_cfg.continue_past_tolerance,
                  "Keep stacking once the error is below eps");
    fit->add_option("--seed", fit_cfg.seed, "Recorded in the config echo");
    add_report_options(*fit, fit_cfg);

    chebstack::ExperimentConfig certify_cfg;
    std::string weights_path;
    CLI::App* certify =
        app.add_subcommand("certify", "Certify externally supplied weights");
    add_data_options(*certify, certify_cfg);
    add_model_options(*certify, certify_cfg);
    certify->add_option("--weights", weights_path, "JSON array [w0, w1, ..., wd]")
        ->required();
    add_report_options(*certify, certify_cfg);

    std::string gen_kind;
    std::string gen_out;
    std::string gen_activation = "identity";
    double gen_alpha = 0.01;
    std::size_t gen_n = 16;
    std::size_t gen_d = 1;
    std::uint64_t gen_seed = 0;
    CLI::App* gen = app.add_subcommand("gen", "Write a synthetic dataset as csv");
    gen->add_option("--kind", gen_kind, "tent, planted, or random")->required();
    gen->add_option("--out", gen_out, "Output csv path")->required();
    gen->add_option("--n", gen_n, "Number of points (default 16)");
    gen->add_option("--d", gen_d, "Feature dimension (default 1)");
    gen->add_option("--activation", gen_activation,
                    "Range/teacher activation (default identity)");
    gen->add_option("--alpha", gen_alpha, "Leaky ReLU slope (default 0.01)");
    gen->add_option("--seed", gen_seed, "Generator seed (default 0)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    std::string report_path;
    try {
        if (fit->parsed()) {
            report_path = fit_cfg.report_path;
            const nlohmann::json report = chebstack::run_experiment(fit_cfg);
            std::cout << "fit: " << report["dataset"]["rows"] << " rows, final objective "
                      << report["model"]["final_objective"] << ", report "
                      << fit_cfg.report_path << '\n';
        } else if (certify->parsed()) {
            report_path = certify_cfg.report_path;
            const nlohmann::json report =
                chebstack::certify_weights(certify_cfg, weights_path);
            const nlohmann::json& cert = report["certificate"];
            std::cout << "certify: "
                      << (cert["outcome"] == "interpolating"
                              ? std::string("interpolating")
                              : cert["verdict"].get<std::string>())
                      << ", report " << certify_cfg.report_path << '\n';
        } else {
            const chebstack::Activation act =
                chebstack::Activation::from_name(gen_activation, gen_alpha);
            const chebstack::Dataset data = chebstack::generate_dataset(
                chebstack::parse_synthetic_kind(gen_kind), act, gen_n, gen_d, gen_seed);
            chebstack::write_dataset_csv(data, gen_out);
            std::cout << "gen: " << data.size() << " rows, " << data.dimension()
                      << " features, " << gen_out << '\n';
        }
    } catch (const chebstack::Error& e) {
        return report_error(e, report_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
