#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "chebstack/experiment.hpp"
#include "chebstack/synthetic.hpp"

using namespace chebstack;

namespace {

struct Scratch {
    std::filesystem::path dir;
    Scratch() {
        dir = std::filesystem::temp_directory_path() /
              ("chebstack_exp_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(dir);
    }
    ~Scratch() { std::filesystem::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

ExperimentConfig csv_config(const std::string& input, const std::string& activation) {
    ExperimentConfig cfg;
    cfg.input_path = input;
    cfg.format = "csv";
    cfg.target_column = "y";
    cfg.activation = activation;
    cfg.include_timings = false;
    return cfg;
}

StackedModel model_from_report(const nlohmann::json& report) {
    StackedModel model;
    for (const auto& u : report["model"]["units"]) {
        Unit unit{Activation::from_name(u["activation"].get<std::string>(),
                                        u.value("alpha", 0.01)),
                  WeightVector{u["bias"].get<double>(),
                               u["weights"].get<std::vector<double>>()},
                  u["coefficient"].get<double>()};
        model.units.push_back(std::move(unit));
    }
    return model;
}

}  // namespace

TEST_CASE("the tent run reports two half-error steps and a stall") {
    Scratch fs;
    const std::string input = fs.path("tent.csv");
    write_dataset_csv(tent_dataset(), input);

    ExperimentConfig cfg = csv_config(input, "identity");
    cfg.max_units = 2;
    const nlohmann::json report = run_experiment(cfg);

    CHECK(report["schema_version"] == kReportSchemaVersion);
    CHECK(report["outcome"] == "completed");
    REQUIRE(report["steps"].size() == 2);

    const auto& first = report["steps"][0];
    CHECK(first["index"] == 1);
    CHECK_THAT(first["objective"].get<double>(),
               Catch::Matchers::WithinAbs(0.5, 1e-6));
    CHECK(first["stalled"] == false);
    CHECK(first["certificate"]["verdict"] == "stationary");
    CHECK(first["certificate"]["method"] == "smooth-hull");
    CHECK(first["certificate"]["pos_idx"] == std::vector<std::size_t>{0, 2});
    CHECK(first["certificate"]["neg_idx"] == std::vector<std::size_t>{1});

    const auto& second = report["steps"][1];
    CHECK_THAT(second["objective"].get<double>(),
               Catch::Matchers::WithinAbs(0.5, 1e-6));
    CHECK(second["stalled"] == true);

    CHECK(report["model"]["units"].size() == 1);
    CHECK_THAT(report["model"]["final_objective"].get<double>(),
               Catch::Matchers::WithinAbs(0.5, 1e-6));
    CHECK(report["dataset"]["rows"] == 3);
    CHECK(report["dataset"]["dimension"] == 1);
    CHECK(report["dataset"]["target_min"] == 0.0);
    CHECK(report["dataset"]["target_max"] == 1.0);
}

TEST_CASE("a single-unit-realizable dataset ends as interpolating") {
    Scratch fs;
    const Activation leaky = Activation::leaky_relu(0.01);
    const std::string input = fs.path("planted.csv");
    write_dataset_csv(planted_dataset(leaky, 6, 2, 7), input);

    ExperimentConfig cfg = csv_config(input, "leaky_relu");
    cfg.max_units = 3;
    const nlohmann::json report = run_experiment(cfg);

    CHECK(report["outcome"] == "interpolating");
    CHECK(report["model"]["final_objective"].get<double>() <= cfg.eps);
    CHECK(report["steps"][0]["objective"].get<double>() <= cfg.eps);
    const auto& unit = report["model"]["units"][0];
    CHECK(unit["activation"] == "leaky_relu");
    CHECK(unit["alpha"] == 0.01);
}

TEST_CASE("reported weights reproduce the reported objective") {
    Scratch fs;
    const std::string input = fs.path("random.csv");
    write_dataset_csv(random_dataset(Activation::sigmoid(), 9, 2, 99), input);

    ExperimentConfig cfg = csv_config(input, "sigmoid");
    cfg.max_units = 3;
    const nlohmann::json report = run_experiment(cfg);

    const StackedModel model = model_from_report(report);
    REQUIRE(model.units.size() == report["model"]["units"].size());
    const Dataset data = load_csv(input, "y");
    double replayed = 0.0;
    for (const DataPoint& p : data)
        replayed = std::max(replayed, std::abs(model.predict(p.features) - p.target));

    const double reported = report["model"]["final_objective"].get<double>();
    CHECK(std::abs(replayed - reported) <= 1e-12 * std::max(1.0, std::abs(reported)));

    SECTION("serialization itself is lossless") {
        const nlohmann::json reparsed = nlohmann::json::parse(report.dump(2));
        CHECK(reparsed["model"]["final_objective"].get<double>() == reported);
        for (std::size_t u = 0; u < model.units.size(); ++u) {
            const auto& unit = reparsed["model"]["units"][u];
            CHECK(unit["bias"].get<double>() == model.units[u].weights.bias);
            CHECK(unit["weights"].get<std::vector<double>>() ==
                  model.units[u].weights.weights);
        }
    }
}

TEST_CASE("identical configurations produce identical reports") {
    Scratch fs;
    const std::string input = fs.path("random.csv");
    write_dataset_csv(random_dataset(Activation::identity(), 7, 2, 5), input);

    ExperimentConfig cfg = csv_config(input, "identity");
    cfg.max_units = 2;
    const nlohmann::json a = run_experiment(cfg);
    const nlohmann::json b = run_experiment(cfg);
    CHECK(a.dump() == b.dump());

    SECTION("timings are additive only") {
        cfg.include_timings = true;
        nlohmann::json timed = run_experiment(cfg);
        CHECK(timed.contains("timings_ms"));
        timed.erase("timings_ms");
        CHECK(timed.dump() == a.dump());
    }
}

TEST_CASE("each step is certified against its own residual targets") {
    Scratch fs;
    const std::string input = fs.path("random.csv");
    write_dataset_csv(random_dataset(Activation::identity(), 8, 1, 11), input);

    ExperimentConfig cfg = csv_config(input, "identity");
    cfg.max_units = 3;
    const nlohmann::json report = run_experiment(cfg);

    const Dataset data = load_csv(input, "y");
    std::vector<double> residual = data.targets();
    for (const auto& step : report["steps"]) {
        const auto& cert = step["certificate"];
        REQUIRE(cert.contains("outcome"));
        if (cert["outcome"] == "certified") {
            // The certified deviation is the step objective on the residuals
            // at the step's terminal weights.
            const WeightVector w{step["weights"]["bias"].get<double>(),
                                 step["weights"]["weights"].get<std::vector<double>>()};
            const double dev =
                objective(data.with_targets(residual), Activation::identity(), w);
            CHECK_THAT(cert["max_deviation"].get<double>(),
                       Catch::Matchers::WithinAbs(dev, 1e-12));
        }
        if (step["stalled"] == false) {
            const WeightVector w{step["weights"]["bias"].get<double>(),
                                 step["weights"]["weights"].get<std::vector<double>>()};
            for (std::size_t j = 0; j < data.size(); ++j)
                residual[j] -= w.preactivation(data[j].features);
        }
    }
}

TEST_CASE("normalization is applied and recorded") {
    Scratch fs;
    const std::string input = fs.path("wide.csv");
    std::ofstream(input) << "x1,x2,y\n0,5,1\n10,5,2\n20,5,3\n";

    ExperimentConfig cfg = csv_config(input, "identity");
    cfg.normalize = true;
    cfg.max_units = 1;
    const nlohmann::json report = run_experiment(cfg);

    CHECK(report["dataset"]["normalized"] == true);
    REQUIRE(report["dataset"].contains("feature_ranges"));
    const auto ranges = report["dataset"]["feature_ranges"];
    CHECK(ranges[0] == nlohmann::json({0.0, 20.0}));
    CHECK(ranges[1] == nlohmann::json({5.0, 5.0}));

    // Normalized features are an affine line from (0,0) to (1,0), so the
    // identity unit interpolates the three targets exactly.
    CHECK(report["outcome"] == "interpolating");
}

TEST_CASE("experiment configuration errors are rejected up front") {
    Scratch fs;
    const std::string input = fs.path("tent.csv");
    write_dataset_csv(tent_dataset(), input);

    ExperimentConfig cfg = csv_config(input, "identity");
    SECTION("eps must be positive") {
        cfg.eps = 0.0;
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
    SECTION("at least one step") {
        cfg.max_units = 0;
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
    SECTION("csv needs a target column") {
        cfg.target_column.clear();
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
    SECTION("unknown activation names fail") {
        cfg.activation = "tanh";
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
    SECTION("leaky slope bounds apply") {
        cfg.activation = "leaky_relu";
        cfg.alpha = 1.0;
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
}

TEST_CASE("externally supplied weights are certified against raw targets") {
    Scratch fs;
    const std::string input = fs.path("tent.csv");
    write_dataset_csv(tent_dataset(), input);
    const std::string weights = fs.path("w.json");
    std::ofstream(weights) << "[0.5, 0.0]";

    ExperimentConfig cfg = csv_config(input, "identity");
    cfg.report_path = fs.path("cert.json");
    const nlohmann::json report = certify_weights(cfg, weights);

    CHECK(report["schema_version"] == kReportSchemaVersion);
    CHECK(report["outcome"] == "certified");
    CHECK(report["certificate"]["verdict"] == "stationary");
    CHECK(report["weights"]["bias"] == 0.5);

    SECTION("the written report parses back to the returned document") {
        std::ifstream in(cfg.report_path);
        REQUIRE(in.is_open());
        const nlohmann::json disk = nlohmann::json::parse(in);
        CHECK(disk == report);
    }
    SECTION("interpolating weights get their own outcome") {
        const std::string line_input = fs.path("line.csv");
        std::ofstream(line_input) << "x1,y\n0,1\n1,2\n";
        ExperimentConfig line_cfg = csv_config(line_input, "identity");
        const std::string exact = fs.path("exact.json");
        std::ofstream(exact) << "[1.0, 1.0]";
        const nlohmann::json r2 = certify_weights(line_cfg, exact);
        CHECK(r2["outcome"] == "interpolating");
        CHECK(r2["certificate"]["outcome"] == "interpolating");
    }
    SECTION("a hinge activation routes to the inclusion test") {
        ExperimentConfig leaky_cfg = csv_config(input, "leaky_relu");
        const nlohmann::json r3 = certify_weights(leaky_cfg, weights);
        CHECK(r3["certificate"]["method"] == "leaky-inclusion");
    }
}
