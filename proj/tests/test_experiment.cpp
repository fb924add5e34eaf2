#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "covlab/errors.hpp"
#include "covlab/experiment.hpp"

using namespace covlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing and field-path errors") {
    auto cfg = ExperimentConfig::from_json_text(R"({
        "command": "cover",
        "model": {"variant": "interval_union", "intervals": [[0, 1], [2, 3]]},
        "schedule": [1, 2, 4, 8],
        "seed": 42
    })");
    CHECK(cfg.command == "cover");
    CHECK(cfg.schedule == std::vector<int>{1, 2, 4, 8});
    CHECK(cfg.seed == 42);
    CHECK(cfg.has_model);

    SUBCASE("missing model") {
        try {
            ExperimentConfig::from_json_text(R"({"command": "cover", "schedule": [1]})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field == "model");
        }
    }
    SUBCASE("non-increasing schedule") {
        try {
            ExperimentConfig::from_json_text(R"({
                "command": "cover",
                "model": {"variant": "box", "d": 1, "side": 1.0},
                "schedule": [4, 2]
            })");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field == "schedule");
        }
    }
    SUBCASE("bad rational carries its path") {
        try {
            ExperimentConfig::from_json_text(R"({
                "command": "fractal",
                "model": {"variant": "ifs", "ratios": ["x/3", "1/3"], "shifts": ["0", "2/3"]},
                "schedule": [2, 4]
            })");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field == "model.ratios[0]");
        }
    }
    SUBCASE("polarization requires s above the dimension") {
        try {
            ExperimentConfig::from_json_text(R"({
                "command": "polarize",
                "model": {"variant": "box", "d": 1, "side": 1.0},
                "schedule": [1, 2],
                "s": 0.5
            })");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field == "s");
        }
    }
    SUBCASE("unknown command") {
        CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"command": "noop"})"), ConfigError);
    }
    SUBCASE("geometric schedule expansion") {
        auto g = ExperimentConfig::from_json_text(R"({
            "command": "cover",
            "model": {"variant": "box", "d": 1, "side": 1.0},
            "schedule": {"type": "geometric", "from": 4, "to": 64, "factor": 2}
        })");
        CHECK(g.schedule == std::vector<int>{4, 8, 16, 32, 64});
    }
}

TEST_CASE("csv emission carries certificates by exactness") {
    std::vector<SequenceRecord> recs{{1, 0.5, 0.5, true, 0.0}, {2, 0.25, 0.5, false, 1e-4}};
    std::string csv = records_to_csv(recs);
    CHECK(csv.find("N,value,normalized,exact,mesh_certificate\n") == 0);
    CHECK(csv.find("1,0.5,0.5,true,0\n") != std::string::npos);
    CHECK(csv.find("2,0.25,0.5,false,0.0001") != std::string::npos);
    // 17 significant digits survive the round trip
    std::vector<SequenceRecord> pi{{1, 3.14159265358979312, 3.14159265358979312, true, 0.0}};
    std::string pis = records_to_csv(pi);
    CHECK(pis.find("3.1415926535897931") != std::string::npos);
}

TEST_CASE("cover run writes constant normalized column for the unit interval") {
    fs::path dir = fs::temp_directory_path() / "covlab_test_cover";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::from_json_text(R"({
        "command": "cover",
        "model": {"variant": "box", "d": 1, "side": 1.0},
        "schedule": {"type": "range", "from": 1, "to": 24},
        "out": "unused"
    })");
    cfg.out_dir = dir.string();
    std::ostringstream log;
    int rc = run_experiment(cfg, log);
    CHECK(rc == 0);
    std::string csv = slurp(dir / "records.csv");
    int half_count = 0;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
        auto c3 = line.find(',', c2 + 1);
        double normalized = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
        if (std::abs(normalized - 0.5) <= 1e-12) ++half_count;
    }
    CHECK(half_count == 24);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("fractal run emits the lattice verdict and oscillation band") {
    fs::path dir = fs::temp_directory_path() / "covlab_test_fractal";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::from_json_text(R"({
        "command": "fractal",
        "model": {"variant": "ifs", "ratios": ["1/3", "1/3"], "shifts": ["0", "2/3"]},
        "schedule": {"type": "range", "from": 2, "to": 4096},
        "out": "unused"
    })");
    cfg.out_dir = dir.string();
    std::ostringstream log;
    int rc = run_experiment(cfg, log);
    CHECK(rc == 0);
    std::string report = slurp(dir / "report.json");
    CHECK(report.find("\"lattice\": true") != std::string::npos);
    CHECK(report.find("\"base\": \"1/3\"") != std::string::npos);
    CHECK(report.find("\"matches_dp\": true") != std::string::npos);
    // oscillation band ratio approximately 3 appears in the report
    CHECK(report.find("band_ratio") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("asymptotics run emits sandwich ratios") {
    fs::path dir = fs::temp_directory_path() / "covlab_test_asym";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::from_json_text(R"({
        "command": "asymptotics",
        "model": {"variant": "box", "d": 1, "side": 1.0},
        "schedule": {"type": "range", "from": 1, "to": 16},
        "out": "unused"
    })");
    cfg.out_dir = dir.string();
    std::ostringstream log;
    CHECK(run_experiment(cfg, log) == 0);
    std::string report = slurp(dir / "report.json");
    CHECK(report.find("generalest") != std::string::npos);
    CHECK(report.find("\"positive_finite\": true") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("uniformity run on midpoints") {
    fs::path dir = fs::temp_directory_path() / "covlab_test_unif";
    fs::remove_all(dir);
    auto cfg = ExperimentConfig::from_json_text(R"({
        "command": "uniformity",
        "model": {"variant": "box", "d": 1, "side": 1.0},
        "schedule": [100],
        "cells": 10,
        "out": "unused"
    })");
    cfg.out_dir = dir.string();
    std::ostringstream log;
    CHECK(run_experiment(cfg, log) == 0);
    std::string report = slurp(dir / "report.json");
    CHECK(report.find("max_deviation") != std::string::npos);
    fs::remove_all(dir);
}

}  // TEST_SUITE
