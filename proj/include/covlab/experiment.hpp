#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "covlab/records.hpp"
#include "covlab/set_models.hpp"

namespace covlab {

/// Parsed experiment description. Rationals in the config file stay exact
/// ("num/den" strings) so fractal classification survives serialization.
struct ExperimentConfig {
    std::string command;  // cover | polarize | fractal | asymptotics | bridge | uniformity | verify
    SetModel model;
    bool has_model = false;
    std::vector<int> schedule;
    std::vector<double> s_list;  // bridge sweeps; single s elsewhere
    double s = 3.0;
    bool constrained = false;
    double mesh = 0.0;  // 0 = auto
    std::uint64_t seed = 1;
    int cells = 4;  // uniformity K
    std::string out_dir = "covlab-out";
    std::string echo;  // canonical JSON echo of the raw config

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
};

struct VerifyEntry {
    std::string name;
    std::string status;  // "pass" | "fail" | "skip"
    std::string detail;
};

struct VerifySummary {
    std::vector<VerifyEntry> entries;
    bool all_pass() const;
    std::string to_json() const;
};

/// Executes every assertable invariant of the library modules. Budget
/// overruns are reported as skipped-with-reason entries, not failures.
VerifySummary verify_suite(std::uint64_t seed = 1);

/// 17-significant-digit CSV of sequence records (byte-stable across runs).
std::string records_to_csv(const std::vector<SequenceRecord>& records);

/// Runs the experiment, writing records.csv / report.json / manifest.json
/// under config.out_dir. Returns the process exit code (0 pass, 1 failure).
int run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace covlab
