#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hardylab/config.hpp"

namespace hardylab {

struct CheckInfo {
    std::string name;
    std::string description;
};

const std::vector<CheckInfo>& check_registry();

/// Admissibility of the configured potential: A1 constant, A2 margin, B1/B2 fit.
struct Admissibility {
    nlohmann::json block;
    bool admissible = false;
};

Admissibility assess_admissibility(const ExperimentConfig& c);

struct RunReport {
    nlohmann::json results;  // deterministic, no timing
    std::string summary;     // plaintext, with timing
    std::string directory;
    std::vector<std::string> artifacts;
    bool admissible = false;
    bool all_pass = false;
};

/// Output directory, honouring HARDYLAB_OUTPUT_ROOT.
std::string resolve_output(const ExperimentConfig& c);

RunReport run_experiment(const ExperimentConfig& c, bool write_outputs = true);

/// Per-check numeric diff between two results.json documents.
nlohmann::json compare_runs(const nlohmann::json& a, const nlohmann::json& b);

}  // namespace hardylab
