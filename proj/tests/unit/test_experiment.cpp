#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hardylab/error.hpp"
#include "hardylab/experiment.hpp"

using namespace hardylab;
using nlohmann::json;

namespace {

ExperimentConfig small(std::vector<std::string> checks) {
    json j = json::parse(R"({
        "name": "unit",
        "domain": {"shape": "interval", "n_cells": 32},
        "potential": {"gamma": 0.1},
        "nonlinearity": {"kind": "positive_power", "p": 2},
        "data": {"tau": [{"uniform": 1.0}], "nu": [{"atom": {"node": 0}, "mass": 1.0}]},
        "seed": 3
    })");
    j["checks"] = checks;
    return parse_config(j);
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("registry lists every check once") {
    const auto& r = check_registry();
    CHECK(r.size() == 19);
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t k = i + 1; k < r.size(); ++k) CHECK(r[i].name != r[k].name);
}

TEST_CASE("unknown check names are rejected before any work") {
    try {
        (void)run_experiment(small({"no_such_check"}), false);
        FAIL("expected an error");
    } catch (const LabError& e) {
        CHECK(e.stage() == Stage::config);
    }
}

TEST_CASE("results are deterministic and self-diff is empty") {
    const ExperimentConfig c = small({"spectral_sanity", "representation", "reduction", "kato"});
    const RunReport a = run_experiment(c, false);
    const RunReport b = run_experiment(c, false);
    CHECK(a.admissible);
    CHECK(a.all_pass);
    CHECK(a.results.dump() == b.results.dump());
    CHECK(compare_runs(a.results, b.results).empty());
    CHECK(a.results["summary"]["passed"] == 4);
}

TEST_CASE("diff reports changed evidence and rejects mismatched lists") {
    const RunReport a = run_experiment(small({"spectral_sanity", "reduction"}), false);
    json b = a.results;
    b["checks"][1]["evidence"]["levels"] = 1;
    const json d = compare_runs(a.results, b);
    REQUIRE(d.size() == 1);
    CHECK(d[0]["check"] == "reduction");
    const RunReport other = run_experiment(small({"spectral_sanity"}), false);
    CHECK_THROWS_AS(compare_runs(a.results, other.results), LabError);
}

TEST_CASE("inadmissible potentials fail every check") {
    ExperimentConfig c = small({"reduction"});
    json j = c.source;
    j["potential"]["gamma"] = 2.0;
    const RunReport r = run_experiment(parse_config(j), false);
    CHECK_FALSE(r.admissible);
    CHECK_FALSE(r.all_pass);
    CHECK(r.results["checks"][0]["pass"] == false);
}

TEST_CASE("outputs are written under the output root") {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "hardylab_unit_out";
    fs::remove_all(root);
    ::setenv("HARDYLAB_OUTPUT_ROOT", root.c_str(), 1);
    const ExperimentConfig c = small({"reduction"});
    const RunReport r = run_experiment(c);
    ::unsetenv("HARDYLAB_OUTPUT_ROOT");
    CHECK(r.directory.rfind(root.string(), 0) == 0);
    for (const std::string& f : r.artifacts) CHECK(fs::exists(fs::path(r.directory) / f));
    std::ifstream in(fs::path(r.directory) / "results.json");
    std::stringstream text;
    text << in.rdbuf();
    CHECK(json::parse(text.str()) == r.results);
    fs::remove_all(root);
}

}
