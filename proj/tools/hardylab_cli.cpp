#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hardylab/error.hpp"
#include "hardylab/experiment.hpp"
#include "hardylab/io.hpp"

using namespace hardylab;

namespace {

// Exit codes: 0 all checks pass, 1 check failures, 2 execution error.
int report_error(const LabError& e) {
    nlohmann::json j = {{"error", {{"stage", stage_name(e.stage())}, {"message", e.what()}}}};
    std::cerr << j.dump() << "\n";
    return 2;
}

int cmd_run(const std::string& path) {
    const ExperimentConfig c = load_config(path);
    const RunReport r = run_experiment(c);
    std::cout << r.summary << "results: " << r.directory << "/results.json\n";
    return r.all_pass ? 0 : 1;
}

int cmd_check(const std::string& path) {
    const ExperimentConfig c = load_config(path);
    const Admissibility a = assess_admissibility(c);
    std::cout << a.block.dump(2) << "\n";
    return a.admissible ? 0 : 1;
}

int cmd_diff(const std::string& a, const std::string& b) {
    nlohmann::json ja, jb;
    try {
        ja = nlohmann::json::parse(read_file(a));
        jb = nlohmann::json::parse(read_file(b));
    } catch (const nlohmann::json::exception& e) {
        throw LabError(Stage::io, e.what());
    } catch (const std::runtime_error& e) {
        throw LabError(Stage::io, e.what());
    }
    const nlohmann::json d = compare_runs(ja, jb);
    std::cout << d.dump(2) << "\n";
    return d.empty() ? 0 : 1;
}

int cmd_list() {
    for (const CheckInfo& c : check_registry()) std::printf("%-22s %s\n", c.name.c_str(), c.description.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-singular Schroedinger lab: reduced measures and boundary traces"};
    app.require_subcommand(1);
    std::string config, a, b;
    auto* run = app.add_subcommand("run", "run every configured check and write results");
    run->add_option("config", config, "experiment config (JSON)")->required();
    auto* check = app.add_subcommand("check", "parse the config and report admissibility only");
    check->add_option("config", config, "experiment config (JSON)")->required();
    auto* diff = app.add_subcommand("diff", "per-check numeric diff of two results.json files");
    diff->add_option("a", a)->required();
    diff->add_option("b", b)->required();
    auto* list = app.add_subcommand("list-checks", "list the available checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*run) return cmd_run(config);
        if (*check) return cmd_check(config);
        if (*diff) return cmd_diff(a, b);
        if (*list) return cmd_list();
    } catch (const LabError& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": {\"stage\": \"unknown\", \"message\": " << nlohmann::json(e.what()).dump()
                  << "}}\n";
        return 2;
    }
    return 2;
}
