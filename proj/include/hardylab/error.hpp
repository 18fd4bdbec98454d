#pragma once

#include <stdexcept>
#include <string>

namespace hardylab {

enum class Stage { config, domain, potential, spectral, green, martin, trace, solve, reduce, io };

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::config: return "config";
        case Stage::domain: return "domain";
        case Stage::potential: return "potential";
        case Stage::spectral: return "spectral";
        case Stage::green: return "green";
        case Stage::martin: return "martin";
        case Stage::trace: return "trace";
        case Stage::solve: return "solve";
        case Stage::reduce: return "reduce";
        case Stage::io: return "io";
    }
    return "unknown";
}

class LabError : public std::runtime_error {
public:
    LabError(Stage stage, const std::string& what)
        : std::runtime_error(std::string(stage_name(stage)) + ": " + what), stage_(stage) {}
    Stage stage() const { return stage_; }

private:
    Stage stage_;
};

}  // namespace hardylab
