#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardylab/grid_domain.hpp"
#include "hardylab/hardy_potential.hpp"
#include "hardylab/measures.hpp"
#include "hardylab/nonlinearity.hpp"
#include "hardylab/reduced.hpp"
#include "hardylab/semilinear.hpp"
#include "hardylab/trace.hpp"

namespace hardylab {

struct DomainSpec {
    Shape shape = Shape::interval;
    int n_cells = 64;
};

struct PotentialSpec {
    double gamma = 0.0;
    SingularSet singular_set;
};

struct NonlinearitySpec {
    std::string kind = "zero";  // zero | power | exponential | positive_power | linear
    double p = 1.0;
    double c = 1.0;
    std::optional<double> clamp;  // bounded variant max(-n, min(n, f))
    Nonlinearity build() const;
};

/// One term of a measure: a uniform density, an expression density, or an atom.
struct MeasureTerm {
    enum class Kind { uniform, density, atom } kind = Kind::uniform;
    double value = 0.0;  // uniform level or atom mass
    std::string expression;
    std::optional<Point> at;
    std::optional<int> node;
};

struct DataSpec {
    std::vector<MeasureTerm> tau;
    std::vector<MeasureTerm> nu;
};

struct Tolerances {
    double solve = 1e-9;
    double limit = 1e-8;
    double monotone = 1e-10;
    double trace = 1e-4;
    double equivalence = 1e-3;
    double identity = 1e-8;
    double relative = 1e-6;
    double kato = 1e-12;
    double exhaustion = 1e-6;
    double spectral = 0.02;
};

struct TraceSpec {
    Dictionary dictionary = Dictionary::automatic;
    int degree = 6;
    int exhaustion_levels = 6;
    double regularization = 0.0;
    double strip_regularization = 0.0;
};

struct ProbeConfig {
    Shape shape = Shape::square;
    std::vector<int> n_cells{32, 64, 128};
    std::vector<double> p{5.0, 1.1};
    double gamma = 0.0;
    SingularSet singular_set;
    double mass = 1.0;
    Point atom_at{0.5, 0.0};
    int max_exponent = 40;
    double strip_regularization = 1e-12;
    double stability = 0.05;  // relative spread allowed for p near 1
};

struct ExperimentConfig {
    std::string name = "experiment";
    DomainSpec domain;
    PotentialSpec potential;
    NonlinearitySpec nonlinearity;
    DataSpec data;
    std::vector<double> schedule = default_schedule();
    SolverKind solver = SolverKind::newton;
    int max_iterations = 0;
    double theta = 0.5;
    Tolerances tol;
    TraceSpec trace;
    std::vector<std::string> checks;
    std::string output = "runs/experiment";
    std::uint64_t seed = 1;
    int samples = 20;
    ProbeConfig probe;
    nlohmann::json source;  // normalised echo

    SolveOptions solve_options() const;
    ReduceOptions reduce_options() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
/// Checks that referenced nodes exist in the built domain.
void validate_against(const ExperimentConfig& c, const GridDomain& d);

InteriorMeasure build_measure_tau(const GridDomain& d, const std::vector<MeasureTerm>& terms);
BoundaryMeasure build_measure_nu(const GridDomain& d, const std::vector<MeasureTerm>& terms);

nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace hardylab
