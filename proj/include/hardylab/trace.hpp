#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardylab/field.hpp"
#include "hardylab/grid_domain.hpp"
#include "hardylab/measures.hpp"
#include "hardylab/spectral_green.hpp"

namespace hardylab {

enum class TraceVerdict { trace_exists, inconclusive, no_trace };
const char* verdict_name(TraceVerdict v);

struct TraceOptions {
    double residual_tol = 1e-4;     // relative to the field's strip scale
    double decay_threshold = 0.3;   // minimal log-log slope of the residuals
    double regularization = 0.0;        // boundary layer: nu_y = u_y / (1/omega_y + rho)
    bool with_strip_estimate = false;
    double strip_regularization = 0.0;  // ridge for the strip least squares
};

struct TraceReport {
    BoundaryMeasure estimated_measure;
    std::vector<double> betas;
    std::vector<double> residuals;
    double limit_residual = 0.0;
    double decay_rate = 0.0;
    double scale = 0.0;
    TraceVerdict verdict = TraceVerdict::inconclusive;
    // Least squares against kernel columns on the two smallest strips.
    std::optional<BoundaryMeasure> strip_estimate;
};

/// {h, 2h, 4h, ...} up to inradius/2.
std::vector<double> default_trace_betas(const GridDomain& d);

/// Normalized trace. The estimate is read off the boundary layer (beta -> 0 on the
/// grid), nu_y = u_y * omega_y; the strip integrals of (phi/delta)|u - K[nu]| at
/// `betas` supply the residual sequence and its decay rate.
TraceReport trace_normalized(const Lab& lab, const Field& u, std::span<const double> betas,
                             const TraceOptions& opts = {});

/// Weighted least squares of u against K columns on the two smallest given strips.
/// A positive regularization adds a ridge of regularization * (largest column norm)^2.
/// nu -> K[nu] has zero-mass null vectors on the grid (square corners, disk staircases),
/// so without a ridge the system is singular there; the total mass stays identifiable.
BoundaryMeasure strip_trace_estimate(const Lab& lab, const Field& u, std::span<const double> betas,
                                     double regularization = 0.0);

enum class Dictionary { polynomial, nodal, automatic };
Dictionary parse_dictionary(const std::string& s);

struct TraceLVOptions {
    Dictionary dictionary = Dictionary::automatic;
    int degree = 6;
    double residual_tol = 1e-4;
    double decay_threshold = 0.3;
};

struct TraceLVReport {
    TraceReport trace;
    Dictionary dictionary_used = Dictionary::nodal;
    std::vector<std::vector<double>> moments;  // per exhaustion level
    std::vector<double> harmonic_mass;         // total omega_n mass per level
};

/// L_V trace: pushforward moments of u against the discrete harmonic measures of the
/// exhaustion levels, reconstructed into a boundary measure from the final level.
TraceLVReport trace_LV(const Lab& lab, const Field& u, const Exhaustion& ex,
                       const TraceLVOptions& opts = {});

struct EquivalenceReport {
    TraceReport normalized;
    TraceLVReport lv;
    double discrepancy = 0.0;  // total variation between the two estimates
    bool verdicts_agree = false;
};

EquivalenceReport check_trace_equivalence(const Lab& lab, const Field& u, const Exhaustion& ex,
                                          const TraceOptions& nopts = {},
                                          const TraceLVOptions& lopts = {});

}  // namespace hardylab
