#ifndef BSPEC_SEPARATION_HPP
#define BSPEC_SEPARATION_HPP

#include <string>
#include <vector>

#include "bspec/spectrum.hpp"

namespace bspec {

// Empirical constants of the flow-differential estimate ||dphi_t|| <= C0 e^{beta t}.
struct FlowConstants {
    double A0 = 1.0;    // max one-step billiard-map differential norm, > 1
    double beta = 0.0;  // 2 log(A0) / d0
    double C0 = 1.0;    // prefactor, clamped >= 1
    double eps0 = 0.0;  // min{eta0/(2 C0), d0/(4 C0)}
};

// Finite-difference Jacobian (central, step in both the transverse offset and
// the direction angle) of the outgoing-section map from bounce j to bounce
// j+1; agrees with transfer_factors(scene, orbit)[j] to discretization error.
Eigen::Matrix2d one_step_differential_fd(const Scene& scene,
                                         const PeriodicOrbit& orbit, int j,
                                         double step = 1e-7);

FlowConstants estimate_flow_constants(const Scene& scene,
                                      const LengthSpectrum& spec);

// Minimum product-metric distance sqrt(|dp|^2 + |dv|^2) between phase points
// sampled along the two lifted rays (open-segment midpoint sampling at the
// given arclength step), restricted to linearly connected pairs (the straight
// segment between the positions stays outside every obstacle interior).  A
// Lipschitz correction of half the sum of the realized sampling spacings is
// subtracted.  Requires distinct configurations and step <= d0/100.
double phase_distance(const Scene& scene, const PeriodicOrbit& a,
                      const PeriodicOrbit& b, double sampling_step);

struct SeparationReport {
    double T = 0.0;
    double min_pair_distance = 0.0;  // +inf when fewer than two orbits
    double bound = 0.0;              // eps0 * e^{-beta (1 + d2) T}
    double margin = 0.0;             // min_pair_distance / bound
    bool pass = false;               // min distance >= 2 * bound
    std::string token_a, token_b;    // realizing pair, empty when vacuous
};

// Pairwise phase distances over distinct primitive orbits with tau# <= T;
// disjointness of the e^{-beta(1+d2)T}-neighborhoods needs a gap of twice the
// radius.  sampling_step defaults (NaN) to d0/1000.
SeparationReport check_theorem41(
    const LengthSpectrum& spec, double T, const FlowConstants& constants,
    double sampling_step = std::numeric_limits<double>::quiet_NaN());

struct DirectionGapReport {
    double T = 0.0;
    double position_tol = 0.0;
    double min_gap = 0.0;  // +inf when vacuous
    double bound = 0.0;    // eps0 * e^{-beta (1 + d2) T}
    bool vacuous = false;  // no cross-orbit samples within position_tol
    bool pass = false;
    std::string token_a, token_b;
};

// Outgoing-direction gap ||v1 - v2|| over cross-orbit sample pairs (segment
// midpoints plus outgoing boundary representatives) whose positions are
// within position_tol.
DirectionGapReport direction_gap(
    const LengthSpectrum& spec, double T, double position_tol,
    double sampling_step = std::numeric_limits<double>::quiet_NaN());

struct Probe51Report {
    double T = 0.0;
    double g_min = 0.0;           // min same-obstacle cross-orbit reflection-point gap
    double alpha_certified = 0.0; // smallest grid alpha with e^{-alpha T} < g_min (NaN if none)
    double alpha_critical = 0.0;  // -log(g_min)/T, threshold below which the property fails
    bool any_pass = false;
    std::string token_a, token_b; // realizing pair, empty when vacuous
    int obstacle = -1;
};

// Checks, per grid alpha, that no boundary ball B(x, e^{-alpha T}) around a
// reflection point of one orbit contains a reflection point of another;
// smaller passing alpha = stronger statement.  Monotone in alpha.
Probe51Report probe_51(const LengthSpectrum& spec, double T,
                       const std::vector<double>& alpha_grid);

}

#endif
