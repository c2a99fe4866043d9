#ifndef BSPEC_ORBIT_HPP
#define BSPEC_ORBIT_HPP

#include <optional>
#include <vector>

#include "bspec/geometry.hpp"
#include "bspec/symbolic.hpp"

namespace bspec {

struct PhasePoint {
    Vec2 position{0.0, 0.0};
    Vec2 direction{1.0, 0.0};  // unit vector
};

// Solved periodic ray of a given configuration.  Residuals are the solver's
// own diagnostics; validate_orbit recomputes them independently.
struct PeriodicOrbit {
    Configuration config;
    std::vector<double> params;  // boundary angle per reflection (radians)
    std::vector<Vec2> points;    // reflection points derived from params
    double tau_primitive = 0.0;
    double residual_reflection = 0.0;  // max angular reflection-law defect
    double residual_closure = 0.0;     // direction defect of the reflected cycle
    double clearance = 0.0;            // min open-segment distance to non-endpoint obstacles
};

struct SolveOptions {
    int max_iterations = 200;
    double grad_tol = 1e-13;  // 2-norm of the length gradient
    // Optional starting angles (multi-start validation); defaults to the
    // inward-facing warm start.
    std::optional<std::vector<double>> initial_params;
    bool validate = true;  // enforce PeriodicOrbit invariants, throw ValidationFailure
};

// Minimizes L(theta_1..theta_k) = sum_j |x_{i_j} - x_{i_{j+1}}| (coordinate
// descent warm start, then damped Newton with positive-definite fallback) and
// returns the unique periodic ray of the configuration.  Throws
// NonConvergence / ValidationFailure.
PeriodicOrbit solve_orbit(const Scene& scene, const Configuration& config,
                          const SolveOptions& opts = {});

enum class ShootStatus { completed, escaped, grazing };

struct Trajectory {
    std::vector<PhasePoint> bounces;  // outgoing representative per reflection
    std::vector<int> obstacle;        // obstacle index per reflection
    ShootStatus status = ShootStatus::completed;
    int event_step = -1;  // step at which escape/grazing occurred, -1 otherwise
};

// Billiard-ball map oracle: exact ray/disk intersections, specular
// reflection v' = v - 2<v,n>n, grazing when |<v,n>| < 1e-10 at impact.
// skip_first excludes one obstacle from the first flight only (used when the
// start point sits on, or within rounding of, that obstacle's boundary).
Trajectory shoot(const Scene& scene, const PhasePoint& start, int n_bounces,
                 int skip_first = -1);

struct OrbitValidation {
    double reflection_defect = 0.0;   // dot-product formulation, max over vertices
    double closure_defect = 0.0;
    double clearance = 0.0;           // ternary-search re-computation
    double roundtrip_position = 0.0;  // shoot k bounces from bounce 0
    double roundtrip_direction = 0.0;
    bool itinerary_match = false;
    bool cone_ok = false;             // <v_out, inward normal> <= cos psi0
    bool pass = false;
    std::string failure;              // first violated invariant, empty when pass
};

// Independent re-validation: different residual formulas plus a full shoot
// round trip.  Never throws; failures are reported.
OrbitValidation validate_orbit(const Scene& scene, const PeriodicOrbit& orbit);

}

#endif
