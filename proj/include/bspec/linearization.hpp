#ifndef BSPEC_LINEARIZATION_HPP
#define BSPEC_LINEARIZATION_HPP

#include <Eigen/Core>
#include <vector>

#include "bspec/orbit.hpp"

namespace bspec {

// Linearized return map of a periodic ray in (transverse offset, angle)
// coordinates: a free flight of length t contributes F(t) = [[1,t],[0,1]], a
// reflection contributes K = [[1,0],[2*kappa/cos(phi),1]] with kappa the
// obstacle curvature and phi the incidence angle.
struct OrbitLinearization {
    Eigen::Matrix2d poincare = Eigen::Matrix2d::Identity();
    double trace = 0.0;
    double log_abs_det_id_minus_p = 0.0;  // log |det(I - P)|
    double weight = 0.0;                  // |det(I - P)|^{-1/2}
};

// Per-step transfer factors K_{j+1} F(l_j), one per edge; their ordered
// product factors[k-1] * ... * factors[0] is the return map.
std::vector<Eigen::Matrix2d> transfer_factors(const Scene& scene,
                                              const PeriodicOrbit& orbit);

// Composes the flight/reflection factors around the cycle, starting just
// after bounce 0.  Throws ValidationFailure if |trace| - 2 <= 1e-9 (the map
// must be hyperbolic for the determinant weight to make sense).
OrbitLinearization poincare_map(const Scene& scene, const PeriodicOrbit& orbit);

// |det(I - P^n)|^{-1/2}: the zeta weight of the n-fold iterate.  Rejects
// parabolic degeneracy (|trace| within 1e-9 of 2).
double zeta_weight(const OrbitLinearization& lin, int n = 1);

// log |det(I - P^n)| evaluated through the eigenvalue log to stay finite for
// large n * log|lambda|.
double log_abs_det_id_minus_pn(const OrbitLinearization& lin, int n);

// Dataset envelope  C1 * exp(mu1 * tau) <= |det(I - P)| <= exp(mu2 * tau),
// tight on the supplied primitives by construction.
struct DetBoundsFit {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double C1 = 1.0;
};

DetBoundsFit fit_det_bounds(const std::vector<double>& tau,
                            const std::vector<double>& log_det,
                            int min_orbits = 10);

}

#endif
