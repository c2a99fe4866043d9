#ifndef BSPEC_GEOMETRY_HPP
#define BSPEC_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "bspec/errors.hpp"

namespace bspec {

using Vec2 = Eigen::Vector2d;

// Strictly convex planar obstacle.  Only disks ship, but the accessors keep
// the boundary interface (point-by-parameter, inward normal, curvature,
// support function) abstract enough to add ellipses later without touching
// callers.
struct Obstacle {
    Vec2 center{0.0, 0.0};
    double radius = 1.0;

    Vec2 point(double theta) const { return center + radius * Vec2(std::cos(theta), std::sin(theta)); }
    // Inward normal at a boundary point (points into the obstacle).
    Vec2 inward_normal(const Vec2& boundary_point) const { return (center - boundary_point) / radius; }
    Vec2 outward_normal(const Vec2& boundary_point) const { return (boundary_point - center) / radius; }
    // Normals by boundary parameter.
    Vec2 outward_normal(double theta) const { return Vec2(std::cos(theta), std::sin(theta)); }
    Vec2 inward_normal(double theta) const { return Vec2(-std::cos(theta), -std::sin(theta)); }
    double curvature() const { return 1.0 / radius; }
    double support(const Vec2& unit_dir) const { return unit_dir.dot(center) + radius; }
};

struct Scene {
    std::string label;
    std::vector<Obstacle> obstacles;

    int size() const { return static_cast<int>(obstacles.size()); }
};

// Scene constants consumed by every later module:
//   d0   = 2 x min pairwise gap (every period is >= d0)
//   d1   = max pairwise gap
//   d2   = 2*d1/d0  (>= 1)
//   eta0 = min over k of dist(D_k, ch(union of the others))
//   psi0 = worst-case angle between an outgoing reflected segment and the
//          inward normal, in (pi/2, pi); certified lower bound for disks.
struct SceneConstants {
    double d0 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double eta0 = 0.0;
    double psi0 = 0.0;
};

// Gap between obstacle boundaries (center distance minus both radii).
double pairwise_gap(const Obstacle& a, const Obstacle& b);

// Signed distance from point p to the convex hull of two disks (the
// "stadium" swept by interpolating center and radius).  Negative inside.
// Exact: the 1-D minimisation over the interpolation parameter solves a
// quadratic.
double point_to_disk_pair_hull(const Vec2& p, const Obstacle& a, const Obstacle& b);

// Signed distance from point p to the convex hull of an arbitrary disk set,
// via the support-function envelope max_j(<u, c_j - p> + R_j) minimised
// exactly over the closed-form candidate directions (per-disk extrema and
// pairwise sinusoid crossings).  Negative when p lies inside the hull.
// If active_pair is non-null it receives the (up to two) obstacle positions
// in `disks` whose support is active at the minimising direction.
double point_to_disk_hull(const Vec2& p, const std::vector<Obstacle>& disks,
                          std::pair<int, int>* active_pair = nullptr);

// Euclidean distance from obstacle k to the convex hull of the named subset
// (clamped at zero when they meet).  pre: k not in subset, subset nonempty.
double hull_distance(const Scene& scene, const std::vector<int>& subset_indices, int k);

// Validates r >= 3, positive radii, pairwise disjointness, non-eclipse (1.1)
// for every admissible triple, and eta0 > 0; returns all five constants.
// Throws OverlappingObstacles / EclipseViolation / PreconditionError.
SceneConstants validate_scene(const Scene& scene);

}

#endif
