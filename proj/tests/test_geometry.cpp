#include "doctest.h"

#include <cmath>
#include <random>

#include "bspec/geometry.hpp"
#include "helpers.hpp"

using namespace bspec;
using testutil::make_s3;
using testutil::make_s4;

namespace {
Scene rotate_translate(const Scene& s, double angle, const Vec2& shift) {
    const double c = std::cos(angle), sn = std::sin(angle);
    Scene out = s;
    for (auto& o : out.obstacles) {
        const Vec2 p = o.center;
        o.center = Vec2(c * p.x() - sn * p.y(), sn * p.x() + c * p.y()) + shift;
    }
    return out;
}
}  // namespace

TEST_CASE("triangle scene constants match the closed forms") {
    const SceneConstants k = validate_scene(make_s3());
    CHECK(k.d0 == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(k.d1 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(k.d2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.eta0 == doctest::Approx(3.0 * std::sqrt(3.0) - 2.0).epsilon(1e-12));
    CHECK(k.psi0 > M_PI / 2.0);
    CHECK(k.psi0 < M_PI);
}

TEST_CASE("square scene constants match the closed forms") {
    const SceneConstants k = validate_scene(make_s4());
    CHECK(k.d0 == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(k.d1 == doctest::Approx(6.0 * std::sqrt(2.0) - 2.0).epsilon(1e-12));
    CHECK(k.d2 == doctest::Approx((6.0 * std::sqrt(2.0) - 2.0) / 4.0).epsilon(1e-12));
    CHECK(k.eta0 == doctest::Approx(3.0 * std::sqrt(2.0) - 2.0).epsilon(1e-12));
}

TEST_CASE("obstacle boundary accessors are consistent") {
    const Obstacle o{{2.0, -1.0}, 1.5};
    const double theta = 0.7;
    const Vec2 p = o.point(theta);
    CHECK((p - o.center).norm() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK((o.outward_normal(p) - o.outward_normal(theta)).norm() < 1e-14);
    CHECK((o.inward_normal(p) + o.outward_normal(p)).norm() < 1e-14);
    CHECK(o.curvature() == doctest::Approx(1.0 / 1.5));
    // Support function: max over the boundary of <u, x>.
    const Vec2 u = Vec2(0.6, 0.8);
    double best = -1e300;
    for (int i = 0; i < 4096; ++i)
        best = std::max(best, u.dot(o.point(2.0 * M_PI * i / 4096)));
    CHECK(o.support(u) == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("pairwise gap is the boundary distance") {
    const Obstacle a{{0.0, 0.0}, 1.0}, b{{6.0, 0.0}, 1.0};
    CHECK(pairwise_gap(a, b) == doctest::Approx(4.0).epsilon(1e-14));
    const Obstacle c{{3.0, 4.0}, 2.0};
    CHECK(pairwise_gap(a, c) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("point-to-pair-hull distance: closed forms") {
    const Obstacle a{{0.0, 0.0}, 1.0}, b{{6.0, 0.0}, 1.0};
    // Point on the axis midway: hull is the stadium |y| <= 1 band over x in [0,6].
    CHECK(point_to_disk_pair_hull({3.0, 3.0}, a, b) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(point_to_disk_pair_hull({3.0, 0.0}, a, b) < 0.0);   // interior
    CHECK(point_to_disk_pair_hull({-3.0, 0.0}, a, b) == doctest::Approx(2.0).epsilon(1e-12));
    // Off the end cap: distance to the disk itself.
    CHECK(point_to_disk_pair_hull({-3.0, 4.0}, a, b) ==
          doctest::Approx(5.0 - 1.0).epsilon(1e-12));
    // Unequal radii: the hull boundary is the common outer tangent.
    const Obstacle c{{6.0, 0.0}, 2.0};
    // Far above the segment the nearest hull point lies on the tangent line;
    // cross-check against a dense parametric sample of the swept disk family.
    const Vec2 q{2.5, 5.0};
    double best = 1e300;
    for (int i = 0; i <= 20000; ++i) {
        const double t = i / 20000.0;
        const Vec2 ctr = (1 - t) * a.center + t * c.center;
        const double r = (1 - t) * a.radius + t * c.radius;
        best = std::min(best, (q - ctr).norm() - r);
    }
    CHECK(point_to_disk_pair_hull(q, a, c) == doctest::Approx(best).epsilon(1e-8));
}

TEST_CASE("hull distance of the far vertex: exact value on the triangle") {
    const Scene s = make_s3();
    CHECK(hull_distance(s, {0, 1}, 2) ==
          doctest::Approx(3.0 * std::sqrt(3.0) - 2.0).epsilon(1e-12));
    // Symmetry: every vertex sees the same distance to the other two.
    CHECK(hull_distance(s, {1, 2}, 0) ==
          doctest::Approx(3.0 * std::sqrt(3.0) - 2.0).epsilon(1e-12));
    CHECK(hull_distance(s, {0, 2}, 1) ==
          doctest::Approx(3.0 * std::sqrt(3.0) - 2.0).epsilon(1e-12));
}

TEST_CASE("hull distance to a singleton equals the pairwise gap") {
    const Scene s = make_s3();
    CHECK(hull_distance(s, {0}, 1) ==
          doctest::Approx(pairwise_gap(s.obstacles[0], s.obstacles[1])).epsilon(1e-12));
}

TEST_CASE("hull distance rejects k inside the subset and empty subsets") {
    const Scene s = make_s3();
    CHECK_THROWS_AS(hull_distance(s, {0, 1}, 1), PreconditionError);
    CHECK_THROWS_AS(hull_distance(s, {}, 0), PreconditionError);
}

TEST_CASE("square scene: eta0 equals the min over vertices of the hull distance") {
    const Scene s = make_s4();
    const SceneConstants k = validate_scene(s);
    double min_hull = 1e300;
    for (int kk = 0; kk < s.size(); ++kk) {
        std::vector<int> rest;
        for (int j = 0; j < s.size(); ++j)
            if (j != kk) rest.push_back(j);
        min_hull = std::min(min_hull, hull_distance(s, rest, kk));
    }
    CHECK(k.eta0 == doctest::Approx(min_hull).epsilon(1e-12));
}

TEST_CASE("validate_scene rejects fewer than three obstacles") {
    Scene s;
    s.obstacles = {{{0.0, 0.0}, 1.0}, {{6.0, 0.0}, 1.0}};
    CHECK_THROWS_AS(validate_scene(s), PreconditionError);
}

TEST_CASE("validate_scene rejects non-positive radii") {
    Scene s = make_s3();
    s.obstacles[1].radius = 0.0;
    CHECK_THROWS_AS(validate_scene(s), PreconditionError);
}

TEST_CASE("validate_scene rejects overlapping obstacles") {
    Scene s = make_s3();
    s.obstacles[1].center = Vec2(1.5, 0.0);  // gap -0.5
    CHECK_THROWS_AS(validate_scene(s), OverlappingObstacles);
}

TEST_CASE("validate_scene rejects touching obstacles") {
    Scene s = make_s3();
    s.obstacles[1].center = Vec2(2.0, 0.0);  // closures tangent
    CHECK_THROWS_AS(validate_scene(s), OverlappingObstacles);
}

TEST_CASE("collinear disks violate the no-eclipse condition") {
    Scene s;
    s.obstacles = {{{0.0, 0.0}, 1.0}, {{6.0, 0.0}, 1.0}, {{12.0, 0.0}, 1.0}};
    CHECK_THROWS_AS(validate_scene(s), EclipseViolation);
}

TEST_CASE("radius sweep on the triangle flips validity exactly at the eclipse threshold") {
    // Equilateral side 6: the middle of edge {0,1} is at height 3*sqrt(3)
    // below vertex 2, so the hull of two disks of radius R reaches vertex
    // disk 2 when R = 3*sqrt(3)/2.  Overlap happens later (R = 3).
    const double r_crit = 3.0 * std::sqrt(3.0) / 2.0;
    int flips = 0;
    bool prev = true;
    for (int i = 0; i <= 200; ++i) {
        const double R = 0.2 + (2.9 - 0.2) * i / 200.0;
        bool ok = true;
        try {
            validate_scene(make_s3(6.0, R));
        } catch (const Error&) {
            ok = false;
        }
        if (i > 0 && ok != prev) ++flips;
        const bool expect = R < r_crit;
        CHECK(ok == expect);
        prev = ok;
    }
    CHECK(flips == 1);
}

TEST_CASE("scene constants are invariant under rigid motions") {
    std::mt19937 rng(20260814);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> off(-20.0, 20.0);
    const Scene base = make_s4();
    const SceneConstants k0 = validate_scene(base);
    for (int trial = 0; trial < 10; ++trial) {
        const Scene moved =
            rotate_translate(base, ang(rng), Vec2(off(rng), off(rng)));
        const SceneConstants k = validate_scene(moved);
        CHECK(k.d0 == doctest::Approx(k0.d0).epsilon(1e-12));
        CHECK(k.d1 == doctest::Approx(k0.d1).epsilon(1e-12));
        CHECK(k.d2 == doctest::Approx(k0.d2).epsilon(1e-12));
        CHECK(k.eta0 == doctest::Approx(k0.eta0).epsilon(1e-12));
        CHECK(k.psi0 == doctest::Approx(k0.psi0).epsilon(1e-12));
    }
}

TEST_CASE("random fleet scenes all validate with the required margins") {
    const auto fleet = testutil::random_fleet(6, 97);
    for (const auto& s : fleet) {
        const SceneConstants k = validate_scene(s);
        CHECK(k.d0 >= 8.0);  // fleet enforces pairwise gaps >= 4
        CHECK(k.eta0 > 0.0);
        CHECK(k.d2 >= 1.0);
    }
}
