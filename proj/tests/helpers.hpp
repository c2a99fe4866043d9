#ifndef BSPEC_TEST_HELPERS_HPP
#define BSPEC_TEST_HELPERS_HPP

// Shared fixtures and independent oracles for the unit and acceptance suites.
// Everything here is doctest-free so the acceptance binary can reuse it.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bspec/geometry.hpp"
#include "bspec/orbit.hpp"
#include "bspec/spectrum.hpp"
#include "bspec/symbolic.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// Reference scenes
// ---------------------------------------------------------------------------

// Three disks of radius `radius` at the vertices of an equilateral triangle
// with the given side length.
inline bspec::Scene make_s3(double side = 6.0, double radius = 1.0) {
    bspec::Scene s;
    s.label = "s3";
    s.obstacles = {{{0.0, 0.0}, radius},
                   {{side, 0.0}, radius},
                   {{side / 2.0, side * std::sqrt(3.0) / 2.0}, radius}};
    return s;
}

// Four disks at the corners of a square.  The diagonal 2-bounce ray and the
// symmetric 3-bounce rays share exact reflection points.
inline bspec::Scene make_s4(double side = 6.0, double radius = 1.0) {
    bspec::Scene s;
    s.label = "s4";
    s.obstacles = {{{0.0, 0.0}, radius},
                   {{side, 0.0}, radius},
                   {{side, side}, radius},
                   {{0.0, side}, radius}};
    return s;
}

// Randomized valid scenes: r in {3,4,5}, radii U[0.7, 1.3], pairwise gaps
// at least 4 (so only short words fit under the usual cutoffs and sampled
// phase distances stay clear of the Lipschitz correction), rejection-sampled
// until validate_scene accepts.
inline std::vector<bspec::Scene> random_fleet(int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> r_dist(3, 5);
    std::uniform_real_distribution<double> rad(0.7, 1.3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<bspec::Scene> fleet;
    while (static_cast<int>(fleet.size()) < count) {
        const int r = r_dist(rng);
        const double box = 5.0 * r;
        bspec::Scene s;
        s.label = "fleet-" + std::to_string(fleet.size());
        bool placed_all = true;
        for (int i = 0; i < r && placed_all; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
                bspec::Obstacle o{{unit(rng) * box, unit(rng) * box}, rad(rng)};
                bool gap_ok = true;
                for (const auto& p : s.obstacles)
                    if (bspec::pairwise_gap(o, p) < 4.0) {
                        gap_ok = false;
                        break;
                    }
                if (gap_ok) {
                    s.obstacles.push_back(o);
                    placed = true;
                }
            }
            placed_all = placed;
        }
        if (!placed_all) continue;
        try {
            bspec::validate_scene(s);
        } catch (const bspec::Error&) {
            continue;
        }
        fleet.push_back(std::move(s));
    }
    return fleet;
}

// ---------------------------------------------------------------------------
// Counting oracles (independent of the symbolic module)
// ---------------------------------------------------------------------------

// tr(A^k) for the adjacency matrix A = J - I on r symbols: the number of
// admissible closed symbol strings of length k.
inline long trace_Ak(int r, int k) {
    long pw = 1;
    for (int i = 0; i < k; ++i) pw *= (r - 1);
    return pw + (r - 1) * (k % 2 == 0 ? 1 : -1);
}

inline int mobius(int n) {
    int mu = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        mu = -mu;
    }
    if (n > 1) mu = -mu;
    return mu;
}

// Number of primitive admissible cyclic words of length k over r symbols
// (each counted once per rotation class), via Mobius inversion of tr(A^k).
inline long necklace_primitive_count(int r, int k) {
    long sum = 0;
    for (int d = 1; d <= k; ++d)
        if (k % d == 0) sum += mobius(d) * trace_Ak(r, k / d);
    return sum / k;
}

// Exhaustive brute force over all r^k raw words: admissible, primitive,
// canonical-rotation representatives, as serialized tokens.
inline std::set<std::string> brute_force_words(int r, int k) {
    std::set<std::string> out;
    std::vector<int> w(k, 0);
    const long total = [&] {
        long t = 1;
        for (int i = 0; i < k; ++i) t *= r;
        return t;
    }();
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = 0; i < k; ++i) {
            w[i] = static_cast<int>(c % r);
            c /= r;
        }
        if (!bspec::is_cyclically_admissible(w)) continue;
        if (!bspec::is_primitive(w)) continue;
        if (bspec::canonical_rotation(w) != w) continue;
        out.insert(bspec::Configuration{w}.token());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference monodromy oracle
// ---------------------------------------------------------------------------

// Numerical Jacobian of the full k-step return map on the outgoing section at
// bounce 0 (transverse offset, direction angle), via the shooting oracle.
// Central differences; matches the transfer-matrix product to O(step).
inline Eigen::Matrix2d fd_monodromy(const bspec::Scene& scene,
                                    const bspec::PeriodicOrbit& orb,
                                    double step = 1e-7) {
    const int k = orb.config.k();
    const bspec::Vec2 x0 = orb.points[0];
    const bspec::Vec2 e0 = (orb.points[1 % k] - x0).normalized();
    const bspec::Vec2 t0(-e0.y(), e0.x());
    auto ret = [&](double u, double phi) -> Eigen::Vector2d {
        const bspec::Vec2 p = x0 + u * t0;
        const double c = std::cos(phi), s = std::sin(phi);
        const bspec::Vec2 v(c * e0.x() - s * e0.y(), s * e0.x() + c * e0.y());
        const bspec::Trajectory traj =
            bspec::shoot(scene, {p, v}, k, orb.config.word[0]);
        if (traj.status != bspec::ShootStatus::completed)
            throw std::runtime_error("fd_monodromy: perturbed ray escaped");
        const bspec::Vec2 z = traj.bounces[k - 1].position;
        const bspec::Vec2 w = traj.bounces[k - 1].direction;
        const double t = (x0 - z).dot(e0) / w.dot(e0);
        const bspec::Vec2 on = z + t * w - x0;
        return {on.dot(t0),
                std::atan2(e0.x() * w.y() - e0.y() * w.x(), e0.dot(w))};
    };
    Eigen::Matrix2d J;
    const Eigen::Vector2d du = (ret(step, 0.0) - ret(-step, 0.0)) / (2.0 * step);
    const Eigen::Vector2d dp = (ret(0.0, step) - ret(0.0, -step)) / (2.0 * step);
    J << du(0), dp(0), du(1), dp(1);
    return J;
}

// ---------------------------------------------------------------------------
// Planted spectra
// ---------------------------------------------------------------------------

inline bspec::SpectrumEntry synth_entry(const std::string& token, int repetition,
                                        double tau_primitive,
                                        double weight = 1.0) {
    bspec::SpectrumEntry e;
    e.config = bspec::Configuration::from_token(token);
    e.repetition = repetition;
    e.tau_primitive = tau_primitive;
    e.tau = repetition * tau_primitive;
    e.parity = bspec::parity(e.config, repetition);
    e.weight = weight;
    return e;
}

// Primitive lengths planted so the counting function equals
// round(e^{hx}/(hx)) along a dense grid.  Optionally alternates the parity of
// successive plants (so both classes follow half the density) and
// materializes all iterates with n*tau <= t_max.
inline bspec::LengthSpectrum planted_counts_spectrum(
    double h, double x_lo, double x_hi, double dx,
    bool alternate_parity = false, bool with_iterates = false,
    double t_max = -1.0) {
    const double tmax = t_max > 0.0 ? t_max : x_hi;
    std::vector<bspec::SpectrumEntry> entries;
    long placed = 0;
    bool odd_next = false;
    for (double x = x_lo; x <= x_hi + 1e-12; x += dx) {
        const long target = std::lround(std::exp(h * x) / (h * x));
        while (placed < target) {
            const std::string token =
                (alternate_parity && odd_next) ? "1-2-3" : "1-2";
            odd_next = !odd_next;
            entries.push_back(synth_entry(token, 1, x, std::exp(-0.5 * h * x)));
            if (with_iterates)
                for (int n = 2; n * x <= tmax + 1e-12; ++n)
                    entries.push_back(
                        synth_entry(token, n, x, std::exp(-0.5 * h * n * x)));
            ++placed;
        }
    }
    return bspec::LengthSpectrum::synthetic(std::move(entries), tmax);
}

// ---------------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------------

// Rebuild reflection points from params (for hand-perturbed orbits).
inline void refresh_points(const bspec::Scene& scene, bspec::PeriodicOrbit& orb) {
    orb.points.resize(orb.params.size());
    for (std::size_t j = 0; j < orb.params.size(); ++j)
        orb.points[j] =
            scene.obstacles[orb.config.word[j]].point(orb.params[j]);
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace testutil

#endif
