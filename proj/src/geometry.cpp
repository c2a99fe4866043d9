#include "bspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bspec {

namespace {

constexpr double pi = std::numbers::pi;

// Max distance between a point of disk a and a point of disk b.
double max_point_distance(const Obstacle& a, const Obstacle& b) {
    return (a.center - b.center).norm() + a.radius + b.radius;
}

}  // namespace

double pairwise_gap(const Obstacle& a, const Obstacle& b) {
    return (a.center - b.center).norm() - a.radius - b.radius;
}

double point_to_disk_pair_hull(const Vec2& p, const Obstacle& a, const Obstacle& b) {
    // The hull of two disks is the union over lambda in [0,1] of the disks
    // Ball(c(lambda), R(lambda)) with linearly interpolated center/radius, so
    // the signed distance is min_lambda |p - c(lambda)| - R(lambda).
    const Vec2 d = b.center - a.center;
    const double s = b.radius - a.radius;
    const Vec2 w0 = p - a.center;
    const double A = w0.dot(d);
    const double B = d.squaredNorm();
    const double C = w0.squaredNorm();

    auto g = [&](double lam) {
        return (w0 - lam * d).norm() - (a.radius + lam * s);
    };

    double best = std::min(g(0.0), g(1.0));
    // Interior stationary points: squaring <w,d> = -s|w| gives
    //  B(B - s^2) lam^2 - 2A(B - s^2) lam + (A^2 - s^2 C) = 0.
    // Spurious roots of the squared equation are harmless: g is simply
    // evaluated at every candidate.
    const double Bs = B - s * s;  // > 0 for disjoint disks
    if (Bs > 0.0) {
        const double cross2 = std::max(0.0, C * B - A * A);
        const double root = std::abs(s) * std::sqrt(cross2 / (Bs * B * B));
        for (double lam : {A / B + root, A / B - root}) {
            if (lam > 0.0 && lam < 1.0) best = std::min(best, g(lam));
        }
    }
    return best;
}

double point_to_disk_hull(const Vec2& p, const std::vector<Obstacle>& disks,
                          std::pair<int, int>* active_pair) {
    // Support form: f(theta) = max_j (A_j cos(theta - phi_j) + R_j) with
    // (A_j, phi_j) the polar coordinates of c_j - p.  The signed distance
    // from p to the hull is -min_theta f(theta); the minimum of the upper
    // envelope sits at a per-disk extremum or a pairwise crossing, all in
    // closed form.
    const int n = static_cast<int>(disks.size());
    std::vector<double> amp(n), phase(n);
    for (int j = 0; j < n; ++j) {
        const Vec2 w = disks[j].center - p;
        amp[j] = w.norm();
        phase[j] = std::atan2(w.y(), w.x());
    }
    auto f_at = [&](double theta, int* arg = nullptr) {
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            const double v = amp[j] * std::cos(theta - phase[j]) + disks[j].radius;
            if (v > best) {
                best = v;
                if (arg) *arg = j;
            }
        }
        return best;
    };

    std::vector<double> candidates;
    candidates.reserve(static_cast<size_t>(2 * n + n * n));
    for (int j = 0; j < n; ++j) {
        candidates.push_back(phase[j]);
        candidates.push_back(phase[j] + pi);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // A_i cos(t - phi_i) - A_j cos(t - phi_j) = R_j - R_i
            const double ax = amp[i] * std::cos(phase[i]) - amp[j] * std::cos(phase[j]);
            const double ay = amp[i] * std::sin(phase[i]) - amp[j] * std::sin(phase[j]);
            const double c = disks[j].radius - disks[i].radius;
            const double rho = std::hypot(ax, ay);
            if (rho <= 0.0 || std::abs(c) > rho) continue;
            const double base = std::atan2(ay, ax);
            const double off = std::acos(std::clamp(c / rho, -1.0, 1.0));
            candidates.push_back(base + off);
            candidates.push_back(base - off);
        }
    }

    double fmin = std::numeric_limits<double>::infinity();
    double theta_min = 0.0;
    for (double theta : candidates) {
        const double v = f_at(theta);
        if (v < fmin) {
            fmin = v;
            theta_min = theta;
        }
    }

    if (active_pair) {
        // Top two support values at the minimising direction: the hull
        // feature nearest p is an arc of the first, or the tangent segment
        // spanned by the first and second.
        int first = -1, second = -1;
        double v1 = -std::numeric_limits<double>::infinity();
        double v2 = v1;
        for (int j = 0; j < n; ++j) {
            const double v = amp[j] * std::cos(theta_min - phase[j]) + disks[j].radius;
            if (v > v1) {
                v2 = v1; second = first;
                v1 = v; first = j;
            } else if (v > v2) {
                v2 = v; second = j;
            }
        }
        *active_pair = {first, second >= 0 ? second : first};
    }
    return -fmin;
}

double hull_distance(const Scene& scene, const std::vector<int>& subset_indices, int k) {
    if (subset_indices.empty()) throw PreconditionError("hull_distance: empty subset");
    if (k < 0 || k >= scene.size()) throw PreconditionError("hull_distance: k out of range");
    std::vector<Obstacle> disks;
    disks.reserve(subset_indices.size());
    for (int j : subset_indices) {
        if (j == k) throw PreconditionError("hull_distance: k belongs to the subset");
        if (j < 0 || j >= scene.size()) throw PreconditionError("hull_distance: subset index out of range");
        disks.push_back(scene.obstacles[j]);
    }
    const double signed_dist = point_to_disk_hull(scene.obstacles[k].center, disks);
    return std::max(0.0, signed_dist - scene.obstacles[k].radius);
}

SceneConstants validate_scene(const Scene& scene) {
    const int r = scene.size();
    if (r < 3) throw PreconditionError("validate_scene: need r >= 3 obstacles");
    for (const auto& ob : scene.obstacles)
        if (!(ob.radius > 0.0)) throw PreconditionError("validate_scene: radius must be positive");

    // Pairwise disjointness and the gap statistics.
    double min_gap = std::numeric_limits<double>::infinity();
    double max_gap = 0.0;
    for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
            const double gap = pairwise_gap(scene.obstacles[i], scene.obstacles[j]);
            if (gap <= 0.0) throw OverlappingObstacles(i, j);
            min_gap = std::min(min_gap, gap);
            max_gap = std::max(max_gap, gap);
        }
    }

    SceneConstants c;
    c.d0 = 2.0 * min_gap;
    c.d1 = max_gap;
    c.d2 = 2.0 * c.d1 / c.d0;
    const double tol = 1e-9 * c.d1;

    // Non-eclipse (1.1): every obstacle k clears the hull of every pair.
    for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
            for (int k = 0; k < r; ++k) {
                if (k == i || k == j) continue;
                const double margin =
                    point_to_disk_pair_hull(scene.obstacles[k].center, scene.obstacles[i],
                                            scene.obstacles[j]) -
                    scene.obstacles[k].radius;
                if (margin <= tol) throw EclipseViolation(i, j, k);
            }
        }
    }

    // eta0: each obstacle clears the hull of all the others.  (1.1) alone
    // does not force this -- a disk can hide in the central pocket of three
    // others -- so the check is explicit.
    c.eta0 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < r; ++k) {
        std::vector<Obstacle> others;
        std::vector<int> other_idx;
        for (int j = 0; j < r; ++j) {
            if (j == k) continue;
            others.push_back(scene.obstacles[j]);
            other_idx.push_back(j);
        }
        std::pair<int, int> active{0, 0};
        const double dist =
            point_to_disk_hull(scene.obstacles[k].center, others, &active) -
            scene.obstacles[k].radius;
        if (dist <= tol) throw EclipseViolation(other_idx[active.first], other_idx[active.second], k);
        c.eta0 = std::min(c.eta0, dist);
    }

    // psi0: a reflection at D_b travelling D_a -> D_b -> D_c with both
    // segments at angle theta to the tangent line satisfies, whenever
    // theta <= pi/4,  sin(2 theta) >= m_abc / min(pmax_ab, pmax_bc)
    // where m_abc = dist(D_b, ch(D_a u D_c)): the vertex lies in D_b and the
    // chord lies in ch(D_a u D_c), so the triangle height (>= m_abc) is
    // pq sin(2 theta)/|chord| with |chord| >= max(p, q) in that regime.
    // The reflection angle against the inward normal is pi/2 + theta.
    double theta_min = pi / 4.0;
    for (int b = 0; b < r; ++b) {
        for (int a = 0; a < r; ++a) {
            if (a == b) continue;
            for (int cc = a; cc < r; ++cc) {
                if (cc == b) continue;
                Obstacle da = scene.obstacles[a];
                Obstacle dc = scene.obstacles[cc];
                const double m_abc = std::max(
                    0.0, point_to_disk_pair_hull(scene.obstacles[b].center, da, dc) -
                             scene.obstacles[b].radius);
                const double reach = std::min(max_point_distance(da, scene.obstacles[b]),
                                              max_point_distance(dc, scene.obstacles[b]));
                const double s = std::min(1.0, m_abc / reach);
                theta_min = std::min(theta_min, 0.5 * std::asin(s));
            }
        }
    }
    c.psi0 = pi / 2.0 + theta_min;
    return c;
}

}
