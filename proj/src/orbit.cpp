#include "bspec/orbit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "bspec/errors.hpp"

namespace bspec {

namespace {

struct Objective {
    const Scene* scene = nullptr;
    const std::vector<int>* word = nullptr;

    int k() const { return static_cast<int>(word->size()); }
    const Obstacle& disk(int j) const { return scene->obstacles[(*word)[j]]; }

    std::vector<Vec2> points(const std::vector<double>& th) const {
        std::vector<Vec2> x(th.size());
        for (int j = 0; j < k(); ++j) x[j] = disk(j).point(th[j]);
        return x;
    }

    double length(const std::vector<double>& th) const {
        auto x = points(th);
        double L = 0.0;
        for (int j = 0; j < k(); ++j) L += (x[(j + 1) % k()] - x[j]).norm();
        return L;
    }

    // Gradient and Hessian of L over the boundary angles.  Per edge a->b with
    // unit direction e and length l:
    //   dL/da += -<e, x_a'>,               dL/db += <e, x_b'>
    //   d2L/da2 += (|x_a'|^2 - <e,x_a'>^2)/l - <e, x_a''>
    //   d2L/db2 += (|x_b'|^2 - <e,x_b'>^2)/l + <e, x_b''>
    //   d2L/dadb += -(<x_a',x_b'> - <e,x_a'><e,x_b'>)/l
    void derivatives(const std::vector<double>& th, Eigen::VectorXd& g,
                     Eigen::MatrixXd& H) const {
        const int n = k();
        g.setZero(n);
        H.setZero(n, n);
        auto x = points(th);
        std::vector<Vec2> d1(n), d2(n);
        for (int j = 0; j < n; ++j) {
            const double R = disk(j).radius;
            d1[j] = R * Vec2(-std::sin(th[j]), std::cos(th[j]));
            d2[j] = -R * Vec2(std::cos(th[j]), std::sin(th[j]));
        }
        for (int a = 0; a < n; ++a) {
            const int b = (a + 1) % n;
            const Vec2 diff = x[b] - x[a];
            const double l = diff.norm();
            const Vec2 e = diff / l;
            const double ea = e.dot(d1[a]);
            const double eb = e.dot(d1[b]);
            g(a) += -ea;
            g(b) += eb;
            H(a, a) += (d1[a].squaredNorm() - ea * ea) / l - e.dot(d2[a]);
            H(b, b) += (d1[b].squaredNorm() - eb * eb) / l + e.dot(d2[b]);
            const double cross = -(d1[a].dot(d1[b]) - ea * eb) / l;
            H(a, b) += cross;
            H(b, a) += cross;
        }
    }
};

// One-dimensional guarded Newton on theta_j with neighbors fixed.
void coordinate_sweep(const Objective& f, std::vector<double>& th) {
    const int n = f.k();
    for (int j = 0; j < n; ++j) {
        const Vec2 A = f.disk((j + n - 1) % n).point(th[(j + n - 1) % n]);
        const Vec2 B = f.disk((j + 1) % n).point(th[(j + 1) % n]);
        const Obstacle& D = f.disk(j);
        for (int it = 0; it < 8; ++it) {
            const double R = D.radius;
            const Vec2 x = D.point(th[j]);
            const Vec2 xp = R * Vec2(-std::sin(th[j]), std::cos(th[j]));
            const Vec2 xpp = -R * Vec2(std::cos(th[j]), std::sin(th[j]));
            double g = 0.0, h = 0.0;
            for (const Vec2& P : {A, B}) {
                const Vec2 w = x - P;
                const double r = w.norm();
                if (r < 1e-12) continue;
                const Vec2 u = w / r;
                const double gu = u.dot(xp);
                g += gu;
                h += u.dot(xpp) + (xp.squaredNorm() - gu * gu) / r;
            }
            if (std::abs(g) < 1e-14) break;
            double step = (h > 1e-9) ? -g / h : -0.25 * g;
            step = std::clamp(step, -0.5, 0.5);
            th[j] += step;
        }
    }
}

std::vector<double> warm_start(const Scene& scene, const Configuration& config) {
    const int n = config.k();
    std::vector<double> th(n);
    for (int j = 0; j < n; ++j) {
        const Vec2 c = scene.obstacles[config.word[j]].center;
        const Vec2 prev = scene.obstacles[config.word[(j + n - 1) % n]].center;
        const Vec2 next = scene.obstacles[config.word[(j + 1) % n]].center;
        const Vec2 target = 0.5 * (prev + next) - c;
        th[j] = std::atan2(target.y(), target.x());
    }
    return th;
}

// Minimum distance from the open segment p->q to each obstacle not at an
// endpoint of the edge, by orthogonal projection.
double segment_clearance(const Scene& scene, const std::vector<int>& word,
                         const std::vector<Vec2>& x) {
    const int n = static_cast<int>(x.size());
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const int jn = (j + 1) % n;
        const Vec2 p = x[j];
        const Vec2 d = x[jn] - p;
        const double dd = d.squaredNorm();
        for (int m = 0; m < scene.size(); ++m) {
            if (m == word[j] || m == word[jn]) continue;
            const Obstacle& o = scene.obstacles[m];
            const double s = std::clamp((o.center - p).dot(d) / dd, 0.0, 1.0);
            best = std::min(best, (p + s * d - o.center).norm() - o.radius);
        }
    }
    return best;
}

Vec2 reflect(const Vec2& v, const Vec2& n) { return v - 2.0 * v.dot(n) * n; }

void fill_residuals(const Scene& scene, PeriodicOrbit& orb) {
    const int n = orb.config.k();
    orb.points.resize(n);
    for (int j = 0; j < n; ++j)
        orb.points[j] = scene.obstacles[orb.config.word[j]].point(orb.params[j]);
    std::vector<Vec2> e(n);
    orb.tau_primitive = 0.0;
    for (int j = 0; j < n; ++j) {
        const Vec2 diff = orb.points[(j + 1) % n] - orb.points[j];
        const double l = diff.norm();
        orb.tau_primitive += l;
        e[j] = diff / l;
    }
    // Angular defect of the reflection law at each vertex.
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const Vec2 nrm = scene.obstacles[orb.config.word[j]].outward_normal(orb.params[j]);
        const Vec2 r = reflect(e[(j + n - 1) % n], nrm);
        worst = std::max(worst, std::atan2(std::abs(r.x() * e[j].y() - r.y() * e[j].x()),
                                           r.dot(e[j])));
    }
    orb.residual_reflection = worst;
    // Propagate e_0 through the full reflection cycle and compare.
    Vec2 v = e[0];
    for (int j = 1; j <= n; ++j) {
        const int m = j % n;
        v = reflect(v, scene.obstacles[orb.config.word[m]].outward_normal(orb.params[m]));
    }
    orb.residual_closure =
        std::atan2(std::abs(v.x() * e[0].y() - v.y() * e[0].x()), v.dot(e[0]));
    orb.clearance = segment_clearance(scene, orb.config.word, orb.points);
}

}  // namespace

PeriodicOrbit solve_orbit(const Scene& scene, const Configuration& config,
                          const SolveOptions& opts) {
    if (config.k() < 2) throw PreconditionError("configuration must have at least 2 letters");
    for (int c : config.word)
        if (c < 0 || c >= scene.size())
            throw PreconditionError("configuration letter out of range for scene");
    if (!is_cyclically_admissible(config.word))
        throw PreconditionError("configuration is not cyclically admissible");
    if (!is_primitive(config.word))
        throw PreconditionError("configuration must be primitive");

    const SceneConstants consts = validate_scene(scene);
    Objective f{&scene, &config.word};
    const int n = config.k();
    const std::vector<double> base = warm_start(scene, config);

    Eigen::VectorXd g(n);
    Eigen::MatrixXd H(n, n);

    // Restart loop: descent can stall on an unphysical critical point of L
    // (a polygon through an obstacle); shrink any user-provided start toward
    // the inward-facing warm start and try again.
    for (int attempt = 0; attempt < 30; ++attempt) {
        std::vector<double> th = base;
        if (opts.initial_params) {
            if (static_cast<int>(opts.initial_params->size()) != n)
                throw PreconditionError("initial_params size must equal configuration length");
            const double w = std::pow(0.6, attempt);
            for (int j = 0; j < n; ++j) {
                double delta = std::remainder((*opts.initial_params)[j] - base[j], 2.0 * M_PI);
                th[j] = base[j] + w * delta + (attempt > 0 ? 1e-3 * attempt * std::cos(j + attempt) : 0.0);
            }
        } else if (attempt > 0) {
            for (int j = 0; j < n; ++j) th[j] += 0.05 * attempt * std::sin(3.7 * j + attempt);
        }
        for (int sweep = 0; sweep < 3; ++sweep) coordinate_sweep(f, th);

        double L = f.length(th);
        double lambda = 0.0;
        bool converged = false;
        for (int it = 0; it < opts.max_iterations; ++it) {
            f.derivatives(th, g, H);
            const double gn = g.norm();
            if (gn <= opts.grad_tol) {
                // Require a local minimum: escape saddles along negative curvature.
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
                if (es.eigenvalues()(0) > 1e-9) {
                    converged = true;
                    break;
                }
                Eigen::VectorXd dir = es.eigenvectors().col(0);
                for (int j = 0; j < n; ++j) th[j] += 1e-3 * dir(j);
                L = f.length(th);
                continue;
            }
            bool stepped = false;
            for (int tries = 0; tries < 60; ++tries) {
                Eigen::MatrixXd M = H;
                for (int j = 0; j < n; ++j) M(j, j) += lambda;
                Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
                if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
                    Eigen::VectorXd step = ldlt.solve(-g);
                    std::vector<double> cand = th;
                    for (int j = 0; j < n; ++j) cand[j] += step(j);
                    const double Lc = f.length(cand);
                    if (Lc <= L || step.norm() <= 1e-15) {
                        th = cand;
                        L = Lc;
                        lambda = (lambda < 1e-12) ? 0.0 : lambda / 3.0;
                        stepped = true;
                        break;
                    }
                }
                lambda = (lambda < 1e-12) ? 1e-6 : lambda * 10.0;
                if (lambda > 1e12) break;
            }
            if (!stepped) break;
        }
        if (!converged) continue;

        PeriodicOrbit orb;
        orb.config = config;
        orb.params = th;
        for (double& t : orb.params) t = std::remainder(t, 2.0 * M_PI);
        fill_residuals(scene, orb);

        if (opts.validate) {
            if (!(orb.tau_primitive >= consts.d0 * (1.0 - 1e-12))) continue;
            if (!(orb.residual_reflection <= 1e-9)) continue;
            if (!(orb.residual_closure <= 1e-9)) continue;
            if (!(orb.clearance > 1e-9 * consts.d1)) continue;
            bool cone_ok = true;
            for (int j = 0; j < n; ++j) {
                const Vec2 e_out =
                    (orb.points[(j + 1) % n] - orb.points[j]).normalized();
                const Vec2 n_in =
                    scene.obstacles[config.word[j]].inward_normal(orb.params[j]);
                if (e_out.dot(n_in) > std::cos(consts.psi0) + 1e-12) {
                    cone_ok = false;
                    break;
                }
            }
            if (!cone_ok)
                throw ValidationFailure("reflection cone",
                                        "orbit " + config.token() +
                                            " violates the uniform cone bound");
        }
        return orb;
    }
    throw NonConvergence(config.token());
}

namespace {

struct Hit {
    int obstacle = -1;
    double t = 0.0;
    double cos_impact = 0.0;  // |<v, n>| at impact
};

// First ray/disk intersection beyond t_eps; skip excludes one obstacle.
std::optional<Hit> first_hit(const Scene& scene, const Vec2& p, const Vec2& v,
                             int skip) {
    constexpr double t_eps = 1e-9;
    std::optional<Hit> best;
    for (int m = 0; m < scene.size(); ++m) {
        if (m == skip) continue;
        const Obstacle& o = scene.obstacles[m];
        const Vec2 w = o.center - p;
        const double tc = w.dot(v);
        const double d2 = w.squaredNorm() - tc * tc;
        const double rr = o.radius * o.radius;
        if (d2 > rr) continue;
        const double half = std::sqrt(std::max(0.0, rr - d2));
        const double t = tc - half;
        if (t <= t_eps) continue;
        if (!best || t < best->t)
            best = Hit{m, t, half / o.radius};
    }
    return best;
}

}  // namespace

Trajectory shoot(const Scene& scene, const PhasePoint& start, int n_bounces,
                 int skip_first) {
    if (n_bounces < 0) throw PreconditionError("n_bounces must be non-negative");
    if (scene.size() == 0) throw PreconditionError("scene must contain obstacles");
    Vec2 p = start.position;
    Vec2 v = start.direction.normalized();

    int skip = skip_first;
    if (skip < 0) {
        // A start on (or within rounding of) a boundary pointing outward must
        // not re-hit its own obstacle at t ~ 0.
        for (int m = 0; m < scene.size(); ++m) {
            const Obstacle& o = scene.obstacles[m];
            const double r = (p - o.center).norm();
            if (std::abs(r - o.radius) <= 1e-9 * o.radius &&
                v.dot(p - o.center) >= 0.0) {
                skip = m;
                break;
            }
        }
    }

    Trajectory traj;
    traj.bounces.reserve(n_bounces);
    traj.obstacle.reserve(n_bounces);
    for (int step = 0; step < n_bounces; ++step) {
        auto hit = first_hit(scene, p, v, skip);
        skip = -1;
        if (!hit) {
            traj.status = ShootStatus::escaped;
            traj.event_step = step;
            return traj;
        }
        if (hit->cos_impact < 1e-10) {
            traj.status = ShootStatus::grazing;
            traj.event_step = step;
            return traj;
        }
        p = p + hit->t * v;
        const Obstacle& o = scene.obstacles[hit->obstacle];
        // Snap the state back onto the section manifold: the quadratic's
        // rounding leaves p slightly off the boundary and reflection drifts
        // |v| away from 1, and both defects re-enter the next flight with
        // gain beyond the tangent expansion, wrecking long replays.
        const Vec2 n = (p - o.center).normalized();
        p = o.center + o.radius * n;
        v = reflect(v, n).normalized();
        traj.bounces.push_back(PhasePoint{p, v});
        traj.obstacle.push_back(hit->obstacle);
    }
    return traj;
}

OrbitValidation validate_orbit(const Scene& scene, const PeriodicOrbit& orbit) {
    OrbitValidation rep;
    const int n = orbit.config.k();
    auto fail = [&rep](const std::string& what) {
        if (rep.failure.empty()) rep.failure = what;
    };
    if (n < 2 || static_cast<int>(orbit.params.size()) != n) {
        fail("malformed orbit record");
        return rep;
    }
    for (int c : orbit.config.word)
        if (c < 0 || c >= scene.size()) {
            fail("configuration letter out of range");
            return rep;
        }

    SceneConstants consts;
    try {
        consts = validate_scene(scene);
    } catch (const Error&) {
        fail("scene invalid");
        return rep;
    }

    std::vector<Vec2> x(n);
    for (int j = 0; j < n; ++j)
        x[j] = scene.obstacles[orbit.config.word[j]].point(orbit.params[j]);
    std::vector<Vec2> e(n);
    for (int j = 0; j < n; ++j) {
        const Vec2 diff = x[(j + 1) % n] - x[j];
        const double l = diff.norm();
        if (l < 1e-12) {
            fail("degenerate edge");
            return rep;
        }
        e[j] = diff / l;
    }

    // Reflection law via tangential/normal components (distinct from the
    // solver's reflect-and-compare form): <e_in,t> = <e_out,t> and
    // <e_in,n> = -<e_out,n>.
    double worst = 0.0;
    bool cone_ok = true;
    for (int j = 0; j < n; ++j) {
        const Vec2 nrm = scene.obstacles[orbit.config.word[j]].outward_normal(orbit.params[j]);
        const Vec2 tan(-nrm.y(), nrm.x());
        const Vec2 ein = e[(j + n - 1) % n];
        const Vec2 eout = e[j];
        worst = std::max(worst, std::abs(ein.dot(nrm) + eout.dot(nrm)));
        worst = std::max(worst, std::abs(ein.dot(tan) - eout.dot(tan)));
        if (eout.dot(-nrm) > std::cos(consts.psi0) + 1e-12) cone_ok = false;
    }
    rep.reflection_defect = worst;
    rep.cone_ok = cone_ok;

    Vec2 v = e[0];
    for (int j = 1; j <= n; ++j) {
        const int m = j % n;
        v = reflect(v, scene.obstacles[orbit.config.word[m]].outward_normal(orbit.params[m]));
    }
    rep.closure_defect = (v - e[0]).norm();

    // Clearance by ternary search on the convex point/segment distance.
    double clear = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const int jn = (j + 1) % n;
        for (int m = 0; m < scene.size(); ++m) {
            if (m == orbit.config.word[j] || m == orbit.config.word[jn]) continue;
            const Obstacle& o = scene.obstacles[m];
            double lo = 0.0, hi = 1.0;
            auto dist = [&](double s) {
                return (x[j] + s * (x[jn] - x[j]) - o.center).norm();
            };
            for (int it = 0; it < 200; ++it) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (dist(m1) <= dist(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            clear = std::min(clear, dist(0.5 * (lo + hi)) - o.radius);
        }
    }
    rep.clearance = clear;

    // Full billiard round trip from bounce 0.
    Trajectory traj = shoot(scene, PhasePoint{x[0], e[0]}, n, orbit.config.word[0]);
    if (traj.status == ShootStatus::completed &&
        static_cast<int>(traj.obstacle.size()) == n) {
        bool match = true;
        for (int j = 0; j < n; ++j)
            if (traj.obstacle[j] != orbit.config.word[(j + 1) % n]) match = false;
        rep.itinerary_match = match;
        rep.roundtrip_position = (traj.bounces.back().position - x[0]).norm();
        rep.roundtrip_direction = (traj.bounces.back().direction - e[0]).norm();
    } else {
        rep.itinerary_match = false;
        rep.roundtrip_position = std::numeric_limits<double>::infinity();
        rep.roundtrip_direction = std::numeric_limits<double>::infinity();
    }

    // The forward shoot amplifies rounding in the stored angles by the
    // orbit's expansion factor, so the round-trip tolerance must scale with
    // the norm of the linearized return map.
    Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
    for (int j = 0; j < n; ++j) {
        const double l = (x[(j + 1) % n] - x[j]).norm();
        const int jn = (j + 1) % n;
        const Obstacle& o = scene.obstacles[orbit.config.word[jn]];
        const double cos_phi = std::max(
            std::abs(e[j].dot(o.outward_normal(orbit.params[jn]))), 1e-12);
        Eigen::Matrix2d M;
        M << 1.0, l, 2.0 * o.curvature() / cos_phi,
            1.0 + 2.0 * o.curvature() * l / cos_phi;
        P = M * P;
    }
    const double roundtrip_tol = 1e-9 + 1e-11 * P.norm();

    if (rep.reflection_defect > 1e-9) fail("reflection law");
    if (rep.closure_defect > 1e-9) fail("cyclic closure");
    if (!(rep.clearance > 1e-9 * consts.d1)) fail("segment clearance");
    if (!rep.itinerary_match) fail("shoot itinerary");
    if (rep.roundtrip_position > roundtrip_tol ||
        rep.roundtrip_direction > roundtrip_tol)
        fail("shoot round trip");
    if (!rep.cone_ok) fail("reflection cone");
    rep.pass = rep.failure.empty();
    return rep;
}

}
