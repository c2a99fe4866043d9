#include "bspec/separation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "bspec/errors.hpp"

namespace bspec {

namespace {

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

Vec2 rotate(const Vec2& v, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

struct Sampled {
    std::vector<Vec2> pos;
    std::vector<Vec2> dir;
    double spacing = 0.0;  // max realized arclength spacing
};

// Midpoints of uniform subdivisions of each open segment.
Sampled sample_orbit(const PeriodicOrbit& orb, double step,
                     bool include_boundary) {
    Sampled out;
    const int n = orb.config.k();
    for (int j = 0; j < n; ++j) {
        const Vec2 p = orb.points[j];
        const Vec2 diff = orb.points[(j + 1) % n] - p;
        const double l = diff.norm();
        const Vec2 e = diff / l;
        const int ns = std::max(1, static_cast<int>(std::ceil(l / step)));
        out.spacing = std::max(out.spacing, l / ns);
        for (int i = 0; i < ns; ++i) {
            out.pos.push_back(p + ((i + 0.5) * l / ns) * e);
            out.dir.push_back(e);
        }
        if (include_boundary) {
            out.pos.push_back(p);  // outgoing representative at the bounce
            out.dir.push_back(e);
        }
    }
    return out;
}

bool linearly_connected(const Scene& scene, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double dd = d.squaredNorm();
    for (const Obstacle& o : scene.obstacles) {
        const double s =
            dd > 0.0 ? std::clamp((o.center - a).dot(d) / dd, 0.0, 1.0) : 0.0;
        if ((a + s * d - o.center).norm() < o.radius * (1.0 - 1e-12)) return false;
    }
    return true;
}

double op_norm(const Eigen::Matrix2d& M) {
    return M.jacobiSvd().singularValues()(0);
}

}  // namespace

Eigen::Matrix2d one_step_differential_fd(const Scene& scene,
                                         const PeriodicOrbit& orbit, int j,
                                         double step) {
    const int n = orbit.config.k();
    if (j < 0 || j >= n) throw PreconditionError("reflection index out of range");
    const int jn = (j + 1) % n;
    const Vec2 xj = orbit.points[j];
    const Vec2 xn = orbit.points[jn];
    const Vec2 ej = (xn - xj).normalized();
    const Vec2 en =
        (orbit.points[(jn + 1) % n] - xn).normalized();
    const Vec2 tj = rot90(ej);
    const Vec2 tn = rot90(en);

    auto map = [&](double u, double phi) -> Vec2 {
        const Vec2 p = xj + u * tj;
        const Vec2 v = rotate(ej, phi);
        const Trajectory traj = shoot(scene, PhasePoint{p, v}, 1, orbit.config.word[j]);
        if (traj.status != ShootStatus::completed ||
            traj.obstacle[0] != orbit.config.word[jn])
            throw ValidationFailure("finite difference",
                                    "perturbed ray left the itinerary of " +
                                        orbit.config.token());
        const Vec2 z = traj.bounces[0].position;
        const Vec2 w = traj.bounces[0].direction;
        const double t = (xn - z).dot(en) / w.dot(en);
        const Vec2 on_section = z + t * w - xn;
        return Vec2(on_section.dot(tn),
                    std::atan2(en.x() * w.y() - en.y() * w.x(), en.dot(w)));
    };

    Eigen::Matrix2d J;
    const Vec2 du = (map(step, 0.0) - map(-step, 0.0)) / (2.0 * step);
    const Vec2 dphi = (map(0.0, step) - map(0.0, -step)) / (2.0 * step);
    J << du.x(), dphi.x(), du.y(), dphi.y();
    return J;
}

FlowConstants estimate_flow_constants(const Scene& scene,
                                      const LengthSpectrum& spec) {
    FlowConstants fc;
    double a0 = 1.0 + 1e-12;
    for (const PeriodicOrbit& orb : spec.orbits)
        for (int j = 0; j < orb.config.k(); ++j)
            a0 = std::max(a0, op_norm(one_step_differential_fd(scene, orb, j)));
    fc.A0 = a0;
    const SceneConstants consts = validate_scene(scene);
    fc.beta = 2.0 * std::log(fc.A0) / consts.d0;

    // Prefactor: largest ||dphi_t|| e^{-beta t} over partial products along
    // the stored orbits, sampled inside each flight as well.
    double c0 = 1.0;
    for (const PeriodicOrbit& orb : spec.orbits) {
        const std::vector<Eigen::Matrix2d> factors = transfer_factors(scene, orb);
        const int n = orb.config.k();
        Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
        double t = 0.0;
        for (int j = 0; j < n; ++j) {
            const double l =
                (orb.points[(j + 1) % n] - orb.points[j]).norm();
            for (double frac : {0.25, 0.5, 0.75, 1.0}) {
                Eigen::Matrix2d F = Eigen::Matrix2d::Identity();
                F(0, 1) = frac * l;
                c0 = std::max(c0, op_norm(F * M) * std::exp(-fc.beta * (t + frac * l)));
            }
            M = factors[j] * M;
            t += l;
            c0 = std::max(c0, op_norm(M) * std::exp(-fc.beta * t));
        }
    }
    fc.C0 = c0;
    fc.eps0 = std::min(consts.eta0 / (2.0 * fc.C0), consts.d0 / (4.0 * fc.C0));
    return fc;
}

double phase_distance(const Scene& scene, const PeriodicOrbit& a,
                      const PeriodicOrbit& b, double sampling_step) {
    if (a.config == b.config)
        throw PreconditionError("phase_distance requires distinct orbits");
    const SceneConstants consts = validate_scene(scene);
    if (!(sampling_step > 0.0 &&
          sampling_step <= consts.d0 / 100.0 * (1.0 + 1e-12)))
        throw PreconditionError("sampling_step must lie in (0, d0/100]");

    const Sampled sa = sample_orbit(a, sampling_step, false);
    const Sampled sb = sample_orbit(b, sampling_step, false);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sa.pos.size(); ++i) {
        for (std::size_t j = 0; j < sb.pos.size(); ++j) {
            const double d2 = (sa.pos[i] - sb.pos[j]).squaredNorm() +
                              (sa.dir[i] - sb.dir[j]).squaredNorm();
            const double d = std::sqrt(d2);
            if (d >= best) continue;
            if (linearly_connected(scene, sa.pos[i], sb.pos[j])) best = d;
        }
    }
    if (!std::isfinite(best)) return best;
    return std::max(0.0, best - 0.5 * (sa.spacing + sb.spacing));
}

SeparationReport check_theorem41(const LengthSpectrum& spec, double T,
                                 const FlowConstants& constants,
                                 double sampling_step) {
    if (!tau_leq(T, spec.t_max))
        throw PreconditionError("T exceeds the certified T_max");
    const double step =
        std::isnan(sampling_step) ? spec.constants.d0 / 1000.0 : sampling_step;

    std::vector<int> sel;
    for (std::size_t i = 0; i < spec.orbits.size(); ++i)
        if (tau_leq(spec.orbits[i].tau_primitive, T))
            sel.push_back(static_cast<int>(i));

    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < sel.size(); ++i)
        for (std::size_t j = i + 1; j < sel.size(); ++j)
            pairs.emplace_back(sel[i], sel[j]);

    std::vector<double> dist(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (long p = 0; p < static_cast<long>(pairs.size()); ++p)
        dist[p] = phase_distance(spec.scene, spec.orbits[pairs[p].first],
                                 spec.orbits[pairs[p].second], step);

    SeparationReport rep;
    rep.T = T;
    rep.min_pair_distance = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (dist[p] < rep.min_pair_distance) {
            rep.min_pair_distance = dist[p];
            rep.token_a = spec.orbits[pairs[p].first].config.token();
            rep.token_b = spec.orbits[pairs[p].second].config.token();
        }
    }
    rep.bound = constants.eps0 *
                std::exp(-constants.beta * (1.0 + spec.constants.d2) * T);
    rep.margin = rep.min_pair_distance / rep.bound;
    rep.pass = rep.min_pair_distance >= 2.0 * rep.bound;
    return rep;
}

DirectionGapReport direction_gap(const LengthSpectrum& spec, double T,
                                 double position_tol, double sampling_step) {
    if (!tau_leq(T, spec.t_max))
        throw PreconditionError("T exceeds the certified T_max");
    if (!(position_tol >= 0.0))
        throw PreconditionError("position tolerance must be non-negative");
    const double step =
        std::isnan(sampling_step) ? spec.constants.d0 / 1000.0 : sampling_step;

    std::vector<int> sel;
    for (std::size_t i = 0; i < spec.orbits.size(); ++i)
        if (tau_leq(spec.orbits[i].tau_primitive, T))
            sel.push_back(static_cast<int>(i));
    std::vector<Sampled> samples(sel.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(sel.size()); ++i)
        samples[i] = sample_orbit(spec.orbits[sel[i]], step, true);

    DirectionGapReport rep;
    rep.T = T;
    rep.position_tol = position_tol;
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sel.size(); ++i) {
        for (std::size_t j = i + 1; j < sel.size(); ++j) {
            for (std::size_t u = 0; u < samples[i].pos.size(); ++u)
                for (std::size_t v = 0; v < samples[j].pos.size(); ++v) {
                    if ((samples[i].pos[u] - samples[j].pos[v]).norm() >
                        position_tol)
                        continue;
                    const double g =
                        (samples[i].dir[u] - samples[j].dir[v]).norm();
                    if (g < rep.min_gap) {
                        rep.min_gap = g;
                        rep.token_a = spec.orbits[sel[i]].config.token();
                        rep.token_b = spec.orbits[sel[j]].config.token();
                    }
                }
        }
    }
    const FlowConstants fc = estimate_flow_constants(spec.scene, spec);
    rep.bound = fc.eps0 * std::exp(-fc.beta * (1.0 + spec.constants.d2) * T);
    rep.vacuous = !std::isfinite(rep.min_gap);
    rep.pass = rep.vacuous || rep.min_gap >= rep.bound;
    return rep;
}

Probe51Report probe_51(const LengthSpectrum& spec, double T,
                       const std::vector<double>& alpha_grid) {
    if (!tau_leq(T, spec.t_max))
        throw PreconditionError("T exceeds the certified T_max");
    if (alpha_grid.empty()) throw PreconditionError("alpha grid must be non-empty");

    Probe51Report rep;
    rep.T = T;
    rep.g_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.orbits.size(); ++i) {
        if (!tau_leq(spec.orbits[i].tau_primitive, T)) continue;
        for (std::size_t j = i + 1; j < spec.orbits.size(); ++j) {
            if (!tau_leq(spec.orbits[j].tau_primitive, T)) continue;
            const PeriodicOrbit& a = spec.orbits[i];
            const PeriodicOrbit& b = spec.orbits[j];
            // A ray and its orientation reversal are the same subset of the
            // table; the boundary-ball property quantifies over other rays.
            if (reversal_equivalent(a.config, b.config)) continue;
            for (int u = 0; u < a.config.k(); ++u)
                for (int v = 0; v < b.config.k(); ++v) {
                    // The ball lives on all of the boundary, so points on
                    // different obstacles compete too (they are at least the
                    // inter-obstacle gap apart).
                    const double g = (a.points[u] - b.points[v]).norm();
                    if (g < rep.g_min) {
                        rep.g_min = g;
                        rep.token_a = a.config.token();
                        rep.token_b = b.config.token();
                        rep.obstacle = a.config.word[u];
                    }
                }
        }
    }
    if (rep.g_min <= 0.0)
        rep.alpha_critical = std::numeric_limits<double>::infinity();
    else
        rep.alpha_critical = -std::log(rep.g_min) / T;

    rep.alpha_certified = std::numeric_limits<double>::quiet_NaN();
    for (double alpha : alpha_grid) {
        if (std::exp(-alpha * T) < rep.g_min) {
            rep.any_pass = true;
            if (std::isnan(rep.alpha_certified) || alpha < rep.alpha_certified)
                rep.alpha_certified = alpha;
        }
    }
    return rep;
}

}
