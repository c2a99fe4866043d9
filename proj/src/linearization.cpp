#include "bspec/linearization.hpp"

#include <cmath>

#include "bspec/errors.hpp"

namespace bspec {

std::vector<Eigen::Matrix2d> transfer_factors(const Scene& scene,
                                              const PeriodicOrbit& orbit) {
    const int n = orbit.config.k();
    if (n < 2 || static_cast<int>(orbit.points.size()) != n)
        throw PreconditionError("orbit must carry at least 2 reflection points");

    std::vector<Vec2> e(n);
    std::vector<double> len(n);
    for (int j = 0; j < n; ++j) {
        const Vec2 diff = orbit.points[(j + 1) % n] - orbit.points[j];
        len[j] = diff.norm();
        e[j] = diff / len[j];
    }
    auto kick = [&](int j) {
        const Obstacle& o = scene.obstacles[orbit.config.word[j]];
        const Vec2 nrm = o.outward_normal(orbit.params[j]);
        const double cos_phi = std::abs(e[j].dot(nrm));
        if (cos_phi < 1e-12)
            throw ValidationFailure("incidence angle",
                                    "grazing reflection in " + orbit.config.token());
        Eigen::Matrix2d K = Eigen::Matrix2d::Identity();
        K(1, 0) = 2.0 * o.curvature() / cos_phi;
        return K;
    };
    std::vector<Eigen::Matrix2d> factors(n);
    for (int j = 0; j < n; ++j) {
        Eigen::Matrix2d F;
        F << 1.0, len[j], 0.0, 1.0;
        // The reflection reverses the transverse frame, so each bounce
        // contributes -K*F; odd-period orbits have negative eigenvalues.
        factors[j] = -(kick((j + 1) % n) * F);
    }
    return factors;
}

OrbitLinearization poincare_map(const Scene& scene, const PeriodicOrbit& orbit) {
    const std::vector<Eigen::Matrix2d> factors = transfer_factors(scene, orbit);
    Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
    for (const Eigen::Matrix2d& M : factors) P = M * P;

    OrbitLinearization lin;
    lin.poincare = P;
    lin.trace = P.trace();
    if (std::abs(lin.trace) - 2.0 <= 1e-9)
        throw ValidationFailure("hyperbolicity",
                                "return map of " + orbit.config.token() +
                                    " has |trace| too close to 2");
    // det P = 1, so det(I - P) = 1 - tr P + det P = 2 - tr P.
    lin.log_abs_det_id_minus_p = std::log(std::abs(2.0 - lin.trace));
    lin.weight = std::exp(-0.5 * lin.log_abs_det_id_minus_p);
    return lin;
}

double zeta_weight(const OrbitLinearization& lin, int n) {
    return std::exp(-0.5 * log_abs_det_id_minus_pn(lin, n));
}

double log_abs_det_id_minus_pn(const OrbitLinearization& lin, int n) {
    if (n < 1) throw PreconditionError("repetition count must be positive");
    if (std::abs(lin.trace) - 2.0 <= 1e-9)
        throw ValidationFailure("hyperbolicity",
                                "|trace| too close to 2 (parabolic degeneracy)");
    const double tr = lin.trace;
    const double half = 0.5 * (std::abs(tr) + std::sqrt(tr * tr - 4.0));
    const double log_lam = std::log(half);  // log |lambda|, lambda the expanding eigenvalue
    // det(I - P^n) = 2 - lambda^n - lambda^{-n}; the sign of lambda^n decides
    // whether the two eigenvalue terms add to or cancel against 2.
    const bool negative_power = (tr < 0.0) && (n % 2 == 1);
    const double s = negative_power ? 1.0 : -1.0;
    return n * log_lam + 2.0 * std::log1p(s * std::exp(-n * log_lam));
}

DetBoundsFit fit_det_bounds(const std::vector<double>& tau,
                            const std::vector<double>& log_det, int min_orbits) {
    if (tau.size() != log_det.size())
        throw PreconditionError("tau and log_det must have equal length");
    if (static_cast<int>(tau.size()) < min_orbits)
        throw InsufficientData("fit_det_bounds needs at least " +
                               std::to_string(min_orbits) + " primitive orbits");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!(tau[i] > 0.0)) throw PreconditionError("primitive lengths must be positive");
        const double r = log_det[i] / tau[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    DetBoundsFit fit;
    fit.mu1 = lo;
    fit.mu2 = hi + 1e-6;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tau.size(); ++i)
        margin = std::min(margin, log_det[i] - fit.mu1 * tau[i]);
    fit.C1 = std::exp(margin);
    return fit;
}

}
