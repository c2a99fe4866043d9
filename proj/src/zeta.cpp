#include "bspec/zeta.hpp"

#include <algorithm>
#include <cmath>

#include "bspec/errors.hpp"

namespace bspec {

namespace {

double glue(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

bool odd_period(const SpectrumEntry& e) {
    return (e.repetition * e.config.k()) % 2 == 1;
}

}  // namespace

double bump(double t) {
    const double a = std::abs(t);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    const double up = glue(2.0 - 2.0 * a);
    const double down = glue(2.0 * a - 1.0);
    return up / (up + down);
}

double pair_FD(const LengthSpectrum& spec, const BumpWindow& window) {
    if (!(window.m > 0.0)) throw PreconditionError("window sharpness must be positive");
    const double d0 = spec.constants.d0;
    if (d0 > 0.0) {
        if (!(window.ell >= d0 * (1.0 - 1e-9)))
            throw PreconditionError("window center must be at least d0");
        if (!(window.m >= std::max(1.0, 1.0 / d0) * (1.0 - 1e-9)))
            throw PreconditionError("window sharpness must be at least max{1, 1/d0}");
    }
    if (!tau_leq(window.support_hi(), spec.t_max))
        throw PreconditionError("window support exceeds the certified T_max");

    double sum = 0.0;
    for (const SpectrumEntry& e : spec.entries) {
        const double arg = window.m * (e.tau - window.ell);
        if (std::abs(arg) >= 1.0) continue;
        sum += e.parity * e.tau_primitive * e.weight * bump(arg);
    }
    return sum;
}

LBCertificate lb_search(const LengthSpectrum& spec, double delta, double rho,
                        const std::vector<double>& q_grid, double h,
                        IsolationMode mode) {
    if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
    if (!(rho > 0.0)) throw PreconditionError("rho must be positive");
    if (std::isfinite(h) && h > 0.0 && !(rho < 1.0 / h))
        throw PreconditionError("rho must be below 1/h");
    if (q_grid.empty()) throw PreconditionError("q grid must be non-empty");
    const double d0 = spec.constants.d0;
    for (double q : q_grid) {
        if (!(q > d0)) throw PreconditionError("grid point below d0");
        if (!tau_leq(q, spec.t_max))
            throw PreconditionError("grid point beyond the certified T_max");
    }

    LBCertificate cert;
    cert.delta = delta;
    cert.det_fit = fit_det_bounds(spec);
    cert.alpha0 = cert.det_fit.mu2 / 2.0;
    cert.c1 = d0;

    for (double q : q_grid) {
        const double radius = std::exp(-delta * q);
        // Even primitives inside (q - rho, q], longest first.
        std::vector<const SpectrumEntry*> candidates;
        for (const SpectrumEntry& e : spec.entries) {
            if (e.repetition != 1 || e.config.k() % 2 != 0) continue;
            if (!(tau_leq(e.tau, q) && !tau_leq(e.tau, q - rho))) continue;
            candidates.push_back(&e);
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const SpectrumEntry* a, const SpectrumEntry* b) {
                      return a->tau > b->tau;
                  });

        bool found = false;
        for (const SpectrumEntry* cand : candidates) {
            auto blocks = [&](const SpectrumEntry& other, double rad) {
                if (&other == cand) return false;
                if (mode == IsolationMode::odd_only && !odd_period(other))
                    return false;
                return std::abs(other.tau - cand->tau) < rad;
            };
            bool clean = true;
            for (const SpectrumEntry& other : spec.entries)
                if (blocks(other, radius)) {
                    clean = false;
                    break;
                }
            if (!clean) continue;

            const double ell = cand->tau;
            if (delta * ell > 500.0)
                throw WindowUnderflow("window sharpness e^{delta*ell} exceeds the representable range");
            const double m = std::exp(delta * ell);
            if (1.0 / m < 1e-300)
                throw WindowUnderflow("window support narrower than 1e-300");
            BumpWindow window{ell, m};
            if (!tau_leq(window.support_hi(), spec.t_max)) continue;

            // Independent re-verification on the emitted window: the support
            // (radius 1/m >= radius of the screening interval) must itself be
            // clean, and the pairing must clear the Definition 1.1 bound.
            bool support_clean = true;
            for (const SpectrumEntry& other : spec.entries)
                if (blocks(other, 1.0 / m)) {
                    support_clean = false;
                    break;
                }
            if (!support_clean) continue;
            const double pairing = pair_FD(spec, window);
            const double bound = cert.c1 * std::exp(-cert.alpha0 * ell);
            if (!(std::abs(pairing) >= bound)) continue;

            cert.windows.push_back(window);
            cert.pairings.push_back(pairing);
            cert.bounds.push_back(bound);
            cert.tokens.push_back(cand->config.token());
            found = true;
            break;
        }
        if (!found) throw NoWitness(q);
    }
    return cert;
}

EtaResult eta_D(const LengthSpectrum& spec, std::complex<double> s, double T,
                double h) {
    if (!tau_leq(T, spec.t_max))
        throw PreconditionError("cutoff T exceeds the certified T_max");
    EtaResult res;
    double tail = 0.0;
    for (const SpectrumEntry& e : spec.entries) {
        if (tau_leq(e.tau, T)) {
            res.value += static_cast<double>(e.parity) * e.tau_primitive *
                         e.weight * std::exp(-s * e.tau);
        } else {
            tail += e.tau_primitive * e.weight * std::exp(-s.real() * e.tau);
        }
    }
    if (std::isfinite(h) && h > 0.0 && spec.orbits.size() >= 10) {
        const DetBoundsFit fit = fit_det_bounds(spec);
        const double a = s.real() + fit.mu1 / 2.0 - h;
        if (a > 0.0)
            tail += std::pow(fit.C1, -0.5) * std::exp(-a * spec.t_max) / a;
        else
            tail = std::numeric_limits<double>::infinity();
    }
    res.tail_bound = tail;
    return res;
}

}
