#include "bspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "bspec/errors.hpp"

namespace bspec {

namespace {

bool entry_less(const SpectrumEntry& a, const SpectrumEntry& b) {
    if (a.tau != b.tau) return a.tau < b.tau;
    if (!(a.config == b.config)) return a.config < b.config;
    return a.repetition < b.repetition;
}

bool tau_in_window(double tau, double q, double rho) {
    return tau_leq(tau, q) && !tau_leq(tau, q - rho);
}

void require_within_tmax(const LengthSpectrum& spec, double x, const char* what) {
    if (!tau_leq(x, spec.t_max))
        throw PreconditionError(std::string(what) +
                                " exceeds the certified cutoff T_max");
}

}  // namespace

LengthSpectrum LengthSpectrum::synthetic(std::vector<SpectrumEntry> entries,
                                         double t_max) {
    LengthSpectrum spec;
    spec.t_max = t_max;
    spec.complete = false;
    spec.entries = std::move(entries);
    std::sort(spec.entries.begin(), spec.entries.end(), entry_less);
    return spec;
}

LengthSpectrum build_spectrum(const Scene& scene, double t_max, Exec exec,
                              std::size_t enumeration_cap) {
    if (!(t_max > 0.0)) throw PreconditionError("T_max must be positive");
    LengthSpectrum spec;
    spec.scene = scene;
    spec.constants = validate_scene(scene);
    spec.t_max = t_max;
    // A k-reflection orbit has tau# >= k * (d0/2), d0/2 the minimum gap, so
    // enumeration to this depth certifies completeness.
    spec.k_max = static_cast<int>(std::ceil(t_max / (spec.constants.d0 / 2.0)));

    const std::vector<Configuration> configs =
        enumerate_configurations(scene.size(), spec.k_max, enumeration_cap);
    const int n_cfg = static_cast<int>(configs.size());

    std::vector<PeriodicOrbit> solved(n_cfg);
    std::vector<std::exception_ptr> failures(n_cfg);

    auto solve_at = [&](int i) {
        try {
            solved[i] = solve_orbit(scene, configs[i]);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n_cfg; ++i) solve_at(i);
    } else {
        for (int i = 0; i < n_cfg; ++i) solve_at(i);
    }
    for (int i = 0; i < n_cfg; ++i)
        if (failures[i]) std::rethrow_exception(failures[i]);

    for (int i = 0; i < n_cfg; ++i) {
        if (!tau_leq(solved[i].tau_primitive, t_max)) continue;
        const int idx = static_cast<int>(spec.orbits.size());
        spec.orbits.push_back(std::move(solved[i]));
        const PeriodicOrbit& orb = spec.orbits.back();
        spec.linearizations.push_back(poincare_map(scene, orb));
        const OrbitLinearization& lin = spec.linearizations.back();
        for (int n = 1; tau_leq(n * orb.tau_primitive, t_max); ++n) {
            SpectrumEntry e;
            e.config = orb.config;
            e.repetition = n;
            e.tau = n * orb.tau_primitive;
            e.tau_primitive = orb.tau_primitive;
            e.parity = parity(orb.config, n);
            e.weight = std::exp(-0.5 * log_abs_det_id_minus_pn(lin, n));
            e.orbit_index = idx;
            spec.entries.push_back(std::move(e));
        }
    }
    std::sort(spec.entries.begin(), spec.entries.end(), entry_less);
    return spec;
}

long count_primitive(const LengthSpectrum& spec, double x, ParityFilter filter) {
    require_within_tmax(spec, x, "count_primitive argument");
    long n = 0;
    for (const SpectrumEntry& e : spec.entries) {
        if (e.repetition != 1 || !tau_leq(e.tau, x)) continue;
        const bool even = e.config.k() % 2 == 0;
        if (filter == ParityFilter::even && !even) continue;
        if (filter == ParityFilter::odd && even) continue;
        ++n;
    }
    return n;
}

EntropyFit fit_entropy(const LengthSpectrum& spec) {
    std::vector<double> taus;
    for (const SpectrumEntry& e : spec.entries)
        if (e.repetition == 1) taus.push_back(e.tau);
    if (taus.size() < 50)
        throw InsufficientData("fit_entropy needs at least 50 primitive entries");
    std::sort(taus.begin(), taus.end());

    // Distinct lengths with cumulative counts: points (tau, log(N * tau)).
    std::vector<double> xs, ys;
    std::size_t i = 0;
    while (i < taus.size()) {
        std::size_t j = i;
        while (j + 1 < taus.size() &&
               taus[j + 1] - taus[i] <= 1e-10 * std::max(1.0, taus[i]))
            ++j;
        xs.push_back(taus[i]);
        ys.push_back(std::log(static_cast<double>(j + 1) * taus[i]));
        i = j + 1;
    }
    const std::size_t start = xs.size() / 2;
    xs.erase(xs.begin(), xs.begin() + start);
    ys.erase(ys.begin(), ys.begin() + start);
    if (xs.size() < 5)
        throw InsufficientData("fit_entropy needs at least 5 distinct lengths in the fit window");

    auto slope_of = [](const std::vector<double>& x, const std::vector<double>& y) {
        const double n = static_cast<double>(x.size());
        const double sx = std::accumulate(x.begin(), x.end(), 0.0);
        const double sy = std::accumulate(y.begin(), y.end(), 0.0);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            sxx += x[k] * x[k];
            sxy += x[k] * y[k];
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };

    EntropyFit fit;
    fit.n_points = static_cast<int>(xs.size());
    fit.h = slope_of(xs, ys);

    const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    const double intercept = mean_y - fit.h * mean_x;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double r = ys[k] - (intercept + fit.h * xs[k]);
        ss_res += r * r;
        ss_tot += (ys[k] - mean_y) * (ys[k] - mean_y);
    }
    fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;

    // Jackknife over 5 contiguous blocks.
    constexpr int blocks = 5;
    std::vector<double> jack;
    for (int b = 0; b < blocks; ++b) {
        std::vector<double> xj, yj;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (static_cast<int>(k * blocks / xs.size()) == b) continue;
            xj.push_back(xs[k]);
            yj.push_back(ys[k]);
        }
        if (xj.size() >= 2) jack.push_back(slope_of(xj, yj));
    }
    if (jack.size() >= 2) {
        const double m = std::accumulate(jack.begin(), jack.end(), 0.0) / jack.size();
        double s = 0.0;
        for (double v : jack) s += (v - m) * (v - m);
        const double B = static_cast<double>(jack.size());
        fit.std_error = std::sqrt((B - 1.0) / B * s);
    }
    return fit;
}

IteratedCounts count_iterated(const LengthSpectrum& spec, double q) {
    require_within_tmax(spec, q, "count_iterated argument");
    IteratedCounts c;
    for (const SpectrumEntry& e : spec.entries) {
        if (e.repetition < 2 || !tau_leq(e.tau, q)) continue;
        if (e.repetition % 2 == 0)
            ++c.n_even;
        else if (e.config.k() % 2 == 1)
            ++c.n_odd;
    }
    return c;
}

Prop21Report check_prop21(const LengthSpectrum& spec, double q, double h,
                          double epsilon, double b_epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.25))
        throw PreconditionError("epsilon must lie in (0, 1/4)");
    if (!(h > 0.0)) throw PreconditionError("entropy h must be positive");
    require_within_tmax(spec, q, "check_prop21 argument");

    Prop21Report rep;
    rep.q = q;
    rep.h = h;
    rep.epsilon = epsilon;
    const IteratedCounts c = count_iterated(spec, q);
    rep.n_odd = c.n_odd;
    rep.n_even = c.n_even;
    const double odd_scale = 3.0 * std::exp(h * q / 3.0) / (2.0 * h * q);
    const double even_scale = 2.0 * std::exp(h * q / 2.0) / (h * q);
    rep.odd_lower = (1.0 - epsilon) * odd_scale;
    rep.odd_upper = (1.0 + epsilon) * odd_scale;
    rep.even_lower = (1.0 - epsilon) * even_scale;
    rep.even_upper = (1.0 + epsilon) * even_scale;
    rep.odd_ok = rep.n_odd > rep.odd_lower && rep.n_odd <= rep.odd_upper;
    rep.even_ok = rep.n_even > rep.even_lower && rep.n_even <= rep.even_upper;
    rep.pre_asymptotic = q < b_epsilon;
    return rep;
}

long interval_count(const LengthSpectrum& spec, double q, double rho,
                    SpectralClass cls, double h) {
    if (!(rho > 0.0 && rho < 1.0))
        throw PreconditionError("rho must lie in (0, 1)");
    if (std::isfinite(h) && h > 0.0 && !(rho < 1.0 / h))
        throw PreconditionError("rho must be below 1/h");
    require_within_tmax(spec, q, "interval_count argument");

    if (cls == SpectralClass::odd_iterated) {
        return count_iterated(spec, q).n_odd -
               count_iterated(spec, std::max(q - rho, 0.0)).n_odd;
    }
    long n = 0;
    for (const SpectrumEntry& e : spec.entries) {
        if (e.repetition != 1 || !tau_in_window(e.tau, q, rho)) continue;
        const bool even = e.config.k() % 2 == 0;
        if ((cls == SpectralClass::pi_plus) == even) ++n;
    }
    return n;
}

std::vector<SeparationViolation> check_exp_separation(const LengthSpectrum& spec,
                                                      double nu) {
    if (!(nu >= 0.0)) throw PreconditionError("separation rate must be non-negative");
    struct Prim {
        double tau;
        const SpectrumEntry* e;
    };
    std::vector<Prim> prims;
    for (const SpectrumEntry& e : spec.entries)
        if (e.repetition == 1) prims.push_back({e.tau, &e});
    std::sort(prims.begin(), prims.end(),
              [](const Prim& a, const Prim& b) { return a.tau < b.tau; });

    std::vector<SeparationViolation> out;
    for (std::size_t i = 0; i < prims.size(); ++i) {
        for (std::size_t j = i + 1; j < prims.size(); ++j) {
            const double gap = prims[j].tau - prims[i].tau;
            const double threshold = std::exp(-nu * prims[j].tau);
            if (gap >= threshold) break;  // later j: larger gap, smaller threshold
            if (gap <= 1e-10 * std::max(1.0, prims[j].tau)) continue;  // coincident
            out.push_back({prims[i].e->config.token(), prims[j].e->config.token(),
                           prims[i].tau, prims[j].tau, gap, threshold});
        }
    }
    return out;
}

Condition18Report check_condition_18(const LengthSpectrum& spec, double delta,
                                     double rho, double c0, double q, double h,
                                     IsolationMode mode) {
    if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
    if (!(h > 0.0)) throw PreconditionError("entropy h must be positive");
    if (!(rho > 0.0 && rho < std::min(1.0, 1.0 / h)))
        throw PreconditionError("rho must lie in (0, min{1, 1/h})");
    if (!(c0 > 5.0 - h * rho / 3.0))
        throw PreconditionError("c0 must exceed 5 - h*rho/3");
    if (!tau_leq(q, spec.t_max - 1.0))
        throw PreconditionError("q must not exceed T_max - 1 (isolation windows must fit)");

    Condition18Report rep;
    rep.required = c0 * rho * std::exp(h * q / 3.0) / (8.0 * q);
    const double radius = std::exp(-delta * q);
    for (std::size_t i = 0; i < spec.entries.size(); ++i) {
        const SpectrumEntry& e = spec.entries[i];
        if (e.repetition != 1 || e.config.k() % 2 != 0) continue;
        if (!tau_in_window(e.tau, q, rho)) continue;
        bool isolated = true;
        for (std::size_t j = 0; j < spec.entries.size(); ++j) {
            if (j == i) continue;
            const SpectrumEntry& o = spec.entries[j];
            if (mode == IsolationMode::odd_only &&
                (o.repetition * o.config.k()) % 2 == 0)
                continue;
            if (std::abs(o.tau - e.tau) < radius) {
                isolated = false;
                break;
            }
        }
        if (isolated) rep.witnesses.push_back(i);
    }
    rep.satisfied =
        static_cast<double>(rep.witnesses.size()) >= rep.required;
    return rep;
}

DetBoundsFit fit_det_bounds(const LengthSpectrum& spec, int min_orbits) {
    std::vector<double> tau, logdet;
    tau.reserve(spec.orbits.size());
    logdet.reserve(spec.orbits.size());
    for (std::size_t i = 0; i < spec.orbits.size(); ++i) {
        tau.push_back(spec.orbits[i].tau_primitive);
        logdet.push_back(spec.linearizations[i].log_abs_det_id_minus_p);
    }
    if (tau.empty()) {
        // Synthetic spectra carry no solved orbits; recover |det(I - P)| from
        // the stored primitive weights (weight = |det(I - P)|^{-1/2}).
        for (const auto& e : spec.entries) {
            if (e.repetition != 1) continue;
            if (!(e.weight > 0.0))
                throw PreconditionError("entry weight must be positive to fit det bounds");
            tau.push_back(e.tau_primitive);
            logdet.push_back(-2.0 * std::log(e.weight));
        }
    }
    return fit_det_bounds(tau, logdet, min_orbits);
}

}
