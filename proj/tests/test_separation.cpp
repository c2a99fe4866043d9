#include "doctest.h"

#include <cmath>

#include "bspec/separation.hpp"
#include "helpers.hpp"

using namespace bspec;
using testutil::make_s3;
using testutil::make_s4;

namespace {
PeriodicOrbit orbit_of(const Scene& s, const char* token) {
    return solve_orbit(s, Configuration::from_token(token));
}
}  // namespace

TEST_CASE("one-step FD differential matches the transfer factor") {
    const Scene s = make_s3();
    for (const char* token : {"1-2", "1-2-3", "1-2-1-3"}) {
        const PeriodicOrbit orb = orbit_of(s, token);
        const auto factors = transfer_factors(s, orb);
        for (int j = 0; j < orb.config.k(); ++j) {
            const Eigen::Matrix2d fd = one_step_differential_fd(s, orb, j);
            CAPTURE(token);
            CAPTURE(j);
            CHECK((fd - factors[j]).norm() / factors[j].norm() < 1e-5);
        }
    }
}

TEST_CASE("flow constants: A0 is the worst one-step operator norm") {
    const Scene s = make_s3();
    const LengthSpectrum spec = build_spectrum(s, 17.0);
    const FlowConstants fc = estimate_flow_constants(s, spec);
    // A0 is measured from the one-step finite differences, so it agrees with
    // the analytic factors only to FD accuracy.
    double worst = 0.0;
    for (const auto& orb : spec.orbits) {
        const auto factors = transfer_factors(s, orb);
        for (const auto& f : factors) {
            Eigen::JacobiSVD<Eigen::Matrix2d> svd(f);
            worst = std::max(worst, svd.singularValues()(0));
        }
    }
    CHECK(fc.A0 == doctest::Approx(worst).epsilon(1e-4));
    CHECK(fc.A0 > 1.0);
    CHECK(fc.beta == doctest::Approx(2.0 * std::log(fc.A0) / 8.0).epsilon(1e-12));
    CHECK(fc.C0 >= 1.0);
    const double eta0 = 3.0 * std::sqrt(3.0) - 2.0;
    CHECK(fc.eps0 ==
          doctest::Approx(std::min(eta0 / (2.0 * fc.C0), 8.0 / (4.0 * fc.C0)))
              .epsilon(1e-12));
}

TEST_CASE("phase distance: distinct short rays are far apart in phase space") {
    const Scene s = make_s3();
    const PeriodicOrbit a = orbit_of(s, "1-2");
    const PeriodicOrbit b = orbit_of(s, "1-3");
    const double d = phase_distance(s, a, b, 0.02);
    CHECK(d > 0.9);
    CHECK(std::isfinite(d));
}

TEST_CASE("phase distance: halving the step moves the estimate by less than the correction") {
    const Scene s = make_s3();
    const PeriodicOrbit a = orbit_of(s, "1-2");
    const PeriodicOrbit b = orbit_of(s, "1-2-3");
    const double coarse = phase_distance(s, a, b, 0.08);
    const double fine = phase_distance(s, a, b, 0.04);
    // Both subtract their own Lipschitz slack, so both lower-bound the truth;
    // refining the mesh can only tighten (increase) the certified value, up
    // to the coarse run's own slack.
    CHECK(fine >= coarse - 1e-12);
    CHECK(std::abs(fine - coarse) < 2.0 * 0.08);
}

TEST_CASE("phase distance rejects identical configurations and huge steps") {
    const Scene s = make_s3();
    const PeriodicOrbit a = orbit_of(s, "1-2");
    CHECK_THROWS_AS(phase_distance(s, a, a, 0.02), PreconditionError);
    const PeriodicOrbit b = orbit_of(s, "1-3");
    CHECK_THROWS_AS(phase_distance(s, a, b, 0.5), PreconditionError);  // > d0/100
    CHECK_THROWS_AS(phase_distance(s, a, b, 0.0), PreconditionError);
}

TEST_CASE("theorem 4.1 check passes on the triangle scene with real margins") {
    const Scene s = make_s3();
    const LengthSpectrum spec = build_spectrum(s, 13.0);
    const FlowConstants fc = estimate_flow_constants(s, spec);
    const SeparationReport rep = check_theorem41(spec, 13.0, fc, 0.05);
    CHECK(rep.pass);
    CHECK(rep.min_pair_distance > 0.4);
    CHECK(rep.bound == doctest::Approx(fc.eps0 * std::exp(-fc.beta * 2.0 * 13.0))
                           .epsilon(1e-12));
    CHECK(rep.margin > 1e6);
    CHECK_FALSE(rep.token_a.empty());
    CHECK_FALSE(rep.token_b.empty());
}

TEST_CASE("theorem 4.1 check is vacuous with fewer than two orbits") {
    const Scene s = make_s3();
    LengthSpectrum spec = build_spectrum(s, 13.0);
    // Keep a single orbit.
    spec.orbits.resize(1);
    spec.linearizations.resize(1);
    spec.entries.clear();
    const FlowConstants fc = estimate_flow_constants(s, spec);
    const SeparationReport rep = check_theorem41(spec, 13.0, fc, 0.05);
    CHECK(rep.pass);
    CHECK(std::isinf(rep.min_pair_distance));
    CHECK(rep.token_a.empty());
}

TEST_CASE("theorem 4.1: the bound decreases with T while the witness gap is stable") {
    const Scene s = make_s3();
    const LengthSpectrum spec = build_spectrum(s, 13.0);
    const FlowConstants fc = estimate_flow_constants(s, spec);
    const SeparationReport t12 = check_theorem41(spec, 12.0, fc, 0.05);
    const SeparationReport t13 = check_theorem41(spec, 13.0, fc, 0.05);
    CHECK(t13.bound < t12.bound);
    // More orbits qualify at larger T, so the witness distance cannot grow.
    CHECK(t13.min_pair_distance <= t12.min_pair_distance + 1e-12);
    CHECK(t12.pass);
    // Inflating beta only shrinks the bound: still a pass.
    FlowConstants inflated = fc;
    inflated.beta *= 2.0;
    CHECK(check_theorem41(spec, 13.0, inflated, 0.05).pass);
}

TEST_CASE("direction gap: the two triangle orientations cross at 60 degrees") {
    const Scene s = make_s3();
    const LengthSpectrum spec = build_spectrum(s, 13.0);
    const DirectionGapReport rep = direction_gap(spec, 13.0, 0.5, 0.05);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.pass);
    // At tol 0.5 the only comparable cross-orbit samples come from the two
    // triangle orientations, whose edge directions always differ by a
    // multiple of 60 degrees: min gap = 2 sin(30 deg) = 1 exactly.
    CHECK(rep.min_gap == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.bound == doctest::Approx(check_theorem41(spec, 13.0,
                                                       estimate_flow_constants(s, spec), 0.05)
                                           .bound)
                           .epsilon(1e-9));
}

TEST_CASE("direction gap: a wider tolerance exposes the parallel shadowing pair") {
    const Scene s = make_s3();
    const LengthSpectrum spec = build_spectrum(s, 13.0);
    // The triangle's bottom edge runs parallel to the 2-bounce center line at
    // height 0.5.  At tol 0.6 those samples become comparable and their
    // outgoing directions coincide: the minimum collapses to zero and the
    // check honestly reports the failure at this (non-theorem) scale.
    const DirectionGapReport rep = direction_gap(spec, 13.0, 0.6, 0.05);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.min_gap == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_FALSE(rep.pass);
}

TEST_CASE("direction gap: zero tolerance keeps only coincident bounce points") {
    const Scene s = make_s3();
    const LengthSpectrum spec = build_spectrum(s, 13.0);
    // At tol 0 only exactly coincident samples compare: the two triangle
    // orientations share their reflection points, where the outgoing edges
    // meet at 60 degrees.  Either no pair survives rounding (vacuous) or the
    // gap is at least 2 sin(30 deg) = 1; both are passes.
    const DirectionGapReport rep = direction_gap(spec, 13.0, 0.0, 0.05);
    CHECK(rep.pass);
    if (!rep.vacuous) CHECK(rep.min_gap >= 1.0 - 1e-9);
}

TEST_CASE("direction gap: a single stored ray has no pairs and is vacuous") {
    const Scene s = make_s3();
    LengthSpectrum spec = build_spectrum(s, 13.0);
    spec.orbits.resize(1);
    spec.entries.clear();
    const DirectionGapReport rep = direction_gap(spec, 13.0, 0.5, 0.05);
    CHECK(rep.vacuous);
    CHECK(rep.pass);
    CHECK(std::isinf(rep.min_gap));
}

TEST_CASE("probe: triangle scene boundary balls separate all short rays") {
    const LengthSpectrum spec = build_spectrum(make_s3(), 14.0);
    const Probe51Report rep = probe_51(spec, 14.0, {0.05, 0.1, 0.2});
    CHECK(rep.g_min == doctest::Approx(0.5176380902050415).epsilon(1e-6));
    CHECK(rep.alpha_critical ==
          doctest::Approx(-std::log(rep.g_min) / 14.0).epsilon(1e-9));
    CHECK(rep.any_pass);
    CHECK(rep.alpha_certified == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(rep.obstacle >= 0);
    CHECK_FALSE(rep.token_a.empty());
}

TEST_CASE("probe: certified alpha is the smallest passing grid point") {
    const LengthSpectrum spec = build_spectrum(make_s3(), 14.0);
    const double crit = probe_51(spec, 14.0, {0.1}).alpha_critical;
    // Straddle the critical rate: below fails, above passes.
    const Probe51Report rep =
        probe_51(spec, 14.0, {crit - 0.002, crit + 0.002});
    CHECK(rep.any_pass);
    CHECK(rep.alpha_certified == doctest::Approx(crit + 0.002).epsilon(1e-12));
    // Entirely sub-critical grid: nothing passes.
    const Probe51Report none =
        probe_51(spec, 14.0, {crit / 2.0, crit - 0.002});
    CHECK_FALSE(none.any_pass);
    CHECK(std::isnan(none.alpha_certified));
}

TEST_CASE("probe: square scene shares reflection points and always fails") {
    const LengthSpectrum spec = build_spectrum(make_s4(), 19.0);
    const Probe51Report rep = probe_51(spec, 19.0, {0.05, 0.2, 1.0});
    CHECK(rep.g_min == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::isinf(rep.alpha_critical));
    CHECK_FALSE(rep.any_pass);
    CHECK(std::isnan(rep.alpha_certified));
    // The witness pair is a diagonal against a 3-bounce ray through the same
    // corner disk, not a ray and its own reversal.
    CHECK_FALSE(rep.token_a.empty());
    CHECK_FALSE(rep.token_b.empty());
    CHECK(rep.token_a != rep.token_b);
}

TEST_CASE("probe: reversal-equivalent words never compete against themselves") {
    // At T = 13 the triangle only coexists with the 2-bounce rays; its
    // reversal shares every reflection point but is the same geometric ray,
    // so g_min must stay strictly positive.
    const LengthSpectrum spec = build_spectrum(make_s3(), 13.0);
    const Probe51Report rep = probe_51(spec, 13.0, {0.1});
    CHECK(rep.g_min > 0.5);
}

TEST_CASE("probe input validation") {
    const LengthSpectrum spec = build_spectrum(make_s3(), 14.0);
    CHECK_THROWS_AS(probe_51(spec, 14.0, std::vector<double>{}), PreconditionError);
    CHECK_THROWS_AS(probe_51(spec, 15.0, {0.1}), PreconditionError);
}

TEST_CASE("separation checks on a randomized fleet: bounds hold everywhere") {
    for (const auto& s : testutil::random_fleet(3, 2026)) {
        const LengthSpectrum spec = build_spectrum(s, 14.0);
        const FlowConstants fc = estimate_flow_constants(s, spec);
        const SceneConstants k = validate_scene(s);
        const SeparationReport rep =
            check_theorem41(spec, 14.0, fc, k.d0 / 300.0);
        CAPTURE(s.label);
        CHECK(rep.pass);
        const DirectionGapReport dg = direction_gap(spec, 14.0, 0.5, k.d0 / 300.0);
        CHECK(dg.pass);
    }
}
