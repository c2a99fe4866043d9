#ifndef BSPEC_SPECTRUM_HPP
#define BSPEC_SPECTRUM_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "bspec/exec.hpp"
#include "bspec/linearization.hpp"
#include "bspec/orbit.hpp"

namespace bspec {

// Length comparisons use a relative slack so symmetric scenes whose lengths
// coincide up to rounding land on the intended side of cutoffs.
inline bool tau_leq(double a, double b) {
    return a <= b + 1e-9 * std::max(1.0, std::abs(b));
}

struct SpectrumEntry {
    Configuration config;
    int repetition = 1;          // n >= 1
    double tau = 0.0;            // n * tau_primitive
    double tau_primitive = 0.0;
    int parity = 1;              // (-1)^{n*k}
    double weight = 0.0;         // |det(I - P^n)|^{-1/2}
    int orbit_index = -1;        // into LengthSpectrum::orbits, -1 if synthetic
};

// All primitive periodic rays with tau_primitive <= t_max plus every iterate
// with period <= t_max, sorted by (tau, config, repetition).
struct LengthSpectrum {
    Scene scene;
    SceneConstants constants;
    double t_max = 0.0;
    int k_max = 0;              // certified enumeration depth ceil(t_max/(d0/2))
    bool complete = true;       // false for synthetic spectra
    std::vector<PeriodicOrbit> orbits;              // canonical config order
    std::vector<OrbitLinearization> linearizations; // parallel to orbits
    std::vector<SpectrumEntry> entries;

    // Planted spectra for counter tests: entries only, no geometry.
    static LengthSpectrum synthetic(std::vector<SpectrumEntry> entries,
                                    double t_max);
};

// Enumerates configurations to the certified k_max, solves every one in
// parallel (serial reference behind Exec::serial, bit-identical results),
// discards tau_primitive > t_max and materializes iterates.
LengthSpectrum build_spectrum(const Scene& scene, double t_max,
                              Exec exec = Exec::parallel,
                              std::size_t enumeration_cap = 5'000'000);

enum class ParityFilter { all, even, odd };

// #{primitive entries with tau <= x}, optionally restricted to even/odd
// reflection count.  x > t_max is rejected (the answer would be incomplete).
long count_primitive(const LengthSpectrum& spec, double x,
                     ParityFilter filter = ParityFilter::all);

struct EntropyFit {
    double h = 0.0;
    double std_error = 0.0;  // jackknife over 5 contiguous blocks
    double r2 = 0.0;
    int n_points = 0;        // fitted points (top half of distinct lengths)
};

// Least-squares slope of log(N(x) * x) against x over the top half of the
// distinct primitive lengths; needs >= 50 primitive entries.
EntropyFit fit_entropy(const LengthSpectrum& spec);

struct IteratedCounts {
    long n_odd = 0;   // #{gamma in Pi_-, k >= 1 : (2k+1) tau# <= q}
    long n_even = 0;  // #{gamma in Pi,  k >= 1 : 2k tau# <= q}
};

IteratedCounts count_iterated(const LengthSpectrum& spec, double q);

// Two-sided iterated-ray bounds at level q for fitted entropy h and margin
// epsilon in (0, 1/4).  Reported, never asserted: below b_epsilon the claim
// is only asymptotic and the report is marked pre-asymptotic.
struct Prop21Report {
    double q = 0.0, h = 0.0, epsilon = 0.0;
    long n_odd = 0, n_even = 0;
    double odd_lower = 0.0, odd_upper = 0.0;
    double even_lower = 0.0, even_upper = 0.0;
    bool odd_ok = false, even_ok = false;
    bool pre_asymptotic = false;
};

Prop21Report check_prop21(const LengthSpectrum& spec, double q, double h,
                          double epsilon, double b_epsilon = 0.0);

enum class SpectralClass { pi_plus, pi_minus, odd_iterated };

// #{class members with q - rho < tau <= q}; for odd_iterated the difference
// of the iterated counters.  Pass the fitted h to enable the rho < 1/h
// precondition; NaN skips it.
long interval_count(const LengthSpectrum& spec, double q, double rho,
                    SpectralClass cls,
                    double h = std::numeric_limits<double>::quiet_NaN());

struct SeparationViolation {
    std::string token_a, token_b;
    double tau_a = 0.0, tau_b = 0.0;
    double gap = 0.0;
    double threshold = 0.0;  // e^{-nu * max(tau_a, tau_b)}
};

// Pairs of distinct primitive lengths closer than e^{-nu*max}; coincident
// lengths (equal to 1e-10 relative) are equal values, not violations.  An
// empty list certifies exponential separation at rate nu on the dataset.
std::vector<SeparationViolation> check_exp_separation(const LengthSpectrum& spec,
                                                      double nu);

enum class IsolationMode {
    strict,    // isolated from every other period in the spectrum
    odd_only,  // isolated from periods with an odd total reflection count
};

struct Condition18Report {
    bool satisfied = false;
    double required = 0.0;                // c0 * rho * e^{hq/3} / (8q)
    std::vector<std::size_t> witnesses;   // entry indices of isolated candidates
};

// Counts even primitives in (q - rho, q] whose length is e^{-delta*max}-
// isolated from every other certified period (per mode); satisfied when the
// count reaches c0 * rho * e^{hq/3} / (8q).
Condition18Report check_condition_18(const LengthSpectrum& spec, double delta,
                                     double rho, double c0, double q, double h,
                                     IsolationMode mode = IsolationMode::strict);

// Envelope fit over the stored primitive orbits.
DetBoundsFit fit_det_bounds(const LengthSpectrum& spec, int min_orbits = 10);

}

#endif
