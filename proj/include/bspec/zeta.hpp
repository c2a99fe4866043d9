#ifndef BSPEC_ZETA_HPP
#define BSPEC_ZETA_HPP

#include <complex>
#include <string>
#include <vector>

#include "bspec/spectrum.hpp"

namespace bspec {

// Smooth even cutoff: 1 on [-1/2, 1/2], 0 outside (-1, 1), C-infinity glue
// psi(t) = f(2 - 2|t|) / (f(2 - 2|t|) + f(2|t| - 1)), f(x) = e^{-1/x} (x > 0).
double bump(double t);

struct BumpWindow {
    double ell = 0.0;  // center
    double m = 1.0;    // sharpness; support is [ell - 1/m, ell + 1/m]
    double support_lo() const { return ell - 1.0 / m; }
    double support_hi() const { return ell + 1.0 / m; }
};

// <F_D, psi_window>: exact finite sum of parity * tau# * weight * psi(m(tau - ell))
// over every entry whose period lies in the support.  Preconditions: ell >= d0,
// m >= max{1, 1/d0}, support upper end within the certified T_max.
double pair_FD(const LengthSpectrum& spec, const BumpWindow& window);

// One window per grid value q: an even primitive in (q - rho, q] whose
// isolation interval (tau - e^{-delta q}, tau + e^{-delta q}) avoids every
// odd-reflection period (or every other period under strict mode), emitted as
// (ell = tau, m = e^{delta ell}) and re-verified: support clean, pairing at
// least d0 * e^{-mu2 ell / 2}.
struct LBCertificate {
    double delta = 0.0;
    double alpha0 = 0.0;  // mu2 / 2
    double c1 = 0.0;      // d0
    DetBoundsFit det_fit;
    std::vector<BumpWindow> windows;
    std::vector<double> pairings;
    std::vector<double> bounds;       // c1 * e^{-alpha0 * ell} per window
    std::vector<std::string> tokens;  // witness configuration per window
    bool desk_scale = true;  // finite fragment of the required infinite sequence
};

LBCertificate lb_search(const LengthSpectrum& spec, double delta, double rho,
                        const std::vector<double>& q_grid,
                        double h = std::numeric_limits<double>::quiet_NaN(),
                        IsolationMode mode = IsolationMode::odd_only);

// Truncated Dirichlet series sum_{tau <= T} parity * tau# * weight * e^{-s tau}.
// tail_bound adds |terms| over (T, T_max] — a rigorous triangle-inequality
// bound for any later cutoff within certified data — plus, when the fitted h
// is supplied, the envelope extrapolation
// C1^{-1/2} e^{(h - Re s - mu1/2) T_max} / (Re s + mu1/2 - h) beyond T_max
// (infinite when Re s is at or below the fitted abscissa).
struct EtaResult {
    std::complex<double> value{0.0, 0.0};
    double tail_bound = 0.0;
};

EtaResult eta_D(const LengthSpectrum& spec, std::complex<double> s, double T,
                double h = std::numeric_limits<double>::quiet_NaN());

}

#endif
