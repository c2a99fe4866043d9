// Timing comparison of the parallel spectrum builder against the serial
// reference, plus one separation kernel.  The two builders must agree
// bit-for-bit; any drift is reported as a failure.

#include <chrono>
#include <cstdio>
#include <string>

#include "bspec/separation.hpp"
#include "bspec/spectrum.hpp"

using namespace bspec;

namespace {

double seconds_of(const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

Scene make_s3() {
    Scene s;
    s.label = "s3";
    s.obstacles = {{{0.0, 0.0}, 1.0},
                   {{6.0, 0.0}, 1.0},
                   {{3.0, 6.0 * 0.86602540378443864676}, 1.0}};
    return s;
}

bool identical(const LengthSpectrum& a, const LengthSpectrum& b) {
    if (a.orbits.size() != b.orbits.size() ||
        a.entries.size() != b.entries.size())
        return false;
    for (std::size_t i = 0; i < a.orbits.size(); ++i) {
        if (a.orbits[i].config.word != b.orbits[i].config.word) return false;
        if (a.orbits[i].tau_primitive != b.orbits[i].tau_primitive)
            return false;
        for (std::size_t j = 0; j < a.orbits[i].params.size(); ++j)
            if (a.orbits[i].params[j] != b.orbits[i].params[j]) return false;
        if (a.linearizations[i].trace != b.linearizations[i].trace ||
            a.linearizations[i].weight != b.linearizations[i].weight)
            return false;
    }
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        if (a.entries[i].tau != b.entries[i].tau ||
            a.entries[i].weight != b.entries[i].weight)
            return false;
    return true;
}

}  // namespace

int main() {
    const Scene s3 = make_s3();
    const double t_max = 56.0;

    LengthSpectrum serial, parallel;
    const double t_serial =
        seconds_of([&] { serial = build_spectrum(s3, t_max, Exec::serial); });
    const double t_parallel =
        seconds_of([&] { parallel = build_spectrum(s3, t_max, Exec::parallel); });

    std::printf("build_spectrum  T=%g  orbits=%zu entries=%zu\n", t_max,
                serial.orbits.size(), serial.entries.size());
    std::printf("  serial:   %8.3f ms\n", 1e3 * t_serial);
    std::printf("  parallel: %8.3f ms   speedup %.2fx\n", 1e3 * t_parallel,
                t_serial / t_parallel);

    if (!identical(serial, parallel)) {
        std::printf("FAIL: serial and parallel spectra differ\n");
        return 1;
    }
    std::printf("  serial/parallel spectra bit-identical\n");

    const FlowConstants fc = estimate_flow_constants(s3, parallel);
    SeparationReport rep;
    const double t_sep = seconds_of(
        [&] { rep = check_theorem41(parallel, 14.0, fc, 8.0 / 200.0); });
    std::printf("check_theorem41 T=14:  %8.3f ms  (min distance %.6g, pass=%d)\n",
                1e3 * t_sep, rep.min_pair_distance, rep.pass);
    return 0;
}
