#ifndef BSPEC_IO_HPP
#define BSPEC_IO_HPP

#include <string>

#include "bspec/spectrum.hpp"

namespace bspec {

// Full-precision decimal serialization ("%.17g"): parses back to the same bits.
std::string format_double(double v);

std::string sha256_hex(const std::string& bytes);

// Scene files: label = "...", one [[obstacle]] block per disk with
// center = [x, y] and radius.  load does not validate (check-scene does).
Scene load_scene_toml(const std::string& path);
void save_scene_toml(const Scene& scene, const std::string& path);

// Spectrum persistence: directory with scene.toml, spectrum.csv, orbits.csv
// and manifest.toml carrying SHA-256 hashes of the three data files.
void save_spectrum(const LengthSpectrum& spec, const std::string& dir,
                   double wall_seconds = 0.0);

// Verifies the manifest hashes (HashMismatch), reparses everything
// (ParseError with line numbers) and recomputes derived state so that the
// result is indistinguishable from a fresh build.
LengthSpectrum load_spectrum(const std::string& dir);

}

#endif
