#include "bspec/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bspec/errors.hpp"
#include "bspec/toml.hpp"
#include "bspec/version.hpp"

namespace bspec {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("short write to file: " + path);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

double parse_strict_double(const std::string& s, int line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ParseError(line, "malformed float '" + s + "'");
    return v;
}

long parse_strict_long(const std::string& s, int line) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
        throw ParseError(line, "malformed integer '" + s + "'");
    return v;
}

constexpr const char* kSpectrumHeader =
    "config,repetition,tau,tau_primitive,parity,weight";
constexpr const char* kOrbitsHeader =
    "config,k,tau_primitive,residual_reflection,residual_closure,clearance,"
    "trace,log_abs_det,weight,params";

std::string render_spectrum_csv(const LengthSpectrum& spec) {
    std::ostringstream out;
    out << kSpectrumHeader << "\n";
    for (const SpectrumEntry& e : spec.entries) {
        out << e.config.token() << ',' << e.repetition << ','
            << format_double(e.tau) << ',' << format_double(e.tau_primitive)
            << ',' << e.parity << ',' << format_double(e.weight) << "\n";
    }
    return out.str();
}

std::string render_orbits_csv(const LengthSpectrum& spec) {
    std::ostringstream out;
    out << kOrbitsHeader << "\n";
    for (std::size_t i = 0; i < spec.orbits.size(); ++i) {
        const PeriodicOrbit& o = spec.orbits[i];
        const OrbitLinearization& lin = spec.linearizations[i];
        out << o.config.token() << ',' << o.config.k() << ','
            << format_double(o.tau_primitive) << ','
            << format_double(o.residual_reflection) << ','
            << format_double(o.residual_closure) << ','
            << format_double(o.clearance) << ',' << format_double(lin.trace)
            << ',' << format_double(lin.log_abs_det_id_minus_p) << ','
            << format_double(lin.weight);
        for (double p : o.params) out << ',' << format_double(p);
        out << "\n";
    }
    return out.str();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

Scene load_scene_toml(const std::string& path) {
    const TomlDoc doc = parse_toml(read_file(path));
    Scene scene;
    if (doc.root.has("label")) scene.label = doc.root.string("label");
    auto it = doc.arrays.find("obstacle");
    if (it == doc.arrays.end())
        throw ParseError(0, "scene file has no [[obstacle]] blocks");
    for (const TomlTable& t : it->second) {
        const std::vector<double>& c = t.array("center");
        if (c.size() != 2) throw ParseError(0, "obstacle center must have 2 components");
        Obstacle o;
        o.center = Vec2(c[0], c[1]);
        o.radius = t.number("radius");
        scene.obstacles.push_back(o);
    }
    return scene;
}

void save_scene_toml(const Scene& scene, const std::string& path) {
    std::ostringstream out;
    out << "label = \"" << scene.label << "\"\n";
    for (const Obstacle& o : scene.obstacles) {
        out << "\n[[obstacle]]\n";
        out << "center = [" << format_double(o.center.x()) << ", "
            << format_double(o.center.y()) << "]\n";
        out << "radius = " << format_double(o.radius) << "\n";
    }
    write_file(path, out.str());
}

void save_spectrum(const LengthSpectrum& spec, const std::string& dir,
                   double wall_seconds) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string scene_path = (fs::path(dir) / "scene.toml").string();
    save_scene_toml(spec.scene, scene_path);
    const std::string spectrum_csv = render_spectrum_csv(spec);
    const std::string orbits_csv = render_orbits_csv(spec);
    write_file((fs::path(dir) / "spectrum.csv").string(), spectrum_csv);
    write_file((fs::path(dir) / "orbits.csv").string(), orbits_csv);

    std::ostringstream m;
    m << "tool = \"" << tool_name << "\"\n";
    m << "version = \"" << tool_version << "\"\n";
    m << "scene_label = \"" << spec.scene.label << "\"\n";
    m << "t_max = " << format_double(spec.t_max) << "\n";
    m << "k_max_certified = " << spec.k_max << "\n";
    m << "n_orbits = " << spec.orbits.size() << "\n";
    m << "n_entries = " << spec.entries.size() << "\n";
    m << "complete = " << (spec.complete ? "true" : "false") << "\n";
    m << "wall_seconds = " << format_double(wall_seconds) << "\n";
    m << "scene_sha256 = \"" << sha256_hex(read_file(scene_path)) << "\"\n";
    m << "spectrum_sha256 = \"" << sha256_hex(spectrum_csv) << "\"\n";
    m << "orbits_sha256 = \"" << sha256_hex(orbits_csv) << "\"\n";
    write_file((fs::path(dir) / "manifest.toml").string(), m.str());
}

LengthSpectrum load_spectrum(const std::string& dir) {
    namespace fs = std::filesystem;
    const TomlDoc manifest =
        parse_toml(read_file((fs::path(dir) / "manifest.toml").string()));
    const std::string scene_text =
        read_file((fs::path(dir) / "scene.toml").string());
    const std::string spectrum_text =
        read_file((fs::path(dir) / "spectrum.csv").string());
    const std::string orbits_text =
        read_file((fs::path(dir) / "orbits.csv").string());

    if (sha256_hex(scene_text) != manifest.root.string("scene_sha256"))
        throw HashMismatch("scene.toml does not match the manifest");
    if (sha256_hex(spectrum_text) != manifest.root.string("spectrum_sha256"))
        throw HashMismatch("spectrum.csv does not match the manifest");
    if (sha256_hex(orbits_text) != manifest.root.string("orbits_sha256"))
        throw HashMismatch("orbits.csv does not match the manifest");

    LengthSpectrum spec;
    spec.t_max = manifest.root.number("t_max");
    spec.k_max = static_cast<int>(manifest.root.number("k_max_certified"));
    spec.complete = manifest.root.boolean("complete");

    {
        const TomlDoc scene_doc = parse_toml(scene_text);
        if (scene_doc.root.has("label"))
            spec.scene.label = scene_doc.root.string("label");
        auto it = scene_doc.arrays.find("obstacle");
        if (it == scene_doc.arrays.end())
            throw ParseError(0, "scene file has no [[obstacle]] blocks");
        for (const TomlTable& t : it->second) {
            const std::vector<double>& c = t.array("center");
            if (c.size() != 2)
                throw ParseError(0, "obstacle center must have 2 components");
            spec.scene.obstacles.push_back(
                Obstacle{Vec2(c[0], c[1]), t.number("radius")});
        }
    }
    spec.constants = validate_scene(spec.scene);

    std::map<std::string, int> orbit_of_token;
    {
        const std::vector<std::string> lines = csv_lines(orbits_text);
        if (lines.empty() || lines[0] != kOrbitsHeader)
            throw ParseError(1, "bad orbits.csv header");
        for (std::size_t ln = 1; ln < lines.size(); ++ln) {
            const int line_no = static_cast<int>(ln) + 1;
            const std::vector<std::string> f = split_csv(lines[ln]);
            if (f.size() < 10) throw ParseError(line_no, "too few fields in orbit row");
            PeriodicOrbit orb;
            orb.config = Configuration::from_token(f[0]);
            const long k = parse_strict_long(f[1], line_no);
            if (k != orb.config.k())
                throw ParseError(line_no, "orbit k does not match its configuration");
            if (static_cast<long>(f.size()) != 9 + k)
                throw ParseError(line_no, "orbit row has wrong parameter count");
            orb.tau_primitive = parse_strict_double(f[2], line_no);
            orb.residual_reflection = parse_strict_double(f[3], line_no);
            orb.residual_closure = parse_strict_double(f[4], line_no);
            orb.clearance = parse_strict_double(f[5], line_no);
            for (long p = 0; p < k; ++p)
                orb.params.push_back(parse_strict_double(f[9 + p], line_no));
            orb.points.resize(k);
            for (long p = 0; p < k; ++p) {
                const int disk = orb.config.word[p];
                if (disk < 0 || disk >= spec.scene.size())
                    throw ParseError(line_no, "orbit letter out of scene range");
                orb.points[p] =
                    spec.scene.obstacles[disk].point(orb.params[p]);
            }
            orbit_of_token[f[0]] = static_cast<int>(spec.orbits.size());
            spec.orbits.push_back(std::move(orb));
            // Derived linearization data is recomputed, not trusted from disk
            // (the stored columns document the run; the hash protects them).
            spec.linearizations.push_back(
                poincare_map(spec.scene, spec.orbits.back()));
        }
    }
    {
        const std::vector<std::string> lines = csv_lines(spectrum_text);
        if (lines.empty() || lines[0] != kSpectrumHeader)
            throw ParseError(1, "bad spectrum.csv header");
        for (std::size_t ln = 1; ln < lines.size(); ++ln) {
            const int line_no = static_cast<int>(ln) + 1;
            const std::vector<std::string> f = split_csv(lines[ln]);
            if (f.size() != 6) throw ParseError(line_no, "expected 6 fields in spectrum row");
            SpectrumEntry e;
            e.config = Configuration::from_token(f[0]);
            e.repetition = static_cast<int>(parse_strict_long(f[1], line_no));
            e.tau = parse_strict_double(f[2], line_no);
            e.tau_primitive = parse_strict_double(f[3], line_no);
            e.parity = static_cast<int>(parse_strict_long(f[4], line_no));
            e.weight = parse_strict_double(f[5], line_no);
            if (e.repetition < 1) throw ParseError(line_no, "repetition must be >= 1");
            if (e.parity != 1 && e.parity != -1)
                throw ParseError(line_no, "parity must be +1 or -1");
            auto it = orbit_of_token.find(f[0]);
            if (it == orbit_of_token.end())
                throw ParseError(line_no, "spectrum row references unknown orbit " + f[0]);
            e.orbit_index = it->second;
            spec.entries.push_back(std::move(e));
        }
    }
    const std::size_t expect_orbits =
        static_cast<std::size_t>(manifest.root.number("n_orbits"));
    const std::size_t expect_entries =
        static_cast<std::size_t>(manifest.root.number("n_entries"));
    if (spec.orbits.size() != expect_orbits)
        throw ParseError(0, "manifest n_orbits disagrees with orbits.csv");
    if (spec.entries.size() != expect_entries)
        throw ParseError(0, "manifest n_entries disagrees with spectrum.csv");
    return spec;
}

}
