// bspec: periodic-ray length spectra of open dispersing billiards.
//
// Exit codes: 0 success, 1 domain/validation failure, 2 usage error.

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bspec/errors.hpp"
#include "bspec/io.hpp"
#include "bspec/separation.hpp"
#include "bspec/spectrum.hpp"
#include "bspec/version.hpp"
#include "bspec/zeta.hpp"

namespace {

using nlohmann::json;

// "a,b,c" or "start:stop:count".
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double start = 0.0, stop = 0.0;
        long count = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(text);
        if (!(ss >> start >> c1 >> stop >> c2 >> count) || c1 != ':' ||
            c2 != ':' || count < 1 || !ss.eof())
            throw CLI::ValidationError("grid", "expected start:stop:count");
        for (long i = 0; i < count; ++i)
            out.push_back(count == 1 ? start
                                     : start + (stop - start) * i / (count - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw CLI::ValidationError("grid", "empty grid");
    return out;
}

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw CLI::ValidationError("file", "no such file: " + path);
}

struct Output {
    std::string path;   // empty: stdout
    bool as_json = false;
    std::string subcommand;

    void emit(const std::string& csv, const json& mirror) const {
        if (!path.empty()) {
            std::ofstream f(path, std::ios::trunc);
            f << csv;
            f.close();
            std::ofstream m(path + ".manifest.toml", std::ios::trunc);
            m << "tool = \"" << bspec::tool_name << "\"\n"
              << "version = \"" << bspec::tool_version << "\"\n"
              << "subcommand = \"" << subcommand << "\"\n"
              << "csv_sha256 = \"" << bspec::sha256_hex(csv) << "\"\n";
            if (as_json) {
                std::ofstream j(path + ".json");
                j << mirror.dump(2) << "\n";
            }
        } else if (as_json) {
            std::cout << mirror.dump(2) << "\n";
        } else {
            std::cout << csv;
        }
    }
};

bspec::LengthSpectrum acquire_spectrum(const std::string& spectrum_dir,
                                       const std::string& scene_path,
                                       double t_max, bool serial) {
    if (!spectrum_dir.empty()) {
        require_file(spectrum_dir + "/manifest.toml");
        return bspec::load_spectrum(spectrum_dir);
    }
    if (scene_path.empty())
        throw CLI::ValidationError("input", "need --spectrum DIR or --scene FILE with --t-max");
    require_file(scene_path);
    if (!(t_max > 0.0))
        throw CLI::ValidationError("input", "--t-max must be positive when building from a scene");
    return bspec::build_spectrum(bspec::load_scene_toml(scene_path), t_max,
                                 serial ? bspec::Exec::serial : bspec::Exec::parallel);
}

int run(int argc, char** argv) {
    CLI::App app{"periodic-ray length spectrum toolkit for open dispersing billiards"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bspec::tool_version));

    // ---- check-scene ----------------------------------------------------
    auto* cmd_check = app.add_subcommand("check-scene", "validate a scene and print its constants");
    std::string check_file;
    bool check_json = false;
    cmd_check->add_option("file", check_file, "scene TOML file")->required();
    cmd_check->add_flag("--json", check_json, "emit JSON");

    // ---- enumerate -------------------------------------------------------
    auto* cmd_enum = app.add_subcommand("enumerate", "list admissible primitive configurations");
    int enum_kmax = 0;
    int enum_r = 0;
    std::string enum_scene, enum_out;
    bool enum_json = false;
    cmd_enum->add_option("--k-max", enum_kmax, "maximum word length")->required();
    cmd_enum->add_option("--scene", enum_scene, "scene file fixing the alphabet size");
    cmd_enum->add_option("--r", enum_r, "alphabet size (alternative to --scene)");
    cmd_enum->add_option("--out", enum_out, "output CSV path (default stdout)");
    cmd_enum->add_flag("--json", enum_json, "emit JSON");

    // ---- spectrum ----------------------------------------------------------
    auto* cmd_spec = app.add_subcommand("spectrum", "build and persist the length spectrum");
    std::string spec_scene, spec_out;
    double spec_tmax = 0.0;
    bool spec_serial = false, spec_json = false;
    int spec_starts = 0;
    unsigned spec_seed = 12345;
    cmd_spec->add_option("--scene", spec_scene, "scene TOML file")->required();
    cmd_spec->add_option("--t-max", spec_tmax, "certified period cutoff")->required();
    cmd_spec->add_option("--out", spec_out, "output directory")->required();
    cmd_spec->add_flag("--serial", spec_serial, "use the serial reference build");
    cmd_spec->add_flag("--json", spec_json, "emit a JSON summary");
    cmd_spec->add_option("--validate-starts", spec_starts,
                         "re-solve this many random configurations from random starts");
    cmd_spec->add_option("--seed", spec_seed, "seed for multi-start validation");

    // ---- counts ------------------------------------------------------------
    auto* cmd_counts = app.add_subcommand("counts", "counting function of primitive lengths");
    std::string counts_dir, counts_scene, counts_grid, counts_filter = "all", counts_out;
    double counts_tmax = 0.0;
    bool counts_json = false, counts_serial = false;
    cmd_counts->add_option("--spectrum", counts_dir, "saved spectrum directory");
    cmd_counts->add_option("--scene", counts_scene, "scene file (build in-process)");
    cmd_counts->add_option("--t-max", counts_tmax, "cutoff when building in-process");
    cmd_counts->add_option("--x-grid", counts_grid, "x values: list or start:stop:count")->required();
    cmd_counts->add_option("--filter", counts_filter, "all|even|odd")
        ->check(CLI::IsMember({"all", "even", "odd"}));
    cmd_counts->add_option("--out", counts_out, "output CSV path");
    cmd_counts->add_flag("--json", counts_json, "emit JSON");
    cmd_counts->add_flag("--serial", counts_serial, "serial in-process build");

    // ---- zeta ----------------------------------------------------------------
    auto* cmd_zeta = app.add_subcommand("zeta", "truncated dynamical zeta sums on an s-grid");
    std::string zeta_dir, zeta_scene, zeta_re, zeta_im, zeta_out;
    double zeta_tmax = 0.0, zeta_T = 0.0, zeta_h = std::numeric_limits<double>::quiet_NaN();
    bool zeta_json = false, zeta_serial = false;
    cmd_zeta->add_option("--spectrum", zeta_dir, "saved spectrum directory");
    cmd_zeta->add_option("--scene", zeta_scene, "scene file (build in-process)");
    cmd_zeta->add_option("--t-max", zeta_tmax, "cutoff when building in-process");
    cmd_zeta->add_option("--re", zeta_re, "real parts: list or start:stop:count")->required();
    cmd_zeta->add_option("--im", zeta_im, "imaginary parts: list or start:stop:count")->required();
    cmd_zeta->add_option("--grid", zeta_T, "series cutoff T (defaults to T_max)");
    cmd_zeta->add_option("--entropy", zeta_h, "fitted entropy for the analytic tail term");
    cmd_zeta->add_option("--out", zeta_out, "output CSV path");
    cmd_zeta->add_flag("--json", zeta_json, "emit JSON");
    cmd_zeta->add_flag("--serial", zeta_serial, "serial in-process build");

    // ---- lb-search -------------------------------------------------------------
    auto* cmd_lb = app.add_subcommand("lb-search", "search bump windows certifying (LB)");
    std::string lb_dir, lb_scene, lb_qgrid, lb_mode = "odd-only", lb_out;
    double lb_tmax = 0.0, lb_delta = 0.0, lb_rho = 0.0,
           lb_h = std::numeric_limits<double>::quiet_NaN();
    bool lb_json = false, lb_serial = false;
    cmd_lb->add_option("--spectrum", lb_dir, "saved spectrum directory");
    cmd_lb->add_option("--scene", lb_scene, "scene file (build in-process)");
    cmd_lb->add_option("--t-max", lb_tmax, "cutoff when building in-process");
    cmd_lb->add_option("--delta", lb_delta, "isolation rate")->required();
    cmd_lb->add_option("--rho", lb_rho, "window width")->required();
    cmd_lb->add_option("--q-grid", lb_qgrid, "centers: list or start:stop:count")->required();
    cmd_lb->add_option("--entropy", lb_h, "fitted entropy (enables the rho < 1/h check)");
    cmd_lb->add_option("--isolation", lb_mode, "odd-only|strict")
        ->check(CLI::IsMember({"odd-only", "strict"}));
    cmd_lb->add_option("--out", lb_out, "output CSV path");
    cmd_lb->add_flag("--json", lb_json, "emit JSON");
    cmd_lb->add_flag("--serial", lb_serial, "serial in-process build");

    // ---- separation ---------------------------------------------------------------
    auto* cmd_sep = app.add_subcommand("separation", "phase-space separation report");
    std::string sep_dir, sep_scene, sep_out;
    double sep_tmax = 0.0, sep_T = 0.0,
           sep_step = std::numeric_limits<double>::quiet_NaN(),
           sep_dir_tol = -1.0;
    bool sep_json = false, sep_serial = false;
    cmd_sep->add_option("--spectrum", sep_dir, "saved spectrum directory");
    cmd_sep->add_option("--scene", sep_scene, "scene file (build in-process)");
    cmd_sep->add_option("--t-max", sep_tmax, "cutoff when building in-process");
    cmd_sep->add_option("--t", sep_T, "period cutoff for the pairwise check")->required();
    cmd_sep->add_option("--step", sep_step, "sampling step (default d0/1000)");
    cmd_sep->add_option("--direction-tol", sep_dir_tol,
                        "also report the direction gap at this position tolerance");
    cmd_sep->add_option("--out", sep_out, "output CSV path");
    cmd_sep->add_flag("--json", sep_json, "emit JSON");
    cmd_sep->add_flag("--serial", sep_serial, "serial in-process build");

    // ---- probe-51 -------------------------------------------------------------------
    auto* cmd_probe = app.add_subcommand("probe-51", "boundary-ball separation probe");
    std::string probe_dir, probe_scene, probe_grid, probe_out;
    double probe_tmax = 0.0, probe_T = 0.0;
    bool probe_json = false, probe_serial = false;
    cmd_probe->add_option("--spectrum", probe_dir, "saved spectrum directory");
    cmd_probe->add_option("--scene", probe_scene, "scene file (build in-process)");
    cmd_probe->add_option("--t-max", probe_tmax, "cutoff when building in-process");
    cmd_probe->add_option("--t", probe_T, "period cutoff")->required();
    cmd_probe->add_option("--alpha-grid", probe_grid, "alpha values: list or start:stop:count")
        ->required();
    cmd_probe->add_option("--out", probe_out, "output CSV path");
    cmd_probe->add_flag("--json", probe_json, "emit JSON");
    cmd_probe->add_flag("--serial", probe_serial, "serial in-process build");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (cmd_check->parsed()) {
        require_file(check_file);
        const bspec::Scene scene = bspec::load_scene_toml(check_file);
        const bspec::SceneConstants c = bspec::validate_scene(scene);
        json j{{"label", scene.label}, {"r", scene.size()}, {"d0", c.d0},
               {"d1", c.d1},           {"d2", c.d2},        {"eta0", c.eta0},
               {"psi0", c.psi0}};
        if (check_json) {
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "label=" << scene.label << " r=" << scene.size()
                      << " d0=" << bspec::format_double(c.d0)
                      << " d1=" << bspec::format_double(c.d1)
                      << " d2=" << bspec::format_double(c.d2)
                      << " eta0=" << bspec::format_double(c.eta0)
                      << " psi0=" << bspec::format_double(c.psi0) << "\n";
        }
        return 0;
    }

    if (cmd_enum->parsed()) {
        int r = enum_r;
        if (!enum_scene.empty()) {
            require_file(enum_scene);
            r = bspec::load_scene_toml(enum_scene).size();
        }
        if (r < 3) throw CLI::ValidationError("enumerate", "need --scene or --r >= 3");
        const auto configs = bspec::enumerate_configurations(r, enum_kmax);
        std::ostringstream csv;
        csv << "config,k\n";
        json rows = json::array();
        for (const auto& c : configs) {
            csv << c.token() << ',' << c.k() << "\n";
            rows.push_back({{"config", c.token()}, {"k", c.k()}});
        }
        Output{enum_out, enum_json, "enumerate"}.emit(csv.str(), rows);
        return 0;
    }

    if (cmd_spec->parsed()) {
        require_file(spec_scene);
        const bspec::Scene scene = bspec::load_scene_toml(spec_scene);
        const auto t0 = std::chrono::steady_clock::now();
        const bspec::LengthSpectrum spec = bspec::build_spectrum(
            scene, spec_tmax,
            spec_serial ? bspec::Exec::serial : bspec::Exec::parallel);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        bspec::save_spectrum(spec, spec_out, wall);

        if (spec_starts > 0) {
            std::mt19937 rng(spec_seed);
            std::uniform_real_distribution<double> angle(-M_PI, M_PI);
            for (int trial = 0; trial < spec_starts && !spec.orbits.empty(); ++trial) {
                const auto& orb = spec.orbits[rng() % spec.orbits.size()];
                bspec::SolveOptions opts;
                opts.initial_params.emplace(orb.config.k());
                for (double& t : *opts.initial_params) t = angle(rng);
                const auto again = bspec::solve_orbit(spec.scene, orb.config, opts);
                if (std::abs(again.tau_primitive - orb.tau_primitive) > 1e-10)
                    throw bspec::ValidationFailure(
                        "multi-start agreement",
                        orb.config.token() + " re-solved to a different length");
            }
            std::cerr << "multi-start validation: " << spec_starts
                      << " random restarts agree\n";
        }

        json j{{"scene", spec.scene.label},
               {"t_max", spec.t_max},
               {"k_max_certified", spec.k_max},
               {"n_orbits", spec.orbits.size()},
               {"n_entries", spec.entries.size()},
               {"wall_seconds", wall},
               {"out", spec_out}};
        if (spec_json)
            std::cout << j.dump(2) << "\n";
        else
            std::cout << "scene=" << spec.scene.label << " t_max=" << spec.t_max
                      << " k_max=" << spec.k_max
                      << " orbits=" << spec.orbits.size()
                      << " entries=" << spec.entries.size() << " -> " << spec_out
                      << "\n";
        return 0;
    }

    if (cmd_counts->parsed()) {
        const auto spec =
            acquire_spectrum(counts_dir, counts_scene, counts_tmax, counts_serial);
        const bspec::ParityFilter f = counts_filter == "even"
                                          ? bspec::ParityFilter::even
                                          : counts_filter == "odd"
                                                ? bspec::ParityFilter::odd
                                                : bspec::ParityFilter::all;
        std::ostringstream csv;
        csv << "x,count\n";
        json rows = json::array();
        for (double x : parse_grid(counts_grid)) {
            const long n = bspec::count_primitive(spec, x, f);
            csv << bspec::format_double(x) << ',' << n << "\n";
            rows.push_back({{"x", x}, {"count", n}});
        }
        Output{counts_out, counts_json, "counts"}.emit(csv.str(), rows);
        return 0;
    }

    if (cmd_zeta->parsed()) {
        const auto spec =
            acquire_spectrum(zeta_dir, zeta_scene, zeta_tmax, zeta_serial);
        const double T = zeta_T > 0.0 ? zeta_T : spec.t_max;
        std::ostringstream csv;
        csv << "re,im,eta_re,eta_im,tail_bound\n";
        json rows = json::array();
        for (double re : parse_grid(zeta_re)) {
            for (double im : parse_grid(zeta_im)) {
                const auto r = bspec::eta_D(spec, {re, im}, T, zeta_h);
                csv << bspec::format_double(re) << ',' << bspec::format_double(im)
                    << ',' << bspec::format_double(r.value.real()) << ','
                    << bspec::format_double(r.value.imag()) << ','
                    << bspec::format_double(r.tail_bound) << "\n";
                rows.push_back({{"re", re},
                                {"im", im},
                                {"eta_re", r.value.real()},
                                {"eta_im", r.value.imag()},
                                {"tail_bound", r.tail_bound}});
            }
        }
        Output{zeta_out, zeta_json, "zeta"}.emit(csv.str(), rows);
        return 0;
    }

    if (cmd_lb->parsed()) {
        const auto spec = acquire_spectrum(lb_dir, lb_scene, lb_tmax, lb_serial);
        const bspec::IsolationMode mode = lb_mode == "strict"
                                              ? bspec::IsolationMode::strict
                                              : bspec::IsolationMode::odd_only;
        const auto cert = bspec::lb_search(spec, lb_delta, lb_rho,
                                           parse_grid(lb_qgrid), lb_h, mode);
        std::ostringstream csv;
        csv << "ell,m,pairing,bound,margin,config\n";
        json rows = json::array();
        for (std::size_t i = 0; i < cert.windows.size(); ++i) {
            const double margin = std::abs(cert.pairings[i]) / cert.bounds[i];
            csv << bspec::format_double(cert.windows[i].ell) << ','
                << bspec::format_double(cert.windows[i].m) << ','
                << bspec::format_double(cert.pairings[i]) << ','
                << bspec::format_double(cert.bounds[i]) << ','
                << bspec::format_double(margin) << ',' << cert.tokens[i] << "\n";
            rows.push_back({{"ell", cert.windows[i].ell},
                            {"m", cert.windows[i].m},
                            {"pairing", cert.pairings[i]},
                            {"bound", cert.bounds[i]},
                            {"margin", margin},
                            {"config", cert.tokens[i]}});
        }
        json j{{"delta", cert.delta},   {"alpha0", cert.alpha0},
               {"c1", cert.c1},         {"mu2", cert.det_fit.mu2},
               {"rows", rows},          {"desk_scale", cert.desk_scale}};
        std::cerr << "alpha0=" << cert.alpha0 << " c1=" << cert.c1
                  << " windows=" << cert.windows.size() << "\n";
        Output{lb_out, lb_json, "lb-search"}.emit(csv.str(), j);
        return 0;
    }

    if (cmd_sep->parsed()) {
        const auto spec = acquire_spectrum(sep_dir, sep_scene, sep_tmax, sep_serial);
        const auto fc = bspec::estimate_flow_constants(spec.scene, spec);
        const auto rep = bspec::check_theorem41(spec, sep_T, fc, sep_step);
        std::cerr << "A0=" << fc.A0 << " beta=" << fc.beta << " C0=" << fc.C0
                  << " eps0=" << fc.eps0 << "\n";
        std::ostringstream csv;
        csv << "kind,T,min_distance,bound,margin,pass,config_a,config_b\n";
        csv << "phase," << bspec::format_double(rep.T) << ','
            << bspec::format_double(rep.min_pair_distance) << ','
            << bspec::format_double(rep.bound) << ','
            << bspec::format_double(rep.margin) << ',' << (rep.pass ? 1 : 0)
            << ',' << rep.token_a << ',' << rep.token_b << "\n";
        json j{{"A0", fc.A0},
               {"beta", fc.beta},
               {"C0", fc.C0},
               {"eps0", fc.eps0},
               {"phase",
                {{"T", rep.T},
                 {"min_distance", rep.min_pair_distance},
                 {"bound", rep.bound},
                 {"margin", rep.margin},
                 {"pass", rep.pass},
                 {"config_a", rep.token_a},
                 {"config_b", rep.token_b}}}};
        if (sep_dir_tol >= 0.0) {
            const auto dg = bspec::direction_gap(spec, sep_T, sep_dir_tol, sep_step);
            csv << "direction," << bspec::format_double(dg.T) << ','
                << bspec::format_double(dg.min_gap) << ','
                << bspec::format_double(dg.bound) << ','
                << bspec::format_double(dg.min_gap / dg.bound) << ','
                << (dg.pass ? 1 : 0) << ',' << dg.token_a << ',' << dg.token_b
                << "\n";
            j["direction"] = {{"T", dg.T},
                              {"min_gap", dg.min_gap},
                              {"bound", dg.bound},
                              {"vacuous", dg.vacuous},
                              {"pass", dg.pass},
                              {"config_a", dg.token_a},
                              {"config_b", dg.token_b}};
        }
        Output{sep_out, sep_json, "separation"}.emit(csv.str(), j);
        if (!rep.pass) throw bspec::ValidationFailure("theorem 4.1 margin", "separation check failed");
        return 0;
    }

    if (cmd_probe->parsed()) {
        const auto spec =
            acquire_spectrum(probe_dir, probe_scene, probe_tmax, probe_serial);
        const auto alphas = parse_grid(probe_grid);
        const auto rep = bspec::probe_51(spec, probe_T, alphas);
        std::ostringstream csv;
        csv << "alpha,pass,config_a,config_b,obstacle\n";
        json rows = json::array();
        for (double a : alphas) {
            const bool pass = std::exp(-a * rep.T) < rep.g_min;
            csv << bspec::format_double(a) << ',' << (pass ? 1 : 0) << ','
                << rep.token_a << ',' << rep.token_b << ',' << rep.obstacle + 1
                << "\n";
            rows.push_back({{"alpha", a}, {"pass", pass}});
        }
        json j{{"g_min", rep.g_min},
               {"alpha_certified", rep.alpha_certified},
               {"alpha_critical", rep.alpha_critical},
               {"any_pass", rep.any_pass},
               {"config_a", rep.token_a},
               {"config_b", rep.token_b},
               {"obstacle", rep.obstacle + 1},
               {"rows", rows}};
        std::cerr << "g_min=" << rep.g_min
                  << " alpha_critical=" << rep.alpha_critical << "\n";
        Output{probe_out, probe_json, "probe-51"}.emit(csv.str(), j);
        if (!rep.any_pass)
            throw bspec::ValidationFailure(
                "boundary-ball separation",
                "no alpha in the grid separates the reflection points");
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const bspec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
