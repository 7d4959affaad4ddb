// magnus: command-line front end for the circular-dipole beam-deflection
// library. Subcommands cover the single-point deflection record, parameter
// scans, the off-axis equilibrium, in-plane radiant profiles, focal-plane
// spot metrics, rotating-field trap shaking, and the invariant self-check.
//
// Exit codes: 0 ok, 1 self-check failure, 2 validation error, 3 numerical
// failure (non-convergent quadrature, missing root, bad time step).

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magnus/deflection.hpp"
#include "magnus/dynamics.hpp"
#include "magnus/focal.hpp"
#include "magnus/io.hpp"
#include "magnus/selfcheck.hpp"
#include "magnus/version.hpp"

namespace {

using namespace magnus;

// Flat `key = value` configuration file. Command-line flags win; unknown keys
// are rejected. '#' starts a comment.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "config")
            throw std::invalid_argument("config files cannot nest");
        CLI::Option* op = cmd->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw std::invalid_argument("unknown config key '" + key + "'");
        if (op->count() > 0) continue; // the command line already set it
        op->add_result(value);
        op->run_callback();
    }
}

struct OpticsConfig {
    std::string shape = "gauss";
    double width = 0.2;    // rad
    double detuning = 1.0; // units of gamma
    int sigma = +1;
    double kd = 0.0;
    int grid = 1 << 14;    // adaptive node cap per axis
    std::string format = "csv";
    std::string out;       // empty = stdout
    std::string config;    // optional key = value file

    IncidentBeam beam() const {
        const auto kind =
            shape == "tophat" ? BeamShape::Kind::tophat : BeamShape::Kind::gaussian;
        return IncidentBeam::make(BeamShape::validated({kind, width}), 1.0);
    }
    AdaptiveOptions quad() const {
        AdaptiveOptions opt;
        opt.n_max = grid;
        return opt;
    }
    void echo(OutputTable& table, const std::string& command) const {
        table.meta = {{"command", command},
                      {"library_version", magnus::version},
                      {"shape", shape},
                      {"width", format_double(width)},
                      {"detuning", format_double(detuning)},
                      {"sigma", std::to_string(sigma)},
                      {"kd", format_double(kd)},
                      {"grid", std::to_string(grid)},
                      {"format", format}};
    }
};

void add_optics_options(CLI::App* cmd, OpticsConfig& cfg) {
    cmd->add_option("--shape", cfg.shape, "beam shape: gauss | tophat")
        ->check(CLI::IsMember({"gauss", "tophat"}));
    cmd->add_option("--width", cfg.width, "angular width w_theta or r_theta, rad");
    cmd->add_option("--detuning", cfg.detuning, "laser detuning in units of gamma");
    cmd->add_option("--sigma", cfg.sigma, "dipole handedness, +1 or -1")
        ->check(CLI::IsMember({-1, 1}));
    cmd->add_option("--kd", cfg.kd, "transverse dipole displacement k*d");
    cmd->add_option("--grid", cfg.grid, "adaptive quadrature node cap per axis")
        ->check(CLI::Range(4, 1 << 14));
    cmd->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", cfg.out, "output path (default: stdout)");
    cmd->add_option("--config", cfg.config, "flat key = value file; command line wins");
    cmd->callback([cmd, &cfg] {
        if (!cfg.config.empty()) apply_config_file(cmd, cfg.config);
    });
}

void emit(const OutputTable& table, const std::string& format, const std::string& out) {
    const std::string text = format == "json" ? to_json(table) : to_csv(table);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(out, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot open output file '" + out + "'");
        file << text;
    }
}

int run_deflect(const OpticsConfig& cfg) {
    const auto beam = cfg.beam();
    const auto analytic = deflection_analytic(beam.shape, cfg.detuning, 1.0, cfg.sigma, cfg.kd);
    const auto numeric =
        deflection_numeric(beam, cfg.detuning, 1.0, cfg.sigma, cfg.kd, cfg.quad());

    OutputTable table;
    cfg.echo(table, "deflect");
    table.columns = {"delta_theta_analytic", "force_x_analytic", "delta_kz_analytic",
                     "delta_theta_numeric",  "force_x_numeric",  "delta_kx_numeric",
                     "delta_ky_numeric",     "delta_kz_numeric", "esc_amplitude",
                     "achieved_tol"};
    table.rows = {{analytic.delta_theta, analytic.force_x, analytic.delta_k.z,
                   numeric.delta_theta, numeric.force_x, numeric.delta_k.x, numeric.delta_k.y,
                   numeric.delta_k.z, numeric.scattered_amplitude, numeric.achieved_tol}};
    emit(table, cfg.format, cfg.out);
    return 0;
}

int run_scan(const OpticsConfig& cfg, const std::string& axis, double from, double to,
             int points) {
    const auto beam = cfg.beam();
    const ScanAxis sweep = axis == "displacement"
                               ? ScanAxis::displacement(from, to, cfg.detuning)
                               : ScanAxis::detuning(from, to, cfg.kd);
    const auto rows = scan(beam, 1.0, cfg.sigma, sweep, points, cfg.quad());

    OutputTable table;
    cfg.echo(table, "scan");
    table.meta.insert(table.meta.end(), {{"axis", axis},
                                         {"from", format_double(from)},
                                         {"to", format_double(to)},
                                         {"points", std::to_string(points)}});
    table.columns = {"detuning",             "kd",
                     "delta_theta_analytic", "force_x_analytic",
                     "delta_theta_numeric",  "force_x_numeric",
                     "delta_kx_numeric",     "delta_ky_numeric",
                     "delta_kz_numeric",     "achieved_tol"};
    for (const auto& r : rows)
        table.rows.push_back({r.delta, r.kd, r.analytic.delta_theta, r.analytic.force_x,
                              r.numeric.delta_theta, r.numeric.force_x, r.numeric.delta_k.x,
                              r.numeric.delta_k.y, r.numeric.delta_k.z,
                              r.numeric.achieved_tol});
    emit(table, cfg.format, cfg.out);
    return 0;
}

int run_equilibrium(const OpticsConfig& cfg) {
    const auto beam = cfg.beam();
    const double numeric =
        equilibrium_displacement(beam, cfg.detuning, 1.0, cfg.sigma, Method::numeric, cfg.quad());
    const double analytic =
        equilibrium_displacement(beam, cfg.detuning, 1.0, cfg.sigma, Method::analytic);

    OutputTable table;
    cfg.echo(table, "equilibrium");
    table.columns = {"kd_star_numeric", "kd_star_analytic"};
    table.rows = {{numeric, analytic}};
    emit(table, cfg.format, cfg.out);
    return 0;
}

int run_profile(const OpticsConfig& cfg, int points) {
    const auto beam = cfg.beam();
    const auto curve = radiant_profile(beam, cfg.detuning, 1.0, cfg.sigma, points, cfg.quad());

    OutputTable table;
    cfg.echo(table, "profile");
    table.meta.emplace_back("points", std::to_string(points));
    table.columns = {"theta", "j_in", "j_sc", "j_if", "j_total"};
    for (const auto& p : curve)
        table.rows.push_back({p.theta_signed, p.j_in, p.j_sc, p.j_if, p.j_total});
    emit(table, cfg.format, cfg.out);
    return 0;
}

int run_focal(const OpticsConfig& cfg, int samples, double extent, const std::string& map_out) {
    const auto beam = cfg.beam();
    FocalMapOptions opt;
    opt.samples = samples;
    opt.extent_radii = extent;
    const auto map = focal_map(beam, opt);
    const auto metrics = spot_metrics(map, beam.shape.kind);
    const double p_plane = plane_power(map);
    const double p_angular = beam_power(beam, cfg.quad()).numeric;

    OutputTable table;
    cfg.echo(table, "focal");
    table.meta.insert(table.meta.end(), {{"samples", std::to_string(map.nx())},
                                         {"extent_radii", format_double(extent)}});
    table.columns = {"spot_radius", "expected_spot_radius", "peak_ratio", "fit_residual",
                     "plane_power", "angular_power"};
    table.rows = {{metrics.spot_radius, expected_spot_radius(beam.shape), metrics.peak_ratio,
                   metrics.fit_residual, p_plane, p_angular}};
    emit(table, cfg.format, cfg.out);

    if (!map_out.empty()) {
        OutputTable grid;
        cfg.echo(grid, "focal-map");
        grid.columns = {"x", "y", "intensity", "re_ex", "im_ex", "re_ey", "im_ey",
                        "re_ez", "im_ez"};
        for (int iy = 0; iy < map.ny(); ++iy)
            for (int ix = 0; ix < map.nx(); ++ix) {
                const CVec3& e = map.e_at(ix, iy);
                grid.rows.push_back({map.xs[ix], map.ys[iy], map.intensity(ix, iy),
                                     e.x.real(), e.x.imag(), e.y.real(), e.y.imag(),
                                     e.z.real(), e.z.imag()});
            }
        emit(grid, cfg.format, map_out);
    }
    return 0;
}

struct ShakeConfig {
    std::string wavelength = "0.8um";
    std::string waist = "2um";
    std::string depth = "20uK";
    std::string mass = "88u";
    std::string omega_b; // default: the trap frequency
    int m_j = +1;
    std::string b_field = "2G";
    std::string dt;    // default: trap period / 200
    std::string t_max; // default: 30 drive periods
    bool harmonic = false;
    std::string format = "csv";
    std::string out; // trajectory path; summary goes to stdout
};

int run_shake(const ShakeConfig& cfg) {
    const auto trap = TrapSpec::make(
        parse_quantity(cfg.wavelength, Unit::length), parse_quantity(cfg.waist, Unit::length),
        parse_quantity(cfg.depth, Unit::energy), parse_quantity(cfg.mass, Unit::mass));
    const double omega = trap_frequency(trap);
    const double omega_b =
        cfg.omega_b.empty() ? omega : parse_quantity(cfg.omega_b, Unit::angular_frequency);
    const auto drive =
        DriveSpec::make(omega_b, cfg.m_j, parse_quantity(cfg.b_field, Unit::magnetic_field));
    const double dt = cfg.dt.empty() ? 2.0 * std::numbers::pi / omega / 200.0
                                     : parse_quantity(cfg.dt, Unit::time);
    const double t_max = cfg.t_max.empty() ? 30.0 * 2.0 * std::numbers::pi / omega_b
                                           : parse_quantity(cfg.t_max, Unit::time);

    SimOptions sim;
    sim.model = cfg.harmonic ? TrapModel::harmonic : TrapModel::gaussian;
    const auto traj = simulate(trap, drive, dt, t_max, sim);
    const auto estimate = resonant_escape_estimate(trap);

    double reach = 0.0, e_max = 0.0;
    for (double x : traj.positions) reach = std::max(reach, std::abs(x));
    for (double e : traj.energies) e_max = std::max(e_max, e);

    OutputTable summary;
    summary.meta = {{"command", "shake"},
                    {"library_version", magnus::version},
                    {"wavelength", cfg.wavelength},
                    {"waist", cfg.waist},
                    {"depth", cfg.depth},
                    {"mass", cfg.mass},
                    {"omega_b_rads", format_double(omega_b)},
                    {"mj", std::to_string(cfg.m_j)},
                    {"b_field", cfg.b_field},
                    {"dt_s", format_double(dt)},
                    {"t_max_s", format_double(t_max)},
                    {"model", cfg.harmonic ? "harmonic" : "gaussian"},
                    {"escape_criterion", "E = mv^2/2 + U + U0 > U0 or |x| > 3 w0"}};
    summary.columns = {"omega_trap_rads",    "n_cycles_estimate", "exit_speed_estimate",
                       "n_cycles_simulated", "escape_time_s",     "adiabaticity_ratio",
                       "max_abs_x_over_w0",  "max_energy_over_u0"};
    const double nan = std::nan("");
    summary.rows = {{omega, estimate.n_cycles, estimate.exit_speed,
                     traj.escape_cycles(omega_b).value_or(nan),
                     traj.escape_time.value_or(nan), adiabaticity_ratio(drive),
                     reach / trap.waist_w0, e_max / trap.depth_u0}};
    emit(summary, cfg.format, "");

    if (!cfg.out.empty()) {
        OutputTable table;
        table.meta = summary.meta;
        table.columns = {"t", "x", "v", "E"};
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            table.rows.push_back(
                {traj.times[i], traj.positions[i], traj.velocities[i], traj.energies[i]});
        emit(table, cfg.format, cfg.out);
    }
    return 0;
}

int run_selfcheck_cmd(bool mutate, int grid) {
    SelfCheckOptions opt;
    opt.mutate_spiral_sign = mutate;
    opt.quad.n_max = grid;
    const auto results = run_selfcheck(opt);
    const int failures = print_selfcheck(std::cout, results);
    if (failures > 0) {
        for (const auto& r : results)
            if (!r.pass) {
                std::cerr << "first failing invariant: " << r.name << "\n";
                break;
            }
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"circular-dipole beam deflection, tweezer forces, and trap shaking"};
    app.require_subcommand(1);

    OpticsConfig deflect_cfg, scan_cfg, eq_cfg, profile_cfg, focal_cfg;
    std::string scan_axis = "detuning";
    double scan_from = -5.0, scan_to = 5.0;
    int scan_points = 21;
    int profile_points = 201;
    int focal_samples = 129;
    double focal_extent = 4.0;
    std::string focal_map_out;
    ShakeConfig shake_cfg;
    bool mutate = false;
    int selfcheck_grid = 1 << 14;

    auto* deflect = app.add_subcommand("deflect", "single deflection record");
    add_optics_options(deflect, deflect_cfg);

    auto* scan_cmd = app.add_subcommand("scan", "detuning or displacement scan");
    add_optics_options(scan_cmd, scan_cfg);
    scan_cmd->add_option("--axis", scan_axis, "scan axis")
        ->check(CLI::IsMember({"detuning", "displacement"}));
    scan_cmd->add_option("--from", scan_from, "axis start");
    scan_cmd->add_option("--to", scan_to, "axis end");
    scan_cmd->add_option("--points", scan_points, "number of grid points")
        ->check(CLI::Range(2, 100000));

    auto* equilibrium = app.add_subcommand("equilibrium", "transverse-force zero kd*");
    add_optics_options(equilibrium, eq_cfg);

    auto* profile = app.add_subcommand("profile", "in-plane radiant intensity curve");
    add_optics_options(profile, profile_cfg);
    profile->add_option("--points", profile_points, "polar samples per side")
        ->check(CLI::Range(16, 100000));

    auto* focal = app.add_subcommand("focal", "focal-plane spot metrics");
    add_optics_options(focal, focal_cfg);
    focal->add_option("--samples", focal_samples, "map samples per axis");
    focal->add_option("--extent", focal_extent, "map half-extent in spot radii");
    focal->add_option("--map-out", focal_map_out, "also write the sampled map here");

    auto* shake = app.add_subcommand("shake", "rotating-field trap shaking simulation");
    shake->add_option("--wavelength", shake_cfg.wavelength, "tweezer wavelength (m, um, nm)");
    shake->add_option("--waist", shake_cfg.waist, "focal waist w0 (m, um, nm)");
    shake->add_option("--depth", shake_cfg.depth, "trap depth (J, K, uK)");
    shake->add_option("--mass", shake_cfg.mass, "atomic mass (kg, u)");
    shake->add_option("--omega-b", shake_cfg.omega_b,
                      "field rotation rate (rad/s, Hz, kHz); default: trap frequency");
    shake->add_option("--mj", shake_cfg.m_j, "B-referenced spin projection")
        ->check(CLI::IsMember({-1, 0, 1}));
    shake->add_option("--b-field", shake_cfg.b_field, "field magnitude (T, G)");
    shake->add_option("--dt", shake_cfg.dt, "integrator step (s, ms, us)");
    shake->add_option("--t-max", shake_cfg.t_max, "simulated time span (s, ms, us)");
    shake->add_flag("--harmonic", shake_cfg.harmonic, "harmonic control potential");
    shake->add_option("--format", shake_cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    shake->add_option("--out", shake_cfg.out, "trajectory output path");
    std::string shake_config;
    shake->add_option("--config", shake_config, "flat key = value file; command line wins");
    shake->callback([shake, &shake_config] {
        if (!shake_config.empty()) apply_config_file(shake, shake_config);
    });

    auto* selfcheck = app.add_subcommand("selfcheck", "run the invariant suite");
    selfcheck->add_option("--grid", selfcheck_grid, "adaptive quadrature node cap per axis")
        ->check(CLI::Range(4, 1 << 14));
    selfcheck
        ->add_flag("--mutate-spiral-sign", mutate,
                   "test hook: flip the sign of the factor i in the dipole wave")
        ->group(""); // hidden

    try {
        app.parse(argc, argv);
        if (deflect->parsed()) return run_deflect(deflect_cfg);
        if (scan_cmd->parsed())
            return run_scan(scan_cfg, scan_axis, scan_from, scan_to, scan_points);
        if (equilibrium->parsed()) return run_equilibrium(eq_cfg);
        if (profile->parsed()) return run_profile(profile_cfg, profile_points);
        if (focal->parsed())
            return run_focal(focal_cfg, focal_samples, focal_extent, focal_map_out);
        if (shake->parsed()) return run_shake(shake_cfg);
        if (selfcheck->parsed()) return run_selfcheck_cmd(mutate, selfcheck_grid);
        return 0;
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const NoConvergence& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const NoRoot& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const StepTooLarge& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DegenerateBeam& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const FitFailed& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
