#pragma once

// The library's invariant suite, runnable from the command line and from the
// acceptance tests: field symmetries, quadrature exactness, energy
// conservation, scaling exponents and integrator checks, plus a mutation hook
// that flips the sign of the factor i in the dipole wave to prove the energy
// check has teeth.

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "magnus/deflection.hpp"
#include "magnus/dynamics.hpp"
#include "magnus/focal.hpp"

namespace magnus {

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

struct SelfCheckOptions {
    bool mutate_spiral_sign = false; // test hook: inject the sign bug into the dipole wave
    AdaptiveOptions quad{};
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

} // namespace detail

inline bool run_selfcheck_energy_only(const SelfCheckOptions& opt);

inline std::vector<CheckResult> run_selfcheck(const SelfCheckOptions& opt = {}) {
    constexpr double pi = std::numbers::pi;
    const double spiral_sign = opt.mutate_spiral_sign ? -1.0 : 1.0;
    const auto make_dipole = [&](int sigma, double delta, double esc, double kd) {
        Dipole d = Dipole::make(sigma, delta, 1.0, esc, kd);
        d.spiral_sign = spiral_sign;
        return d;
    };

    std::vector<CheckResult> results;
    const auto check = [&](const std::string& name, const std::function<std::string()>& body) {
        try {
            const std::string detail = body(); // empty string = pass
            results.push_back({name, detail.empty(), detail});
        } catch (const std::exception& e) {
            results.push_back({name, false, e.what()});
        }
    };

    check("transversality", [&] {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.5), 1.0);
        const Dipole dip = make_dipole(+1, 0.7, 0.4, 0.3);
        double worst = 0.0;
        for (int i = 0; i <= 12; ++i)
            for (int j = 0; j < 16; ++j) {
                const Direction dir{pi * i / 12.0, 2.0 * pi * j / 16.0};
                const Vec3 u = dir.unit();
                worst = std::max(worst, std::abs(dot(u, incident_field(beam, dir))));
                worst = std::max(worst, std::abs(dot(u, dipole_field(dip, dir))));
            }
        return worst < 1e-12 ? "" : "residual " + detail::fmt(worst);
    });

    check("quadrature_exactness", [&] {
        const SphericalGrid grid(12, 12, Domain::full());
        double worst = 0.0;
        for (int l = 1; l <= 7; ++l)
            for (int m : {0, std::min(l, 5)}) {
                const complexd got = integrate(
                    [&](const Direction& d) {
                        return std::sph_legendre(l, m, d.theta) * std::polar(1.0, m * d.phi);
                    },
                    grid);
                worst = std::max(worst, std::abs(got));
            }
        return worst < 1e-12 ? "" : "harmonic residual " + detail::fmt(worst);
    });

    check("quadrature_determinism", [&] {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.6), 1.0);
        const auto f = [&](const Direction& d) { return 0.5 * incident_field(beam, d).norm2(); };
        const double a = integrate(f, SphericalGrid(48, 48, Domain::cap(pi / 2.0)));
        const double b = integrate(f, SphericalGrid(48, 48, Domain::cap(pi / 2.0)));
        return a == b ? "" : "repeat runs differ";
    });

    check("pattern_normalization", [&] {
        const Dipole unit = make_dipole(+1, 0.3, 1.0, 0.0);
        const double got = integrate(
            [&](const Direction& d) { return dipole_field(unit, d).norm2(); },
            SphericalGrid(16, 16, Domain::full()));
        const double err = std::abs(got - 8.0 * pi / 3.0);
        return err < 1e-12 ? "" : "pattern integral off by " + detail::fmt(err);
    });

    check("antipodal_jsc_symmetry", [&] {
        const Dipole dip = make_dipole(+1, -1.2, 0.9, 0.0);
        double worst = 0.0;
        for (int i = 1; i < 12; ++i)
            for (int j = 0; j < 16; ++j) {
                const Direction d{pi * i / 12.0, 2.0 * pi * j / 16.0};
                const double fwd = dipole_field(dip, d).norm2();
                const double bwd = dipole_field(dip, {pi - d.theta, pi + d.phi}).norm2();
                worst = std::max(worst, std::abs(fwd - bwd));
            }
        return worst < 1e-12 ? "" : "asymmetry " + detail::fmt(worst);
    });

    check("jsc_zero_first_moment", [&] {
        const Dipole dip = make_dipole(+1, 0.4, 1.0, 0.0);
        const Vec3 moment = integrate(
            [&](const Direction& d) { return d.unit() * (0.5 * dipole_field(dip, d).norm2()); },
            SphericalGrid(24, 24, Domain::full()));
        return moment.norm() < 1e-12 ? "" : "net momentum " + detail::fmt(moment.norm());
    });

    check("interference_closed_form", [&] {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.5), 1.2);
        double worst = 0.0;
        for (int sigma : {+1, -1}) {
            const Dipole dip = make_dipole(sigma, -0.8, 0.3, 0.0);
            for (int i = 0; i < 32; ++i)
                for (int j = 0; j < 32; ++j) {
                    const Direction dir{pi / 2.0 * i / 31.0, 2.0 * pi * j / 32.0};
                    const double numeric = radiant_components(beam, dip, dir).j_if;
                    const double closed = interference_analytic(beam, dip, dir);
                    worst = std::max(worst, std::abs(numeric - closed));
                }
        }
        return worst < 1e-10 ? "" : "mismatch " + detail::fmt(worst);
    });

    check("energy_conservation", [&] {
        for (const BeamShape& shape : {BeamShape::gaussian(0.2), BeamShape::tophat(0.3)})
            for (double delta : {-1.0, 0.0, 1.0})
                for (double kd : {0.0, 0.8}) {
                    const auto beam = IncidentBeam::make(shape, 1.0);
                    const double esc =
                        solve_scattered_amplitude(beam, make_dipole(+1, delta, 1.0, kd), opt.quad);
                    const Dipole dip = make_dipole(+1, delta, esc, kd);
                    const SphericalGrid support(96, 96, support_domain(beam));
                    const SphericalGrid full(96, 96, Domain::full());
                    const double j_if = integrate(
                        [&](const Direction& d) { return radiant_components(beam, dip, d).j_if; },
                        support);
                    const double j_sc = integrate(
                        [&](const Direction& d) { return 0.5 * dipole_field(dip, d).norm2(); },
                        full);
                    const double p = beam_power(beam, opt.quad).numeric;
                    if (std::abs(j_if + j_sc) >= 1e-9 * p)
                        return "residual " + detail::fmt(std::abs(j_if + j_sc) / p) +
                               " of P at width " + detail::fmt(shape.width) + ", delta " +
                               detail::fmt(delta) + ", kd " + detail::fmt(kd);
                }
        return std::string{};
    });

    check("pointwise_positivity", [&] {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.4), 1.0);
        const double esc = solve_scattered_amplitude(beam, make_dipole(+1, -1.0, 1.0, 0.0),
                                                     opt.quad);
        const Dipole dip = make_dipole(+1, -1.0, esc, 0.0);
        const SphericalGrid grid(64, 64, Domain::full());
        double worst = 0.0;
        for (int i = 0; i < grid.n_theta(); ++i)
            for (int j = 0; j < grid.n_phi(); ++j)
                worst = std::min(
                    worst,
                    radiant_components(beam, dip, {grid.theta_node(i), grid.phi_node(j)}).total());
        return worst >= -1e-12 * 0.5 ? "" : "negative intensity " + detail::fmt(worst);
    });

    check("detuning_oddness", [&] {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.1), 1.0);
        const double plus = deflection_numeric(beam, 1.0, 1.0, +1, 0.0, opt.quad).delta_theta;
        const double minus = deflection_numeric(beam, -1.0, 1.0, +1, 0.0, opt.quad).delta_theta;
        const double asym = std::abs(plus + minus) / std::abs(plus);
        return asym < 0.02 ? "" : "asymmetry " + detail::fmt(asym);
    });

    check("handedness_mirror", [&] {
        const auto beam = IncidentBeam::make(BeamShape::tophat(0.3), 1.0);
        const double plus = deflection_numeric(beam, 0.8, 1.0, +1, 0.0, opt.quad).delta_theta;
        const double minus = deflection_numeric(beam, 0.8, 1.0, -1, 0.0, opt.quad).delta_theta;
        const double err = std::abs(plus + minus) / std::abs(plus);
        return err < 1e-8 ? "" : "mirror violation " + detail::fmt(err);
    });

    check("width_scaling_exponent", [&] {
        for (auto kind : {BeamShape::Kind::gaussian, BeamShape::Kind::tophat}) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
            for (double w : {0.05, 0.075, 0.1, 0.15}) {
                const auto beam = IncidentBeam::make({kind, w}, 1.0);
                const double dth =
                    deflection_numeric(beam, 1.0, 1.0, +1, 0.0, opt.quad).delta_theta;
                const double lx = std::log(w), ly = std::log(std::abs(dth));
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
                n += 1;
            }
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            if (std::abs(slope - 4.0) > 0.1) return "exponent " + detail::fmt(slope);
        }
        return std::string{};
    });

    check("forward_attenuation", [&] {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.1), 1.0);
        const double dkz = deflection_numeric(beam, 0.5, 1.0, +1, 0.0, opt.quad).delta_k.z;
        return dkz < 0.0 ? "" : "delta_k_z " + detail::fmt(dkz) + " not negative";
    });

    check("equilibrium_root", [&] {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.2), 1.0);
        const double kd = equilibrium_displacement(beam, -1.0, 1.0, +1, Method::numeric, opt.quad);
        return std::abs(kd - 1.0) < 0.03 ? "" : "root " + detail::fmt(kd);
    });

    check("rk4_order", [&] {
        const auto trap =
            TrapSpec::make(0.8e-6, 2e-6, si::microkelvin_to_joule(20.0), si::amu_to_kg(88.0));
        const double period = 2.0 * pi / trap_frequency(trap);
        const auto drive = DriveSpec::make(trap_frequency(trap), +1, 2e-4);
        SimOptions sim;
        sim.drive_amplitude = 0.0;
        sim.x0 = 0.3 * trap.waist_w0;
        const auto end_pos = [&](double dt) {
            return simulate(trap, drive, dt, 7.3 * period, sim).positions.back();
        };
        const double ref = end_pos(period / 3200.0);
        const double ratio = std::abs(end_pos(period / 200.0) - ref) /
                             std::abs(end_pos(period / 400.0) - ref);
        return std::abs(ratio - 16.0) <= 4.0 ? "" : "error ratio " + detail::fmt(ratio);
    });

    check("drive_mirror_symmetry", [&] {
        const auto trap =
            TrapSpec::make(0.8e-6, 2e-6, si::microkelvin_to_joule(20.0), si::amu_to_kg(88.0));
        const double omega = trap_frequency(trap);
        const double period = 2.0 * pi / omega;
        const auto up = simulate(trap, DriveSpec::make(omega, +1, 2e-4), period / 200.0,
                                 5.0 * period, {});
        const auto down = simulate(trap, DriveSpec::make(omega, -1, 2e-4), period / 200.0,
                                   5.0 * period, {});
        for (std::size_t i = 0; i < up.positions.size(); ++i)
            if (up.positions[i] != -down.positions[i]) return std::string("trajectories differ");
        return std::string{};
    });

    check("harmonic_escape_cycles", [&] {
        const auto trap =
            TrapSpec::make(0.8e-6, 2e-6, si::microkelvin_to_joule(20.0), si::amu_to_kg(88.0));
        const double omega = trap_frequency(trap);
        SimOptions sim;
        sim.model = TrapModel::harmonic;
        const auto traj = simulate(trap, DriveSpec::make(omega, +1, 2e-4),
                                   2.0 * pi / omega / 200.0, 60.0 * pi / omega * 2.0, sim);
        if (!traj.escape_time) return std::string("no escape");
        const double cycles = *traj.escape_cycles(omega);
        return std::abs(cycles - 3.5) <= 0.2 ? "" : "escape after " + detail::fmt(cycles);
    });

    if (!opt.mutate_spiral_sign) {
        // prove the energy check catches the sign bug in the spiral factor
        check("mutation_detected", [&] {
            SelfCheckOptions mutated = opt;
            mutated.mutate_spiral_sign = true;
            const auto sub = run_selfcheck_energy_only(mutated);
            return sub ? "mutated run still passes energy conservation" : "";
        });
    }

    return results;
}

// helper for the mutation self-test: true if the mutated energy check passes
inline bool run_selfcheck_energy_only(const SelfCheckOptions& opt) {
    const auto beam = IncidentBeam::make(BeamShape::gaussian(0.2), 1.0);
    Dipole unit = Dipole::make(+1, 0.0, 1.0, 1.0, 0.0);
    unit.spiral_sign = opt.mutate_spiral_sign ? -1.0 : 1.0;
    try {
        const double esc = solve_scattered_amplitude(beam, unit, opt.quad);
        Dipole dip = unit;
        dip.scattered_amplitude = esc;
        const double j_if = integrate(
            [&](const Direction& d) { return radiant_components(beam, dip, d).j_if; },
            SphericalGrid(96, 96, support_domain(beam)));
        const double j_sc = integrate(
            [&](const Direction& d) { return 0.5 * dipole_field(dip, d).norm2(); },
            SphericalGrid(96, 96, Domain::full()));
        return std::abs(j_if + j_sc) < 1e-9 * beam_power(beam, opt.quad).numeric;
    } catch (const DegenerateBeam&) {
        return false;
    }
}

inline int print_selfcheck(std::ostream& os, const std::vector<CheckResult>& results) {
    int failures = 0;
    for (const auto& r : results) {
        os << (r.pass ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) os << "  [" << r.detail << "]";
        os << "\n";
        if (!r.pass) ++failures;
    }
    os << (failures == 0 ? "all checks passed" : "FAILED checks: " + std::to_string(failures))
       << "\n";
    return failures;
}

} // namespace magnus
