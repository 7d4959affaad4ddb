#pragma once

// SI-unit 1D simulator of an atom in a Gaussian tweezer whose spin-dependent
// center is shaken by a rotating magnetic field. The trap center follows
// x_eq(t) = -m_j * lambda_bar * cos(omega_B t): rotating B in the yz plane
// flips the space-referenced spin projection and moves the equilibrium from
// +lambda_bar to -lambda_bar and back. Axial and y motion decouple at this
// order, so only the transverse x axis is integrated.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "magnus/constants.hpp"
#include "magnus/errors.hpp"

namespace magnus {

struct TrapSpec {
    double wavelength; // m
    double waist_w0;   // m, 1/e^2 intensity radius at the focus
    double depth_u0;   // J
    double mass;       // kg

    double lambda_bar() const { return wavelength / (2.0 * std::numbers::pi); }

    static TrapSpec make(double wavelength, double waist, double depth, double mass) {
        if (!(wavelength > 0.0 && waist > 0.0 && depth > 0.0 && mass > 0.0))
            throw std::invalid_argument("trap parameters must be positive");
        return {wavelength, waist, depth, mass};
    }
};

struct DriveSpec {
    double omega_b;  // rad/s rotation rate of B in the yz plane
    int m_j;         // B-referenced spin projection, |m_j| <= 1; m_j = 0 is untrapped here
    double b_field;  // T, enters the adiabaticity estimate only

    static DriveSpec make(double omega_b, int m_j, double b_field) {
        if (!(omega_b > 0.0)) throw std::invalid_argument("drive frequency must be positive");
        if (m_j < -1 || m_j > 1) throw std::invalid_argument("|m_j| must be 0 or 1");
        return {omega_b, m_j, b_field};
    }
};

// Radial frequency of the Gaussian-beam potential U(x) = -U0 exp(-2x^2/w0^2)
// expanded to second order: omega = sqrt(4 U0 / (m w0^2)).
inline double trap_frequency(const TrapSpec& trap) {
    return std::sqrt(4.0 * trap.depth_u0 / (trap.mass * trap.waist_w0 * trap.waist_w0));
}

struct EscapeEstimate {
    double n_cycles;   // drive cycles until escape, resonant harmonic model
    double exit_speed; // m/s at the escape energy
};

// Closed-form resonant driven harmonic oscillator with drive amplitude
// lambda_bar: the envelope grows as x_amp(t) = (omega lambda_bar / 2) t and the
// atom is out once (1/2) m omega^2 x_amp^2 = U0, i.e. x_amp = w0/sqrt(2).
// Hence n_cycles = w0 / (sqrt(2) pi lambda_bar) and v_exit = omega w0/sqrt(2).
inline EscapeEstimate resonant_escape_estimate(const TrapSpec& trap) {
    const double omega = trap_frequency(trap);
    const double n = trap.waist_w0 / (std::numbers::sqrt2 * std::numbers::pi * trap.lambda_bar());
    return {n, omega * trap.waist_w0 / std::numbers::sqrt2};
}

// Larmor-to-drive frequency ratio (mu_B B / hbar) / omega_B. The spin follows
// the rotating field adiabatically when the ratio is large; we flag > 100.
inline double adiabaticity_ratio(const DriveSpec& drive) {
    if (drive.b_field <= 0.0) return 0.0;
    return si::bohr_magneton * drive.b_field / si::planck_reduced / drive.omega_b;
}

inline bool is_adiabatic(const DriveSpec& drive) { return adiabaticity_ratio(drive) > 100.0; }

enum class TrapModel {
    gaussian, // U = -U0 exp(-2 xi^2 / w0^2); captures the anharmonic escape
    harmonic  // U = -U0 + (1/2) m omega^2 xi^2; control matching the closed form
};

struct Trajectory {
    std::vector<double> times;      // s
    std::vector<double> positions;  // m
    std::vector<double> velocities; // m/s
    std::vector<double> energies;   // J, offset so that E = U0 marks escape
    std::optional<double> escape_time; // s

    std::optional<double> escape_cycles(double omega_b) const {
        if (!escape_time) return std::nullopt;
        return *escape_time * omega_b / (2.0 * std::numbers::pi);
    }
};

struct SimOptions {
    TrapModel model = TrapModel::gaussian;
    std::optional<double> x0;              // default: start at the initial trap center
    double v0 = 0.0;
    std::optional<double> drive_amplitude; // default lambda_bar; 0 turns the drive off
};

// Fixed-step classical RK4 for m x'' = -dU/dx with the moving trap center.
// Escape is declared when E = (1/2) m v^2 + U + U0 exceeds U0 (unbound) or the
// atom has left the beam, |x| > 3 w0.
inline Trajectory simulate(const TrapSpec& trap, const DriveSpec& drive, double dt, double t_max,
                           const SimOptions& opt = {}) {
    const double omega = trap_frequency(trap);
    const double dt_bound = 2.0 * std::numbers::pi / (100.0 * std::max(omega, drive.omega_b));
    if (!(dt > 0.0) || dt > dt_bound)
        throw StepTooLarge("dt must satisfy dt <= 2 pi / (100 max(omega, omega_B))");
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");

    const double amp = opt.drive_amplitude.value_or(trap.lambda_bar());
    const double u0 = trap.depth_u0;
    const double w0 = trap.waist_w0;
    const double m = trap.mass;
    const double kspring = m * omega * omega;

    const auto center = [&](double t) { return -drive.m_j * amp * std::cos(drive.omega_b * t); };
    const auto potential = [&](double x, double t) {
        const double xi = x - center(t);
        if (opt.model == TrapModel::harmonic) return -u0 + 0.5 * kspring * xi * xi;
        return -u0 * std::exp(-2.0 * xi * xi / (w0 * w0));
    };
    const auto accel = [&](double x, double t) {
        const double xi = x - center(t);
        if (opt.model == TrapModel::harmonic) return -kspring * xi / m;
        return -4.0 * u0 * xi / (m * w0 * w0) * std::exp(-2.0 * xi * xi / (w0 * w0));
    };

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / dt));
    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.positions.reserve(n_steps + 1);
    traj.velocities.reserve(n_steps + 1);
    traj.energies.reserve(n_steps + 1);

    double x = opt.x0.value_or(center(0.0));
    double v = opt.v0;
    for (std::size_t step = 0;; ++step) {
        const double t = step * dt;
        const double energy = 0.5 * m * v * v + potential(x, t) + u0;
        traj.times.push_back(t);
        traj.positions.push_back(x);
        traj.velocities.push_back(v);
        traj.energies.push_back(energy);

        if (energy > u0 || std::abs(x) > 3.0 * w0) {
            traj.escape_time = t;
            break;
        }
        if (t >= t_max) break;

        const double k1x = v, k1v = accel(x, t);
        const double k2x = v + 0.5 * dt * k1v, k2v = accel(x + 0.5 * dt * k1x, t + 0.5 * dt);
        const double k3x = v + 0.5 * dt * k2v, k3v = accel(x + 0.5 * dt * k2x, t + 0.5 * dt);
        const double k4x = v + dt * k3v, k4v = accel(x + dt * k3x, t + dt);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return traj;
}

} // namespace magnus
