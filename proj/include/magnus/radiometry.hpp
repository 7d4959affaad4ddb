#pragma once

// Radiant-intensity components J_in, J_sc, J_if of the superposed incident and
// scattered waves, beam power, incident mean wavevector, and the energy
// conservation solve for the scattered amplitude.
//
// J(Omega) = |E(Omega)|^2 / 2 Z0 with Z0 = 1 in the dimensionless core; every
// reported ratio (Esc/E0, deflection angle, F_x/(P/c)) is Z0-free.

#include <cmath>
#include <numbers>

#include "magnus/fields.hpp"
#include "magnus/quadrature.hpp"

namespace magnus {

struct RadiantComponents {
    double j_in = 0.0;
    double j_sc = 0.0;
    double j_if = 0.0; // interference cross term; may be negative

    double total() const { return j_in + j_sc + j_if; }
};

// Pointwise decomposition J = J_in + J_sc + J_if at one direction. The
// interference term carries the displaced-dipole phase through dipole_field.
inline RadiantComponents radiant_components(const IncidentBeam& beam, const Dipole& dip,
                                            const Direction& dir) {
    const CVec3 e_in = incident_field(beam, dir);
    const CVec3 e_sc = dipole_field(dip, dir);
    RadiantComponents out;
    out.j_in = 0.5 * e_in.norm2();
    out.j_sc = 0.5 * e_sc.norm2();
    out.j_if = cdot(e_in, e_sc).real(); // 2 Re[E_in^* . E_sc] / 2Z0
    return out;
}

// Angular factor of the closed-form interference term,
//   f(Omega, delta) = [gamma (cos t cos^2 p + sin^2 p) - sigma delta sin t cos p]
//                     / sqrt(gamma^2 + delta^2),
// equal to sin(alpha) on axis.
inline double interference_angular_factor(const Direction& dir, double delta, double gamma,
                                          int sigma = +1) {
    const double ct = std::cos(dir.theta), st = std::sin(dir.theta);
    const double cp = std::cos(dir.phi), sp = std::sin(dir.phi);
    const double d = delta / gamma;
    return (ct * cp * cp + sp * sp - sigma * d * st * cp) / std::sqrt(1.0 + d * d);
}

// Closed-form J_if for an undisplaced dipole:
//   J_if(Omega) = -(Esc E0 / sqrt(2) Z0) * envelope(theta) * f(Omega, delta).
// Must agree with the j_if assembled from the fields.
inline double interference_analytic(const IncidentBeam& beam, const Dipole& dip,
                                    const Direction& dir, double gamma = 1.0) {
    const double envelope = beam.amplitude * beam.shape.envelope(dir.theta);
    return -dip.scattered_amplitude * envelope / std::numbers::sqrt2 *
           interference_angular_factor(dir, dip.detuning * gamma, gamma, dip.handedness);
}

struct BeamPower {
    double numeric;  // quadrature of J_in over the beam support
    double analytic; // closed form: exact for the tophat, leading order for the Gaussian
};

// Closed-form power: P = (E0^2/2Z0) * { pi w^2/2 (Gauss, leading order);
// 2 pi (1 - cos r) (tophat, exact) }.
inline double beam_power_analytic(const IncidentBeam& beam) {
    const double j0 = 0.5 * beam.amplitude * beam.amplitude;
    const double w = beam.shape.width;
    if (beam.shape.kind == BeamShape::Kind::gaussian)
        return j0 * std::numbers::pi * w * w / 2.0;
    return j0 * 2.0 * std::numbers::pi * (1.0 - std::cos(w));
}

inline BeamPower beam_power(const IncidentBeam& beam, const AdaptiveOptions& opt = {}) {
    const auto r = integrate_adaptive(
        [&](const Direction& dir) {
            const CVec3 e = incident_field(beam, dir);
            return 0.5 * e.norm2();
        },
        support_domain(beam), opt);
    return {r.value, beam_power_analytic(beam)};
}

// Closed-form z-component of <k>_in / k: 1 - w^2/4 + O(w^4) for the Gaussian,
// cos^2(r/2) exactly for the tophat.
inline double incident_mean_k_z_analytic(const BeamShape& shape) {
    if (shape.kind == BeamShape::Kind::gaussian) return 1.0 - shape.width * shape.width / 4.0;
    const double c = std::cos(shape.width / 2.0);
    return c * c;
}

// <k>_in = k Int u_Omega J_in dOmega / P, in units of k.
inline Vec3 incident_mean_k(const IncidentBeam& beam, const AdaptiveOptions& opt = {}) {
    const auto num = integrate_adaptive(
        [&](const Direction& dir) {
            const CVec3 e = incident_field(beam, dir);
            return dir.unit() * (0.5 * e.norm2());
        },
        support_domain(beam), opt);
    const double p = beam_power(beam, opt).numeric;
    return num.value / p;
}

// Closed-form amplitude ratios Esc/E0 from energy conservation: exact for the
// tophat, leading order in w for the Gaussian.
inline double scattered_amplitude_analytic(const IncidentBeam& beam, double delta,
                                           double gamma = 1.0) {
    const double sin_alpha = std::sin(bloch_phase(delta / gamma));
    const double w = beam.shape.width;
    const double pref = 3.0 * sin_alpha / (4.0 * std::numbers::sqrt2);
    if (beam.shape.kind == BeamShape::Kind::gaussian) return beam.amplitude * pref * w * w;
    const double s = std::sin(w / 2.0);
    return beam.amplitude * pref * s * s * (std::cos(w) + 3.0);
}

// Solves Int [J_if + J_sc] dOmega = 0 for the scattered amplitude. With
// J_if = b Esc (interference of the unit-amplitude dipole wave, beam support)
// and J_sc = a Esc^2 (full sphere, a = (1/2Z0) Int |unit pattern|^2 = 4 pi/3),
// the solution is Esc = -b/a. b must be negative (net absorption); the lowest
// order of the ratio is unaffected by a small displacement kd.
inline double solve_scattered_amplitude(const IncidentBeam& beam, Dipole unit_dip,
                                        const AdaptiveOptions& opt = {}) {
    unit_dip.scattered_amplitude = 1.0;
    const auto b = integrate_adaptive(
        [&](const Direction& dir) { return radiant_components(beam, unit_dip, dir).j_if; },
        support_domain(beam), opt);
    const auto a = integrate_adaptive(
        [&](const Direction& dir) { return 0.5 * dipole_field(unit_dip, dir).norm2(); },
        Domain::full(), opt);
    if (b.value >= 0.0)
        throw DegenerateBeam("interference integral is non-negative: no forward absorption");
    return -b.value / a.value;
}

inline double solve_scattered_amplitude(const IncidentBeam& beam, double delta, double gamma,
                                        int sigma, double kd = 0.0,
                                        const AdaptiveOptions& opt = {}) {
    return solve_scattered_amplitude(beam, Dipole::make(sigma, delta, gamma, 1.0, kd), opt);
}

} // namespace magnus
