#pragma once

// Angular-spectrum building blocks: propagation directions, the focused
// incident beams (Gaussian and angular tophat), and the wave scattered by an
// induced circular dipole.
//
// Unit convention (optics core): lengths in units of 1/k (so k = 1), field
// amplitudes dimensionless, vacuum impedance Z0 = 1. Detunings are expressed
// in units of the transition half-linewidth gamma wherever a single number is
// taken.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "magnus/vec.hpp"

namespace magnus {

// A point on the unit sphere of propagation directions.
struct Direction {
    double theta = 0.0; // polar angle from the +z optical axis, [0, pi]
    double phi = 0.0;   // azimuth, [0, 2*pi)

    Vec3 unit() const {
        const double st = std::sin(theta);
        return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
    }
};

// The x-polarization unit vector transverse to u_Omega, obtained by
// co-rotating x^ with the rotation that takes z^ into u_Omega (rotation by
// theta about z^ x u_Omega).
inline Vec3 polarization_vector(const Direction& dir) {
    const double ct = std::cos(dir.theta);
    const double st = std::sin(dir.theta);
    const double cp = std::cos(dir.phi);
    const double sp = std::sin(dir.phi);
    return {ct * cp * cp + sp * sp, (ct - 1.0) * sp * cp, -st * cp};
}

struct BeamShape {
    enum class Kind { gaussian, tophat };

    Kind kind = Kind::gaussian;
    double width = 0.1; // angular 1/e^2 half-width w_theta, or tophat half-width r_theta

    static BeamShape gaussian(double w_theta) { return validated({Kind::gaussian, w_theta}); }
    static BeamShape tophat(double r_theta) { return validated({Kind::tophat, r_theta}); }

    static BeamShape validated(BeamShape s) {
        if (!(s.width > 0.0) || !(s.width < std::numbers::pi / 2.0))
            throw std::invalid_argument("beam width must lie in (0, pi/2)");
        return s;
    }

    // Angular support half-angle. The Gaussian spectrum is truncated at the
    // half-space boundary theta = pi/2; the truncated tail is O(exp(-(pi/2w)^2)).
    double support_angle() const {
        return kind == Kind::gaussian ? std::numbers::pi / 2.0 : width;
    }

    // Scalar angular envelope, zero outside the support.
    double envelope(double theta) const {
        if (theta > support_angle()) return 0.0;
        if (kind == Kind::tophat) return 1.0;
        const double t = theta / width;
        return std::exp(-t * t);
    }
};

struct IncidentBeam {
    BeamShape shape;
    double amplitude = 1.0; // peak amplitude E0 > 0

    static IncidentBeam make(BeamShape s, double amplitude) {
        if (!(amplitude > 0.0)) throw std::invalid_argument("beam amplitude must be positive");
        return {s, amplitude};
    }
};

// E_in(Omega) = E0 * envelope(theta) * u_x(Omega); purely real.
inline CVec3 incident_field(const IncidentBeam& beam, const Direction& dir) {
    const double a = beam.amplitude * beam.shape.envelope(dir.theta);
    if (a == 0.0) return {};
    return complexd(a) * polarization_vector(dir);
}

// Bloch steady-state phase of the induced dipole relative to the local drive:
// cot(alpha) = -delta/gamma with alpha in (0, pi). On resonance the dipole is
// in quadrature (alpha = pi/2) and the scattered wave attenuates the beam.
inline double bloch_phase(double delta_over_gamma) {
    return std::atan2(1.0, -delta_over_gamma);
}

struct Saturation {
    double s;                 // saturation parameter
    double coherent_fraction; // 1 / (1 + s)
    double incoherent_fraction() const { return s / (1.0 + s); }
};

// s = (I/Isat) / (1 + (delta/gamma)^2); the scattered light is coherent up to
// a fraction s/(1+s), negligible in the far-off-resonance tweezer regime.
inline Saturation saturation(double intensity_over_isat, double delta_over_gamma) {
    if (intensity_over_isat < 0.0) throw std::invalid_argument("intensity must be non-negative");
    const double s = intensity_over_isat / (1.0 + delta_over_gamma * delta_over_gamma);
    return {s, 1.0 / (1.0 + s)};
}

// An induced circular dipole rotating in the xz plane, p ~ u_sigma with
// u_(+1) = (x^ - i z^)/sqrt(2), u_(-1) = (x^ + i z^)/sqrt(2).
struct Dipole {
    int handedness = +1;             // sigma = +/-1
    double detuning = 0.0;           // delta in units of gamma
    double scattered_amplitude = 0.0; // E_sc >= 0
    double displacement_kd = 0.0;    // k*d along x^

    // Test hook for the self-check mutation: flips the sign of the factor i
    // in the scattered wave. Physical value is +1.
    double spiral_sign = +1.0;

    double alpha() const { return bloch_phase(detuning); }

    CVec3 polarization() const {
        const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
        return {complexd(inv_sqrt2, 0.0), complexd(0.0, 0.0),
                complexd(0.0, -handedness * inv_sqrt2)};
    }

    static Dipole make(int sigma, double delta, double gamma, double scattered_amplitude = 0.0,
                       double displacement_kd = 0.0) {
        if (sigma != 1 && sigma != -1) throw std::invalid_argument("handedness must be +1 or -1");
        if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
        if (scattered_amplitude < 0.0)
            throw std::invalid_argument("scattered amplitude must be non-negative");
        return {sigma, delta / gamma, scattered_amplitude, displacement_kd};
    }
};

// Far-field angular spectrum of the dipole wave,
//   E_sc(Omega) = Esc * i e^{i alpha} (u_Omega x u_sigma) x u_Omega * e^{-i kd sin(theta) cos(phi)}.
// The explicit factor i comes from expressing the outgoing spherical wave as an
// angular spectrum of plane waves; it makes a resonant beam attenuate forward.
// The last phase factor accounts for a dipole displaced by d along x^.
inline CVec3 dipole_field(const Dipole& dip, const Direction& dir) {
    const Vec3 u = dir.unit();
    const CVec3 us = dip.polarization();
    const complexd long_comp = dot(u, us);
    // (u x us) x u = us - (u . us) u : transverse projection of the dipole axis
    const CVec3 pattern = us - long_comp * u;
    const double alpha = dip.alpha();
    const double disp_phase = -dip.displacement_kd * std::sin(dir.theta) * std::cos(dir.phi);
    const complexd phase =
        complexd(0.0, dip.spiral_sign) * std::polar(1.0, alpha) * std::polar(1.0, disp_phase);
    return (dip.scattered_amplitude * phase) * pattern;
}

} // namespace magnus
