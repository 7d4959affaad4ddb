#pragma once

// Beam deflection by the induced circular dipole, the transverse reaction
// force, displacement/detuning scans, the in-plane radiant profile, and the
// off-axis equilibrium position of a tweezed atom.
//
// Sign convention: delta_theta is the signed x-tilt of the mean wavevector,
// delta_theta = delta<k>_x / k, and the reaction force is F_x/(P/c) =
// -delta_theta, so delta_theta > 0 always coincides with F_x < 0.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "magnus/radiometry.hpp"

namespace magnus {

enum class Method { analytic, numeric };

struct DeflectionResult {
    Vec3 delta_k;                  // change of the mean wavevector, units of k
    double delta_theta = 0.0;      // signed deflection angle, rad
    double force_x = 0.0;          // transverse force in units of P/c (= -delta_theta)
    Method method = Method::numeric;
    double achieved_tol = 0.0;     // worst adaptive-quadrature tolerance reached
    double scattered_amplitude = 0.0; // Esc used (per unit E0 if beam amplitude is 1)

    static DeflectionResult from_delta_k(const Vec3& dk, Method m, double tol, double esc) {
        return {dk, dk.x, -dk.x, m, tol, esc};
    }
};

// delta<k> = (k/P) Int u_Omega J_if dOmega over the beam support, with the
// scattered amplitude from energy conservation at the same kd. The scattered
// term itself carries no momentum; its first moment over the full sphere is
// evaluated as a consistency check, never added.
inline DeflectionResult deflection_numeric(const IncidentBeam& beam, double delta, double gamma,
                                           int sigma, double kd = 0.0,
                                           const AdaptiveOptions& opt = {}) {
    const double esc = solve_scattered_amplitude(beam, delta, gamma, sigma, kd, opt);
    const Dipole dip = Dipole::make(sigma, delta, gamma, esc, kd);

    const auto power = integrate_adaptive(
        [&](const Direction& dir) { return radiant_components(beam, dip, dir).j_in; },
        support_domain(beam), opt);
    const auto moment = integrate_adaptive(
        [&](const Direction& dir) {
            return dir.unit() * radiant_components(beam, dip, dir).j_if;
        },
        support_domain(beam), opt);

    // antipodal symmetry of the dipole pattern: Int u_Omega J_sc dOmega = 0
    const SphericalGrid check_grid(32, 32, Domain::full());
    const Vec3 sc_moment = integrate(
        [&](const Direction& dir) { return dir.unit() * (0.5 * dipole_field(dip, dir).norm2()); },
        check_grid);
    const double sc_scale = esc * esc * 8.0 * std::numbers::pi / 3.0;
    if (sc_moment.norm() > 1e-8 * sc_scale)
        throw std::logic_error("scattered radiant intensity carries net momentum");

    const Vec3 dk = moment.value / power.value;
    const double tol = std::max(power.achieved, moment.achieved);
    return DeflectionResult::from_delta_k(dk, Method::numeric, tol, esc);
}

// Leading-order closed form: delta_theta = (3/4) gamma delta/(gamma^2+delta^2)
// * {w^4 (Gauss); r^4/4 (tophat)} * (1 - sigma kd), valid up to order (kd)^4.
// The forward component delta<k>_z = -(3/2) gamma^2/(gamma^2+delta^2) * w^2
// (Gauss) resp. -(3/4) ... r^2 (tophat) is kd-independent at this order.
inline DeflectionResult deflection_analytic(const BeamShape& shape, double delta, double gamma,
                                            int sigma, double kd = 0.0) {
    const double d = delta / gamma;
    const double lorentz = d / (1.0 + d * d); // gamma*delta/(gamma^2+delta^2)
    const double w = shape.width;
    const bool gauss = shape.kind == BeamShape::Kind::gaussian;
    const double quartic = gauss ? w * w * w * w : w * w * w * w / 4.0;
    // sigma * (1 - sigma kd): the base deflection mirrors with the handedness
    const double dtheta = 0.75 * lorentz * quartic * (sigma - kd);
    const double zpref = gauss ? -1.5 : -0.75;
    const double dkz = zpref * w * w / (1.0 + d * d);
    return DeflectionResult::from_delta_k({dtheta, 0.0, dkz}, Method::analytic, 0.0, 0.0);
}

inline DeflectionResult deflect(const IncidentBeam& beam, double delta, double gamma, int sigma,
                                double kd, Method method, const AdaptiveOptions& opt = {}) {
    return method == Method::analytic ? deflection_analytic(beam.shape, delta, gamma, sigma, kd)
                                      : deflection_numeric(beam, delta, gamma, sigma, kd, opt);
}

// Root of F_x(kd) = 0 inside kd in [0, 2 sigma]: bisection to bracket the zero,
// then secant refinement. The bracket corresponds to the (kd)^4-accurate range
// of the displaced-dipole expansion; roots beyond |kd| = 2 are unphysical.
inline double equilibrium_displacement(const IncidentBeam& beam, double delta, double gamma,
                                       int sigma, Method method = Method::numeric,
                                       const AdaptiveOptions& opt = {}) {
    if (delta == 0.0)
        throw std::invalid_argument("equilibrium displacement needs a non-zero detuning");
    const auto force = [&](double kd) {
        return deflect(beam, delta, gamma, sigma, kd, method, opt).force_x;
    };

    double lo = std::min(0.0, 2.0 * sigma), hi = std::max(0.0, 2.0 * sigma);
    double flo = force(lo), fhi = force(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NoRoot("transverse force does not change sign for kd in [0, 2 sigma]");

    constexpr double force_tol = 1e-12;
    constexpr double interval_tol = 1e-10;
    while (hi - lo > interval_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = force(mid);
        if (std::abs(fmid) < force_tol) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    // secant polish inside the final bracket
    double a = lo, b = hi, fa = flo, fb = fhi;
    for (int i = 0; i < 8 && fb != fa; ++i) {
        const double c = b - fb * (b - a) / (fb - fa);
        if (c < lo || c > hi) break;
        a = b;
        fa = fb;
        b = c;
        fb = force(b);
        if (std::abs(fb) < force_tol) break;
    }
    return b;
}

struct ScanAxis {
    enum class Kind { detuning, displacement };

    Kind kind;
    double lo, hi;
    double fixed; // kd for a detuning scan, delta for a displacement scan

    static ScanAxis detuning(double lo, double hi, double kd = 0.0) {
        return {Kind::detuning, lo, hi, kd};
    }
    static ScanAxis displacement(double lo, double hi, double delta) {
        return {Kind::displacement, lo, hi, delta};
    }
};

struct ScanRow {
    double delta;
    double kd;
    DeflectionResult analytic;
    DeflectionResult numeric;
};

// Evaluates both paths on a uniform grid along the chosen axis; rows carry all
// inputs and come back in grid order.
inline std::vector<ScanRow> scan(const IncidentBeam& beam, double gamma, int sigma,
                                 const ScanAxis& axis, int n_points,
                                 const AdaptiveOptions& opt = {}) {
    if (n_points < 2) throw std::invalid_argument("scan needs at least 2 points");
    std::vector<ScanRow> rows;
    rows.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double t = axis.lo + (axis.hi - axis.lo) * i / (n_points - 1);
        const double delta = axis.kind == ScanAxis::Kind::detuning ? t : axis.fixed;
        const double kd = axis.kind == ScanAxis::Kind::displacement ? t : axis.fixed;
        rows.push_back({delta, kd, deflection_analytic(beam.shape, delta, gamma, sigma, kd),
                        deflection_numeric(beam, delta, gamma, sigma, kd, opt)});
    }
    return rows;
}

struct ProfilePoint {
    double theta_signed; // abscissa; negative values sample phi = pi
    double j_in, j_sc, j_if, j_total; // normalized to J_in on axis
};

// Radiant intensity in the dipole plane, J(theta, 0) for theta >= 0 and
// J(theta, pi) mapped to a negative abscissa, normalized so J_in(0) = 1.
// The scattered amplitude comes from the energy-conservation solve at kd = 0.
inline std::vector<ProfilePoint> radiant_profile(const IncidentBeam& beam, double delta,
                                                 double gamma, int sigma, int n_theta,
                                                 const AdaptiveOptions& opt = {}) {
    if (n_theta < 16) throw std::invalid_argument("profile needs at least 16 polar samples");
    const double esc = solve_scattered_amplitude(beam, delta, gamma, sigma, 0.0, opt);
    const Dipole dip = Dipole::make(sigma, delta, gamma, esc, 0.0);
    const double j0 = 0.5 * beam.amplitude * beam.amplitude;
    const double span = std::min(std::numbers::pi / 2.0, 2.0 * beam.shape.width);

    std::vector<ProfilePoint> out;
    out.reserve(2 * n_theta - 1);
    for (int i = -(n_theta - 1); i <= n_theta - 1; ++i) {
        const double theta = span * std::abs(i) / (n_theta - 1);
        const double phi = i < 0 ? std::numbers::pi : 0.0;
        const RadiantComponents c = radiant_components(beam, dip, {theta, phi});
        out.push_back({i < 0 ? -theta : theta, c.j_in / j0, c.j_sc / j0, c.j_if / j0,
                       c.total() / j0});
    }
    return out;
}

} // namespace magnus
