#pragma once

// Focal-plane synthesis from the angular spectrum,
//   E~(x, y, 0) = k^2 Int E(Omega) e^{i k (u_x x + u_y y)} sin(theta) dtheta dphi,
// over the beam's support cap, with k = 1. The plane-wave phase factor is kept
// explicit; at the origin it reduces to the bare angular integral. Positions
// are in units of 1/k.

#include <cmath>
#include <numbers>
#include <vector>

#include "magnus/quadrature.hpp"
#include "magnus/radiometry.hpp"

namespace magnus {

// Synthesis domain. The Gaussian spectrum is cut at 6 w_theta (envelope below
// e^-36 there), which keeps the quadrature order tied to the beam, not to the
// full half space.
inline Domain focal_domain(const IncidentBeam& beam) {
    if (beam.shape.kind == BeamShape::Kind::tophat) return support_domain(beam);
    return Domain::cap(std::min(std::numbers::pi / 2.0, 6.0 * beam.shape.width));
}

inline CVec3 focal_field(const IncidentBeam& beam, double x, double y,
                         const SphericalGrid& grid) {
    return integrate(
        [&](const Direction& dir) {
            const Vec3 u = dir.unit();
            const complexd phase = std::polar(1.0, u.x * x + u.y * y);
            return phase * incident_field(beam, dir);
        },
        grid);
}

inline CVec3 focal_field(const IncidentBeam& beam, double x, double y) {
    return focal_field(beam, x, y, SphericalGrid(64, 64, focal_domain(beam)));
}

// Magnetic field of the same superposition, H(Omega) = u_Omega x E(Omega) with
// Z0 = 1, synthesized with the identical phase factor. Needed for the
// through-plane power check.
inline CVec3 focal_field_h(const IncidentBeam& beam, double x, double y,
                           const SphericalGrid& grid) {
    return integrate(
        [&](const Direction& dir) {
            const Vec3 u = dir.unit();
            const complexd phase = std::polar(1.0, u.x * x + u.y * y);
            const CVec3 e = incident_field(beam, dir);
            return phase * CVec3{u.y * e.z - u.z * e.y, u.z * e.x - u.x * e.z,
                                 u.x * e.y - u.y * e.x};
        },
        grid);
}

struct FocalMap {
    std::vector<double> xs, ys; // uniform Cartesian grid, units of 1/k
    std::vector<CVec3> e, h;    // row-major, index = iy * xs.size() + ix

    int nx() const { return static_cast<int>(xs.size()); }
    int ny() const { return static_cast<int>(ys.size()); }
    const CVec3& e_at(int ix, int iy) const { return e[iy * xs.size() + ix]; }
    const CVec3& h_at(int ix, int iy) const { return h[iy * xs.size() + ix]; }
    double intensity(int ix, int iy) const { return e_at(ix, iy).norm2(); }
    double dx() const { return xs[1] - xs[0]; }
};

struct FocalMapOptions {
    int samples = 129;         // per axis; raised automatically to >= 8.5 per wavelength
    double extent_radii = 4.0; // half-extent in units of the expected spot radius
    int quad_nodes = 0;        // 0 = order picked from the corner phase
};

// Expected focal spot radius: w0 = 2/w_theta for a Gaussian (w_theta w0 =
// lambda/pi), first Airy null at 3.8317/sin(r_theta) for a tophat.
inline double expected_spot_radius(const BeamShape& shape) {
    if (shape.kind == BeamShape::Kind::gaussian) return 2.0 / shape.width;
    return 3.8317059702075125 / std::sin(shape.width);
}

inline FocalMap focal_map(const IncidentBeam& beam, const FocalMapOptions& opt = {}) {
    const double half = opt.extent_radii * expected_spot_radius(beam.shape);
    const Domain domain = focal_domain(beam);

    int n = opt.samples;
    const int needed = static_cast<int>(
        std::ceil(2.0 * half / (2.0 * std::numbers::pi) * 8.5));
    if (n < needed) n = needed;
    if (n % 2 == 0) ++n; // odd count keeps a sample exactly on axis

    // the synthesis integrand oscillates up to corner_phase radians over the cap
    int nq = opt.quad_nodes;
    if (nq <= 0) {
        const double corner_phase = half * std::numbers::sqrt2 * std::sin(domain.theta_max);
        nq = std::max(40, static_cast<int>(std::ceil(1.15 * corner_phase)) + 24);
    }
    const SphericalGrid grid(nq, nq, domain);

    FocalMap map;
    map.xs.resize(n);
    map.ys.resize(n);
    for (int i = 0; i < n; ++i) map.xs[i] = map.ys[i] = -half + 2.0 * half * i / (n - 1);
    map.e.assign(static_cast<std::size_t>(n) * n, {});
    map.h.assign(static_cast<std::size_t>(n) * n, {});

    // flatten the weighted node fields once
    struct Node {
        CVec3 e, h;     // field times quadrature weight
        double ux, uy;  // transverse direction components
        complexd phase; // running e^{i(ux x + uy y)} along the current row
        complexd step;  // phase increment per dx
    };
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(grid.n_theta()) * grid.n_phi());
    for (int i = 0; i < grid.n_theta(); ++i)
        for (int j = 0; j < grid.n_phi(); ++j) {
            const Direction dir{grid.theta_node(i), grid.phi_node(j)};
            const Vec3 u = dir.unit();
            const CVec3 e = incident_field(beam, dir);
            const double w = grid.theta_weight(i) * grid.phi_weight();
            Node nd;
            nd.e = w * e;
            nd.h = w * CVec3{u.y * e.z - u.z * e.y, u.z * e.x - u.x * e.z,
                            u.x * e.y - u.y * e.x};
            nd.ux = u.x;
            nd.uy = u.y;
            nodes.push_back(nd);
        }

    const double dx = map.xs[1] - map.xs[0];
    for (int iy = 0; iy < n; ++iy) {
        const double y = map.ys[iy];
        for (auto& nd : nodes) {
            nd.phase = std::polar(1.0, nd.ux * map.xs[0] + nd.uy * y);
            nd.step = std::polar(1.0, nd.ux * dx);
        }
        for (int ix = 0; ix < n; ++ix) {
            CVec3 esum, hsum;
            // refresh the recurrence periodically to cap the rounding drift
            if (ix > 0 && ix % 64 == 0)
                for (auto& nd : nodes)
                    nd.phase = std::polar(1.0, nd.ux * map.xs[ix] + nd.uy * y);
            for (auto& nd : nodes) {
                esum += nd.phase * nd.e;
                hsum += nd.phase * nd.h;
                nd.phase *= nd.step;
            }
            map.e[static_cast<std::size_t>(iy) * n + ix] = esum;
            map.h[static_cast<std::size_t>(iy) * n + ix] = hsum;
        }
    }
    return map;
}

// Power through the focal plane, (1/2) Int Re[E~ x H~*]_z dx dy, divided by the
// Parseval constant (2 pi k)^2 of the synthesis so it is directly comparable
// with the angular beam power Int J_in dOmega.
inline double plane_power(const FocalMap& map) {
    detail::Kahan<double> acc;
    for (int iy = 0; iy < map.ny(); ++iy)
        for (int ix = 0; ix < map.nx(); ++ix) {
            const CVec3& e = map.e_at(ix, iy);
            const CVec3& h = map.h_at(ix, iy);
            acc.add(0.5 * (e.x * std::conj(h.y) - e.y * std::conj(h.x)).real());
        }
    const double cell = map.dx() * map.dx();
    const double parseval = 4.0 * std::numbers::pi * std::numbers::pi;
    return acc.sum * cell / parseval;
}

struct SpotMetrics {
    double spot_radius;  // fitted 1/e^2 waist (Gaussian) or first null radius (tophat)
    double peak_ratio;   // map maximum over the on-axis sample; ~1 when centered
    double fit_residual; // max |fit - data| / peak over the fitted samples (Gaussian only)
};

namespace detail {

inline SpotMetrics fit_gaussian_spot(const FocalMap& map) {
    // linear least squares of ln I against r^2 over samples above threshold
    const int n = map.nx();
    const int mid = n / 2;
    const double peak = map.intensity(mid, mid);
    const double threshold = 1e-3 * peak;
    double sxx = 0, sx = 0, sy = 0, sxy = 0, count = 0;
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const double intensity = map.intensity(ix, iy);
            if (intensity < threshold) continue;
            const double r2 = map.xs[ix] * map.xs[ix] + map.ys[iy] * map.ys[iy];
            const double li = std::log(intensity);
            sx += r2;
            sy += li;
            sxx += r2 * r2;
            sxy += r2 * li;
            count += 1;
        }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / count;
    if (!(slope < 0.0)) throw FitFailed("intensity map is not Gaussian-peaked");
    const double waist = std::sqrt(-2.0 / slope);

    double residual = 0.0;
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const double intensity = map.intensity(ix, iy);
            if (intensity < threshold) continue;
            const double r2 = map.xs[ix] * map.xs[ix] + map.ys[iy] * map.ys[iy];
            const double fit = std::exp(intercept + slope * r2);
            residual = std::max(residual, std::abs(fit - intensity) / peak);
        }
    if (residual > 0.10) throw FitFailed("Gaussian fit residual above 10% of peak");

    double map_max = 0.0;
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) map_max = std::max(map_max, map.intensity(ix, iy));
    return {waist, map_max / peak, residual};
}

inline SpotMetrics find_first_null(const FocalMap& map) {
    // first sign change of the dominant (real) field component along +x
    const int n = map.nx();
    const int mid = n / 2;
    const double peak = map.intensity(mid, mid);
    for (int ix = mid; ix + 1 < n; ++ix) {
        const double a = map.e_at(ix, mid).x.real();
        const double b = map.e_at(ix + 1, mid).x.real();
        if ((a > 0.0) != (b > 0.0)) {
            const double x0 = map.xs[ix] - a * (map.xs[ix + 1] - map.xs[ix]) / (b - a);
            double map_max = 0.0;
            for (int iy = 0; iy < n; ++iy)
                for (int jx = 0; jx < n; ++jx)
                    map_max = std::max(map_max, map.intensity(jx, iy));
            return {x0, map_max / peak, 0.0};
        }
    }
    throw FitFailed("no field null inside the sampled focal map");
}

} // namespace detail

// Spot size from a synthesized map: least-squares Gaussian fit for Gaussian
// beams, radial root find of the Airy null for tophats. The map must resolve
// the wavelength (>= 8 samples per lambda = 2 pi / k).
inline SpotMetrics spot_metrics(const FocalMap& map, BeamShape::Kind kind) {
    if (map.nx() < 2 || map.dx() > 2.0 * std::numbers::pi / 8.0)
        throw std::invalid_argument("focal map too coarse: need >= 8 samples per wavelength");
    return kind == BeamShape::Kind::gaussian ? detail::fit_gaussian_spot(map)
                                             : detail::find_first_null(map);
}

} // namespace magnus
