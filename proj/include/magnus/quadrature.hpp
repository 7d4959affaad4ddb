#pragma once

// Deterministic tensor-product quadrature on the unit sphere: Gauss-Legendre
// nodes in cos(theta) mapped to the domain, uniform (trapezoid) rule in phi.
// The phi rule is exact for trigonometric polynomials up to degree n_phi - 1;
// the theta rule is exact for polynomials in cos(theta) up to degree
// 2*n_theta - 1. Summation is compensated (Kahan) in a fixed node order, so
// repeated calls are bit-identical.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "magnus/errors.hpp"
#include "magnus/fields.hpp"
#include "magnus/vec.hpp"

namespace magnus {

// Integration domain: full sphere or a polar cap theta <= theta_max.
struct Domain {
    double theta_max = std::numbers::pi;

    static Domain full() { return {std::numbers::pi}; }
    static Domain cap(double theta_max) {
        if (!(theta_max > 0.0) || theta_max > std::numbers::pi)
            throw std::invalid_argument("cap angle must lie in (0, pi]");
        return {theta_max};
    }

    double solid_angle() const { return 2.0 * std::numbers::pi * (1.0 - std::cos(theta_max)); }
};

// Domain on which a beam's angular spectrum is supported. Tophat integrals use
// the cap ending exactly at the discontinuity, which keeps the rule spectral.
inline Domain support_domain(const IncidentBeam& beam) {
    return Domain::cap(beam.shape.support_angle());
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

// Compensated accumulator; works for any component-wise additive type.
template <class T>
struct Kahan {
    T sum{};
    T comp{};

    void add(const T& v) {
        const T y = v - comp;
        const T t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(complexd v) { return std::abs(v); }
inline double magnitude(const Vec3& v) {
    return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}
inline double magnitude(const CVec3& v) {
    return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

} // namespace detail

class SphericalGrid {
  public:
    SphericalGrid(int n_theta, int n_phi, Domain domain) : n_phi_(n_phi), domain_(domain) {
        if (n_theta < 4 || n_phi < 4)
            throw std::invalid_argument("spherical grid needs at least 4 nodes per axis");
        std::vector<double> x, w;
        detail::gauss_legendre(n_theta, x, w);
        // map [-1,1] onto cos(theta) in [cos(theta_max), 1]
        const double a = std::cos(domain.theta_max);
        const double half = 0.5 * (1.0 - a);
        const double mid = 0.5 * (1.0 + a);
        theta_.resize(n_theta);
        wtheta_.resize(n_theta);
        for (int i = 0; i < n_theta; ++i) {
            theta_[i] = std::acos(mid + half * x[i]);
            wtheta_[i] = half * w[i];
        }
    }

    int n_theta() const { return static_cast<int>(theta_.size()); }
    int n_phi() const { return n_phi_; }
    const Domain& domain() const { return domain_; }
    double theta_node(int i) const { return theta_[i]; }
    double theta_weight(int i) const { return wtheta_[i]; }
    double phi_node(int j) const { return 2.0 * std::numbers::pi * j / n_phi_; }
    double phi_weight() const { return 2.0 * std::numbers::pi / n_phi_; }

    double weight_sum() const {
        detail::Kahan<double> acc;
        for (int i = 0; i < n_theta(); ++i)
            for (int j = 0; j < n_phi_; ++j) acc.add(wtheta_[i] * phi_weight());
        return acc.sum;
    }

  private:
    std::vector<double> theta_, wtheta_;
    int n_phi_;
    Domain domain_;
};

// Tensor-product integral of f(Omega) over the grid domain; the cos(theta)
// substitution absorbs the sin(theta) Jacobian. Fixed evaluation order.
template <class F>
auto integrate(F&& f, const SphericalGrid& grid) {
    using T = decltype(f(Direction{}));
    detail::Kahan<T> acc;
    const double wphi = grid.phi_weight();
    for (int i = 0; i < grid.n_theta(); ++i) {
        const double wt = grid.theta_weight(i) * wphi;
        for (int j = 0; j < grid.n_phi(); ++j)
            acc.add(f(Direction{grid.theta_node(i), grid.phi_node(j)}) * wt);
    }
    return acc.sum;
}

template <class F>
CVec3 integrate_vec3(F&& f, const SphericalGrid& grid) {
    return integrate(std::forward<F>(f), grid);
}

struct AdaptiveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;     // extra absolute floor for integrals that vanish
    int n_start = 8;
    int n_max = 1 << 14;      // per-axis node cap
};

template <class T>
struct AdaptiveResult {
    T value{};
    double achieved = 0.0; // relative difference of the last two refinements
    int nodes_per_axis = 0;
};

// Repeatedly doubles (n_theta, n_phi) until two successive estimates agree to
// rel_tol (or abs_tol). Throws NoConvergence once the node cap is exceeded.
template <class F>
auto integrate_adaptive(F&& f, Domain domain, const AdaptiveOptions& opt = {}) {
    using T = decltype(f(Direction{}));
    if (!(opt.rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");

    T prev{};
    bool have_prev = false;
    double achieved = std::numeric_limits<double>::infinity();
    for (int n = opt.n_start; n <= opt.n_max; n *= 2) {
        const SphericalGrid grid(n, n, domain);
        const T value = integrate(f, grid);
        if (have_prev) {
            const double diff = detail::magnitude(value - prev);
            const double scale = detail::magnitude(value);
            achieved = diff / std::max(scale, 1e-300);
            if (diff <= opt.rel_tol * scale + opt.abs_tol)
                return AdaptiveResult<T>{value, achieved, n};
        }
        prev = value;
        have_prev = true;
    }
    throw NoConvergence("quadrature did not reach tolerance " + std::to_string(opt.rel_tol) +
                            " before the node cap of " + std::to_string(opt.n_max) +
                            " per axis (achieved " + std::to_string(achieved) + ")",
                        achieved);
}

} // namespace magnus
