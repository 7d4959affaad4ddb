#pragma once

#include <stdexcept>
#include <string>

namespace magnus {

// Adaptive quadrature hit its node cap before reaching the requested tolerance.
struct NoConvergence : std::runtime_error {
    double achieved;
    explicit NoConvergence(const std::string& what, double achieved_tol)
        : std::runtime_error(what), achieved(achieved_tol) {}
};

// The interference integral came out non-negative: no net absorption, which
// means the field conventions are inconsistent.
struct DegenerateBeam : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The transverse force does not change sign inside the search bracket.
struct NoRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrator time step above the stability/accuracy bound.
struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spot-size fit did not reproduce the sampled intensity map.
struct FitFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace magnus
