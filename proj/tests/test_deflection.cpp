#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "magnus/deflection.hpp"

using namespace magnus;
using Catch::Approx;

namespace {

// least-squares slope of log(y) against log(x)
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]), ly = std::log(std::abs(ys[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("analytic deflection closed form") {
    SECTION("maximal angles at delta = +-gamma") {
        const auto gauss = deflection_analytic(BeamShape::gaussian(0.6), 1.0, 1.0, +1);
        CHECK(gauss.delta_theta == Approx(3.0 * std::pow(0.6, 4) / 8.0).epsilon(1e-15));
        CHECK(gauss.delta_theta == Approx(0.0486).epsilon(1e-12));
        CHECK(gauss.force_x == Approx(-0.0486).epsilon(1e-12));

        const auto hat = deflection_analytic(BeamShape::tophat(0.6), 1.0, 1.0, +1);
        CHECK(hat.delta_theta == Approx(3.0 * std::pow(0.6, 4) / 32.0).epsilon(1e-15));
        CHECK(hat.delta_theta == Approx(0.01215).epsilon(1e-12));
    }
    SECTION("sign convention binds the angle to the force") {
        for (double delta : {-2.0, -0.5, 0.7, 1.5})
            for (int sigma : {+1, -1}) {
                const auto r = deflection_analytic(BeamShape::gaussian(0.3), delta, 1.0, sigma);
                CHECK(r.force_x == -r.delta_theta);
                CHECK((r.delta_theta > 0.0) == (r.force_x < 0.0));
            }
    }
    SECTION("displacement factor (1 - sigma kd)") {
        const auto base = deflection_analytic(BeamShape::gaussian(0.3), 0.8, 1.0, +1, 0.0);
        const auto shifted = deflection_analytic(BeamShape::gaussian(0.3), 0.8, 1.0, +1, 0.4);
        CHECK(shifted.delta_theta == Approx(base.delta_theta * 0.6).epsilon(1e-13));
        // deflection and force vanish at kd = sigma
        CHECK(deflection_analytic(BeamShape::gaussian(0.3), 0.8, 1.0, +1, 1.0).delta_theta == 0.0);
        CHECK(deflection_analytic(BeamShape::tophat(0.4), -1.3, 1.0, -1, -1.0).delta_theta == 0.0);
    }
    SECTION("odd in the detuning, mirror in the handedness") {
        for (double delta : {0.3, 1.0, 4.0}) {
            const auto plus = deflection_analytic(BeamShape::tophat(0.5), delta, 1.0, +1);
            const auto minus = deflection_analytic(BeamShape::tophat(0.5), -delta, 1.0, +1);
            CHECK(plus.delta_theta == -minus.delta_theta);
            const auto flipped = deflection_analytic(BeamShape::tophat(0.5), delta, 1.0, -1);
            CHECK(flipped.delta_theta == -plus.delta_theta);
        }
    }
    SECTION("resonant maximum of the lorentzian prefactor") {
        const double at_gamma =
            deflection_analytic(BeamShape::gaussian(0.2), 1.0, 1.0, +1).delta_theta;
        for (double delta : {0.2, 0.5, 2.0, 5.0})
            CHECK(deflection_analytic(BeamShape::gaussian(0.2), delta, 1.0, +1).delta_theta <
                  at_gamma);
    }
}

TEST_CASE("numeric deflection") {
    SECTION("pure forward attenuation on resonance") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.2), 1.0);
        const auto r = deflection_numeric(beam, 0.0, 1.0, +1);
        CHECK(std::abs(r.delta_k.x) < 1e-10);
        CHECK(r.delta_k.z < 0.0);
    }
    SECTION("agrees with the closed form at small width") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.1), 1.0);
        const auto num = deflection_numeric(beam, 1.0, 1.0, +1);
        CHECK(num.delta_theta / (3.0 * 1e-4 / 8.0) == Approx(1.0).margin(0.05));
    }
    SECTION("no out-of-plane deflection") {
        for (const BeamShape& shape : {BeamShape::gaussian(0.15), BeamShape::tophat(0.25)})
            for (double delta : {-1.0, 0.6})
                for (double kd : {0.0, 0.7}) {
                    const auto beam = IncidentBeam::make(shape, 1.0);
                    const auto r = deflection_numeric(beam, delta, 1.0, +1, kd);
                    CHECK(std::abs(r.delta_k.y) < 1e-10);
                }
    }
    SECTION("forward component shortens the mean wavevector quadratically") {
        std::vector<double> widths{0.05, 0.075, 0.1, 0.15}, dkz;
        for (double w : widths) {
            const auto beam = IncidentBeam::make(BeamShape::gaussian(w), 1.0);
            const auto r = deflection_numeric(beam, 1.0, 1.0, +1);
            CHECK(r.delta_k.z < 0.0);
            dkz.push_back(r.delta_k.z);
        }
        CHECK(loglog_slope(widths, dkz) == Approx(2.0).margin(0.05));
        // leading-order closed form of the z-component
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.05), 1.0);
        const auto ana = deflection_analytic(beam.shape, 1.0, 1.0, +1);
        CHECK(deflection_numeric(beam, 1.0, 1.0, +1).delta_k.z ==
              Approx(ana.delta_k.z).epsilon(0.01));
    }
    SECTION("quartic scaling law in the beam width") {
        for (auto kind : {BeamShape::Kind::gaussian, BeamShape::Kind::tophat}) {
            std::vector<double> widths{0.05, 0.075, 0.1, 0.15}, dth;
            for (double w : widths) {
                const auto beam = IncidentBeam::make({kind, w}, 1.0);
                dth.push_back(deflection_numeric(beam, 1.0, 1.0, +1).delta_theta);
            }
            CHECK(loglog_slope(widths, dth) == Approx(4.0).margin(0.1));
        }
    }
    SECTION("odd in the detuning") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.1), 1.0);
        const double plus = deflection_numeric(beam, 1.0, 1.0, +1).delta_theta;
        const double minus = deflection_numeric(beam, -1.0, 1.0, +1).delta_theta;
        CHECK(std::abs(plus + minus) / std::abs(plus) < 0.02);
    }
    SECTION("handedness mirror within quadrature tolerance") {
        const auto beam = IncidentBeam::make(BeamShape::tophat(0.3), 1.0);
        const double plus = deflection_numeric(beam, 0.8, 1.0, +1).delta_theta;
        const double minus = deflection_numeric(beam, 0.8, 1.0, -1).delta_theta;
        CHECK(minus == Approx(-plus).epsilon(1e-9));
    }
}

TEST_CASE("equilibrium displacement") {
    SECTION("analytic force model has the exact root") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.2), 1.0);
        CHECK(equilibrium_displacement(beam, -1.0, 1.0, +1, Method::analytic) ==
              Approx(1.0).margin(1e-9));
        CHECK(equilibrium_displacement(beam, 0.7, 1.0, -1, Method::analytic) ==
              Approx(-1.0).margin(1e-9));
    }
    SECTION("numeric root lands within 2% at w = 0.2") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.2), 1.0);
        const double kd = equilibrium_displacement(beam, -1.0, 1.0, +1);
        CHECK(kd == Approx(1.0).margin(0.02));
    }
    SECTION("mirror symmetry in the handedness") {
        const auto beam = IncidentBeam::make(BeamShape::tophat(0.2), 1.0);
        const double plus = equilibrium_displacement(beam, -1.0, 1.0, +1);
        const double minus = equilibrium_displacement(beam, -1.0, 1.0, -1);
        CHECK(minus == Approx(-plus).margin(1e-6));
    }
    SECTION("root drift below 3% across detunings and shapes") {
        for (auto kind : {BeamShape::Kind::gaussian, BeamShape::Kind::tophat})
            for (double delta : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
                const auto beam = IncidentBeam::make({kind, 0.2}, 1.0);
                const double kd = equilibrium_displacement(beam, delta, 1.0, +1);
                INFO("kind " << (kind == BeamShape::Kind::gaussian ? "gauss" : "tophat")
                             << " delta " << delta);
                CHECK(std::abs(kd - 1.0) < 0.03);
            }
    }
    SECTION("zero detuning is rejected") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.2), 1.0);
        CHECK_THROWS_AS(equilibrium_displacement(beam, 0.0, 1.0, +1), std::invalid_argument);
    }
}

TEST_CASE("scans") {
    const auto beam = IncidentBeam::make(BeamShape::gaussian(0.15), 1.0);

    SECTION("detuning scan is odd in the analytic path and flips numerically") {
        const auto rows = scan(beam, 1.0, +1, ScanAxis::detuning(-5.0, 5.0), 11);
        REQUIRE(rows.size() == 11);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& mirror = rows[rows.size() - 1 - i];
            CHECK(rows[i].analytic.delta_theta ==
                  Approx(-mirror.analytic.delta_theta).margin(1e-15));
            if (rows[i].delta > 0.1)
                CHECK(rows[i].numeric.delta_theta * mirror.numeric.delta_theta < 0.0);
        }
    }
    SECTION("displacement scan crosses zero once near kd = 1") {
        const auto rows = scan(beam, 1.0, +1, ScanAxis::displacement(0.0, 2.0, 1.0), 21);
        int crossings = 0;
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if ((rows[i - 1].numeric.force_x > 0.0) != (rows[i].numeric.force_x > 0.0)) {
                ++crossings;
                lo = rows[i - 1].kd;
                hi = rows[i].kd;
            }
        CHECK(crossings == 1);
        CHECK(lo >= 0.9);
        CHECK(hi <= 1.1 + 1e-12);
    }
    SECTION("two-point scan hits the endpoints only") {
        const auto rows = scan(beam, 1.0, +1, ScanAxis::detuning(-1.0, 1.0), 2);
        REQUIRE(rows.size() == 2);
        CHECK(rows.front().delta == -1.0);
        CHECK(rows.back().delta == 1.0);
        CHECK_THROWS_AS(scan(beam, 1.0, +1, ScanAxis::detuning(-1.0, 1.0), 1),
                        std::invalid_argument);
    }
}

TEST_CASE("radiant profile") {
    SECTION("gaussian peak shifts with the sign of sigma * delta") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.6), 1.0);
        const auto peak_theta = [&](double delta, int sigma) {
            const auto prof = radiant_profile(beam, delta, 1.0, sigma, 401);
            double best = -1.0, best_t = 0.0;
            for (const auto& p : prof)
                if (p.j_total > best) {
                    best = p.j_total;
                    best_t = p.theta_signed;
                }
            return best_t;
        };
        CHECK(peak_theta(+1.0, +1) > 0.0);
        CHECK(peak_theta(-1.0, +1) < 0.0);
        CHECK(peak_theta(+1.0, -1) < 0.0);
        // opposite detunings shift the peak to opposite sides
        CHECK(peak_theta(+1.0, +1) == Approx(-peak_theta(-1.0, +1)).margin(1e-12));
    }
    SECTION("curves invariant under a simultaneous (delta, sigma) flip") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.6), 1.0);
        const auto a = radiant_profile(beam, -1.0, 1.0, +1, 64);
        const auto b = radiant_profile(beam, 1.0, 1.0, -1, 64);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a[i].j_total - b[i].j_total) < 1e-10);
    }
    SECTION("tophat support edges stay put while the interior tilts") {
        const auto beam = IncidentBeam::make(BeamShape::tophat(0.6), 1.0);
        for (double delta : {-1.0, 1.0}) {
            const auto prof = radiant_profile(beam, delta, 1.0, +1, 241);
            for (const auto& p : prof) {
                if (std::abs(p.theta_signed) > 0.6 + 1e-9) CHECK(p.j_in == 0.0);
                if (std::abs(p.theta_signed) < 0.6 - 1e-9) CHECK(p.j_in == Approx(1.0));
            }
            // interior gradient has the sign of the detuning
            const auto at = [&](double theta) {
                double best = 1e9, val = 0.0;
                for (const auto& p : prof)
                    if (std::abs(p.theta_signed - theta) < best) {
                        best = std::abs(p.theta_signed - theta);
                        val = p.j_total;
                    }
                return val;
            };
            CHECK(((at(0.4) - at(-0.4)) > 0.0) == (delta > 0.0));
        }
    }
    SECTION("normalization and validation") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.4), 1.7);
        const auto prof = radiant_profile(beam, -1.0, 1.0, +1, 33);
        const auto mid = prof[prof.size() / 2];
        CHECK(mid.theta_signed == 0.0);
        CHECK(mid.j_in == Approx(1.0));
        CHECK_THROWS_AS(radiant_profile(beam, -1.0, 1.0, +1, 8), std::invalid_argument);
    }
}
