#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "magnus/focal.hpp"

using namespace magnus;
using Catch::Approx;

TEST_CASE("focal field basics") {
    SECTION("all partial waves add in phase on axis for the tophat") {
        const auto beam = IncidentBeam::make(BeamShape::tophat(0.4), 1.0);
        const auto map = focal_map(beam);
        const int mid = map.nx() / 2;
        const double center = map.intensity(mid, mid);
        double best = 0.0;
        for (int iy = 0; iy < map.ny(); ++iy)
            for (int ix = 0; ix < map.nx(); ++ix) best = std::max(best, map.intensity(ix, iy));
        CHECK(center == best);
        // the map center reproduces the direct on-axis angular integral
        CHECK(center == Approx(focal_field(beam, 0.0, 0.0).norm2()).epsilon(1e-10));
    }
    SECTION("map symmetric under y -> -y for the x-polarized beam") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.2), 1.0);
        FocalMapOptions opt;
        opt.extent_radii = 1.5;
        const auto map = focal_map(beam, opt);
        const int n = map.ny();
        for (int iy = 0; iy < n / 2; iy += 7)
            for (int ix = 0; ix < map.nx(); ix += 7)
                CHECK(map.intensity(ix, iy) ==
                      Approx(map.intensity(ix, n - 1 - iy)).epsilon(1e-9).margin(1e-18));
    }
    SECTION("intensity is non-negative") {
        const auto beam = IncidentBeam::make(BeamShape::tophat(0.3), 1.0);
        const auto map = focal_map(beam);
        for (int iy = 0; iy < map.ny(); iy += 5)
            for (int ix = 0; ix < map.nx(); ix += 5) CHECK(map.intensity(ix, iy) >= 0.0);
    }
}

TEST_CASE("gaussian spot size") {
    SECTION("synthetic exact gaussian intensity fits its own waist") {
        FocalMap map;
        const int n = 129;
        const double w0 = 12.5, half = 30.0;
        map.xs.resize(n);
        map.ys.resize(n);
        for (int i = 0; i < n; ++i) map.xs[i] = map.ys[i] = -half + 2.0 * half * i / (n - 1);
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const double r2 = map.xs[ix] * map.xs[ix] + map.ys[iy] * map.ys[iy];
                map.e.push_back({std::exp(-r2 / (w0 * w0)), 0.0, 0.0});
                map.h.push_back({});
            }
        const auto m = spot_metrics(map, BeamShape::Kind::gaussian);
        CHECK(m.spot_radius == Approx(w0).epsilon(1e-12));
        CHECK(m.fit_residual < 1e-10);
    }
    SECTION("w = 0.2 gives the reciprocal waist 2/(k w) within 2%") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.2), 1.0);
        const auto m = spot_metrics(focal_map(beam), BeamShape::Kind::gaussian);
        CHECK(m.spot_radius == Approx(10.0).epsilon(0.02));
        CHECK(m.peak_ratio == Approx(1.0).epsilon(1e-12));
    }
    SECTION("w = 0.1 lands within 1%") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.1), 1.0);
        FocalMapOptions opt;
        opt.extent_radii = 2.0;
        const auto m = spot_metrics(focal_map(beam, opt), BeamShape::Kind::gaussian);
        CHECK(m.spot_radius == Approx(20.0).epsilon(0.01));
    }
    SECTION("strong focusing is genuinely non-gaussian and the fit says so") {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(0.3), 1.0);
        const auto map = focal_map(beam);
        CHECK_THROWS_AS(spot_metrics(map, BeamShape::Kind::gaussian), FitFailed);
    }
}

TEST_CASE("tophat airy disk") {
    SECTION("first null at 3.83 / (k sin r) within 2%") {
        const auto beam = IncidentBeam::make(BeamShape::tophat(0.3), 1.0);
        const auto m = spot_metrics(focal_map(beam), BeamShape::Kind::tophat);
        CHECK(m.spot_radius == Approx(3.8317 / std::sin(0.3)).epsilon(0.02));
        CHECK(m.spot_radius == Approx(12.97).epsilon(0.02));
    }
    SECTION("wide tophat keeps the scaling") {
        const auto beam = IncidentBeam::make(BeamShape::tophat(0.6), 1.0);
        const auto m = spot_metrics(focal_map(beam), BeamShape::Kind::tophat);
        CHECK(m.spot_radius == Approx(3.8317 / std::sin(0.6)).epsilon(0.02));
    }
}

TEST_CASE("focal plane power consistency") {
    // through-plane Poynting flux against the angular beam power
    for (double w : {0.1, 0.2, 0.3}) {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(w), 1.0);
        FocalMapOptions opt;
        if (w < 0.15) opt.extent_radii = 3.0;
        const auto map = focal_map(beam, opt);
        INFO("w = " << w);
        CHECK(plane_power(map) / beam_power(beam).numeric == Approx(1.0).margin(0.02));
    }
}

TEST_CASE("reciprocal width product") {
    double first = 0.0;
    for (double w : {0.05, 0.1, 0.2}) {
        const auto beam = IncidentBeam::make(BeamShape::gaussian(w), 1.0);
        FocalMapOptions opt;
        opt.extent_radii = 2.0;
        const auto m = spot_metrics(focal_map(beam, opt), BeamShape::Kind::gaussian);
        const double product = m.spot_radius * w;
        if (first == 0.0) first = product;
        INFO("w = " << w);
        CHECK(product == Approx(first).epsilon(0.02));
        CHECK(product == Approx(2.0).epsilon(0.02));
    }
}

TEST_CASE("spot metrics preconditions") {
    FocalMap coarse;
    coarse.xs = {-10.0, 0.0, 10.0};
    coarse.ys = coarse.xs;
    coarse.e.assign(9, {1.0, 0.0, 0.0});
    coarse.h.assign(9, {});
    CHECK_THROWS_AS(spot_metrics(coarse, BeamShape::Kind::gaussian), std::invalid_argument);
}
