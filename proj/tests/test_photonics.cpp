#include <doctest.h>

#include <cmath>

#include "emsim/errors.hpp"
#include "emsim/photonics.hpp"
#include "emsim/rng.hpp"

using namespace emsim;

TEST_SUITE("photonics") {

TEST_CASE("purcell factor from lifetimes") {
    const LifetimeSet paper{4.12, 2.32, 5.56, 0.36};
    const double fp = purcell_from_lifetimes(paper);
    CHECK(fp == doctest::Approx(2.8745968742247583).epsilon(1e-12));
    CHECK(std::abs(fp - 2.87) <= 0.01);
    CHECK(std::round(fp * 10.0) / 10.0 == doctest::Approx(2.9));

    CHECK(purcell_from_lifetimes({10.0, 5.0, 10.0 - 1e-9, 1.0}) ==
          doctest::Approx(1.0).epsilon(1e-6));

    SUBCASE("no enhancement limit") {
        const double eps = 1e-4;
        const double fp_limit = purcell_from_lifetimes({10.0, 10.0 - eps, 10.0, 1.0});
        CHECK(fp_limit < 1e-3);
        CHECK(fp_limit > 0.0);
    }
    SUBCASE("tau_on >= tau_off rejected") {
        CHECK_THROWS_AS(purcell_from_lifetimes({10.0, 6.0, 5.0, 1.0}), std::domain_error);
    }
    SUBCASE("invariant under common lifetime rescaling") {
        Rng rng = make_rng(3);
        const LifetimeSet base{4.12, 2.32, 5.56, 0.36};
        for (int i = 0; i < 100; ++i) {
            const double s = uniform(rng, 0.1, 10.0);
            const LifetimeSet scaled{base.tau_bulk_ns * s, base.tau_on_ns * s,
                                     base.tau_off_ns * s, base.xi_zpl};
            CHECK(purcell_from_lifetimes(scaled) ==
                  doctest::Approx(purcell_from_lifetimes(base)).epsilon(1e-12));
        }
    }
}

TEST_CASE("purcell factor from cavity Q/V") {
    const double pi = std::acos(-1.0);
    CHECK(purcell_from_cavity(1.0, 4.0 * pi * pi / 3.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(purcell_from_cavity(1.0, 2.0 * 500.0, 1.0) ==
          doctest::Approx(2.0 * purcell_from_cavity(1.0, 500.0, 1.0)).epsilon(1e-12));
    // Q = 2000 in a unit-mode-volume cavity.
    CHECK(purcell_from_cavity(0.617, 2000.0, 1.0, true) ==
          doctest::Approx(151.98177546350666).epsilon(1e-9));
    CHECK_THROWS_AS(purcell_from_cavity(1.0, -1.0, 1.0), std::domain_error);
}

TEST_CASE("detection probability budget") {
    const PhotonBudget paper{};
    const DetectionReport r = detection_probability(paper);
    CHECK(r.photon_total == doctest::Approx(10000.0).epsilon(1e-12));
    CHECK(r.zpl_to_psb_ratio == doctest::Approx(1.302857142857143).epsilon(1e-12));
    CHECK(r.photon_zpl == doctest::Approx(23.451428571428572).epsilon(1e-12));
    CHECK(r.photon_zpl_rounded == 24.0);
    CHECK(r.p_det == doctest::Approx(0.0023451428571428573).epsilon(1e-12));
    CHECK(r.p_det_rounded == doctest::Approx(0.0024).epsilon(1e-12));
    CHECK(r.p_det_snspd >= 0.0035);
    CHECK(r.p_det_snspd == doctest::Approx(0.0036079120879120878).epsilon(1e-12));

    SUBCASE("zero counts, zero efficiency") {
        PhotonBudget b;
        b.readout_counts = 0.0;
        CHECK(detection_probability(b).p_det == 0.0);
    }
    SUBCASE("linear in counts, inverse in window over lifetime") {
        PhotonBudget b;
        b.readout_counts = 36.0;
        CHECK(detection_probability(b).p_det == doctest::Approx(2.0 * r.p_det).epsilon(1e-12));
        b = PhotonBudget{};
        b.t_m_us = 100.0;
        CHECK(detection_probability(b).p_det == doctest::Approx(0.5 * r.p_det).epsilon(1e-12));
        b = PhotonBudget{};
        b.tau_emitter_ns = 10.0;
        CHECK(detection_probability(b).p_det == doctest::Approx(2.0 * r.p_det).epsilon(1e-12));
    }
    SUBCASE("fraction bookkeeping enforced") {
        PhotonBudget b;
        b.zpl_fraction = 0.6; // psb stays 0.43
        CHECK_THROWS_AS(detection_probability(b), config_error);
        b = PhotonBudget{};
        b.detector_qe = 1.5;
        CHECK_THROWS_AS(detection_probability(b), config_error);
    }
}

TEST_CASE("quoted ZPL-to-PSB intensity ratio is 1.3") {
    const double ratio = 0.57 * 0.80 / 0.35;
    CHECK(ratio == doctest::Approx(1.3028571428571427).epsilon(1e-12));
    CHECK(std::round(ratio * 10.0) / 10.0 == doctest::Approx(1.3));
}

} // TEST_SUITE
