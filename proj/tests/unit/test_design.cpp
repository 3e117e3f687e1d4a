#include <doctest.h>

#include "qzeno/design.hpp"
#include "qzeno/models.hpp"

using namespace qzeno;

TEST_CASE("measurement strength and damping") {
    CHECK(measurement_strength(1.0, 1.0, 1.0, 1.0) == 1.0);
    CHECK(measurement_strength(2.0, 4.0, 0.5, 3.0) == doctest::Approx(16.0 * 3.0 / (16.0 * 0.5)));
    CHECK(resonator_damping(10.0, 5.0) == 2.0);
}

TEST_CASE("reference device") {
    const DeviceParams p = reference_device();
    const ValidityReport r = validity_report(p);
    CHECK(r.k == doctest::Approx(3.927e7).epsilon(1e-3));
    CHECK(std::abs(r.k - 4e7) / 4e7 < 0.02);
    CHECK(r.Gamma == doctest::Approx(6283.185).epsilon(1e-6));
    CHECK(r.ratio("omega_S/Delta").value == doctest::Approx(50.0).epsilon(1e-14));
    CHECK(r.ratio("Delta/g").value == doctest::Approx(40.0));
    CHECK(r.ratio("gamma*Delta/g^2").value == doctest::Approx(40.0));
    CHECK(r.ratio("lambda/omega_R").pass);
    CHECK(r.all_pass());

    CHECK(r.quote("k").agrees);
    CHECK(r.quote("omega_S/Delta").agrees);
    const QuoteCheck& flagged = r.quote("gamma*Delta/g^2");
    CHECK_FALSE(flagged.agrees);
    CHECK(flagged.recomputed == doctest::Approx(2.0 * flagged.quoted));
    CHECK(flagged.note.find("DISCREPANCY") != std::string::npos);
    CHECK_THROWS_AS(r.quote("nothing"), Error);

    const auto j = to_json(r);
    CHECK(j["k"].get<double>() == doctest::Approx(r.k));
    CHECK(format_table(r).find("gamma*Delta/g^2") != std::string::npos);
}

TEST_CASE("device parameters from a file") {
    const auto kv = KeyValueConfig::parse_string(
        "design.g = 1e7\ndesign.Delta_hz = 2e8\ndesign.gamma = 3e7\ndesign.n_photons = 100\n"
        "design.f_S_hz = 1e10\ndesign.f_R_hz = 1e8\ndesign.f_J_hz = 1.02e10\ndesign.Q = 1e4\n"
        "design.lambda = 1e6\nquoted.k = 1\nthreshold.much_greater = 5\n");
    const DeviceParams p = device_from_config(kv);
    CHECK(p.Delta == doctest::Approx(2.0 * constants::pi * 2e8));
    CHECK(p.omega_R == doctest::Approx(2.0 * constants::pi * 1e8));
    CHECK(p.quoted.at("k") == 1.0);
    CHECK(thresholds_from_config(kv).much_greater == 5.0);
    CHECK_THROWS_AS(device_from_config(KeyValueConfig::parse_string("design.g = 1\ndesign.g_hz = 1\n")), Error);

    DeviceParams bad = p;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(validity_report(bad), Error);
    bad = p;
    bad.T = -1.0;
    CHECK_THROWS_AS(validity_report(bad), Error);
}

TEST_CASE("weak separation of scales is reported") {
    DeviceParams p = reference_device();
    p.g = p.Delta / 3.0;
    const ValidityReport r = validity_report(p);
    CHECK_FALSE(r.ratio("Delta/g").pass);
    CHECK_FALSE(r.all_pass());
}
