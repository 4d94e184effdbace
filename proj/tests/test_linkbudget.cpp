#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "core/linkbudget.hpp"

using namespace owc;

namespace {

NoiseModel noise_5ghz() {
    NoiseModel n;
    n.noise_density_pa_sqrthz = 4.47;
    n.receiver_bandwidth_hz = 5e9;
    return n;
}

}  // namespace

TEST_CASE("link taxonomy on the three-AP instance") {
    // user 0 alone on (AP0, Blue); users 1 and 2 share Red on AP1 and AP2.
    std::vector<Channel> assign = {
        {0, Wavelength::Blue}, {1, Wavelength::Red}, {2, Wavelength::Red}};

    LinkClassification u0 = classify_links(assign, 0, 3);
    CHECK(u0.signal == Channel{0, Wavelength::Blue});
    CHECK(u0.interfering.empty());
    CHECK(u0.illumination_only.size() == 3 * 4 - 1);

    LinkClassification u1 = classify_links(assign, 1, 3);
    REQUIRE(u1.interfering.size() == 1);
    CHECK(u1.interfering[0] == Channel{2, Wavelength::Red});

    LinkClassification u2 = classify_links(assign, 2, 3);
    REQUIRE(u2.interfering.size() == 1);
    CHECK(u2.interfering[0] == Channel{1, Wavelength::Red});
}

TEST_CASE("taxonomy partitions every emission exactly once") {
    std::vector<Channel> assign = {{0, Wavelength::Red},
                                   {3, Wavelength::Red},
                                   {5, Wavelength::Yellow},
                                   {2, Wavelength::Green}};
    for (int u = 0; u < 4; ++u) {
        LinkClassification c = classify_links(assign, u, 8);
        std::set<Channel> seen;
        seen.insert(c.signal);
        for (const Channel& ch : c.interfering) CHECK(seen.insert(ch).second);
        for (const Channel& ch : c.illumination_only)
            CHECK(seen.insert(ch).second);
        CHECK(seen.size() == 8 * 4);
    }
}

TEST_CASE("shared channel is a conflict") {
    std::vector<Channel> assign = {{1, Wavelength::Green},
                                   {1, Wavelength::Green}};
    CHECK_THROWS_AS(classify_links(assign, 0, 8), ConflictError);
}

TEST_CASE("single user never sees interference") {
    std::vector<Channel> assign = {{4, Wavelength::Yellow}};
    CHECK(classify_links(assign, 0, 8).interfering.empty());
}

TEST_CASE("shot noise variance") {
    CHECK(shot_noise_var(0.0, 5e9) == 0.0);
    CHECK(shot_noise_var(4e-7, 5e9) == doctest::Approx(6.408e-16).epsilon(1e-3));
    CHECK(shot_noise_var(4e-7, 10e9) ==
          doctest::Approx(2.0 * shot_noise_var(4e-7, 5e9)));
}

TEST_CASE("preamplifier noise variance") {
    CHECK(preamp_noise_var(4.47e-12, 5e9) ==
          doctest::Approx(9.99e-14).epsilon(1e-3));
    CHECK(preamp_noise_var(4.47e-12, 2.5e9) ==
          doctest::Approx(4.995e-14).epsilon(1e-3));
    CHECK(preamp_noise_var(4.47e-12, 1.0) < 1e-22);
}

TEST_CASE("sinr hand example") {
    NoiseModel n = noise_5ghz();
    double lin = sinr_linear(4e-7, {}, 4e-7, n);
    CHECK(lin == doctest::Approx(1.591).epsilon(2e-3));
    CHECK(sinr_db_from_linear(lin) == doctest::Approx(2.02).epsilon(5e-3));
}

TEST_CASE("threshold pairing: linear 36 is 15.563 dB and meets 1e-9 BER") {
    CHECK(sinr_db_from_linear(36.0) == doctest::Approx(15.563).epsilon(1e-3));
    CHECK(ber_ook(36.0) <= 1e-9);
    CHECK(ber_ook(36.0) == doctest::Approx(9.87e-10).epsilon(1e-2));
    CHECK(ber_ook(30.0) > 1e-9);
    CHECK(ber_ook(0.0) == doctest::Approx(0.5));
    CHECK(ber_ook(10.0) > ber_ook(20.0));
}

TEST_CASE("threshold is inclusive at 15.6 dB") {
    CHECK(meets_threshold(15.6));
    CHECK(meets_threshold(15.61));
    CHECK_FALSE(meets_threshold(15.59));
}

TEST_CASE("interferer equal to the signal pins SINR below one") {
    NoiseModel n = noise_5ghz();
    double lin = sinr_linear(4e-7, {4e-7}, 8e-7, n);
    CHECK(lin < 1.0);
}

TEST_CASE("degenerate link raises") {
    NoiseModel n = noise_5ghz();
    CHECK_THROWS_AS(sinr_linear(0.0, {}, 0.0, n), DegenerateLinkError);
}

TEST_CASE("sinr monotonicity") {
    NoiseModel n = noise_5ghz();
    double base = sinr_linear(4e-7, {1e-7}, 5e-7, n);
    CHECK(sinr_linear(5e-7, {1e-7}, 6e-7, n) > base);
    CHECK(sinr_linear(4e-7, {2e-7}, 6e-7, n) < base);
    CHECK(sinr_linear(4e-7, {1e-7, 1e-7}, 6e-7, n) <
          sinr_linear(4e-7, {1e-7}, 5e-7, n));
}

TEST_CASE("scale invariance with shot noise disabled") {
    NoiseModel n = noise_5ghz();
    double a = sinr_linear(4e-7, {1e-7}, 5e-7, n, false);
    NoiseModel n10 = n;
    n10.noise_density_pa_sqrthz *= 10.0;
    double b = sinr_linear(4e-6, {1e-6}, 5e-6, n10, false);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("supported rate") {
    CHECK(supported_rate(10e9, 5e9, 7.1e9, 1.42) == doctest::Approx(7.1e9));
    CHECK(supported_rate(2e9, 5e9, 7.1e9, 1.42) == doctest::Approx(2.84e9));
    CHECK(supported_rate(10e9, 2.5e9, 7.1e9, 1.42) == doctest::Approx(3.55e9));
    CHECK(supported_rate(0.0, 5e9, 7.1e9, 1.42) == 0.0);
}
