#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <unistd.h>

#include "core/metrics.hpp"

using namespace owc;

namespace {

ImpulseResponse make_ir(double bin_s, double t0_s, std::vector<double> bins) {
    ImpulseResponse ir;
    ir.bin_width_s = bin_s;
    ir.t0_s = t0_s;
    ir.bins = std::move(bins);
    return ir;
}

Scenario tiny_scenario() {
    return parse_scenario(R"({
        "name": "tiny",
        "users": [{"id": 1, "pos": [2.5, 1.0, 1.0]}]
    })");
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("owc_metrics_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("dc gain equals the zero-frequency response exactly") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> p(0.0, 1e-6);
    std::vector<double> bins(200);
    for (double& b : bins) b = p(rng);
    ImpulseResponse ir = make_ir(1e-11, 5e-9, bins);
    CHECK(frequency_response(ir, 0.0).real() == dc_gain(ir));
    CHECK(frequency_response(ir, 0.0).imag() == 0.0);
}

TEST_CASE("single impulse: flat spectrum, unbounded bandwidth, zero spread") {
    ImpulseResponse ir = make_ir(1e-11, 8.3e-9, {4.2e-7});
    CHECK(std::abs(frequency_response(ir, 1e9)) == doctest::Approx(4.2e-7));
    CHECK(std::abs(frequency_response(ir, 37e9)) == doctest::Approx(4.2e-7));
    CHECK(bandwidth_3db(ir) == kBandwidthUnbounded);
    CHECK(rms_delay_spread(ir) == 0.0);
}

TEST_CASE("two equal paths: closed-form bandwidth and delay spread") {
    // Equal taps 1 ns apart: |H(f)|/H(0) = |cos(pi f dt)|.
    const double dt = 1e-9;
    std::vector<double> bins(101, 0.0);
    bins[0] = 3e-7;
    bins[100] = 3e-7;
    ImpulseResponse ir = make_ir(1e-11, 10e-9, bins);

    CHECK(bandwidth_3db(ir, BwConvention::Optical) ==
          doctest::Approx(250e6).epsilon(0.005));

    double f_el = std::acos(std::pow(2.0, -0.25)) / (std::numbers::pi * dt);
    CHECK(bandwidth_3db(ir, BwConvention::Electrical) ==
          doctest::Approx(f_el).epsilon(0.01));

    CHECK(rms_delay_spread(ir) == doctest::Approx(dt / 2.0).epsilon(1e-9));
}

TEST_CASE("zero channel raises") {
    ImpulseResponse ir = make_ir(1e-11, 0.0, {0.0, 0.0});
    CHECK_THROWS_AS(bandwidth_3db(ir), ZeroChannelError);
    CHECK_THROWS_AS(rms_delay_spread(ir), ZeroChannelError);
}

TEST_CASE("scale and shift invariances") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> p(0.0, 1e-6);
    std::vector<double> bins(300);
    for (double& b : bins) b = p(rng);
    bins[10] *= 40;  // make the response actually roll off
    ImpulseResponse ir = make_ir(1e-11, 6e-9, bins);

    ImpulseResponse scaled = ir;
    for (double& b : scaled.bins) b *= 7.5;
    CHECK(bandwidth_3db(scaled) == bandwidth_3db(ir));
    CHECK(rms_delay_spread(scaled) ==
          doctest::Approx(rms_delay_spread(ir)).epsilon(1e-12));

    ImpulseResponse shifted = ir;
    shifted.t0_s += 12e-9;
    CHECK(bandwidth_3db(shifted) == doctest::Approx(bandwidth_3db(ir)));
    CHECK(rms_delay_spread(shifted) ==
          doctest::Approx(rms_delay_spread(ir)).epsilon(1e-9));
}

TEST_CASE("spectrum magnitude never exceeds the dc gain") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> p(0.0, 1e-6);
    std::vector<double> bins(500);
    for (double& b : bins) b = p(rng);
    ImpulseResponse ir = make_ir(1e-11, 4e-9, bins);
    double h0 = dc_gain(ir);
    for (double f : {1e8, 7e8, 3.3e9, 1.1e10, 4.9e10})
        CHECK(std::abs(frequency_response(ir, f)) <= h0 + 1e-15);
}

TEST_CASE("channel matrix: shape, determinism across thread counts") {
    Scenario s = tiny_scenario();
    MatrixBuildOptions o;
    o.bounce.max_order = 0;

    o.threads = 1;
    ChannelMatrix m1 = build_channel_matrix(s, o);
    CHECK(m1.num_users == 1);
    CHECK(m1.num_branches == 4);
    CHECK(m1.num_aps == 8);
    CHECK(m1.links.size() == 32);

    o.threads = 4;
    ChannelMatrix m4 = build_channel_matrix(s, o);
    CHECK(m1 == m4);

    // LOS toward AP 1 at (1,1,3): the hand-computed gain.
    CHECK(m1.at(0, 2, 0).dc_gain == doctest::Approx(8.09e-7).epsilon(1e-3));
}

TEST_CASE("first-order matrix is deterministic across thread counts") {
    Scenario s = tiny_scenario();
    MatrixBuildOptions o;
    o.bounce.max_order = 1;
    o.bounce.elem_size_bounce1 = 0.5;
    o.threads = 1;
    ChannelMatrix m1 = build_channel_matrix(s, o);
    o.threads = 8;
    ChannelMatrix m8 = build_channel_matrix(s, o);
    CHECK(m1 == m8);
}

TEST_CASE("cache round-trips bit-identically") {
    Scenario s = tiny_scenario();
    MatrixBuildOptions o;
    o.bounce.max_order = 0;
    o.threads = 1;
    ChannelMatrix m = build_channel_matrix(s, o);
    std::string hash = channel_hash_hex(s, o);

    TempDir dir;
    std::string path = (dir.path / (hash + ".owcm")).string();
    write_cache(path, hash, m);
    auto back = read_cache(path, hash);
    REQUIRE(back.has_value());
    CHECK(*back == m);

    // A different hash must miss.
    std::string other(64, 'a');
    CHECK_FALSE(read_cache(path, other).has_value());
    // Garbage content must miss, not crash.
    std::ofstream(path, std::ios::binary) << "not a cache";
    CHECK_FALSE(read_cache(path, hash).has_value());
}

TEST_CASE("content hash tracks scenario and trace configuration") {
    Scenario s = tiny_scenario();
    MatrixBuildOptions o;
    std::string base = channel_hash_hex(s, o);
    CHECK(base.size() == 64);

    Scenario s2 = s;
    s2.room.rho_floor = 0.31;
    CHECK(channel_hash_hex(s2, o) != base);

    MatrixBuildOptions o2 = o;
    o2.bounce.max_order = 1;
    CHECK(channel_hash_hex(s, o2) != base);

    MatrixBuildOptions o3 = o;
    o3.bw_convention = BwConvention::Electrical;
    CHECK(channel_hash_hex(s, o3) != base);

    // Threads do not participate in the key.
    MatrixBuildOptions o4 = o;
    o4.threads = 7;
    CHECK(channel_hash_hex(s, o4) == base);
}

TEST_CASE("second build is served from the cache") {
    Scenario s = tiny_scenario();
    TempDir dir;
    MatrixBuildOptions o;
    o.bounce.max_order = 0;
    o.threads = 1;
    o.cache_dir = dir.path.string();

    ChannelMatrix first = build_channel_matrix(s, o);
    std::string hash = channel_hash_hex(s, o);
    CHECK(std::filesystem::exists(dir.path / (hash + ".owcm")));

    ChannelMatrix second = build_channel_matrix(s, o);
    CHECK(first == second);
}
