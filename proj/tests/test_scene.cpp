#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "core/scene.hpp"

using namespace owc;

namespace {

std::string write_temp(const std::string& content) {
    static int counter = 0;
    auto path = std::filesystem::temp_directory_path() /
                ("owc_scene_test_" + std::to_string(counter++) + ".json");
    std::ofstream(path) << content;
    return path.string();
}

}  // namespace

TEST_CASE("minimal scenario file takes table defaults") {
    std::string path = write_temp(R"({
        "name": "minimal",
        "users": [{"id": 1, "pos": [2.0, 4.0, 1.0]}]
    })");
    Scenario s = load_scenario(path);
    CHECK(s.name == "minimal");
    CHECK(s.num_aps() == 8);
    CHECK(s.room.rho_walls_ceiling == doctest::Approx(0.8));
    CHECK(s.room.rho_floor == doctest::Approx(0.3));
    CHECK(s.branches.size() == 4);
    for (const auto& b : s.branches) {
        CHECK(b.fov_half_angle_deg == doctest::Approx(25.0));
        CHECK(b.elevation_deg == doctest::Approx(60.0));
    }
    CHECK(s.noise.noise_density_a_sqrthz() == doctest::Approx(4.47e-12));
    std::remove(path.c_str());
}

TEST_CASE("user outside the room is rejected") {
    std::string path = write_temp(R"({
        "name": "bad",
        "users": [{"id": 1, "pos": [9.0, 1.0, 1.0]}]
    })");
    try {
        load_scenario(path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("position outside room") !=
              std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("wrong branch count is rejected") {
    std::string path = write_temp(R"({
        "name": "bad",
        "receiver": {"branches": [
            {"az": 0, "el": 60, "fov": 25, "area_mm2": 20},
            {"az": 120, "el": 60, "fov": 25, "area_mm2": 20},
            {"az": 240, "el": 60, "fov": 25, "area_mm2": 20}
        ]},
        "users": [{"id": 1, "pos": [2.0, 4.0, 1.0]}]
    })");
    try {
        load_scenario(path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("expected 4 branches") !=
              std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("built-in scenarios match the published layouts") {
    Scenario conf = builtin_scenario("conference_table");
    CHECK(conf.num_users() == 10);
    CHECK(conf.users[0].position == Vec3{1.5, 2.5, 1.0});
    CHECK(conf.noise.receiver_bandwidth_hz == doctest::Approx(5e9));

    Scenario c2 = builtin_scenario("cocktail2");
    CHECK(c2.users[9].position == Vec3{2.25, 4.0, 1.0});
    CHECK(c2.noise.receiver_bandwidth_hz == doctest::Approx(2.5e9));

    CHECK_THROWS_AS(builtin_scenario("banquet"), ParseError);
}

TEST_CASE("built-ins round-trip through the canonical form unchanged") {
    for (const char* name : {"conference_table", "cocktail1", "cocktail2"}) {
        Scenario s = builtin_scenario(name);
        Scenario back = parse_scenario(canonical_json(s));
        CHECK(back == s);
        CHECK(canonical_json(back) == canonical_json(s));
    }
}

TEST_CASE("discretization tiles all six surfaces") {
    Room room;  // 4 x 8 x 3
    auto elems = discretize(room, 0.20);

    // Independent per-surface tiling oracle.
    auto face_count = [](double a, double b, double e) {
        auto n = [&](double d) {
            return std::max<long>(1, std::llround(d / e));
        };
        return n(a) * n(b);
    };
    long expected = 2 * face_count(4, 8, 0.20) + 2 * face_count(8, 3, 0.20) +
                    2 * face_count(4, 3, 0.20);
    CHECK(long(elems.size()) == expected);
    CHECK(elems.size() == 3400);

    double area = 0.0;
    for (const auto& e : elems) area += e.area;
    CHECK(area == doctest::Approx(136.0).epsilon(1e-3));

    // Floor elements carry the floor reflectance.
    for (const auto& e : elems)
        if (e.center.z < 1e-9) CHECK(e.reflectance == doctest::Approx(0.3));

    // Inward normals.
    Vec3 mid{2.0, 4.0, 1.5};
    for (const auto& e : elems) CHECK(e.normal.dot(mid - e.center) > 0.0);
}

TEST_CASE("degenerate tiling: one element per face") {
    Room room;
    auto elems = discretize(room, 8.0);
    CHECK(elems.size() == 6);
    double area = 0.0;
    for (const auto& e : elems) area += e.area;
    CHECK(area == doctest::Approx(136.0));
}

TEST_CASE("branch normal convention") {
    Vec3 zenith = branch_normal(0.0, 90.0);
    CHECK(zenith.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zenith.z == doctest::Approx(1.0));

    Vec3 n180 = branch_normal(180.0, 60.0);
    CHECK(n180.x == doctest::Approx(-0.5));
    CHECK(n180.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(n180.z == doctest::Approx(0.8660254));

    Vec3 n90 = branch_normal(90.0, 60.0);
    CHECK(n90.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(n90.y == doctest::Approx(0.5));
    CHECK(n90.z == doctest::Approx(0.8660254));
}

TEST_CASE("branch normal is unit length; zenith ignores azimuth") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> az(0.0, 360.0);
    std::uniform_real_distribution<double> el(0.01, 90.0);
    for (int i = 0; i < 200; ++i) {
        Vec3 n = branch_normal(az(rng), el(rng));
        CHECK(std::abs(n.norm() - 1.0) < 1e-12);
    }
    Vec3 a = branch_normal(az(rng), 90.0);
    Vec3 b = branch_normal(az(rng), 90.0);
    CHECK(std::abs(a.z - b.z) < 1e-12);
    CHECK(std::abs(a.x) < 1e-12);
    CHECK(std::abs(b.x) < 1e-12);
}
