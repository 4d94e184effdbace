#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace owc {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

const char* kWavelengthNames[kNumWavelengths] = {"red", "yellow", "green",
                                                 "blue"};

}  // namespace

const char* wavelength_name(Wavelength w) {
    return kWavelengthNames[static_cast<int>(w)];
}

Vec3 branch_normal(double azimuth_deg, double elevation_deg) {
    double az = azimuth_deg * kDegToRad;
    double el = elevation_deg * kDegToRad;
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
            std::sin(el)};
}

Scenario default_scenario() {
    Scenario s;
    s.room = Room{};
    s.units.clear();
    const double xs[2] = {1.0, 3.0};
    int id = 1;
    for (double x : xs) {
        for (double y : {1.0, 3.0, 5.0, 7.0}) {
            LightUnit u;
            u.id = id++;
            u.position = {x, y, s.room.height_z};
            s.units.push_back(u);
        }
    }
    s.bands[static_cast<int>(Wavelength::Red)] = {0.8, 0.4};
    s.bands[static_cast<int>(Wavelength::Yellow)] = {0.5, 0.35};
    s.bands[static_cast<int>(Wavelength::Green)] = {0.3, 0.3};
    s.bands[static_cast<int>(Wavelength::Blue)] = {0.3, 0.2};
    for (double az : {0.0, 90.0, 180.0, 270.0}) {
        s.branches.push_back(ReceiverBranch{az, 60.0, 25.0, 20.0});
    }
    s.noise = NoiseModel{4.47, 5e9};
    s.configured_rate_bps = 7.1e9;
    return s;
}

namespace {

struct RefRow {
    int ap;
    int branch;  // one-based as published
    Wavelength w;
};

Scenario make_builtin(const std::string& name,
                      const std::vector<Vec3>& positions,
                      const std::vector<RefRow>& refs,
                      double receiver_bandwidth_hz) {
    Scenario s = default_scenario();
    s.name = name;
    s.noise.receiver_bandwidth_hz = receiver_bandwidth_hz;
    for (size_t i = 0; i < positions.size(); ++i) {
        s.users.push_back({static_cast<int>(i) + 1, positions[i]});
        s.reference.push_back({static_cast<int>(i) + 1, refs[i].ap,
                               refs[i].branch - 1, refs[i].w});
    }
    return s;
}

}  // namespace

bool is_builtin_scenario_name(const std::string& name) {
    return name == "conference_table" || name == "cocktail1" ||
           name == "cocktail2";
}

Scenario builtin_scenario(const std::string& name) {
    using enum Wavelength;
    if (name == "conference_table") {
        return make_builtin(
            name,
            {{1.5, 2.5, 1}, {1.5, 3.5, 1}, {1.5, 5.5, 1}, {1.5, 4.5, 1},
             {2.0, 2.5, 1}, {2.0, 5.5, 1}, {2.5, 2.5, 1}, {2.5, 3.5, 1},
             {2.5, 5.5, 1}, {2.5, 4.5, 1}},
            {{1, 4, Red}, {2, 3, Red}, {4, 2, Red}, {3, 3, Red},
             {2, 3, Yellow}, {3, 3, Yellow}, {6, 1, Red}, {6, 1, Yellow},
             {7, 1, Red}, {7, 1, Yellow}},
            5e9);
    }
    if (name == "cocktail1") {
        return make_builtin(
            name,
            {{0.5, 0.5, 1}, {0.5, 1.0, 1}, {0.5, 1.5, 1}, {1.0, 0.75, 1},
             {1.0, 1.25, 1}, {1.75, 3.25, 1}, {1.75, 3.75, 1},
             {1.75, 4.25, 1}, {2.25, 3.5, 1}, {2.25, 4.0, 1}},
            {{1, 1, Green}, {1, 1, Yellow}, {2, 2, Yellow}, {5, 1, Red},
             {1, 4, Red}, {2, 3, Red}, {6, 1, Yellow}, {3, 2, Red},
             {6, 1, Red}, {7, 2, Red}},
            5e9);
    }
    if (name == "cocktail2") {
        return make_builtin(
            name,
            {{0.5, 0.5, 1}, {0.5, 1.0, 1}, {0.5, 1.5, 1}, {0.5, 2.0, 1},
             {1.0, 0.75, 1}, {1.0, 1.25, 1}, {1.0, 1.75, 1},
             {1.75, 3.75, 1}, {1.75, 4.25, 1}, {2.25, 4.0, 1}},
            {{1, 1, Blue}, {1, 1, Yellow}, {1, 4, Green}, {2, 2, Yellow},
             {5, 1, Red}, {1, 4, Red}, {2, 2, Red}, {6, 1, Red},
             {3, 2, Red}, {7, 2, Red}},
            2.5e9);
    }
    throw ParseError("unknown built-in scenario: " + name);
}

void validate(const Scenario& s) {
    std::vector<std::string> bad;
    auto fail = [&](const std::string& m) { bad.push_back(m); };

    const Room& r = s.room;
    if (!(r.width_x > 0 && r.length_y > 0 && r.height_z > 0))
        fail("room: all dimensions must be > 0");
    if (r.rho_walls_ceiling < 0 || r.rho_walls_ceiling > 1)
        fail("room.rho_walls_ceiling: must be in [0, 1]");
    if (r.rho_floor < 0 || r.rho_floor > 1)
        fail("room.rho_floor: must be in [0, 1]");
    if (!(r.elem_size_bounce1 > 0)) fail("room.elem1: must be > 0");
    if (!(r.elem_size_bounce2 > 0)) fail("room.elem2: must be > 0");
    if (!(r.cf_height < r.height_z))
        fail("room.cf_height: must be below the ceiling");

    if (s.units.empty()) fail("units: at least one access point required");
    std::set<int> unit_ids;
    for (size_t i = 0; i < s.units.size(); ++i) {
        const LightUnit& u = s.units[i];
        std::string p = "units[" + std::to_string(i) + "]";
        if (!unit_ids.insert(u.id).second) fail(p + ".id: duplicate AP id");
        if (!u.position.finite()) fail(p + ".pos: non-finite");
        if (std::abs(u.position.z - r.height_z) > 1e-9)
            fail(p + ".pos: AP must sit on the ceiling (z = room height)");
        if (u.position.x < 0 || u.position.x > r.width_x ||
            u.position.y < 0 || u.position.y > r.length_y)
            fail(p + ".pos: position outside room");
        if (u.num_lds < 1) fail(p + ".num_lds: must be >= 1");
        if (u.lambertian_order_m_tx < 1) fail(p + ".m_tx: must be >= 1");
    }

    for (int w = 0; w < kNumWavelengths; ++w) {
        const WavelengthBand& b = s.bands[w];
        std::string p = std::string("wavelengths.") + kWavelengthNames[w];
        if (!(b.power_per_ld_w > 0)) fail(p + ".power_w: must be > 0");
        if (!(b.responsivity > 0 && b.responsivity <= 1))
            fail(p + ".resp: must be in (0, 1]");
    }

    if (s.branches.size() != 4)
        fail("receiver.branches: expected 4 branches, got " +
             std::to_string(s.branches.size()));
    for (size_t i = 0; i < s.branches.size(); ++i) {
        const ReceiverBranch& b = s.branches[i];
        std::string p = "receiver.branches[" + std::to_string(i) + "]";
        if (b.azimuth_deg < 0 || b.azimuth_deg >= 360)
            fail(p + ".az: must be in [0, 360)");
        if (!(b.elevation_deg > 0 && b.elevation_deg <= 90))
            fail(p + ".el: must be in (0, 90]");
        if (!(b.fov_half_angle_deg > 0 && b.fov_half_angle_deg <= 90))
            fail(p + ".fov: must be in (0, 90]");
        if (!(b.detector_area_mm2 > 0)) fail(p + ".area_mm2: must be > 0");
    }

    if (!(s.noise.noise_density_pa_sqrthz > 0))
        fail("receiver.noise_density_pa_sqrthz: must be > 0");
    if (!(s.noise.receiver_bandwidth_hz > 0))
        fail("receiver.bandwidth_hz: must be > 0");

    if (s.users.empty()) fail("users: at least one user required");
    std::set<int> user_ids;
    for (size_t i = 0; i < s.users.size(); ++i) {
        const UserPlacement& u = s.users[i];
        std::string p = "users[" + std::to_string(i) + "]";
        if (!user_ids.insert(u.id).second) fail(p + ".id: duplicate user id");
        if (!u.position.finite()) fail(p + ".pos: non-finite");
        else if (u.position.x < 0 || u.position.x > r.width_x ||
                 u.position.y < 0 || u.position.y > r.length_y ||
                 u.position.z < 0 || u.position.z > r.height_z)
            fail(p + ".pos: position outside room");
    }

    if (!(s.configured_rate_bps > 0)) fail("rate_bps: must be > 0");

    if (!bad.empty()) throw ValidationError(std::move(bad));
}

namespace {

Vec3 parse_vec3(const ordered_json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ParseError(where + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json vec3_json(const Vec3& v) {
    return ordered_json::array({v.x, v.y, v.z});
}

Wavelength wavelength_from_name(const std::string& n) {
    for (int i = 0; i < kNumWavelengths; ++i)
        if (n == kWavelengthNames[i]) return static_cast<Wavelength>(i);
    throw ParseError("unknown wavelength name: " + n);
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario parse error: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scenario: top level must be an object");

    Scenario s = default_scenario();
    try {
        s.name = j.value("name", std::string{});
        if (j.contains("room")) {
            const auto& r = j["room"];
            s.room.width_x = r.value("width", s.room.width_x);
            s.room.length_y = r.value("length", s.room.length_y);
            s.room.height_z = r.value("height", s.room.height_z);
            s.room.rho_walls_ceiling =
                r.value("rho_walls_ceiling", s.room.rho_walls_ceiling);
            s.room.rho_floor = r.value("rho_floor", s.room.rho_floor);
            s.room.elem_size_bounce1 = r.value("elem1", s.room.elem_size_bounce1);
            s.room.elem_size_bounce2 = r.value("elem2", s.room.elem_size_bounce2);
            s.room.cf_height = r.value("cf_height", s.room.cf_height);
        }
        if (j.contains("units")) {
            s.units.clear();
            for (const auto& ju : j["units"]) {
                LightUnit u;
                u.id = ju.at("id").get<int>();
                u.position = parse_vec3(ju.at("pos"), "units.pos");
                u.num_lds = ju.value("num_lds", 12);
                u.lambertian_order_m_tx = ju.value("m_tx", 1);
                s.units.push_back(u);
            }
        }
        if (j.contains("wavelengths")) {
            for (int w = 0; w < kNumWavelengths; ++w) {
                if (!j["wavelengths"].contains(kWavelengthNames[w])) continue;
                const auto& jb = j["wavelengths"][kWavelengthNames[w]];
                s.bands[w].power_per_ld_w = jb.value("power_w", s.bands[w].power_per_ld_w);
                s.bands[w].responsivity = jb.value("resp", s.bands[w].responsivity);
            }
        }
        if (j.contains("receiver")) {
            const auto& jr = j["receiver"];
            if (jr.contains("branches")) {
                s.branches.clear();
                for (const auto& jb : jr["branches"]) {
                    ReceiverBranch b;
                    b.azimuth_deg = jb.at("az").get<double>();
                    b.elevation_deg = jb.at("el").get<double>();
                    b.fov_half_angle_deg = jb.at("fov").get<double>();
                    b.detector_area_mm2 = jb.at("area_mm2").get<double>();
                    s.branches.push_back(b);
                }
            }
            s.noise.noise_density_pa_sqrthz = jr.value(
                "noise_density_pa_sqrthz", s.noise.noise_density_pa_sqrthz);
            s.noise.receiver_bandwidth_hz =
                jr.value("bandwidth_hz", s.noise.receiver_bandwidth_hz);
        }
        if (j.contains("users")) {
            for (const auto& ju : j["users"]) {
                UserPlacement u;
                u.id = ju.at("id").get<int>();
                u.position = parse_vec3(ju.at("pos"), "users.pos");
                s.users.push_back(u);
            }
        }
        s.configured_rate_bps = j.value("rate_bps", s.configured_rate_bps);
        if (j.contains("solver")) {
            const auto& js = j["solver"];
            std::string obj = js.value("objective", std::string("db"));
            if (obj == "db") s.solver.objective = Objective::DbSum;
            else if (obj == "linear") s.solver.objective = Objective::LinearSum;
            else throw ParseError("solver.objective: expected db|linear");
            s.solver.tiebreak = js.value("tiebreak", std::string("lex"));
        }
        if (j.contains("reference")) {
            for (const auto& jr : j["reference"]) {
                ReferenceEntry e;
                e.user_id = jr.at("user").get<int>();
                e.ap_id = jr.at("ap").get<int>();
                e.branch_index = jr.at("branch").get<int>() - 1;
                e.wavelength = wavelength_from_name(jr.at("wavelength").get<std::string>());
                s.reference.push_back(e);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario parse error: ") + e.what());
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string canonical_json(const Scenario& s) {
    ordered_json j;
    j["name"] = s.name;
    j["room"] = {{"width", s.room.width_x},
                 {"length", s.room.length_y},
                 {"height", s.room.height_z},
                 {"rho_walls_ceiling", s.room.rho_walls_ceiling},
                 {"rho_floor", s.room.rho_floor},
                 {"elem1", s.room.elem_size_bounce1},
                 {"elem2", s.room.elem_size_bounce2},
                 {"cf_height", s.room.cf_height}};
    j["units"] = ordered_json::array();
    for (const auto& u : s.units) {
        j["units"].push_back({{"id", u.id},
                              {"pos", vec3_json(u.position)},
                              {"num_lds", u.num_lds},
                              {"m_tx", u.lambertian_order_m_tx}});
    }
    j["wavelengths"] = ordered_json::object();
    for (int w = 0; w < kNumWavelengths; ++w) {
        j["wavelengths"][kWavelengthNames[w]] = {
            {"power_w", s.bands[w].power_per_ld_w},
            {"resp", s.bands[w].responsivity}};
    }
    ordered_json branches = ordered_json::array();
    for (const auto& b : s.branches) {
        branches.push_back({{"az", b.azimuth_deg},
                            {"el", b.elevation_deg},
                            {"fov", b.fov_half_angle_deg},
                            {"area_mm2", b.detector_area_mm2}});
    }
    j["receiver"] = {
        {"branches", branches},
        {"noise_density_pa_sqrthz", s.noise.noise_density_pa_sqrthz},
        {"bandwidth_hz", s.noise.receiver_bandwidth_hz}};
    j["users"] = ordered_json::array();
    for (const auto& u : s.users)
        j["users"].push_back({{"id", u.id}, {"pos", vec3_json(u.position)}});
    j["rate_bps"] = s.configured_rate_bps;
    j["solver"] = {{"objective", s.solver.objective == Objective::DbSum
                                     ? "db"
                                     : "linear"},
                   {"tiebreak", s.solver.tiebreak}};
    if (!s.reference.empty()) {
        j["reference"] = ordered_json::array();
        for (const auto& e : s.reference) {
            j["reference"].push_back(
                {{"user", e.user_id},
                 {"ap", e.ap_id},
                 {"branch", e.branch_index + 1},
                 {"wavelength", kWavelengthNames[static_cast<int>(e.wavelength)]}});
        }
    }
    return j.dump(2);
}

namespace {

// One rectangular face tiled n1 x n2; u/v are the in-plane axes.
void tile_face(std::vector<SurfaceElement>& out, const Vec3& origin,
               const Vec3& u_axis, double u_len, const Vec3& v_axis,
               double v_len, const Vec3& normal, double reflectance,
               double elem_size) {
    int nu = std::max<int>(1, static_cast<int>(std::llround(u_len / elem_size)));
    int nv = std::max<int>(1, static_cast<int>(std::llround(v_len / elem_size)));
    double du = u_len / nu;
    double dv = v_len / nv;
    for (int i = 0; i < nu; ++i) {
        for (int k = 0; k < nv; ++k) {
            SurfaceElement e;
            e.center = origin + u_axis * ((i + 0.5) * du) + v_axis * ((k + 0.5) * dv);
            e.normal = normal;
            e.area = du * dv;
            e.reflectance = reflectance;
            e.lambertian_order_m = 1;
            out.push_back(e);
        }
    }
}

}  // namespace

std::vector<SurfaceElement> discretize(const Room& room, double elem_size) {
    if (!(elem_size > 0)) throw ValidationError({"elem_size: must be > 0"});
    std::vector<SurfaceElement> out;
    double W = room.width_x, L = room.length_y, H = room.height_z;
    // floor and ceiling
    tile_face(out, {0, 0, 0}, {1, 0, 0}, W, {0, 1, 0}, L, {0, 0, 1},
              room.rho_floor, elem_size);
    tile_face(out, {0, 0, H}, {1, 0, 0}, W, {0, 1, 0}, L, {0, 0, -1},
              room.rho_walls_ceiling, elem_size);
    // walls x = 0, x = W
    tile_face(out, {0, 0, 0}, {0, 1, 0}, L, {0, 0, 1}, H, {1, 0, 0},
              room.rho_walls_ceiling, elem_size);
    tile_face(out, {W, 0, 0}, {0, 1, 0}, L, {0, 0, 1}, H, {-1, 0, 0},
              room.rho_walls_ceiling, elem_size);
    // walls y = 0, y = L
    tile_face(out, {0, 0, 0}, {1, 0, 0}, W, {0, 0, 1}, H, {0, 1, 0},
              room.rho_walls_ceiling, elem_size);
    tile_face(out, {0, L, 0}, {1, 0, 0}, W, {0, 0, 1}, H, {0, -1, 0},
              room.rho_walls_ceiling, elem_size);
    return out;
}

}  // namespace owc
