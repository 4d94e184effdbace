#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "vec3.hpp"

namespace owc {

// Wavelength bands of the RYGB laser-diode luminaires. Index order is the
// canonical tie-break order everywhere downstream.
enum class Wavelength : int { Red = 0, Yellow = 1, Green = 2, Blue = 3 };

inline constexpr int kNumWavelengths = 4;

const char* wavelength_name(Wavelength w);

struct WavelengthBand {
    double power_per_ld_w = 0.0;  // optical power of one LD in this band
    double responsivity = 0.0;    // A/W at the photodetector

    bool operator==(const WavelengthBand&) const = default;
};

struct Room {
    double width_x = 4.0;
    double length_y = 8.0;
    double height_z = 3.0;
    double rho_walls_ceiling = 0.8;
    double rho_floor = 0.3;
    double elem_size_bounce1 = 0.05;
    double elem_size_bounce2 = 0.20;
    double cf_height = 1.0;  // communication floor

    bool operator==(const Room&) const = default;
};

struct SurfaceElement {
    Vec3 center;
    Vec3 normal;  // unit, pointing into the room
    double area = 0.0;
    double reflectance = 0.0;
    int lambertian_order_m = 1;
};

struct LightUnit {
    int id = 0;
    Vec3 position;  // on the ceiling, normal fixed to (0,0,-1)
    int num_lds = 12;
    int lambertian_order_m_tx = 1;

    bool operator==(const LightUnit&) const = default;
};

struct ReceiverBranch {
    double azimuth_deg = 0.0;
    double elevation_deg = 60.0;  // up from the horizontal plane; 90 = zenith
    double fov_half_angle_deg = 25.0;
    double detector_area_mm2 = 20.0;  // file unit; SI via accessor

    double detector_area_m2() const { return detector_area_mm2 * 1e-6; }

    bool operator==(const ReceiverBranch&) const = default;
};

struct NoiseModel {
    double noise_density_pa_sqrthz = 4.47;  // file unit; SI via accessor
    double receiver_bandwidth_hz = 5e9;

    double noise_density_a_sqrthz() const {
        return noise_density_pa_sqrthz * 1e-12;
    }

    bool operator==(const NoiseModel&) const = default;
};

inline constexpr double kElectronCharge = 1.602176634e-19;  // C
inline constexpr double kSpeedOfLight = 299792458.0;        // m/s

struct UserPlacement {
    int id = 0;
    Vec3 position;

    bool operator==(const UserPlacement&) const = default;
};

enum class Objective : int { DbSum = 0, LinearSum = 1 };

struct SolverOptions {
    Objective objective = Objective::DbSum;
    std::string tiebreak = "lex";

    bool operator==(const SolverOptions&) const = default;
};

// A published reference allocation for a built-in scenario (one-based AP and
// branch numbers as reported, converted to zero-based indices on load).
struct ReferenceEntry {
    int user_id = 0;
    int ap_id = 0;
    int branch_index = 0;  // zero-based
    Wavelength wavelength = Wavelength::Red;

    bool operator==(const ReferenceEntry&) const = default;
};

struct Scenario {
    std::string name;
    Room room;
    std::vector<LightUnit> units;
    std::array<WavelengthBand, kNumWavelengths> bands{};
    std::vector<ReceiverBranch> branches;
    NoiseModel noise;
    std::vector<UserPlacement> users;
    double configured_rate_bps = 7.1e9;
    SolverOptions solver;
    std::vector<ReferenceEntry> reference;  // empty unless built-in

    bool operator==(const Scenario&) const = default;

    int num_users() const { return static_cast<int>(users.size()); }
    int num_aps() const { return static_cast<int>(units.size()); }
    int num_branches() const { return static_cast<int>(branches.size()); }

    double unit_power_w(Wavelength w) const {
        int lds = units.empty() ? 12 : units.front().num_lds;
        return bands[static_cast<int>(w)].power_per_ld_w * lds;
    }
};

// Branch boresight for the (azimuth, elevation) convention:
// (cos El cos Az, cos El sin Az, sin El).
Vec3 branch_normal(double azimuth_deg, double elevation_deg);

// Table-defaults scenario skeleton (no users).
Scenario default_scenario();

// The three published 10-user layouts: "conference_table", "cocktail1",
// "cocktail2". Throws ParseError on an unknown name.
Scenario builtin_scenario(const std::string& name);

bool is_builtin_scenario_name(const std::string& name);

// Parse a scenario from its JSON schema; omitted fields take the defaults.
// Throws ParseError or ValidationError.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

// Canonical serialized form; parse(canonical_json(s)) == s byte-for-byte.
std::string canonical_json(const Scenario& s);

// Throws ValidationError listing every violated invariant.
void validate(const Scenario& s);

// Tile all six room surfaces with square elements of side ~elem_size
// (clamped per dimension to an integral count). Normals point inward.
std::vector<SurfaceElement> discretize(const Room& room, double elem_size);

}  // namespace owc
