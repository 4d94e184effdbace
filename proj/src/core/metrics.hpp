#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "raytrace.hpp"
#include "scene.hpp"

namespace owc {

enum class BwConvention : int {
    Optical = 0,     // |H(f)| / |H(0)| crosses 1/sqrt(2)
    Electrical = 1,  // post-detection electrical power down 3 dB: 2^(-1/4)
};

struct ZeroChannelError : std::runtime_error {
    ZeroChannelError() : std::runtime_error("zero channel (dc gain = 0)") {}
};

inline constexpr double kBandwidthUnbounded =
    std::numeric_limits<double>::infinity();

double dc_gain(const ImpulseResponse& ir);

// H(f) by direct summation over bin centers; H(0) equals dc_gain exactly.
std::complex<double> frequency_response(const ImpulseResponse& ir, double f_hz);

// Smallest crossing frequency found by a 10 MHz scan up to 50 GHz, refined
// by bisection to 1 MHz. Returns kBandwidthUnbounded when no crossing.
double bandwidth_3db(const ImpulseResponse& ir,
                     BwConvention convention = BwConvention::Optical);

double rms_delay_spread(const ImpulseResponse& ir);

struct LinkMetrics {
    double dc_gain = 0.0;
    double bw_3db_hz = 0.0;
    double delay_spread_s = 0.0;
    ImpulseResponse ir;

    bool operator==(const LinkMetrics&) const = default;
};

struct ChannelMatrix {
    int num_users = 0;
    int num_branches = 0;
    int num_aps = 0;
    std::vector<LinkMetrics> links;  // [user][branch][ap]
    std::array<WavelengthBand, kNumWavelengths> bands{};
    std::array<double, kNumWavelengths> unit_power_w{};
    int window_extended_links = 0;

    const LinkMetrics& at(int user, int branch, int ap) const {
        return links[(size_t(user) * num_branches + branch) * num_aps + ap];
    }
    LinkMetrics& at(int user, int branch, int ap) {
        return links[(size_t(user) * num_branches + branch) * num_aps + ap];
    }

    bool operator==(const ChannelMatrix&) const = default;
};

struct MatrixBuildOptions {
    BounceConfig bounce;
    BwConvention bw_convention = BwConvention::Optical;
    int threads = 0;  // 0 = hardware concurrency
    std::optional<std::string> cache_dir;
};

// Content hash keying the cache: canonical scenario + trace configuration
// + format version.
std::string channel_hash_hex(const Scenario& s, const MatrixBuildOptions& o);

// Traces every (user x branch x ap) link; served from the cache when the
// content hash matches. Cache I/O failures fall back to recompute.
ChannelMatrix build_channel_matrix(const Scenario& s,
                                   const MatrixBuildOptions& o);

// Versioned binary cache file ("OWCM" magic). Internal format; safe to
// delete at any time.
void write_cache(const std::string& path, const std::string& hash_hex,
                 const ChannelMatrix& m);
std::optional<ChannelMatrix> read_cache(const std::string& path,
                                        const std::string& hash_hex);

}  // namespace owc
