#pragma once

#include <vector>

#include "scene.hpp"

namespace owc {

inline constexpr double kSinrThresholdDb = 15.6;

// One (AP index, wavelength) emission slot.
struct Channel {
    int ap = 0;
    Wavelength w = Wavelength::Red;

    bool operator==(const Channel&) const = default;
    auto operator<=>(const Channel&) const = default;
};

// Fig.-2-style taxonomy of every AP/wavelength emission as seen by one user.
struct LinkClassification {
    Channel signal;
    std::vector<Channel> interfering;        // same wavelength, other AP, modulated
    std::vector<Channel> illumination_only;  // everything else (background)
};

struct ConflictError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// `assignments[u]` is user u's (ap, wavelength); num_aps defines the
// emission universe (every AP emits all four bands). Throws ConflictError
// if two users share a channel.
LinkClassification classify_links(const std::vector<Channel>& assignments,
                                  int user, int num_aps);

double shot_noise_var(double total_photocurrent_a, double bandwidth_hz);

double preamp_noise_var(double density_a_sqrthz, double bandwidth_hz);

struct DegenerateLinkError : std::runtime_error {
    DegenerateLinkError() : std::runtime_error("degenerate link: zero signal") {}
};

// signal and interferer values are photocurrents (responsivity applied);
// total_incident drives the shot noise. Throws DegenerateLinkError when the
// signal is zero. shot_noise=false is a test mode.
double sinr_linear(double signal_a, const std::vector<double>& interferers_a,
                   double total_incident_a, const NoiseModel& noise,
                   bool shot_noise = true);

double sinr_db_from_linear(double sinr_lin);

// OOK bit error rate Q(sqrt(SINR)).
double ber_ook(double sinr_lin);

bool meets_threshold(double sinr_db);

// min(configured, kappa * min(channel bw, receiver bw)).
double supported_rate(double bw_channel_hz, double bw_receiver_hz,
                      double configured_rate_bps, double kappa);

inline constexpr double kDefaultKappa = 1.42;  // bit/s per Hz

}  // namespace owc
