#include "linkbudget.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace owc {

LinkClassification classify_links(const std::vector<Channel>& assignments,
                                  int user, int num_aps) {
    std::set<Channel> taken;
    for (const Channel& c : assignments) {
        if (!taken.insert(c).second)
            throw ConflictError("two users share (ap " + std::to_string(c.ap) +
                                ", " + wavelength_name(c.w) + ")");
    }

    LinkClassification out;
    out.signal = assignments[size_t(user)];
    std::set<Channel> interfering;
    for (size_t u = 0; u < assignments.size(); ++u) {
        if (int(u) == user) continue;
        const Channel& c = assignments[u];
        if (c.w == out.signal.w && c.ap != out.signal.ap)
            interfering.insert(c);
    }
    for (int a = 0; a < num_aps; ++a) {
        for (int w = 0; w < kNumWavelengths; ++w) {
            Channel c{a, static_cast<Wavelength>(w)};
            if (c == out.signal) continue;
            if (interfering.count(c)) out.interfering.push_back(c);
            else out.illumination_only.push_back(c);
        }
    }
    return out;
}

double shot_noise_var(double total_photocurrent_a, double bandwidth_hz) {
    return 2.0 * kElectronCharge * total_photocurrent_a * bandwidth_hz;
}

double preamp_noise_var(double density_a_sqrthz, double bandwidth_hz) {
    return density_a_sqrthz * density_a_sqrthz * bandwidth_hz;
}

double sinr_linear(double signal_a, const std::vector<double>& interferers_a,
                   double total_incident_a, const NoiseModel& noise,
                   bool shot_noise) {
    if (!(signal_a > 0.0)) throw DegenerateLinkError{};
    double b = noise.receiver_bandwidth_hz;
    double den = preamp_noise_var(noise.noise_density_a_sqrthz(), b);
    if (shot_noise) den += shot_noise_var(total_incident_a, b);
    for (double i : interferers_a) den += i * i;
    return signal_a * signal_a / den;
}

double sinr_db_from_linear(double sinr_lin) {
    return 10.0 * std::log10(sinr_lin);
}

double ber_ook(double sinr_lin) {
    return 0.5 * std::erfc(std::sqrt(sinr_lin) / std::sqrt(2.0));
}

bool meets_threshold(double sinr_db) { return sinr_db >= kSinrThresholdDb; }

double supported_rate(double bw_channel_hz, double bw_receiver_hz,
                      double configured_rate_bps, double kappa) {
    double usable = std::min(bw_channel_hz, bw_receiver_hz);
    return std::min(configured_rate_bps, kappa * usable);
}

}  // namespace owc
