#include "raytrace.hpp"

#include <cmath>
#include <numbers>

namespace owc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

}  // namespace

double ImpulseResponse::total_energy() const {
    double e = 0.0;
    for (double b : bins) e += b;
    return e;
}

double lambertian_gain(int m, double d, double cos_phi, double cos_theta,
                       double area) {
    if (cos_phi <= 0.0 || cos_theta <= 0.0) return 0.0;
    return (m + 1) / (2.0 * kPi * d * d) * ipow(cos_phi, m) * cos_theta * area;
}

FovResult in_fov(const ReceiverBranch& branch, const Vec3& arrival_dir) {
    Vec3 n = branch_normal(branch.azimuth_deg, branch.elevation_deg);
    double cos_theta = n.dot(arrival_dir);
    double cos_fov = std::cos(branch.fov_half_angle_deg * kDegToRad);
    return {cos_theta >= cos_fov, cos_theta};
}

PathContribution los_contribution(const LightUnit& ap, const Vec3& user_pos,
                                  const ReceiverBranch& branch) {
    Vec3 to_user = user_pos - ap.position;
    double d = to_user.norm();
    if (d <= 0.0) return {};
    Vec3 dir = to_user * (1.0 / d);
    double cos_phi = -dir.z;  // emitter normal is (0,0,-1)
    auto fov = in_fov(branch, dir * -1.0);
    if (!fov.accepted) return {0.0, d / kSpeedOfLight};
    double g = lambertian_gain(ap.lambertian_order_m_tx, d, cos_phi,
                               fov.cos_theta, branch.detector_area_m2());
    return {g, d / kSpeedOfLight};
}

namespace {

// Emission factor from the AP toward an element, including the element's
// collection area and its reflectance.
double ap_to_element(const LightUnit& ap, const SurfaceElement& e,
                     double* dist) {
    Vec3 v = e.center - ap.position;
    double d = v.norm();
    *dist = d;
    if (d <= 0.0) return 0.0;
    Vec3 dir = v * (1.0 / d);
    double cos_phi = -dir.z;
    double cos_theta = -(e.normal.dot(dir));
    return e.reflectance * lambertian_gain(ap.lambertian_order_m_tx, d,
                                           cos_phi, cos_theta, e.area);
}

struct ReceiverFactor {
    double gain = 0.0;  // element -> detector, FOV-gated
    double dist = 0.0;
};

ReceiverFactor element_to_receiver(const SurfaceElement& e,
                                   const Vec3& user_pos,
                                   const ReceiverBranch& branch,
                                   const Vec3& branch_n, double cos_fov) {
    Vec3 v = user_pos - e.center;
    double d = v.norm();
    if (d <= 0.0) return {};
    Vec3 dir = v * (1.0 / d);
    double cos_theta_rx = branch_n.dot(dir * -1.0);
    if (cos_theta_rx < cos_fov) return {0.0, d};
    double cos_phi = e.normal.dot(dir);
    return {lambertian_gain(e.lambertian_order_m, d, cos_phi, cos_theta_rx,
                            branch.detector_area_m2()),
            d};
}

}  // namespace

void for_each_first_order(const LightUnit& ap, const Vec3& user_pos,
                          const ReceiverBranch& branch,
                          const std::vector<SurfaceElement>& elements,
                          const ContributionSink& sink) {
    Vec3 bn = branch_normal(branch.azimuth_deg, branch.elevation_deg);
    double cos_fov = std::cos(branch.fov_half_angle_deg * kDegToRad);
    for (const SurfaceElement& e : elements) {
        double d1 = 0.0;
        double t = ap_to_element(ap, e, &d1);
        if (t <= 0.0) continue;
        ReceiverFactor r = element_to_receiver(e, user_pos, branch, bn, cos_fov);
        if (r.gain <= 0.0) continue;
        sink(t * r.gain, (d1 + r.dist) / kSpeedOfLight);
    }
}

void for_each_second_order(const LightUnit& ap, const Vec3& user_pos,
                           const ReceiverBranch& branch,
                           const std::vector<SurfaceElement>& elements,
                           const ContributionSink& sink) {
    const size_t n = elements.size();
    Vec3 bn = branch_normal(branch.azimuth_deg, branch.elevation_deg);
    double cos_fov = std::cos(branch.fov_half_angle_deg * kDegToRad);

    // Per-element endpoint factors; the inner pair loop only touches pairs
    // where both ends are live.
    std::vector<double> tx_gain(n), tx_dist(n);
    std::vector<double> rx_gain(n), rx_dist(n);
    for (size_t i = 0; i < n; ++i) {
        tx_gain[i] = ap_to_element(ap, elements[i], &tx_dist[i]);
        ReceiverFactor r =
            element_to_receiver(elements[i], user_pos, branch, bn, cos_fov);
        rx_gain[i] = r.gain;
        rx_dist[i] = r.dist;
    }
    std::vector<size_t> rx_live;
    for (size_t i = 0; i < n; ++i)
        if (rx_gain[i] > 0.0) rx_live.push_back(i);

    for (size_t i = 0; i < n; ++i) {
        if (tx_gain[i] <= 0.0) continue;
        const SurfaceElement& e1 = elements[i];
        for (size_t k : rx_live) {
            if (k == i) continue;
            const SurfaceElement& e2 = elements[k];
            Vec3 v = e2.center - e1.center;
            double d = v.norm();
            if (d <= 0.0) continue;
            Vec3 dir = v * (1.0 / d);
            double cos_phi = e1.normal.dot(dir);
            double cos_theta = -(e2.normal.dot(dir));
            double mid = e2.reflectance *
                         lambertian_gain(e1.lambertian_order_m, d, cos_phi,
                                         cos_theta, e2.area);
            if (mid <= 0.0) continue;
            sink(tx_gain[i] * mid * rx_gain[k],
                 (tx_dist[i] + d + rx_dist[k]) / kSpeedOfLight);
        }
    }
}

std::vector<PathContribution> first_order_response(
    const LightUnit& ap, const Vec3& user_pos, const ReceiverBranch& branch,
    const std::vector<SurfaceElement>& elements) {
    std::vector<PathContribution> out;
    for_each_first_order(ap, user_pos, branch, elements,
                         [&](double g, double t) { out.push_back({g, t}); });
    return out;
}

std::vector<PathContribution> second_order_response(
    const LightUnit& ap, const Vec3& user_pos, const ReceiverBranch& branch,
    const std::vector<SurfaceElement>& elements) {
    std::vector<PathContribution> out;
    for_each_second_order(ap, user_pos, branch, elements,
                          [&](double g, double t) { out.push_back({g, t}); });
    return out;
}

ImpulseResponse impulse_response(const LightUnit& ap, const Vec3& user_pos,
                                 const ReceiverBranch& branch,
                                 const std::vector<SurfaceElement>& elems1,
                                 const std::vector<SurfaceElement>& elems2,
                                 const BounceConfig& cfg,
                                 bool* window_extended) {
    ImpulseResponse ir;
    ir.bin_width_s = cfg.time_bin_s;
    double d_los = distance(ap.position, user_pos);
    ir.t0_s = std::floor(d_los / kSpeedOfLight / cfg.time_bin_s) *
              cfg.time_bin_s;

    size_t window_bins = static_cast<size_t>(
        std::ceil(cfg.time_window_s / cfg.time_bin_s));
    double overflow_energy = 0.0;

    auto sink = [&](double gain, double delay) {
        if (gain <= 0.0) return;
        auto idx = static_cast<size_t>(
            std::floor((delay - ir.t0_s) / ir.bin_width_s));
        if (idx >= ir.bins.size()) ir.bins.resize(idx + 1, 0.0);
        ir.bins[idx] += gain;
        if (idx >= window_bins) overflow_energy += gain;
    };

    PathContribution los = los_contribution(ap, user_pos, branch);
    sink(los.power_gain, los.delay_s);
    if (cfg.max_order >= 1)
        for_each_first_order(ap, user_pos, branch, elems1, sink);
    if (cfg.max_order >= 2)
        for_each_second_order(ap, user_pos, branch, elems2, sink);

    // Trim trailing all-zero bins.
    while (!ir.bins.empty() && ir.bins.back() == 0.0) ir.bins.pop_back();

    if (window_extended) {
        double total = ir.total_energy();
        *window_extended = total > 0.0 && overflow_energy > 1e-6 * total;
    }
    return ir;
}

}  // namespace owc
