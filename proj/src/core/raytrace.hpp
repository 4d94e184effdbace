#pragma once

#include <functional>
#include <vector>

#include "scene.hpp"

namespace owc {

struct BounceConfig {
    int max_order = 2;  // 0 = LOS only, 1 = +first bounce, 2 = +second bounce
    double elem_size_bounce1 = 0.05;
    double elem_size_bounce2 = 0.20;
    double time_bin_s = 1e-11;
    double time_window_s = 60e-9;

    bool operator==(const BounceConfig&) const = default;
};

struct PathContribution {
    double power_gain = 0.0;  // fraction of unit source power collected
    double delay_s = 0.0;
};

// Time-binned received power per 1 W of source power; geometry only,
// wavelength-independent.
struct ImpulseResponse {
    double bin_width_s = 0.0;
    double t0_s = 0.0;  // start of the first bin
    std::vector<double> bins;

    double total_energy() const;
    bool operator==(const ImpulseResponse&) const = default;
};

// Generalized Lambertian link gain:
//   ((m+1) / (2 pi d^2)) * cos_phi^m * cos_theta * area
// Zero when either cosine is non-positive (target behind a plane).
double lambertian_gain(int m, double d, double cos_phi, double cos_theta,
                       double area);

struct FovResult {
    bool accepted = false;
    double cos_theta = 0.0;
};

// arrival_dir points from the receiver toward the source (unit length).
// Acceptance is inclusive at the FOV boundary.
FovResult in_fov(const ReceiverBranch& branch, const Vec3& arrival_dir);

PathContribution los_contribution(const LightUnit& ap, const Vec3& user_pos,
                                  const ReceiverBranch& branch);

using ContributionSink = std::function<void(double gain, double delay_s)>;

// AP -> element -> receiver, in element index order.
void for_each_first_order(const LightUnit& ap, const Vec3& user_pos,
                          const ReceiverBranch& branch,
                          const std::vector<SurfaceElement>& elements,
                          const ContributionSink& sink);

// AP -> e1 -> e2 -> receiver over ordered pairs (e1 != e2), e1-major order.
void for_each_second_order(const LightUnit& ap, const Vec3& user_pos,
                           const ReceiverBranch& branch,
                           const std::vector<SurfaceElement>& elements,
                           const ContributionSink& sink);

std::vector<PathContribution> first_order_response(
    const LightUnit& ap, const Vec3& user_pos, const ReceiverBranch& branch,
    const std::vector<SurfaceElement>& elements);

std::vector<PathContribution> second_order_response(
    const LightUnit& ap, const Vec3& user_pos, const ReceiverBranch& branch,
    const std::vector<SurfaceElement>& elements);

// Accumulates LOS + bounce orders into time bins. Contributions are summed
// in a fixed order so the result is identical regardless of caller-side
// threading. The window grows automatically when energy lands beyond it;
// *window_extended (if given) reports whether the overflow exceeded 1e-6 of
// the collected energy.
ImpulseResponse impulse_response(const LightUnit& ap, const Vec3& user_pos,
                                 const ReceiverBranch& branch,
                                 const std::vector<SurfaceElement>& elems1,
                                 const std::vector<SurfaceElement>& elems2,
                                 const BounceConfig& cfg,
                                 bool* window_extended = nullptr);

}  // namespace owc
