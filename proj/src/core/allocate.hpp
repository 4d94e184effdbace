#pragma once

#include <string>
#include <vector>

#include "linkbudget.hpp"
#include "metrics.hpp"
#include "scene.hpp"

namespace owc {

// Assignment search input: photocurrents per (user, branch, ap, wavelength)
// plus everything needed to score and report an assignment. The constraint
// model is binary x[u,a,w] with sum_{a,w} x[u,a,w] = 1 per user and
// sum_u x[u,a,w] <= 1 per (a,w); the objective is the (nonlinear) SINR sum.
struct AllocationProblem {
    int num_users = 0;
    int num_branches = 0;
    int num_aps = 0;
    std::vector<double> photocurrent;        // [u][b][a][w], A
    std::vector<double> total_photocurrent;  // [u][b], all emissions, A
    std::vector<double> link_bw_hz;          // [u][b][a]
    NoiseModel noise;
    Objective objective = Objective::DbSum;
    double configured_rate_bps = 7.1e9;
    double kappa = kDefaultKappa;
    bool shot_noise = true;  // false only in scale-invariance tests
    std::vector<int> user_ids;
    std::vector<int> ap_ids;

    int num_pairs() const { return num_aps * kNumWavelengths; }

    double photo(int u, int b, int a, int w) const {
        return photocurrent[((size_t(u) * num_branches + b) * num_aps + a) *
                                kNumWavelengths +
                            w];
    }
    double total(int u, int b) const {
        return total_photocurrent[size_t(u) * num_branches + b];
    }
    double bw(int u, int b, int a) const {
        return link_bw_hz[(size_t(u) * num_branches + b) * num_aps + a];
    }

    static AllocationProblem from_channel(const ChannelMatrix& cm,
                                          const Scenario& s);
};

struct UserAssignment {
    int ap = 0;      // index into problem APs
    int w = 0;       // wavelength index, R<Y<G<B
    int branch = 0;  // select-best branch under the full assignment
    double sinr_linear = 0.0;
    double sinr_db = 0.0;
    double rate_bps = 0.0;
    bool meets_threshold = false;
};

struct Assignment {
    std::vector<UserAssignment> users;
    double objective_value = 0.0;
};

struct EvaluatedUser {
    double sinr_linear = 0.0;
    double sinr_db = 0.0;
    int branch = 0;
};

struct Evaluation {
    std::vector<EvaluatedUser> users;
    double objective = 0.0;
};

// Scores the first `count` users of `pairs` (count < 0 means all) with
// interference restricted to that prefix. Throws ConflictError on a shared
// (ap, wavelength).
Evaluation evaluate(const AllocationProblem& p, const std::vector<Channel>& pairs,
                    int count = -1);

// Globally optimal assignment by depth-first branch and bound. The node
// bound is the prefix objective under already-placed interference plus each
// unassigned user's best interference-free score over still-free pairs;
// interference only ever lowers SINR, so the bound is admissible. Ties
// resolve to the lexicographically smallest (ap, wavelength) vector in user
// order.
Assignment solve_exact(const AllocationProblem& p);

// Full enumeration oracle; throws InstanceTooLargeError above ~1e7 nodes.
Assignment solve_exhaustive(const AllocationProblem& p);

// Baseline: users in descending best-link-photocurrent order each grab the
// free pair with the highest interference-free SINR.
Assignment solve_greedy(const AllocationProblem& p);

struct CompareReport {
    std::string text;
    double our_objective = 0.0;
    double ref_objective = 0.0;
    double match_fraction = 0.0;  // (ap, wavelength) matches
    bool dominates = false;       // our objective >= reference's
};

// Scores a published reference allocation under this model and diffs it
// against ours. `reference` uses AP ids; branch entries are reported but the
// reference is re-scored with select-best branches.
CompareReport compare_to_reference(const AllocationProblem& p,
                                   const Assignment& ours,
                                   const std::vector<ReferenceEntry>& reference);

}  // namespace owc
