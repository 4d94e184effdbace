#include "allocate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace owc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double score_of(double sinr_lin, Objective obj) {
    if (obj == Objective::LinearSum) return sinr_lin;
    return sinr_lin > 0.0 ? 10.0 * std::log10(sinr_lin) : kNegInf;
}

struct BranchScore {
    double sinr_lin = 0.0;
    int branch = 0;
};

// Best-branch SINR for user u on (a, w) against a fixed interferer set.
BranchScore best_branch_sinr(const AllocationProblem& p, int u, int a, int w,
                             const std::vector<Channel>& interferers) {
    BranchScore best{-1.0, 0};
    double b_hz = p.noise.receiver_bandwidth_hz;
    double preamp = preamp_noise_var(p.noise.noise_density_a_sqrthz(), b_hz);
    for (int b = 0; b < p.num_branches; ++b) {
        double sig = p.photo(u, b, a, w);
        double sl = 0.0;
        if (sig > 0.0) {
            double den = preamp;
            if (p.shot_noise) den += shot_noise_var(p.total(u, b), b_hz);
            for (const Channel& c : interferers) {
                double i = p.photo(u, b, c.ap, int(c.w));
                den += i * i;
            }
            sl = sig * sig / den;
        }
        if (sl > best.sinr_lin) best = {sl, b};
    }
    if (best.sinr_lin < 0.0) best.sinr_lin = 0.0;
    return best;
}

// Interference-free score table S0[u][pair]; the admissible per-user upper
// bound used by the exact solver and the greedy baseline.
std::vector<double> upper_bound_table(const AllocationProblem& p) {
    std::vector<double> s0(size_t(p.num_users) * p.num_pairs());
    std::vector<Channel> none;
    for (int u = 0; u < p.num_users; ++u) {
        for (int a = 0; a < p.num_aps; ++a) {
            for (int w = 0; w < kNumWavelengths; ++w) {
                double sl = best_branch_sinr(p, u, a, w, none).sinr_lin;
                s0[size_t(u) * p.num_pairs() + a * kNumWavelengths + w] =
                    score_of(sl, p.objective);
            }
        }
    }
    return s0;
}

bool lex_less(const std::vector<Channel>& a, const std::vector<Channel>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void check_capacity(const AllocationProblem& p) {
    if (p.num_users > p.num_pairs())
        throw InfeasibleError(
            "infeasible: " + std::to_string(p.num_users) +
            " users need distinct (ap, wavelength) pairs but only " +
            std::to_string(p.num_aps) + " APs x " +
            std::to_string(kNumWavelengths) + " wavelengths = " +
            std::to_string(p.num_pairs()) + " pairs exist");
}

Assignment finalize(const AllocationProblem& p,
                    const std::vector<Channel>& chosen) {
    Evaluation ev = evaluate(p, chosen);
    Assignment out;
    out.objective_value = ev.objective;
    for (int u = 0; u < p.num_users; ++u) {
        UserAssignment ua;
        ua.ap = chosen[u].ap;
        ua.w = int(chosen[u].w);
        ua.branch = ev.users[u].branch;
        ua.sinr_linear = ev.users[u].sinr_linear;
        ua.sinr_db = ev.users[u].sinr_db;
        ua.meets_threshold = meets_threshold(ua.sinr_db);
        ua.rate_bps = supported_rate(p.bw(u, ua.branch, ua.ap),
                                     p.noise.receiver_bandwidth_hz,
                                     p.configured_rate_bps, p.kappa);
        out.users.push_back(ua);
    }
    return out;
}

}  // namespace

AllocationProblem AllocationProblem::from_channel(const ChannelMatrix& cm,
                                                  const Scenario& s) {
    AllocationProblem p;
    p.num_users = cm.num_users;
    p.num_branches = cm.num_branches;
    p.num_aps = cm.num_aps;
    p.noise = s.noise;
    p.objective = s.solver.objective;
    p.configured_rate_bps = s.configured_rate_bps;
    p.photocurrent.resize(size_t(p.num_users) * p.num_branches * p.num_aps *
                          kNumWavelengths);
    p.total_photocurrent.assign(size_t(p.num_users) * p.num_branches, 0.0);
    p.link_bw_hz.resize(size_t(p.num_users) * p.num_branches * p.num_aps);
    for (int u = 0; u < p.num_users; ++u) {
        for (int b = 0; b < p.num_branches; ++b) {
            double tot = 0.0;
            for (int a = 0; a < p.num_aps; ++a) {
                const LinkMetrics& lm = cm.at(u, b, a);
                p.link_bw_hz[(size_t(u) * p.num_branches + b) * p.num_aps + a] =
                    lm.bw_3db_hz;
                for (int w = 0; w < kNumWavelengths; ++w) {
                    double i = cm.bands[w].responsivity * cm.unit_power_w[w] *
                               lm.dc_gain;
                    p.photocurrent[((size_t(u) * p.num_branches + b) *
                                        p.num_aps +
                                    a) *
                                       kNumWavelengths +
                                   w] = i;
                    tot += i;
                }
            }
            p.total_photocurrent[size_t(u) * p.num_branches + b] = tot;
        }
    }
    for (const auto& user : s.users) p.user_ids.push_back(user.id);
    for (const auto& unit : s.units) p.ap_ids.push_back(unit.id);
    return p;
}

Evaluation evaluate(const AllocationProblem& p,
                    const std::vector<Channel>& pairs, int count) {
    int n = count < 0 ? int(pairs.size()) : count;
    std::map<Channel, int> taken;
    for (int u = 0; u < n; ++u) {
        if (!taken.emplace(pairs[u], u).second)
            throw ConflictError("two users share (ap " +
                                std::to_string(pairs[u].ap) + ", " +
                                wavelength_name(pairs[u].w) + ")");
    }

    Evaluation ev;
    ev.objective = 0.0;
    for (int u = 0; u < n; ++u) {
        std::vector<Channel> interferers;
        for (int v = 0; v < n; ++v) {
            if (v == u) continue;
            if (pairs[v].w == pairs[u].w && pairs[v].ap != pairs[u].ap)
                interferers.push_back(pairs[v]);
        }
        BranchScore bs =
            best_branch_sinr(p, u, pairs[u].ap, int(pairs[u].w), interferers);
        EvaluatedUser eu;
        eu.sinr_linear = bs.sinr_lin;
        eu.sinr_db = bs.sinr_lin > 0.0 ? sinr_db_from_linear(bs.sinr_lin)
                                       : kNegInf;
        eu.branch = bs.branch;
        ev.users.push_back(eu);
        ev.objective += score_of(bs.sinr_lin, p.objective);
    }
    return ev;
}

namespace {

// Exact solver, path 1: wavelength-class decomposition. Interference exists
// only within a wavelength, so the objective splits into independent
// per-wavelength class values. Enumerate every (class subset, injective AP
// map) per wavelength into f-tables, then combine the four tables with a
// subset-sum dynamic program. Lexicographic tie preference is maintained at
// both levels; it survives composition because two candidates for the same
// state assign exactly the same user set, so a full-vector comparison always
// decides on a user inside that set.

struct ClassTable {
    std::vector<double> value;   // [subset]
    std::vector<int8_t> ap;      // [subset][user], -1 = not in class
    std::vector<char> feasible;  // [subset]
};

ClassTable build_class_table(const AllocationProblem& p, int w) {
    const int n = p.num_users, A = p.num_aps, B = p.num_branches;
    const size_t nsub = size_t(1) << n;
    ClassTable t;
    t.value.assign(nsub, kNegInf);
    t.ap.assign(nsub * size_t(n), int8_t(-1));
    t.feasible.assign(nsub, 0);

    const double bhz = p.noise.receiver_bandwidth_hz;
    const double preamp =
        preamp_noise_var(p.noise.noise_density_a_sqrthz(), bhz);
    // sig2 doubles as the interference term: same wavelength, other AP.
    std::vector<double> sig2(size_t(n) * B * A);
    std::vector<double> den0(size_t(n) * B);
    for (int u = 0; u < n; ++u) {
        for (int b = 0; b < B; ++b) {
            double d = preamp;
            if (p.shot_noise) d += shot_noise_var(p.total(u, b), bhz);
            den0[size_t(u) * B + b] = d;
            for (int a = 0; a < A; ++a) {
                double v = p.photo(u, b, a, w);
                sig2[(size_t(u) * B + b) * A + a] = v * v;
            }
        }
    }

    std::vector<int> members;  // ascending user order along the DFS path
    std::vector<int8_t> member_ap(n, -1);
    std::vector<double> den(size_t(n) * B);
    std::vector<char> ap_used(A, 0);
    std::vector<double> undo;  // exact den snapshots, restored on pop

    auto leaf = [&] {
        unsigned mask = 0;
        for (int u : members) mask |= 1u << u;
        double v = 0.0;
        for (int u : members) {
            double best = 0.0;
            int a = member_ap[u];
            for (int b = 0; b < B; ++b) {
                double sg = sig2[(size_t(u) * B + b) * A + a];
                if (sg <= 0.0) continue;
                double sl = sg / den[size_t(u) * B + b];
                if (sl > best) best = sl;
            }
            v += score_of(best, p.objective);
        }
        bool better = !t.feasible[mask] || v > t.value[mask];
        if (!better && v == t.value[mask]) {
            for (int u : members) {
                int8_t old = t.ap[size_t(mask) * n + u];
                if (member_ap[u] != old) {
                    better = member_ap[u] < old;
                    break;
                }
            }
        }
        if (better) {
            t.feasible[mask] = 1;
            t.value[mask] = v;
            int8_t* row = &t.ap[size_t(mask) * n];
            std::fill(row, row + n, int8_t(-1));
            for (int u : members) row[u] = member_ap[u];
        }
    };

    auto dfs = [&](auto&& self, int u) -> void {
        if (u == n) {
            leaf();
            return;
        }
        self(self, u + 1);  // u stays outside this wavelength class
        if (int(members.size()) == A) return;
        for (int a = 0; a < A; ++a) {
            if (ap_used[a]) continue;
            size_t mark = undo.size();
            for (int i : members) {
                for (int b = 0; b < B; ++b) {
                    double& d = den[size_t(i) * B + b];
                    undo.push_back(d);
                    d += sig2[(size_t(i) * B + b) * A + a];
                }
            }
            for (int b = 0; b < B; ++b) {
                double d = den0[size_t(u) * B + b];
                for (int i : members)
                    d += sig2[(size_t(u) * B + b) * A + member_ap[i]];
                den[size_t(u) * B + b] = d;
            }
            members.push_back(u);
            member_ap[u] = a;
            ap_used[a] = 1;
            self(self, u + 1);
            ap_used[a] = 0;
            member_ap[u] = -1;
            members.pop_back();
            for (int i = int(members.size()) - 1; i >= 0; --i)
                for (int b = B - 1; b >= 0; --b)
                    den[size_t(members[size_t(i)]) * B + b] = undo[mark + size_t(i) * B + b];
            undo.resize(mark);
        }
    };
    dfs(dfs, 0);

    t.feasible[0] = 1;
    t.value[0] = 0.0;
    return t;
}

Assignment solve_exact_partition(const AllocationProblem& p) {
    const int n = p.num_users;
    const size_t nsub = size_t(1) << n;

    std::array<ClassTable, kNumWavelengths> f;
    for (int w = 0; w < kNumWavelengths; ++w) f[w] = build_class_table(p, w);

    struct HState {
        std::vector<double> value;
        std::vector<int8_t> ap;  // [subset][user]
        std::vector<int8_t> wl;  // [subset][user]
        std::vector<char> feasible;
    };
    HState prev;
    prev.value = f[0].value;
    prev.ap = f[0].ap;
    prev.feasible = f[0].feasible;
    prev.wl.assign(nsub * size_t(n), int8_t(-1));
    for (size_t s = 0; s < nsub; ++s)
        for (int u = 0; u < n; ++u)
            if (prev.ap[s * size_t(n) + u] >= 0) prev.wl[s * size_t(n) + u] = 0;

    for (int w = 1; w < kNumWavelengths; ++w) {
        HState cur;
        cur.value.assign(nsub, kNegInf);
        cur.ap.assign(nsub * size_t(n), int8_t(-1));
        cur.wl.assign(nsub * size_t(n), int8_t(-1));
        cur.feasible.assign(nsub, 0);

        for (size_t s = 0; s < nsub; ++s) {
            bool have = false;
            for (size_t tmask = s;; tmask = (tmask - 1) & s) {
                size_t rest = s ^ tmask;
                if (prev.feasible[rest] && f[w].feasible[tmask]) {
                    double v = prev.value[rest] + f[w].value[tmask];
                    bool better = !have || v > cur.value[s];
                    if (!better && v == cur.value[s]) {
                        // lex compare against the stored best, user order
                        for (int u = 0; u < n; ++u) {
                            if (!((s >> u) & 1)) continue;
                            bool in_t = (tmask >> u) & 1;
                            int cap = in_t ? f[w].ap[tmask * size_t(n) + u]
                                           : prev.ap[rest * size_t(n) + u];
                            int cwl = in_t ? w
                                           : prev.wl[rest * size_t(n) + u];
                            int bap = cur.ap[s * size_t(n) + u];
                            int bwl = cur.wl[s * size_t(n) + u];
                            if (cap != bap) {
                                better = cap < bap;
                                break;
                            }
                            if (cwl != bwl) {
                                better = cwl < bwl;
                                break;
                            }
                        }
                    }
                    if (better) {
                        have = true;
                        cur.feasible[s] = 1;
                        cur.value[s] = v;
                        for (int u = 0; u < n; ++u) {
                            bool in_t = (tmask >> u) & 1;
                            cur.ap[s * size_t(n) + u] =
                                in_t ? f[w].ap[tmask * size_t(n) + u]
                                     : prev.ap[rest * size_t(n) + u];
                            cur.wl[s * size_t(n) + u] =
                                in_t ? int8_t(w)
                                     : prev.wl[rest * size_t(n) + u];
                        }
                    }
                }
                if (tmask == 0) break;
            }
        }
        prev = std::move(cur);
    }

    size_t full = nsub - 1;
    if (!prev.feasible[full])
        throw InfeasibleError("no conflict-free assignment exists");
    std::vector<Channel> chosen(n);
    for (int u = 0; u < n; ++u)
        chosen[u] = {int(prev.ap[full * size_t(n) + u]),
                     static_cast<Wavelength>(prev.wl[full * size_t(n) + u])};
    return finalize(p, chosen);
}

// Exact solver, path 2: depth-first branch and bound over users, used when
// the decomposition tables would be too large.
Assignment solve_exact_bnb(const AllocationProblem& p) {
    const int P = p.num_pairs();
    const int n = p.num_users;

    // cur[u][q]: user u's score on pair q under interference from the
    // channels placed so far. Starts interference-free; maintained
    // incrementally along the search path. Placed channels only ever lower
    // these scores, so summing the per-user maxima over free pairs is an
    // admissible bound on what the unassigned users can still contribute.
    std::vector<double> cur = upper_bound_table(p);
    std::vector<std::vector<Channel>> placed_cochan(kNumWavelengths);

    struct Undo {
        int u;
        int q;
        double old;
    };
    std::vector<Undo> undo_log;

    auto rescore = [&](int u, int a, int w) {
        return score_of(
            best_branch_sinr(p, u, a, w, placed_cochan[w]).sinr_lin,
            p.objective);
    };

    auto push = [&](Channel c) -> size_t {
        size_t mark = undo_log.size();
        int w = int(c.w);
        placed_cochan[w].push_back(c);
        for (int u = 0; u < n; ++u) {
            for (int a = 0; a < p.num_aps; ++a) {
                if (a == c.ap) continue;
                int q = a * kNumWavelengths + w;
                double& slot = cur[size_t(u) * P + q];
                undo_log.push_back({u, q, slot});
                slot = rescore(u, a, w);
            }
        }
        return mark;
    };

    auto pop = [&](Channel c, size_t mark) {
        while (undo_log.size() > mark) {
            const Undo& rec = undo_log.back();
            cur[size_t(rec.u) * P + rec.q] = rec.old;
            undo_log.pop_back();
        }
        placed_cochan[int(c.w)].pop_back();
    };

    std::vector<char> used(P, 0);
    std::vector<Channel> chosen(n);

    // Seed the incumbent with the greedy baseline so pruning starts
    // immediately; the search may later replace it with a lex-smaller tie.
    Assignment seed = solve_greedy(p);
    std::vector<Channel> best_pairs;
    for (const UserAssignment& ua : seed.users)
        best_pairs.push_back({ua.ap, static_cast<Wavelength>(ua.w)});
    double best_obj = seed.objective_value;

    std::vector<int> scratch(P);

    auto dfs = [&](auto&& self, int u) -> void {
        if (u == n) {
            double obj = evaluate(p, chosen).objective;
            if (obj > best_obj ||
                (obj == best_obj && lex_less(chosen, best_pairs))) {
                best_obj = obj;
                best_pairs = chosen;
            }
            return;
        }
        // Candidates by current (prefix-aware) score, ties toward low index.
        std::vector<int> order(scratch);
        int nfree = 0;
        for (int q = 0; q < P; ++q)
            if (!used[q]) order[nfree++] = q;
        order.resize(nfree);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            return cur[size_t(u) * P + x] > cur[size_t(u) * P + y];
        });

        for (int idx : order) {
            Channel c{idx / kNumWavelengths,
                      static_cast<Wavelength>(idx % kNumWavelengths)};
            used[idx] = 1;
            chosen[u] = c;
            size_t mark = push(c);

            // Bound: the prefix scored under its own interference (future
            // placements only lower it) plus each unassigned user's best
            // still-free pair under the interference placed so far.
            double bound = evaluate(p, chosen, u + 1).objective;
            for (int v = u + 1; v < n; ++v) {
                double m = kNegInf;
                for (int q = 0; q < P; ++q)
                    if (!used[q]) m = std::max(m, cur[size_t(v) * P + q]);
                bound = m == kNegInf ? kNegInf : bound + m;
            }

            if (bound >= best_obj) self(self, u + 1);
            pop(c, mark);
            used[idx] = 0;
        }
    };
    dfs(dfs, 0);
    return finalize(p, best_pairs);
}

}  // namespace

Assignment solve_exact(const AllocationProblem& p) {
    check_capacity(p);
    const int n = p.num_users, A = p.num_aps;
    // Work estimate for the decomposition: sum over class sizes of
    // C(n, k) * A! / (A - k)! leaf evaluations, for all four wavelengths.
    double work = 0.0;
    if (n <= 16) {
        double choose = 1.0;
        for (int k = 0; k <= std::min(n, A); ++k) {
            double perm = 1.0;
            for (int i = 0; i < k; ++i) perm *= double(A - i);
            work += choose * perm;
            choose = choose * double(n - k) / double(k + 1);
        }
        work *= kNumWavelengths;
    }
    if (n > 0 && n <= 16 && work <= 3e8) return solve_exact_partition(p);
    return solve_exact_bnb(p);
}

Assignment solve_exhaustive(const AllocationProblem& p) {
    check_capacity(p);
    const int P = p.num_pairs();
    double nodes = 1.0;
    for (int u = 0; u < p.num_users; ++u) nodes *= double(P - u);
    if (nodes > 1e7)
        throw InstanceTooLargeError(
            "exhaustive search space too large: ~" + std::to_string(nodes) +
            " assignments");

    std::vector<char> used(P, 0);
    std::vector<Channel> chosen(p.num_users);
    std::vector<Channel> best_pairs;
    double best_obj = kNegInf;

    // Pairs enumerated in lexicographic order, so the first assignment seen
    // at the best objective is the lex-smallest tie.
    auto dfs = [&](auto&& self, int u) -> void {
        if (u == p.num_users) {
            double obj = evaluate(p, chosen).objective;
            if (obj > best_obj || best_pairs.empty()) {
                best_obj = obj;
                best_pairs = chosen;
            }
            return;
        }
        for (int idx = 0; idx < P; ++idx) {
            if (used[idx]) continue;
            used[idx] = 1;
            chosen[u] = {idx / kNumWavelengths,
                         static_cast<Wavelength>(idx % kNumWavelengths)};
            self(self, u + 1);
            used[idx] = 0;
        }
    };
    dfs(dfs, 0);
    return finalize(p, best_pairs);
}

Assignment solve_greedy(const AllocationProblem& p) {
    check_capacity(p);
    const int P = p.num_pairs();
    std::vector<double> s0 = upper_bound_table(p);

    std::vector<int> user_order(p.num_users);
    for (int u = 0; u < p.num_users; ++u) user_order[u] = u;
    std::vector<double> best_gain(p.num_users, 0.0);
    for (int u = 0; u < p.num_users; ++u)
        for (int b = 0; b < p.num_branches; ++b)
            for (int a = 0; a < p.num_aps; ++a)
                for (int w = 0; w < kNumWavelengths; ++w)
                    best_gain[u] = std::max(best_gain[u], p.photo(u, b, a, w));
    std::stable_sort(user_order.begin(), user_order.end(),
                     [&](int x, int y) { return best_gain[x] > best_gain[y]; });

    std::vector<char> used(P, 0);
    std::vector<Channel> chosen(p.num_users);
    for (int u : user_order) {
        int pick = -1;
        double best = kNegInf;
        for (int idx = 0; idx < P; ++idx) {
            if (used[idx]) continue;
            double sc = s0[size_t(u) * P + idx];
            if (pick < 0 || sc > best) {
                pick = idx;
                best = sc;
            }
        }
        used[pick] = 1;
        chosen[u] = {pick / kNumWavelengths,
                     static_cast<Wavelength>(pick % kNumWavelengths)};
    }
    return finalize(p, chosen);
}

CompareReport compare_to_reference(const AllocationProblem& p,
                                   const Assignment& ours,
                                   const std::vector<ReferenceEntry>& reference) {
    if (int(reference.size()) != p.num_users ||
        int(ours.users.size()) != p.num_users)
        throw ValidationError({"reference comparison: user-count mismatch"});

    std::map<int, int> ap_index;
    for (size_t i = 0; i < p.ap_ids.size(); ++i) ap_index[p.ap_ids[i]] = int(i);

    std::vector<Channel> ref_pairs(p.num_users);
    for (const ReferenceEntry& e : reference) {
        auto uit = std::find(p.user_ids.begin(), p.user_ids.end(), e.user_id);
        auto ait = ap_index.find(e.ap_id);
        if (uit == p.user_ids.end() || ait == ap_index.end())
            throw ValidationError({"reference comparison: unknown user or AP id"});
        ref_pairs[uit - p.user_ids.begin()] = {ait->second, e.wavelength};
    }

    Evaluation ref_ev = evaluate(p, ref_pairs);

    CompareReport rep;
    rep.our_objective = ours.objective_value;
    rep.ref_objective = ref_ev.objective;
    rep.dominates = ours.objective_value >= ref_ev.objective;

    int matches = 0;
    std::string& t = rep.text;
    t += "user  ours(ap,wavelength,branch)  reference(ap,wavelength,branch)  match\n";
    char line[160];
    for (int u = 0; u < p.num_users; ++u) {
        const UserAssignment& mine = ours.users[u];
        const ReferenceEntry& ref = reference[u];
        bool match = p.ap_ids[mine.ap] == ref.ap_id &&
                     mine.w == int(ref.wavelength);
        if (match) ++matches;
        std::snprintf(line, sizeof line, "%4d  (%d, %s, %d)  (%d, %s, %d)  %s\n",
                      p.user_ids[u], p.ap_ids[mine.ap],
                      wavelength_name(static_cast<Wavelength>(mine.w)),
                      mine.branch + 1, ref.ap_id,
                      wavelength_name(ref.wavelength), ref.branch_index + 1,
                      match ? "yes" : "no");
        t += line;
    }
    rep.match_fraction = double(matches) / p.num_users;
    std::snprintf(line, sizeof line,
                  "objective ours=%.6f reference=%.6f dominance=%s "
                  "match_fraction=%.2f\n",
                  rep.our_objective, rep.ref_objective,
                  rep.dominates ? "yes" : "no", rep.match_fraction);
    t += line;
    return rep;
}

}  // namespace owc
