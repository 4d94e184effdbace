#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "core/allocate.hpp"

using namespace owc;

namespace {

// Synthetic problem builder: photocurrents from a callback, one branch by
// default, generous link bandwidth everywhere.
AllocationProblem make_problem(
    int users, int aps,
    const std::function<double(int u, int b, int a, int w)>& photo,
    int branches = 1) {
    AllocationProblem p;
    p.num_users = users;
    p.num_branches = branches;
    p.num_aps = aps;
    p.photocurrent.resize(size_t(users) * branches * aps * kNumWavelengths);
    p.total_photocurrent.assign(size_t(users) * branches, 0.0);
    p.link_bw_hz.assign(size_t(users) * branches * aps, 10e9);
    for (int u = 0; u < users; ++u)
        for (int b = 0; b < branches; ++b)
            for (int a = 0; a < aps; ++a)
                for (int w = 0; w < kNumWavelengths; ++w) {
                    double v = photo(u, b, a, w);
                    p.photocurrent[((size_t(u) * branches + b) * aps + a) *
                                       kNumWavelengths +
                                   w] = v;
                    p.total_photocurrent[size_t(u) * branches + b] += v;
                }
    p.noise.noise_density_pa_sqrthz = 4.47;
    p.noise.receiver_bandwidth_hz = 5e9;
    for (int u = 0; u < users; ++u) p.user_ids.push_back(u + 1);
    for (int a = 0; a < aps; ++a) p.ap_ids.push_back(a + 1);
    return p;
}

std::vector<Channel> pairs_of(const Assignment& a) {
    std::vector<Channel> v;
    for (const auto& ua : a.users)
        v.push_back({ua.ap, static_cast<Wavelength>(ua.w)});
    return v;
}

}  // namespace

TEST_CASE("single user takes the strongest pair") {
    auto photo = [](int, int, int a, int w) {
        return (a == 2 && w == 1) ? 5e-6 : 1e-7 + 1e-9 * (a * 4 + w);
    };
    AllocationProblem p = make_problem(1, 3, photo);
    for (Assignment r :
         {solve_exact(p), solve_exhaustive(p), solve_greedy(p)}) {
        REQUIRE(r.users.size() == 1);
        CHECK(r.users[0].ap == 2);
        CHECK(r.users[0].w == 1);
        CHECK(r.users[0].meets_threshold);
    }
}

TEST_CASE("exact matches the exhaustive oracle on random instances") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> amp(1e-8, 6e-7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> table(3 * 3 * kNumWavelengths, 0.0);
        for (int u = 0; u < 3; ++u)
            for (int a = 0; a < 3; ++a)
                for (int w = 0; w < 2; ++w)  // G/B left dark
                    table[(u * 3 + a) * kNumWavelengths + w] = amp(rng);
        auto photo = [&](int u, int, int a, int w) {
            return table[(u * 3 + a) * kNumWavelengths + w];
        };
        AllocationProblem p = make_problem(3, 3, photo);

        Assignment ex = solve_exhaustive(p);
        Assignment bb = solve_exact(p);
        CHECK(bb.objective_value == ex.objective_value);
        CHECK(pairs_of(bb) == pairs_of(ex));
    }
}

TEST_CASE("ties resolve to the lexicographically smallest pair vector") {
    auto photo = [](int, int, int, int) { return 2e-7; };
    AllocationProblem p = make_problem(2, 2, photo);
    Assignment r = solve_exact(p);
    // Any interference-free placement scores the same; the lex-smallest one
    // is user 0 on (AP0, Red), user 1 on (AP0, Yellow).
    CHECK(r.users[0].ap == 0);
    CHECK(r.users[0].w == 0);
    CHECK(r.users[1].ap == 0);
    CHECK(r.users[1].w == 1);
    CHECK(pairs_of(r) == pairs_of(solve_exhaustive(p)));
}

TEST_CASE("greedy never beats exact, and is strictly worse somewhere") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> amp(1e-8, 6e-7);
    bool found_gap = false;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> table(4 * 3 * kNumWavelengths);
        for (double& v : table) v = amp(rng);
        auto photo = [&](int u, int, int a, int w) {
            return table[(u * 3 + a) * kNumWavelengths + w];
        };
        AllocationProblem p = make_problem(4, 3, photo);
        Assignment g = solve_greedy(p);
        Assignment e = solve_exact(p);
        CHECK(g.objective_value <= e.objective_value + 1e-9);
        if (g.objective_value < e.objective_value - 1e-6) found_gap = true;
    }
    CHECK(found_gap);
}

TEST_CASE("every solver returns channel-exclusive assignments") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> amp(1e-8, 6e-7);
    std::vector<double> table(6 * 2 * kNumWavelengths);
    for (double& v : table) v = amp(rng);
    auto photo = [&](int u, int, int a, int w) {
        return table[(u * 2 + a) * kNumWavelengths + w];
    };
    AllocationProblem p = make_problem(6, 2, photo);
    for (Assignment r : {solve_exact(p), solve_greedy(p)}) {
        std::set<std::pair<int, int>> used;
        for (const auto& ua : r.users)
            CHECK(used.insert({ua.ap, ua.w}).second);
    }
}

TEST_CASE("adding users never raises an earlier user's SINR") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> amp(1e-8, 6e-7);
    std::vector<double> table(3 * 2 * kNumWavelengths);
    for (double& v : table) v = amp(rng);
    auto photo = [&](int u, int, int a, int w) {
        return table[(u * 2 + a) * kNumWavelengths + w];
    };
    AllocationProblem p = make_problem(3, 2, photo);
    std::vector<Channel> pairs = {{0, Wavelength::Red},
                                  {1, Wavelength::Red},
                                  {0, Wavelength::Yellow}};
    for (int k = 1; k < 3; ++k) {
        Evaluation before = evaluate(p, pairs, k);
        Evaluation after = evaluate(p, pairs, k + 1);
        for (int u = 0; u < k; ++u)
            CHECK(after.users[u].sinr_linear <=
                  before.users[u].sinr_linear + 1e-15);
    }
}

TEST_CASE("more users than channels is infeasible") {
    auto photo = [](int, int, int, int) { return 1e-7; };
    AllocationProblem p = make_problem(5, 1, photo);
    CHECK_THROWS_AS(solve_exact(p), InfeasibleError);
    CHECK_THROWS_AS(solve_greedy(p), InfeasibleError);
}

TEST_CASE("duplicate pairs in evaluate raise a conflict") {
    auto photo = [](int, int, int, int) { return 1e-7; };
    AllocationProblem p = make_problem(2, 2, photo);
    std::vector<Channel> pairs = {{0, Wavelength::Red}, {0, Wavelength::Red}};
    CHECK_THROWS_AS(evaluate(p, pairs), ConflictError);
}

TEST_CASE("oracle refuses oversized instances") {
    auto photo = [](int, int, int, int) { return 1e-7; };
    AllocationProblem p = make_problem(8, 8, photo);
    CHECK_THROWS_AS(solve_exhaustive(p), InstanceTooLargeError);
}

TEST_CASE("reference comparison") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> amp(1e-8, 6e-7);
    std::vector<double> table(3 * 3 * kNumWavelengths);
    for (double& v : table) v = amp(rng);
    auto photo = [&](int u, int, int a, int w) {
        return table[(u * 3 + a) * kNumWavelengths + w];
    };
    AllocationProblem p = make_problem(3, 3, photo);
    Assignment ours = solve_exact(p);

    SUBCASE("a reference equal to ours matches fully") {
        std::vector<ReferenceEntry> ref;
        for (int u = 0; u < 3; ++u)
            ref.push_back({p.user_ids[u], p.ap_ids[ours.users[u].ap], 0,
                           static_cast<Wavelength>(ours.users[u].w)});
        CompareReport rep = compare_to_reference(p, ours, ref);
        CHECK(rep.match_fraction == doctest::Approx(1.0));
        CHECK(rep.dominates);
        CHECK(rep.our_objective == doctest::Approx(rep.ref_objective));
    }

    SUBCASE("the optimum dominates any feasible reference") {
        std::vector<ReferenceEntry> ref = {
            {1, 1, 0, Wavelength::Green},
            {2, 2, 0, Wavelength::Green},
            {3, 3, 0, Wavelength::Green},
        };
        CompareReport rep = compare_to_reference(p, ours, ref);
        CHECK(rep.dominates);
        CHECK(rep.our_objective >= rep.ref_objective);
        CHECK(rep.text.find("match") != std::string::npos);
    }
}
