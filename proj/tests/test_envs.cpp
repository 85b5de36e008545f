#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <queue>
#include <set>

#include "vapor/dp.hpp"
#include "vapor/envs.hpp"
#include "vapor/rng.hpp"

using namespace vapor;
using namespace vapor::envs;

TEST_CASE("deepsea: shape, validity, exact optimal value") {
    for (int L : {2, 5, 10}) {
        auto mdp = make_deepsea(L);
        CHECK(validate_mdp(mdp).empty());
        int states = 0;
        for (int s : mdp.layer_sizes) states += s;
        CHECK(states == L * (L + 1) / 2);
        auto dp = backward_induction(mdp);
        CHECK(initial_value(mdp, dp.values) == doctest::Approx(1.0 - 0.01).epsilon(1e-12));
        // on-diagonal greedy action is right
        for (int l = 0; l < L; ++l) CHECK(dp.greedy.pi[(size_t)l](l, kRight) == 1.0);
    }
}

TEST_CASE("deepsea: always-left policy earns nothing") {
    auto mdp = make_deepsea(6);
    Policyd left;
    for (int l = 0; l < 6; ++l) {
        Table<double> pi = Table<double>::Zero(l + 1, 2);
        pi.col(kLeft).setOnes();
        left.pi.push_back(pi);
    }
    CHECK(initial_value(mdp, policy_value(mdp, left)) == 0.0);
}

TEST_CASE("deepsea: uniform policy reaches the goal cell w.p. 2^-(L-1)") {
    for (int L : {3, 6, 9}) {
        auto mdp = make_deepsea(L);
        auto occ = occupancy_from_policy(mdp, uniform_policy(mdp));
        const double mass = occ.lambda[(size_t)L - 1].row(L - 1).sum();
        CHECK(mass == doctest::Approx(std::pow(2.0, -(L - 1))).epsilon(1e-12));
        // the rewarding transition itself carries half of that
        CHECK(occ.lambda[(size_t)L - 1](L - 1, kRight) ==
              doctest::Approx(std::pow(2.0, -L)).epsilon(1e-12));
    }
}

TEST_CASE("chain pair: optimal policies and values") {
    const int L = 5;
    const double eps = 0.001;
    auto prior = make_chain_pair(L, eps);
    CHECK(validate_mdp(prior.mdps[0]).empty());
    CHECK(validate_mdp(prior.mdps[1]).empty());

    auto plus = backward_induction(prior.mdps[0]);
    for (int l = 0; l + 1 < L; ++l) CHECK(plus.greedy.pi[(size_t)l](kChainState, kChainRight) == 1.0);
    CHECK(initial_value(prior.mdps[0], plus.values) == doctest::Approx(1.0 - (L - 1) * eps));

    auto minus = backward_induction(prior.mdps[1]);
    CHECK(minus.greedy.pi[0](kChainState, kChainDown) == 1.0);
    CHECK(initial_value(prior.mdps[1], minus.values) == doctest::Approx(0.0));
}

TEST_CASE("chain pair: eps = 0 ties resolve to the exit action") {
    auto prior = make_chain_pair(4, 0.0);
    auto minus = backward_induction(prior.mdps[1]);
    CHECK(minus.greedy.pi[0](kChainState, kChainDown) == 1.0);
}

TEST_CASE("gridworld: wall clipping, determinism, seeding") {
    std::mt19937_64 rng = make_rng(42);
    auto gw = make_gridworld(4, rng);
    CHECK(validate_mdp(gw.mdp).empty());
    CHECK(gw.mdp.num_layers == 8);
    // moving up from the top-left corner stays put
    const auto& p = gw.mdp.transitions[0];
    CHECK(p(0 * 4 + 0, 0) == 1.0);
    // same seed, same reward field
    std::mt19937_64 rng2 = make_rng(42);
    auto gw2 = make_gridworld(4, rng2);
    for (int l = 0; l < gw.mdp.num_layers; ++l)
        CHECK((gw.mdp.reward_mean[(size_t)l] - gw2.mdp.reward_mean[(size_t)l]).abs().maxCoeff() == 0.0);
}

TEST_CASE("four-room: no rewards, one-hot rows, connectivity through doors") {
    const int n = 9;
    auto mdp = make_four_room(n);
    CHECK(validate_mdp(mdp).empty());
    for (const auto& r : mdp.reward_mean) CHECK(r.abs().maxCoeff() == 0.0);
    for (Eigen::Index row = 0; row < mdp.transitions[0].rows(); ++row)
        CHECK(mdp.transitions[0].row(row).maxCoeff() == 1.0);

    // BFS oracle over the one-step graph: every non-wall cell reachable from
    // the start within the horizon.
    const auto& p = mdp.transitions[0];
    std::vector<int> dist(n * n, -1);
    std::queue<int> q;
    q.push(0);
    dist[0] = 0;
    while (!q.empty()) {
        int s = q.front();
        q.pop();
        for (int a = 0; a < 4; ++a)
            for (int s2 = 0; s2 < n * n; ++s2)
                if (p(s * 4 + a, s2) == 1.0 && dist[s2] < 0) {
                    dist[s2] = dist[s] + 1;
                    q.push(s2);
                }
    }
    int reachable = 0;
    for (int s = 0; s < n * n; ++s)
        if (dist[s] >= 0) {
            ++reachable;
            CHECK(dist[s] < 2 * n);
        }
    const int mid = n / 2;
    const int walls = 2 * n - 1 - 4;  // wall row + column minus overlap minus doors
    CHECK(reachable == n * n - walls);
    // wall cells are never entered
    CHECK(dist[mid * n + 0] == -1);
}

TEST_CASE("env_step: noiseless rewards and deterministic successors") {
    auto mdp = make_deepsea(4, 0.0);
    std::mt19937_64 rng = make_rng(1);
    auto [r, next] = env_step(mdp, 0, 0, kRight, rng);
    CHECK(r == doctest::Approx(-0.01 / 4));
    CHECK(next == 1);
    auto [r2, next2] = env_step(mdp, 3, 3, kRight, rng);
    CHECK(r2 == doctest::Approx(1.0 - 0.01 / 4));
    CHECK(next2 == -1);
    CHECK_THROWS_AS(env_step(mdp, 0, 5, 0, rng), std::out_of_range);
}

TEST_CASE("env_step: empirical transition frequencies match the row") {
    LayeredMdpd mdp;
    mdp.num_layers = 2;
    mdp.layer_sizes = {1, 3};
    mdp.num_actions = 1;
    TransitionMatrix<double> p(1, 3);
    p << 0.5, 0.3, 0.2;
    mdp.transitions.push_back(p);
    mdp.reward_mean.push_back(Table<double>::Zero(1, 1));
    mdp.reward_mean.push_back(Table<double>::Zero(3, 1));
    mdp.initial_dist = Vector<double>::Ones(1);
    std::mt19937_64 rng = make_rng(7);
    const int n = 10000;
    Eigen::Vector3d counts = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) counts[env_step(mdp, 0, 0, 0, rng).second] += 1.0;
    for (int s = 0; s < 3; ++s) {
        const double freq = counts[s] / n;
        const double se = std::sqrt(p(0, s) * (1 - p(0, s)) / n);
        CHECK(std::abs(freq - p(0, s)) <= 3 * se);
    }
}

TEST_CASE("env_step: noisy rewards have the configured spread") {
    auto mdp = make_deepsea(4, 0.7);
    std::mt19937_64 rng = make_rng(3);
    const int n = 20000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        auto [r, next] = env_step(mdp, 0, 0, kLeft, rng);
        sum += r;
        sumsq += r * r;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(std::abs(mean) <= 3 * 0.7 / std::sqrt(double(n)));
    CHECK(sd == doctest::Approx(0.7).epsilon(0.05));
}
