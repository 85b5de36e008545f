#pragma once

// Shared generators for tests: random MDPs, random policies, random feasible
// occupancies. Kept out of the library on purpose.

#include <random>

#include "vapor/dp.hpp"
#include "vapor/types.hpp"

namespace vapor::testing {

inline Vector<double> random_simplex(int n, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(1.0, 1.0);
    Vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = gamma(rng);
    return v / v.sum();
}

struct RandomMdpSpec {
    int num_layers = 3;
    int max_states = 3;
    int max_actions = 3;
    double reward_scale = 1.0;
};

inline LayeredMdpd random_mdp(std::mt19937_64& rng, const RandomMdpSpec& spec = RandomMdpSpec{}) {
    std::uniform_int_distribution<int> states(1, spec.max_states);
    std::uniform_int_distribution<int> actions(2, spec.max_actions);
    std::normal_distribution<double> gauss(0.0, spec.reward_scale);

    LayeredMdpd mdp;
    mdp.num_layers = spec.num_layers;
    mdp.num_actions = actions(rng);
    for (int l = 0; l < spec.num_layers; ++l) mdp.layer_sizes.push_back(states(rng));
    for (int l = 0; l < spec.num_layers; ++l) {
        Table<double> r(mdp.states(l), mdp.num_actions);
        for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = gauss(rng);
        mdp.reward_mean.push_back(std::move(r));
    }
    for (int l = 0; l + 1 < spec.num_layers; ++l) {
        TransitionMatrix<double> p(mdp.states(l) * mdp.num_actions, mdp.states(l + 1));
        for (Eigen::Index row = 0; row < p.rows(); ++row)
            p.row(row) = random_simplex(mdp.states(l + 1), rng).transpose();
        mdp.transitions.push_back(std::move(p));
    }
    mdp.initial_dist = random_simplex(mdp.states(0), rng);
    return mdp;
}

inline Policyd random_policy(const LayeredMdpd& mdp, std::mt19937_64& rng) {
    Policyd policy;
    for (int l = 0; l < mdp.num_layers; ++l) {
        Table<double> pi(mdp.states(l), mdp.num_actions);
        for (int s = 0; s < mdp.states(l); ++s)
            pi.row(s) = random_simplex(mdp.num_actions, rng).transpose();
        policy.pi.push_back(std::move(pi));
    }
    return policy;
}

inline OccupancyMeasured random_occupancy(const LayeredMdpd& mdp, std::mt19937_64& rng) {
    return occupancy_from_policy(mdp, random_policy(mdp, rng));
}

// Enumerates all deterministic policies (action per (layer, state)).
template <class Fn>
void for_each_deterministic_policy(const LayeredMdpd& mdp, Fn&& fn) {
    std::vector<std::pair<int, int>> slots;  // (layer, state)
    for (int l = 0; l < mdp.num_layers; ++l)
        for (int s = 0; s < mdp.states(l); ++s) slots.emplace_back(l, s);
    std::vector<int> choice(slots.size(), 0);
    while (true) {
        Policyd policy;
        for (int l = 0; l < mdp.num_layers; ++l)
            policy.pi.push_back(Table<double>::Zero(mdp.states(l), mdp.num_actions));
        for (size_t i = 0; i < slots.size(); ++i)
            policy.pi[static_cast<size_t>(slots[i].first)](slots[i].second, choice[i]) = 1.0;
        fn(policy);
        size_t pos = 0;
        while (pos < choice.size()) {
            if (++choice[pos] < mdp.num_actions) break;
            choice[pos] = 0;
            ++pos;
        }
        if (pos == choice.size()) break;
    }
}

}  // namespace vapor::testing
