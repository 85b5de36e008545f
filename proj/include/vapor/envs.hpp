#pragma once

#include <iostream>
#include <random>
#include <stdexcept>

#include "vapor/dp.hpp"
#include "vapor/types.hpp"

namespace vapor {
namespace envs {

inline constexpr int kLeft = 0;
inline constexpr int kRight = 1;

inline constexpr int kChainDown = 0;   // chain: exit to the absorbing state
inline constexpr int kChainRight = 1;  // chain: move right along the chain

/// DeepSea, bsuite convention. Layer l (0-based) holds the l+1 diagonally
/// reachable columns. Left descends one column to the left (floored at 0),
/// right descends one column to the right. Every right action costs 0.01/L;
/// the right action from the bottom-right cell additionally pays the +1 goal
/// reward on the terminal transition.
template <class Scalar = double>
LayeredMdp<Scalar> make_deepsea(int depth, Scalar reward_noise_std = Scalar(1)) {
    if (depth < 2) throw std::invalid_argument("make_deepsea: depth must be >= 2");
    LayeredMdp<Scalar> mdp;
    mdp.num_layers = depth;
    mdp.num_actions = 2;
    mdp.layer_sizes.resize(static_cast<size_t>(depth));
    for (int l = 0; l < depth; ++l) mdp.layer_sizes[static_cast<size_t>(l)] = l + 1;
    mdp.reward_noise_std = reward_noise_std;

    const Scalar step_cost = Scalar(-0.01) / Scalar(depth);
    for (int l = 0; l < depth; ++l) {
        Table<Scalar> r = Table<Scalar>::Zero(l + 1, 2);
        r.col(kRight).setConstant(step_cost);
        if (l == depth - 1) r(l, kRight) += Scalar(1);
        mdp.reward_mean.push_back(std::move(r));
    }
    for (int l = 0; l + 1 < depth; ++l) {
        TransitionMatrix<Scalar> p = TransitionMatrix<Scalar>::Zero(2 * (l + 1), l + 2);
        for (int c = 0; c <= l; ++c) {
            p(c * 2 + kLeft, std::max(c - 1, 0)) = Scalar(1);
            p(c * 2 + kRight, c + 1) = Scalar(1);
        }
        mdp.transitions.push_back(std::move(p));
    }
    mdp.initial_dist = Vector<Scalar>::Zero(1);
    mdp.initial_dist[0] = Scalar(1);
    return mdp;
}

/// True iff the trajectory step at the final layer is the rewarding goal
/// transition (bottom-right cell, action right).
template <class Scalar>
bool deepsea_goal_transition(const LayeredMdp<Scalar>& mdp, int layer, int state, int action) {
    return layer == mdp.num_layers - 1 && state == mdp.states(layer) - 1 && action == kRight;
}

struct GridRewardSpec {
    double sparsity = 0.1;       // fraction of (cell, action) pairs with a reward
    double mean_std = 1.0;       // reward means drawn N(0, mean_std^2)
    double sigma_min = 0.3;      // per-cell prior stds drawn U[sigma_min, sigma_max]
    double sigma_max = 1.0;
};

template <class Scalar>
struct GridWorld {
    LayeredMdp<Scalar> mdp;
    Table<Scalar> reward_sigma0;  // per grid (cell, action) prior std, n*n x 4
};

namespace detail {

// Cardinal actions on an n x n grid with wall clipping; `blocked` marks cells
// that cannot be entered (movement into them keeps the agent in place).
template <class Scalar>
TransitionMatrix<Scalar> grid_layer_transitions(int n, const std::vector<bool>& blocked) {
    const int cells = n * n;
    TransitionMatrix<Scalar> p = TransitionMatrix<Scalar>::Zero(cells * 4, cells);
    const int dr[4] = {-1, 1, 0, 0};  // up, down, left, right
    const int dc[4] = {0, 0, -1, 1};
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const int s = r * n + c;
            for (int a = 0; a < 4; ++a) {
                int rr = r + dr[a], cc = c + dc[a];
                int next = s;
                if (rr >= 0 && rr < n && cc >= 0 && cc < n && !blocked[static_cast<size_t>(rr * n + cc)])
                    next = rr * n + cc;
                p(s * 4 + a, next) = Scalar(1);
            }
        }
    }
    return p;
}

}  // namespace detail

/// n x n grid, four cardinal actions, deterministic moves with wall clipping,
/// horizon 2n, state space replicated per layer. Reward means live on the
/// grid (time-homogeneous) and are drawn at a sparse random subset of
/// (cell, action) pairs; the matching prior stds are returned alongside.
template <class Scalar = double>
GridWorld<Scalar> make_gridworld(int n, std::mt19937_64& rng,
                                 const GridRewardSpec& spec = GridRewardSpec{},
                                 int horizon = 0) {
    if (n < 2) throw std::invalid_argument("make_gridworld: n must be >= 2");
    const int cells = n * n;
    const int L = horizon > 0 ? horizon : 2 * n;

    Table<Scalar> r_grid = Table<Scalar>::Zero(cells, 4);
    Table<Scalar> sigma_grid = Table<Scalar>::Zero(cells, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, spec.mean_std);
    std::uniform_real_distribution<double> sig(spec.sigma_min, spec.sigma_max);
    for (int s = 0; s < cells; ++s) {
        for (int a = 0; a < 4; ++a) {
            if (unit(rng) < spec.sparsity) {
                r_grid(s, a) = Scalar(gauss(rng));
                sigma_grid(s, a) = Scalar(sig(rng));
            }
        }
    }

    GridWorld<Scalar> gw;
    gw.reward_sigma0 = sigma_grid;
    auto& mdp = gw.mdp;
    mdp.num_layers = L;
    mdp.num_actions = 4;
    mdp.layer_sizes.assign(static_cast<size_t>(L), cells);
    mdp.reward_noise_std = Scalar(1);
    TransitionMatrix<Scalar> p = detail::grid_layer_transitions<Scalar>(n, std::vector<bool>(cells, false));
    for (int l = 0; l + 1 < L; ++l) mdp.transitions.push_back(p);
    for (int l = 0; l < L; ++l) mdp.reward_mean.push_back(r_grid);
    mdp.initial_dist = Vector<Scalar>::Zero(cells);
    mdp.initial_dist[0] = Scalar(1);
    return gw;
}

/// 4-room layout on an odd n x n grid: walls on the middle row/column with a
/// door at the midpoint of each half. No rewards, deterministic moves,
/// horizon 2n, start at the top-left cell.
template <class Scalar = double>
LayeredMdp<Scalar> make_four_room(int n) {
    if (n < 5 || n % 2 == 0) throw std::invalid_argument("make_four_room: n must be odd and >= 5");
    const int cells = n * n;
    const int mid = n / 2;
    const int q1 = mid / 2;
    const int q2 = mid + 1 + (n - mid - 1) / 2;
    std::vector<bool> blocked(static_cast<size_t>(cells), false);
    for (int i = 0; i < n; ++i) {
        blocked[static_cast<size_t>(mid * n + i)] = true;   // wall row
        blocked[static_cast<size_t>(i * n + mid)] = true;   // wall column
    }
    blocked[static_cast<size_t>(mid * n + q1)] = false;     // doors
    blocked[static_cast<size_t>(mid * n + q2)] = false;
    blocked[static_cast<size_t>(q1 * n + mid)] = false;
    blocked[static_cast<size_t>(q2 * n + mid)] = false;

    const int L = 2 * n;
    LayeredMdp<Scalar> mdp;
    mdp.num_layers = L;
    mdp.num_actions = 4;
    mdp.layer_sizes.assign(static_cast<size_t>(L), cells);
    mdp.reward_noise_std = Scalar(0);
    TransitionMatrix<Scalar> p = detail::grid_layer_transitions<Scalar>(n, blocked);
    for (int l = 0; l + 1 < L; ++l) mdp.transitions.push_back(p);
    for (int l = 0; l < L; ++l) mdp.reward_mean.push_back(Table<Scalar>::Zero(cells, 4));
    mdp.initial_dist = Vector<Scalar>::Zero(cells);
    mdp.initial_dist[0] = Scalar(1);
    return mdp;
}

inline constexpr int kChainState = 0;  // chain-state index within a layer
inline constexpr int kChainExit = 1;   // absorbing exit index (layers >= 1)

/// The two-MDP chain with uniform prior. Shared deterministic dynamics:
/// layer 0 holds s_1 only; layers 1..L-1 hold {s_l, exit}. At s_l, action 0
/// exits to the absorbing state and action 1 moves right at reward -eps.
/// The final chain state is terminal: both actions there pay the uncertain
/// end reward, +1 in M+ and -1 in M-. Exits are absorbing and worthless.
template <class Scalar = double>
FiniteSupportPrior<Scalar> make_chain_pair(int length, Scalar epsilon) {
    if (length < 2) throw std::invalid_argument("make_chain_pair: length must be >= 2");
    if (epsilon < Scalar(0)) throw std::invalid_argument("make_chain_pair: epsilon must be >= 0");
    if (epsilon * Scalar(length) >= Scalar(0.1))
        std::cerr << "make_chain_pair: warning, eps*L = " << epsilon * Scalar(length)
                  << " is not small\n";

    LayeredMdp<Scalar> base;
    base.num_layers = length;
    base.num_actions = 2;
    base.layer_sizes.assign(static_cast<size_t>(length), 2);
    base.layer_sizes[0] = 1;
    base.reward_noise_std = Scalar(0);
    for (int l = 0; l + 1 < length; ++l) {
        const int sl = base.layer_sizes[static_cast<size_t>(l)];
        TransitionMatrix<Scalar> p = TransitionMatrix<Scalar>::Zero(2 * sl, 2);
        p(kChainState * 2 + kChainDown, kChainExit) = Scalar(1);
        p(kChainState * 2 + kChainRight, kChainState) = Scalar(1);
        if (sl > 1) {
            p(kChainExit * 2 + kChainDown, kChainExit) = Scalar(1);
            p(kChainExit * 2 + kChainRight, kChainExit) = Scalar(1);
        }
        base.transitions.push_back(std::move(p));
    }
    for (int l = 0; l < length; ++l) {
        const int sl = base.layer_sizes[static_cast<size_t>(l)];
        Table<Scalar> r = Table<Scalar>::Zero(sl, 2);
        if (l + 1 < length) r(kChainState, kChainRight) = -epsilon;
        base.reward_mean.push_back(std::move(r));
    }
    base.initial_dist = Vector<Scalar>::Zero(1);
    base.initial_dist[0] = Scalar(1);

    FiniteSupportPrior<Scalar> prior;
    prior.mdps.assign(2, base);
    prior.mdps[0].reward_mean.back().row(kChainState).setConstant(Scalar(1));    // M+
    prior.mdps[1].reward_mean.back().row(kChainState).setConstant(Scalar(-1));   // M-
    prior.weights = Vector<Scalar>::Constant(2, Scalar(0.5));
    return prior;
}

/// True iff the trajectory occupies the chain state at the final layer.
template <class Scalar>
bool chain_reached_end(const LayeredMdp<Scalar>& mdp, int layer, int state) {
    return layer == mdp.num_layers - 1 && state == kChainState;
}

/// Samples one environment step: s' ~ P_l(.|s,a), r_obs = r_mean + N(0, nu^2).
template <class Scalar>
std::pair<Scalar, int> env_step(const LayeredMdp<Scalar>& mdp, int layer, int state, int action,
                                std::mt19937_64& rng) {
    if (layer < 0 || layer >= mdp.num_layers || state < 0 || state >= mdp.states(layer) ||
        action < 0 || action >= mdp.num_actions)
        throw std::out_of_range("env_step: index out of range");
    Scalar r = mdp.reward_mean[static_cast<size_t>(layer)](state, action);
    if (mdp.reward_noise_std > Scalar(0)) {
        std::normal_distribution<double> noise(0.0, static_cast<double>(mdp.reward_noise_std));
        r += Scalar(noise(rng));
    }
    int next = -1;
    if (layer + 1 < mdp.num_layers) {
        const auto row = mdp.transitions[static_cast<size_t>(layer)].row(state * mdp.num_actions + action);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double u = unit(rng);
        double acc = 0.0;
        next = static_cast<int>(row.size()) - 1;
        for (Eigen::Index s = 0; s < row.size(); ++s) {
            acc += static_cast<double>(row[s]);
            if (u <= acc) {
                next = static_cast<int>(s);
                break;
            }
        }
    }
    return {r, next};
}

}  // namespace envs
}  // namespace vapor
