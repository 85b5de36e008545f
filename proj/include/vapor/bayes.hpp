#pragma once

#include <optional>
#include <random>
#include <stdexcept>

#include "vapor/types.hpp"

namespace vapor {

struct MdpShape {
    int num_layers = 0;
    std::vector<int> layer_sizes;
    int num_actions = 0;

    int states(int layer) const { return layer_sizes[static_cast<size_t>(layer)]; }
    int total_states() const {
        int total = 0;
        for (int s : layer_sizes) total += s;
        return total;
    }
};

template <class Scalar>
MdpShape shape_of(const LayeredMdp<Scalar>& mdp) {
    return MdpShape{mdp.num_layers, mdp.layer_sizes, mdp.num_actions};
}

enum class SigmaMode { kCountBound, kExactPosteriorStd };

/// Conjugate beliefs over an unknown layered MDP: independent Dirichlet rows
/// over transitions and known-noise Gaussian posteriors over mean rewards,
/// tracked through sufficient statistics (visit counts and reward sums).
/// Rows of alpha are kept at total pseudo-count >= 1. If `known_p` is set the
/// dynamics are treated as exactly known (infinite pseudo-counts).
template <class Scalar>
struct BeliefState {
    MdpShape shape;
    Vector<Scalar> initial_dist;
    std::vector<TransitionMatrix<Scalar>> alpha;             // L-1 tables, rows (s*A+a)
    std::optional<std::vector<TransitionMatrix<Scalar>>> known_p;
    LayerTable<Scalar> prior_mu;
    LayerTable<Scalar> prior_var;
    Scalar nu = Scalar(1);
    LayerTable<Scalar> counts;
    LayerTable<Scalar> reward_sum;
};

using BeliefStated = BeliefState<double>;

/// Mean-dynamics beliefs with inflated Gaussian reward uncertainty:
/// sigma_tilde^2 = 3.6^2 sigma^2 + (L-l)^2 / sum_s' alpha_l(s,a,s').
template <class Scalar>
struct TransformedBeliefs {
    MdpShape shape;
    Vector<Scalar> initial_dist;
    std::vector<TransitionMatrix<Scalar>> p_mean;
    LayerTable<Scalar> reward_mu;
    LayerTable<Scalar> sigma_tilde;
};

template <class Scalar>
BeliefState<Scalar> belief_init(const MdpShape& shape, const Vector<Scalar>& initial_dist,
                                Scalar dirichlet_scale, Scalar prior_mu, Scalar prior_var,
                                Scalar nu) {
    if (!(dirichlet_scale > Scalar(0)))
        throw std::invalid_argument("belief_init: dirichlet_scale must be > 0");
    if (prior_var < Scalar(0) || nu < Scalar(0))
        throw std::invalid_argument("belief_init: variances must be >= 0");

    BeliefState<Scalar> b;
    b.shape = shape;
    b.initial_dist = initial_dist;
    b.nu = nu;
    for (int l = 0; l + 1 < shape.num_layers; ++l) {
        const int rows = shape.states(l) * shape.num_actions;
        const int next = shape.states(l + 1);
        Scalar per = dirichlet_scale;
        // Enforce row totals >= 1 by rescaling the symmetric prior up.
        if (per * Scalar(next) < Scalar(1)) per = Scalar(1) / Scalar(next);
        b.alpha.push_back(TransitionMatrix<Scalar>::Constant(rows, next, per));
    }
    b.prior_mu = zeros_like_layers<Scalar>(shape.layer_sizes, shape.num_actions);
    for (auto& t : b.prior_mu) t.setConstant(prior_mu);
    b.prior_var = zeros_like_layers<Scalar>(shape.layer_sizes, shape.num_actions);
    for (auto& t : b.prior_var) t.setConstant(prior_var);
    b.counts = zeros_like_layers<Scalar>(shape.layer_sizes, shape.num_actions);
    b.reward_sum = zeros_like_layers<Scalar>(shape.layer_sizes, shape.num_actions);
    return b;
}

/// Known-dynamics beliefs over an MDP's rewards, with per-cell reward priors.
template <class Scalar>
BeliefState<Scalar> belief_init_known_p(const LayeredMdp<Scalar>& mdp,
                                        const LayerTable<Scalar>& prior_mu,
                                        const LayerTable<Scalar>& prior_var, Scalar nu) {
    BeliefState<Scalar> b;
    b.shape = shape_of(mdp);
    b.initial_dist = mdp.initial_dist;
    b.known_p = mdp.transitions;
    b.alpha = mdp.transitions;  // placeholder shapes; unused in known-P mode
    b.prior_mu = prior_mu;
    b.prior_var = prior_var;
    b.nu = nu;
    b.counts = zeros_like_layers<Scalar>(b.shape.layer_sizes, b.shape.num_actions);
    b.reward_sum = zeros_like_layers<Scalar>(b.shape.layer_sizes, b.shape.num_actions);
    return b;
}

namespace detail {

template <class Scalar>
void posterior_reward(const BeliefState<Scalar>& b, int l, int s, int a, Scalar* mean,
                      Scalar* var) {
    const Scalar n = b.counts[static_cast<size_t>(l)](s, a);
    const Scalar mu0 = b.prior_mu[static_cast<size_t>(l)](s, a);
    const Scalar var0 = b.prior_var[static_cast<size_t>(l)](s, a);
    if (var0 == Scalar(0)) {  // point-mass prior
        *mean = mu0;
        *var = Scalar(0);
        return;
    }
    if (b.nu == Scalar(0)) {  // exact observations
        if (n > Scalar(0)) {
            *mean = b.reward_sum[static_cast<size_t>(l)](s, a) / n;
            *var = Scalar(0);
        } else {
            *mean = mu0;
            *var = var0;
        }
        return;
    }
    const Scalar precision = Scalar(1) / var0 + n / (b.nu * b.nu);
    *mean = (mu0 / var0 + b.reward_sum[static_cast<size_t>(l)](s, a) / (b.nu * b.nu)) / precision;
    *var = Scalar(1) / precision;
}

}  // namespace detail

template <class Scalar>
LayerTable<Scalar> posterior_reward_mean(const BeliefState<Scalar>& b) {
    LayerTable<Scalar> out = zeros_like_layers<Scalar>(b.shape.layer_sizes, b.shape.num_actions);
    for (int l = 0; l < b.shape.num_layers; ++l)
        for (int s = 0; s < b.shape.states(l); ++s)
            for (int a = 0; a < b.shape.num_actions; ++a) {
                Scalar m, v;
                detail::posterior_reward(b, l, s, a, &m, &v);
                out[static_cast<size_t>(l)](s, a) = m;
            }
    return out;
}

/// Conjugate update for one observed transition, optionally replicated: the
/// observation is treated as `replication` identical pseudo-observations.
/// `s_next` is ignored (pass -1) at the final layer.
template <class Scalar>
void belief_update(BeliefState<Scalar>& b, int l, int s, int a, Scalar r_obs, int s_next,
                   int replication = 1) {
    if (l < 0 || l >= b.shape.num_layers || s < 0 || s >= b.shape.states(l) || a < 0 ||
        a >= b.shape.num_actions)
        throw std::out_of_range("belief_update: index out of range");
    if (replication < 1) throw std::invalid_argument("belief_update: replication must be >= 1");
    if (l + 1 < b.shape.num_layers) {
        if (s_next < 0 || s_next >= b.shape.states(l + 1))
            throw std::out_of_range("belief_update: s_next out of range");
        if (!b.known_p)
            b.alpha[static_cast<size_t>(l)](s * b.shape.num_actions + a, s_next) += Scalar(replication);
    }
    b.counts[static_cast<size_t>(l)](s, a) += Scalar(replication);
    b.reward_sum[static_cast<size_t>(l)](s, a) += Scalar(replication) * r_obs;
}

/// Per-cell reward uncertainty. kCountBound returns the regret-analysis bound
/// sqrt((nu^2+1)/(n v 1)); kExactPosteriorStd returns the Gaussian posterior
/// std of the mean reward.
template <class Scalar>
LayerTable<Scalar> uncertainty_sigma(const BeliefState<Scalar>& b, SigmaMode mode) {
    LayerTable<Scalar> out = zeros_like_layers<Scalar>(b.shape.layer_sizes, b.shape.num_actions);
    for (int l = 0; l < b.shape.num_layers; ++l) {
        for (int s = 0; s < b.shape.states(l); ++s) {
            for (int a = 0; a < b.shape.num_actions; ++a) {
                if (mode == SigmaMode::kCountBound) {
                    const Scalar n = std::max(b.counts[static_cast<size_t>(l)](s, a), Scalar(1));
                    out[static_cast<size_t>(l)](s, a) = std::sqrt((b.nu * b.nu + Scalar(1)) / n);
                } else {
                    Scalar m, v;
                    detail::posterior_reward(b, l, s, a, &m, &v);
                    out[static_cast<size_t>(l)](s, a) = std::sqrt(v);
                }
            }
        }
    }
    return out;
}

template <class Scalar>
std::vector<TransitionMatrix<Scalar>> posterior_mean_dynamics(const BeliefState<Scalar>& b) {
    if (b.known_p) return *b.known_p;
    std::vector<TransitionMatrix<Scalar>> out;
    out.reserve(b.alpha.size());
    for (const auto& alpha : b.alpha) {
        TransitionMatrix<Scalar> p = alpha;
        for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r) /= p.row(r).sum();
        out.push_back(std::move(p));
    }
    return out;
}

/// The beliefs transformation: dynamics replaced by their posterior mean, and
/// reward uncertainty inflated to absorb the dynamics uncertainty. Known-P
/// beliefs contribute no dynamics term.
template <class Scalar>
TransformedBeliefs<Scalar> transform_beliefs(const BeliefState<Scalar>& b,
                                             SigmaMode mode = SigmaMode::kCountBound) {
    TransformedBeliefs<Scalar> t;
    t.shape = b.shape;
    t.initial_dist = b.initial_dist;
    t.p_mean = posterior_mean_dynamics(b);
    t.reward_mu = posterior_reward_mean(b);
    LayerTable<Scalar> sigma = uncertainty_sigma(b, mode);
    const int L = b.shape.num_layers;
    t.sigma_tilde = zeros_like_layers<Scalar>(b.shape.layer_sizes, b.shape.num_actions);
    for (int l = 0; l < L; ++l) {
        const Scalar steps_left = Scalar(L - 1 - l);
        for (int s = 0; s < b.shape.states(l); ++s) {
            for (int a = 0; a < b.shape.num_actions; ++a) {
                Scalar sig = sigma[static_cast<size_t>(l)](s, a);
                Scalar var = Scalar(3.6) * Scalar(3.6) * sig * sig;
                if (l + 1 < L && !b.known_p) {
                    const Scalar alpha_sum =
                        b.alpha[static_cast<size_t>(l)].row(s * b.shape.num_actions + a).sum();
                    var += steps_left * steps_left / alpha_sum;
                }
                t.sigma_tilde[static_cast<size_t>(l)](s, a) = std::sqrt(var);
            }
        }
    }
    return t;
}

/// Posterior draw of a full MDP: Dirichlet transition rows (via gamma draws)
/// and Gaussian mean rewards. Deterministic given the rng state.
template <class Scalar>
LayeredMdp<Scalar> sample_mdp(const BeliefState<Scalar>& b, std::mt19937_64& rng) {
    LayeredMdp<Scalar> mdp;
    mdp.num_layers = b.shape.num_layers;
    mdp.layer_sizes = b.shape.layer_sizes;
    mdp.num_actions = b.shape.num_actions;
    mdp.initial_dist = b.initial_dist;
    mdp.reward_noise_std = b.nu;

    if (b.known_p) {
        mdp.transitions = *b.known_p;
    } else {
        for (const auto& alpha : b.alpha) {
            TransitionMatrix<Scalar> p(alpha.rows(), alpha.cols());
            for (Eigen::Index r = 0; r < alpha.rows(); ++r) {
                Scalar total = Scalar(0);
                for (Eigen::Index c = 0; c < alpha.cols(); ++c) {
                    std::gamma_distribution<double> gamma(static_cast<double>(alpha(r, c)), 1.0);
                    p(r, c) = Scalar(gamma(rng));
                    total += p(r, c);
                }
                if (total <= Scalar(0))
                    p.row(r) = alpha.row(r) / alpha.row(r).sum();  // degenerate draw guard
                else
                    p.row(r) /= total;
            }
            mdp.transitions.push_back(std::move(p));
        }
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int l = 0; l < b.shape.num_layers; ++l) {
        Table<Scalar> r(b.shape.states(l), b.shape.num_actions);
        for (int s = 0; s < b.shape.states(l); ++s)
            for (int a = 0; a < b.shape.num_actions; ++a) {
                Scalar m, v;
                detail::posterior_reward(b, l, s, a, &m, &v);
                r(s, a) = m + std::sqrt(v) * Scalar(gauss(rng));
            }
        mdp.reward_mean.push_back(std::move(r));
    }
    return mdp;
}

/// Draw r ~ N(reward_mu, sigma_tilde^2) elementwise.
template <class Scalar>
LayerTable<Scalar> sample_transformed_rewards(const TransformedBeliefs<Scalar>& t,
                                              std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    LayerTable<Scalar> out = t.reward_mu;
    for (size_t l = 0; l < out.size(); ++l)
        for (Eigen::Index s = 0; s < out[l].rows(); ++s)
            for (Eigen::Index a = 0; a < out[l].cols(); ++a)
                out[l](s, a) += t.sigma_tilde[l](s, a) * Scalar(gauss(rng));
    return out;
}

}  // namespace vapor
