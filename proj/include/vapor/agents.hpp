#pragma once

#include <random>

#include "vapor/bayes.hpp"
#include "vapor/dp.hpp"
#include "vapor/oracles.hpp"
#include "vapor/solver.hpp"

namespace vapor {

enum class AgentKind {
    kVapor,
    kPsrl,
    kKLearning,
    kSoftQ,
    kMarginalOptimality,
    kRlsviVariant,
    kVaporLite,
    kMaxEntropy,  // weighted max-entropy coverage agent
    kOracle,      // greedy on the true MDP; testing baseline
};

struct AgentOptions {
    SigmaMode sigma_mode = SigmaMode::kCountBound;
    SolverOptions solver;
    double softq_temperature = 1.0;
    int marginal_samples = 64;
    double klearning_tau_min = 1e-2;
    double klearning_tau_max = 100.0;
    bool maxent_weighted = true;  // weight the entropy by the unvisited indicator
};

/// Algorithm 1: transform the beliefs, solve the VAPOR program on the mean
/// dynamics, execute the policy proportional to the solution.
template <class Scalar>
std::pair<Policy<Scalar>, SolveDiagnostics<Scalar>> vapor_policy(
    const BeliefState<Scalar>& b, const AgentOptions& opts = AgentOptions{}) {
    auto prob = make_vapor_problem(transform_beliefs(b, opts.sigma_mode));
    auto [lam, diag] = solve_frank_wolfe(prob, opts.solver);
    return {policy_from_occupancy(lam), std::move(diag)};
}

/// Posterior sampling: draw an MDP, act greedily for the episode.
template <class Scalar>
Policy<Scalar> psrl_policy(const BeliefState<Scalar>& b, std::mt19937_64& rng) {
    return backward_induction(sample_mdp(b, rng)).greedy;
}

template <class Scalar>
Policy<Scalar> psrl_policy(const FiniteSupportPrior<Scalar>& prior, std::mt19937_64& rng) {
    const int i = sample_support_index(prior, rng);
    return backward_induction(prior.mdps[static_cast<size_t>(i)]).greedy;
}

/// Soft value iteration at a fixed temperature, no epistemic term anywhere:
/// V_l = tau logsumexp(Q_l / tau), policy proportional to exp(Q / tau).
template <class Scalar>
Policy<Scalar> soft_q_policy(const LayerTable<Scalar>& reward,
                             const std::vector<TransitionMatrix<Scalar>>& transitions,
                             Scalar temperature) {
    if (!(temperature > Scalar(0)))
        throw std::invalid_argument("soft_q_policy: temperature must be > 0");
    const int L = static_cast<int>(reward.size());
    Policy<Scalar> policy;
    policy.pi.resize(reward.size());
    Vector<Scalar> v_next;
    for (int l = L - 1; l >= 0; --l) {
        const int sl = static_cast<int>(reward[static_cast<size_t>(l)].rows());
        const int actions = static_cast<int>(reward[static_cast<size_t>(l)].cols());
        Table<Scalar> q = reward[static_cast<size_t>(l)];
        if (l + 1 < L)
            q += unflatten_sa<Scalar>(transitions[static_cast<size_t>(l)] * v_next, sl, actions);
        Vector<Scalar> v(sl);
        Table<Scalar> pi(sl, actions);
        for (int s = 0; s < sl; ++s) {
            const Scalar qmax = q.row(s).maxCoeff();
            Table<Scalar> w = ((q.row(s) - qmax) / temperature).exp();
            const Scalar z = w.sum();
            pi.row(s) = w / z;
            v[s] = qmax + temperature * std::log(z);
        }
        policy.pi[static_cast<size_t>(l)] = std::move(pi);
        v_next = std::move(v);
    }
    return policy;
}

namespace detail {

template <class Scalar>
struct KBackup {
    LayerTable<Scalar> k;
    std::vector<Vector<Scalar>> v;
};

template <class Scalar>
KBackup<Scalar> klearning_backup(const std::vector<TransitionMatrix<Scalar>>& transitions,
                                 const LayerTable<Scalar>& reward, const LayerTable<Scalar>& sigma,
                                 Scalar tau) {
    const int L = static_cast<int>(reward.size());
    KBackup<Scalar> out;
    out.k.resize(reward.size());
    out.v.resize(reward.size());
    Vector<Scalar> v_next;
    for (int l = L - 1; l >= 0; --l) {
        const int sl = static_cast<int>(reward[static_cast<size_t>(l)].rows());
        const int actions = static_cast<int>(reward[static_cast<size_t>(l)].cols());
        Table<Scalar> k = reward[static_cast<size_t>(l)] +
                          sigma[static_cast<size_t>(l)].square() / (Scalar(2) * tau);
        if (l + 1 < L)
            k += unflatten_sa<Scalar>(transitions[static_cast<size_t>(l)] * v_next, sl, actions);
        Vector<Scalar> v(sl);
        for (int s = 0; s < sl; ++s) {
            const Scalar kmax = k.row(s).maxCoeff();
            v[s] = kmax + tau * std::log(((k.row(s) - kmax) / tau).exp().sum());
        }
        out.k[static_cast<size_t>(l)] = std::move(k);
        out.v[static_cast<size_t>(l)] = v;
        v_next = std::move(v);
    }
    return out;
}

}  // namespace detail

/// Equal-temperature variant: soft K-backup with an optimism bonus
/// sigma^2/(2 tau), the scalar tau picked by minimizing g(tau) = rho . V_1
/// over a log grid refined by golden section. Returns the Boltzmann policy.
template <class Scalar>
Policy<Scalar> klearning_policy(const std::vector<TransitionMatrix<Scalar>>& transitions,
                                const Vector<Scalar>& rho, const LayerTable<Scalar>& reward,
                                const LayerTable<Scalar>& sigma, Scalar tau_min, Scalar tau_max,
                                Scalar* tau_star_out = nullptr) {
    if (!(Scalar(0) < tau_min && tau_min < tau_max))
        throw std::invalid_argument("klearning_policy: need 0 < tau_min < tau_max");
    auto g = [&](Scalar tau) {
        return rho.dot(detail::klearning_backup(transitions, reward, sigma, tau).v[0]);
    };

    constexpr int kGridPoints = 33;
    const Scalar log_lo = std::log(tau_min), log_hi = std::log(tau_max);
    Scalar best_tau = tau_min;
    Scalar best_val = std::numeric_limits<Scalar>::infinity();
    int best_idx = 0;
    for (int i = 0; i < kGridPoints; ++i) {
        const Scalar tau =
            std::exp(log_lo + (log_hi - log_lo) * Scalar(i) / Scalar(kGridPoints - 1));
        const Scalar val = g(tau);
        if (val < best_val) {
            best_val = val;
            best_tau = tau;
            best_idx = i;
        }
    }
    // Golden-section refinement on the log axis around the winning grid cell.
    Scalar lo = log_lo + (log_hi - log_lo) * Scalar(std::max(best_idx - 1, 0)) / Scalar(kGridPoints - 1);
    Scalar hi = log_lo +
                (log_hi - log_lo) * Scalar(std::min(best_idx + 1, kGridPoints - 1)) / Scalar(kGridPoints - 1);
    const Scalar invphi = Scalar(0.5) * (std::sqrt(Scalar(5)) - Scalar(1));
    Scalar x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    Scalar f1 = g(std::exp(x1)), f2 = g(std::exp(x2));
    for (int it = 0; it < 50 && hi - lo > Scalar(1e-6); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = g(std::exp(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = g(std::exp(x2));
        }
    }
    const Scalar refined = std::exp((lo + hi) / Scalar(2));
    if (g(refined) < best_val) best_tau = refined;
    if (tau_star_out) *tau_star_out = best_tau;

    auto backup = detail::klearning_backup(transitions, reward, sigma, best_tau);
    Policy<Scalar> policy;
    policy.pi.reserve(backup.k.size());
    for (const auto& k : backup.k) {
        Table<Scalar> pi(k.rows(), k.cols());
        for (Eigen::Index s = 0; s < k.rows(); ++s) {
            Table<Scalar> w = ((k.row(s) - k.row(s).maxCoeff()) / best_tau).exp();
            pi.row(s) = w / w.sum();
        }
        policy.pi.push_back(std::move(pi));
    }
    return policy;
}

template <class Scalar>
Policy<Scalar> klearning_policy(const BeliefState<Scalar>& b,
                                const AgentOptions& opts = AgentOptions{}) {
    auto t = transform_beliefs(b, opts.sigma_mode);
    return klearning_policy(t.p_mean, t.initial_dist, t.reward_mu, t.sigma_tilde,
                            Scalar(opts.klearning_tau_min), Scalar(opts.klearning_tau_max));
}

/// Per-state Monte-Carlo frequency with which each action is optimal across
/// fresh posterior draws. Resampled every episode; the resulting behavior is
/// deliberately inconsistent across layers.
template <class Scalar>
Policy<Scalar> marginal_optimality_policy(const BeliefState<Scalar>& b, int n_samples,
                                          std::mt19937_64& rng) {
    if (n_samples < 1) throw std::invalid_argument("marginal_optimality_policy: n_samples >= 1");
    LayerTable<Scalar> freq = zeros_like_layers<Scalar>(b.shape.layer_sizes, b.shape.num_actions);
    for (int i = 0; i < n_samples; ++i) {
        auto greedy = backward_induction(sample_mdp(b, rng)).greedy;
        for (size_t l = 0; l < freq.size(); ++l) freq[l] += greedy.pi[l];
    }
    Policy<Scalar> policy;
    policy.pi.reserve(freq.size());
    for (auto& f : freq) policy.pi.push_back(f / Scalar(n_samples));
    return policy;
}

template <class Scalar>
Policy<Scalar> marginal_optimality_policy(const FiniteSupportPrior<Scalar>& prior, int n_samples,
                                          std::mt19937_64& rng) {
    if (n_samples < 1) throw std::invalid_argument("marginal_optimality_policy: n_samples >= 1");
    std::vector<Policy<Scalar>> greedy;
    greedy.reserve(prior.mdps.size());
    for (const auto& m : prior.mdps) greedy.push_back(backward_induction(m).greedy);
    LayerTable<Scalar> freq = zeros_like_layers<Scalar>(prior.mdps.front().layer_sizes,
                                                        prior.mdps.front().num_actions);
    for (int i = 0; i < n_samples; ++i) {
        const auto& pi = greedy[static_cast<size_t>(sample_support_index(prior, rng))];
        for (size_t l = 0; l < freq.size(); ++l) freq[l] += pi.pi[l];
    }
    Policy<Scalar> policy;
    policy.pi.reserve(freq.size());
    for (auto& f : freq) policy.pi.push_back(f / Scalar(n_samples));
    return policy;
}

/// RLSVI-flavored baseline: PSRL under the transformed beliefs. Rewards are
/// drawn N(E r, sigma_tilde^2), dynamics are the posterior mean.
template <class Scalar>
Policy<Scalar> rlsvi_variant_policy(const BeliefState<Scalar>& b, std::mt19937_64& rng,
                                    const AgentOptions& opts = AgentOptions{}) {
    auto t = transform_beliefs(b, opts.sigma_mode);
    LayerTable<Scalar> sampled = sample_transformed_rewards(t, rng);
    return detail::backward_induction_tables(t.p_mean, sampled).greedy;
}

/// VAPOR-lite with the episode-indexed scale c_t = sqrt(2)(1 + log(S L t)).
template <class Scalar>
Policy<Scalar> vapor_lite_policy(const BeliefState<Scalar>& b, int episode,
                                 const AgentOptions& opts = AgentOptions{},
                                 SolveDiagnostics<Scalar>* diag_out = nullptr) {
    auto prob = make_vapor_problem(transform_beliefs(b, opts.sigma_mode));
    const Scalar c = vapor_lite_schedule<Scalar>(prob.total_states(), prob.num_layers(), episode);
    auto [lam, diag] = solve_vapor_lite_tabular(prob, c, opts.solver);
    if (diag_out) *diag_out = std::move(diag);
    return policy_from_occupancy(lam);
}

/// Max-entropy coverage agent: maximizes the (optionally unvisited-weighted)
/// occupancy entropy under the known mean dynamics.
template <class Scalar>
Policy<Scalar> max_entropy_policy(const std::vector<TransitionMatrix<Scalar>>& transitions,
                                  const Vector<Scalar>& rho, const LayerTable<Scalar>& weights,
                                  const SolverOptions& opts,
                                  const OccupancyMeasure<Scalar>* warm_start = nullptr,
                                  OccupancyMeasure<Scalar>* lambda_out = nullptr) {
    auto [lam, diag] = solve_weighted_max_entropy(weights, transitions, rho, opts, warm_start);
    if (lambda_out) *lambda_out = lam;
    return policy_from_occupancy(lam);
}

}  // namespace vapor
