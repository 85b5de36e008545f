#pragma once

#include <random>
#include <stdexcept>

#include "vapor/bayes.hpp"
#include "vapor/dp.hpp"
#include "vapor/objective.hpp"
#include "vapor/types.hpp"

namespace vapor {

template <class Scalar>
std::vector<std::string> validate_prior(const FiniteSupportPrior<Scalar>& prior,
                                        bool require_shared_p = true) {
    std::vector<std::string> report;
    if (prior.mdps.empty()) {
        report.push_back("prior has empty support");
        return report;
    }
    if (prior.weights.size() != static_cast<Eigen::Index>(prior.mdps.size()))
        report.push_back("weights length does not match support size");
    else {
        if (prior.weights.minCoeff() < Scalar(0)) report.push_back("negative prior weight");
        if (std::abs(prior.weights.sum() - Scalar(1)) > Scalar(1e-12))
            report.push_back("prior weights do not sum to 1");
    }
    const auto& first = prior.mdps.front();
    for (size_t i = 1; i < prior.mdps.size(); ++i) {
        const auto& m = prior.mdps[i];
        if (m.num_layers != first.num_layers || m.layer_sizes != first.layer_sizes ||
            m.num_actions != first.num_actions)
            report.push_back("support MDPs disagree on shape");
        if ((m.initial_dist - first.initial_dist).template lpNorm<Eigen::Infinity>() > Scalar(1e-12))
            report.push_back("support MDPs disagree on initial distribution");
        if (require_shared_p)
            for (size_t l = 0; l < first.transitions.size(); ++l)
                if ((m.transitions[l] - first.transitions[l]).template lpNorm<Eigen::Infinity>() >
                    Scalar(1e-12)) {
                    report.push_back("support MDPs disagree on transitions (known-P mode)");
                    break;
                }
    }
    return report;
}

/// Exact posterior probability of state-action optimality on a finite-support
/// prior with shared known dynamics: the weighted mix of the support MDPs'
/// optimal-policy occupancies. Mixed dynamics are rejected.
template <class Scalar>
OccupancyMeasure<Scalar> exact_pgamma(const FiniteSupportPrior<Scalar>& prior) {
    auto report = validate_prior(prior, /*require_shared_p=*/true);
    if (!report.empty()) throw std::invalid_argument("exact_pgamma: " + report.front());
    OccupancyMeasure<Scalar> out;
    out.lambda = zeros_like_layers<Scalar>(prior.mdps.front().layer_sizes,
                                           prior.mdps.front().num_actions);
    for (size_t i = 0; i < prior.mdps.size(); ++i) {
        auto dp = backward_induction(prior.mdps[i]);
        auto occ = occupancy_from_policy(prior.mdps[i], dp.greedy);
        for (size_t l = 0; l < out.lambda.size(); ++l)
            out.lambda[l] += prior.weights[static_cast<Eigen::Index>(i)] * occ.lambda[l];
    }
    return out;
}

template <class Scalar>
int sample_support_index(const FiniteSupportPrior<Scalar>& prior, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < prior.weights.size(); ++i) {
        acc += static_cast<double>(prior.weights[i]);
        if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(prior.weights.size()) - 1;
}

enum class TsOccupancyMode { kMeanDynamics, kSampledDynamics };

/// Monte-Carlo estimate of P(Gamma) as the mean Thompson-sampling occupancy.
/// In mean-dynamics mode each sampled greedy policy is rolled through the
/// posterior-mean transitions, so the estimate stays flow-feasible.
template <class Scalar>
OccupancyMeasure<Scalar> ts_monte_carlo_pgamma(const BeliefState<Scalar>& b, int n_samples,
                                               std::mt19937_64& rng,
                                               TsOccupancyMode mode = TsOccupancyMode::kMeanDynamics) {
    if (n_samples < 1) throw std::invalid_argument("ts_monte_carlo_pgamma: n_samples must be >= 1");
    auto p_mean = posterior_mean_dynamics(b);
    OccupancyMeasure<Scalar> acc;
    acc.lambda = zeros_like_layers<Scalar>(b.shape.layer_sizes, b.shape.num_actions);
    for (int i = 0; i < n_samples; ++i) {
        LayeredMdp<Scalar> sample = sample_mdp(b, rng);
        auto dp = backward_induction(sample);
        auto occ = mode == TsOccupancyMode::kMeanDynamics
                       ? occupancy_from_policy(p_mean, b.initial_dist, dp.greedy)
                       : occupancy_from_policy(sample, dp.greedy);
        for (size_t l = 0; l < acc.lambda.size(); ++l) acc.lambda[l] += occ.lambda[l];
    }
    for (auto& t : acc.lambda) t /= Scalar(n_samples);
    return acc;
}

template <class Scalar>
OccupancyMeasure<Scalar> ts_monte_carlo_pgamma(const FiniteSupportPrior<Scalar>& prior,
                                               int n_samples, std::mt19937_64& rng) {
    if (n_samples < 1) throw std::invalid_argument("ts_monte_carlo_pgamma: n_samples must be >= 1");
    auto report = validate_prior(prior, /*require_shared_p=*/true);
    if (!report.empty()) throw std::invalid_argument("ts_monte_carlo_pgamma: " + report.front());
    std::vector<OccupancyMeasure<Scalar>> occupancies;
    occupancies.reserve(prior.mdps.size());
    for (const auto& mdp : prior.mdps)
        occupancies.push_back(occupancy_from_policy(mdp, backward_induction(mdp).greedy));
    OccupancyMeasure<Scalar> acc;
    acc.lambda = zeros_like_layers<Scalar>(prior.mdps.front().layer_sizes,
                                           prior.mdps.front().num_actions);
    for (int i = 0; i < n_samples; ++i) {
        const int j = sample_support_index(prior, rng);
        for (size_t l = 0; l < acc.lambda.size(); ++l)
            acc.lambda[l] += occupancies[static_cast<size_t>(j)].lambda[l];
    }
    for (auto& t : acc.lambda) t /= Scalar(n_samples);
    return acc;
}

/// KL_tau(p || q) = sum tau p log(p/q) with 0 log 0 = 0, +inf on an absolute
/// continuity failure. Sentinel cells (tau = +inf) are excluded: their
/// entropy weight is genuinely absent from the objective.
template <class Scalar>
Scalar weighted_kl(const LayerTable<Scalar>& tau, const OccupancyMeasure<Scalar>& lam_p,
                   const OccupancyMeasure<Scalar>& lam_q) {
    Scalar total = Scalar(0);
    for (size_t l = 0; l < lam_p.lambda.size(); ++l) {
        const auto& p = lam_p.lambda[l];
        const auto& q = lam_q.lambda[l];
        for (Eigen::Index s = 0; s < p.rows(); ++s)
            for (Eigen::Index a = 0; a < p.cols(); ++a) {
                const Scalar t = tau[l](s, a);
                if (std::isinf(t)) continue;
                const Scalar pp = p(s, a);
                if (pp <= Scalar(0)) continue;
                if (q(s, a) <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
                total += t * pp * std::log(pp / q(s, a));
            }
    }
    return total;
}

template <class Scalar>
struct McEstimate {
    Scalar mean = Scalar(0);
    Scalar std_error = Scalar(0);
    int samples = 0;
};

namespace detail {

// Welford accumulator; the naive sum-of-squares form cancels catastrophically
// for near-constant samples.
template <class Scalar>
struct RunningMoments {
    Scalar mean = Scalar(0);
    Scalar m2 = Scalar(0);
    int n = 0;
    void add(Scalar x) {
        ++n;
        const Scalar d = x - mean;
        mean += d / Scalar(n);
        m2 += d * (x - mean);
    }
    McEstimate<Scalar> estimate() const {
        return {mean, n > 1 ? std::sqrt(m2 / Scalar(n - 1) / Scalar(n)) : Scalar(0), n};
    }
};

}  // namespace detail

/// Monte-Carlo estimate of E_phi[rho . V*] with its standard error.
template <class Scalar>
McEstimate<Scalar> mc_expected_vstar(const BeliefState<Scalar>& b, int n_samples,
                                     std::mt19937_64& rng) {
    if (n_samples < 2) throw std::invalid_argument("mc_expected_vstar: need n >= 2");
    detail::RunningMoments<Scalar> acc;
    for (int i = 0; i < n_samples; ++i) {
        LayeredMdp<Scalar> sample = sample_mdp(b, rng);
        acc.add(initial_value(sample, backward_induction(sample).values));
    }
    return acc.estimate();
}

template <class Scalar>
McEstimate<Scalar> mc_expected_vstar(const FiniteSupportPrior<Scalar>& prior, int n_samples,
                                     std::mt19937_64& rng) {
    if (n_samples < 2) throw std::invalid_argument("mc_expected_vstar: need n >= 2");
    std::vector<Scalar> values;
    values.reserve(prior.mdps.size());
    for (const auto& mdp : prior.mdps)
        values.push_back(initial_value(mdp, backward_induction(mdp).values));
    detail::RunningMoments<Scalar> acc;
    for (int i = 0; i < n_samples; ++i)
        acc.add(values[static_cast<size_t>(sample_support_index(prior, rng))]);
    return acc.estimate();
}

/// E_phi[rho . V*] by exhaustive enumeration of the support.
template <class Scalar>
Scalar exact_expected_vstar(const FiniteSupportPrior<Scalar>& prior) {
    Scalar total = Scalar(0);
    for (size_t i = 0; i < prior.mdps.size(); ++i)
        total += prior.weights[static_cast<Eigen::Index>(i)] *
                 initial_value(prior.mdps[i], backward_induction(prior.mdps[i]).values);
    return total;
}

/// The known-P VAPOR program induced by a finite-support prior: expected
/// rewards and the exact per-cell posterior std of the mean reward (the
/// canonical sub-Gaussian parameter for a bounded discrete posterior).
template <class Scalar>
VaporProblem<Scalar> vapor_problem_from_prior(const FiniteSupportPrior<Scalar>& prior) {
    auto report = validate_prior(prior, /*require_shared_p=*/true);
    if (!report.empty()) throw std::invalid_argument("vapor_problem_from_prior: " + report.front());
    const auto& first = prior.mdps.front();
    VaporProblem<Scalar> prob;
    prob.transitions = first.transitions;
    prob.rho = first.initial_dist;
    prob.reward = zeros_like_layers<Scalar>(first.layer_sizes, first.num_actions);
    LayerTable<Scalar> second = zeros_like_layers<Scalar>(first.layer_sizes, first.num_actions);
    for (size_t i = 0; i < prior.mdps.size(); ++i) {
        const Scalar w = prior.weights[static_cast<Eigen::Index>(i)];
        for (size_t l = 0; l < prob.reward.size(); ++l) {
            prob.reward[l] += w * prior.mdps[i].reward_mean[l];
            second[l] += w * prior.mdps[i].reward_mean[l].square();
        }
    }
    prob.sigma = zeros_like_layers<Scalar>(first.layer_sizes, first.num_actions);
    for (size_t l = 0; l < prob.sigma.size(); ++l)
        prob.sigma[l] = (second[l] - prob.reward[l].square()).max(Scalar(0)).sqrt();
    return prob;
}

/// Bayes update of the discrete posterior given one observed trajectory step:
/// weights are multiplied by each support MDP's likelihood of (r_obs, s_next).
/// With zero observation noise the reward likelihood is an equality indicator.
template <class Scalar>
void finite_support_update(FiniteSupportPrior<Scalar>& prior, int layer, int state, int action,
                           Scalar r_obs, int s_next, Scalar nu) {
    Vector<Scalar> lik(prior.weights.size());
    for (size_t i = 0; i < prior.mdps.size(); ++i) {
        const auto& m = prior.mdps[i];
        Scalar like = Scalar(1);
        const Scalar mean = m.reward_mean[static_cast<size_t>(layer)](state, action);
        if (nu > Scalar(0)) {
            const Scalar z = (r_obs - mean) / nu;
            like *= std::exp(Scalar(-0.5) * z * z);
        } else {
            like *= std::abs(r_obs - mean) <= Scalar(1e-9) ? Scalar(1) : Scalar(0);
        }
        if (layer + 1 < m.num_layers && s_next >= 0)
            like *= m.transitions[static_cast<size_t>(layer)](state * m.num_actions + action, s_next);
        lik[static_cast<Eigen::Index>(i)] = like;
    }
    Vector<Scalar> updated = prior.weights.cwiseProduct(lik);
    const Scalar total = updated.sum();
    if (total <= Scalar(0))
        throw std::runtime_error("finite_support_update: observation has zero likelihood");
    prior.weights = updated / total;
}

}  // namespace vapor
