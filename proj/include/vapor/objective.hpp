#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vapor/bayes.hpp"
#include "vapor/types.hpp"

namespace vapor {

template <class Scalar>
inline constexpr Scalar kTauSentinel = std::numeric_limits<Scalar>::infinity();

inline constexpr double kDefaultLambdaFloor = 1e-300;

/// One instance of the concave occupancy program: known (or mean) dynamics,
/// expected rewards and per-cell reward uncertainty in std units.
template <class Scalar>
struct VaporProblem {
    std::vector<TransitionMatrix<Scalar>> transitions;
    Vector<Scalar> rho;
    LayerTable<Scalar> reward;
    LayerTable<Scalar> sigma;

    int num_layers() const { return static_cast<int>(reward.size()); }
    int num_actions() const { return static_cast<int>(reward[0].cols()); }
    std::vector<int> layer_sizes() const {
        std::vector<int> out;
        out.reserve(reward.size());
        for (const auto& t : reward) out.push_back(static_cast<int>(t.rows()));
        return out;
    }
    int total_states() const {
        int total = 0;
        for (const auto& t : reward) total += static_cast<int>(t.rows());
        return total;
    }
    Scalar sigma_max() const {
        Scalar m = Scalar(0);
        for (const auto& t : sigma) m = std::max(m, t.maxCoeff());
        return m;
    }
};

using VaporProblemd = VaporProblem<double>;

template <class Scalar>
VaporProblem<Scalar> make_vapor_problem(const TransformedBeliefs<Scalar>& t) {
    return VaporProblem<Scalar>{t.p_mean, t.initial_dist, t.reward_mu, t.sigma_tilde};
}

namespace detail {

template <class Scalar>
Scalar clamp_unit(Scalar x, Scalar floor) {
    return std::min(std::max(x, floor), Scalar(1));
}

}  // namespace detail

/// V(lambda) = sum lambda (r + sigma sqrt(-2 log lambda)), with 0 log 0 = 0
/// and entries clamped to [floor, 1] inside the logs.
template <class Scalar>
Scalar vapor_objective(const OccupancyMeasure<Scalar>& occ, const VaporProblem<Scalar>& prob,
                       Scalar floor = Scalar(kDefaultLambdaFloor)) {
    if (occ.lambda.size() != prob.reward.size())
        throw std::invalid_argument("vapor_objective: shape mismatch");
    Scalar total = Scalar(0);
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        const auto& lam = occ.lambda[l];
        if (lam.rows() != prob.reward[l].rows() || lam.cols() != prob.reward[l].cols())
            throw std::invalid_argument("vapor_objective: shape mismatch");
        for (Eigen::Index s = 0; s < lam.rows(); ++s)
            for (Eigen::Index a = 0; a < lam.cols(); ++a) {
                const Scalar x = lam(s, a);
                total += x * prob.reward[l](s, a);
                const Scalar sig = prob.sigma[l](s, a);
                if (sig > Scalar(0) && x > Scalar(0)) {
                    const Scalar xc = detail::clamp_unit(x, floor);
                    total += sig * x * std::sqrt(std::max(Scalar(-2) * std::log(xc), Scalar(0)));
                }
            }
    }
    return total;
}

/// V(lambda, tau) = sum lambda (r + sigma^2/(2 tau)) - sum tau lambda log lambda.
/// Cells with tau = +inf (the sentinel) contribute the plain lambda * r term.
template <class Scalar>
Scalar vapor_objective_tau(const OccupancyMeasure<Scalar>& occ, const LayerTable<Scalar>& tau,
                           const VaporProblem<Scalar>& prob,
                           Scalar floor = Scalar(kDefaultLambdaFloor)) {
    Scalar total = Scalar(0);
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        const auto& lam = occ.lambda[l];
        for (Eigen::Index s = 0; s < lam.rows(); ++s)
            for (Eigen::Index a = 0; a < lam.cols(); ++a) {
                const Scalar x = lam(s, a);
                const Scalar t = tau[l](s, a);
                total += x * prob.reward[l](s, a);
                if (std::isinf(t)) continue;
                if (!(t > Scalar(0)))
                    throw std::invalid_argument("vapor_objective_tau: tau must be positive");
                const Scalar sig = prob.sigma[l](s, a);
                total += x * sig * sig / (Scalar(2) * t);
                if (x > Scalar(0)) total -= t * x * std::log(detail::clamp_unit(x, floor));
            }
    }
    return total;
}

/// Pointwise minimizer tau = sigma / sqrt(-2 log lambda) of the optimism and
/// entropy trade-off. Cells with sigma = 0 or lambda >= 1 - 1e-12 get the
/// +inf sentinel; their optimism and entropy terms are absent.
template <class Scalar>
LayerTable<Scalar> closed_form_tau(const OccupancyMeasure<Scalar>& occ,
                                   const LayerTable<Scalar>& sigma,
                                   Scalar floor = Scalar(kDefaultLambdaFloor)) {
    LayerTable<Scalar> tau;
    tau.reserve(occ.lambda.size());
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        Table<Scalar> t(occ.lambda[l].rows(), occ.lambda[l].cols());
        for (Eigen::Index s = 0; s < t.rows(); ++s)
            for (Eigen::Index a = 0; a < t.cols(); ++a) {
                const Scalar x = occ.lambda[l](s, a);
                const Scalar sig = sigma[l](s, a);
                if (sig == Scalar(0) || x >= Scalar(1) - Scalar(1e-12))
                    t(s, a) = kTauSentinel<Scalar>;
                else
                    t(s, a) = sig / std::sqrt(Scalar(-2) * std::log(std::max(x, floor)));
            }
        tau.push_back(std::move(t));
    }
    return tau;
}

/// Smoothed proxy V_delta(lambda) = sum lambda (r + sigma sqrt(-2 (log(lambda
/// + delta) + delta))), the inner expression clamped at 0 before the root.
template <class Scalar>
Scalar smoothed_objective(const OccupancyMeasure<Scalar>& occ, const VaporProblem<Scalar>& prob,
                          Scalar delta) {
    Scalar total = Scalar(0);
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        const auto& lam = occ.lambda[l];
        for (Eigen::Index s = 0; s < lam.rows(); ++s)
            for (Eigen::Index a = 0; a < lam.cols(); ++a) {
                const Scalar x = lam(s, a);
                total += x * prob.reward[l](s, a);
                const Scalar sig = prob.sigma[l](s, a);
                if (sig > Scalar(0)) {
                    const Scalar inner = Scalar(-2) * (std::log(x + delta) + delta);
                    if (inner > Scalar(0)) total += sig * x * std::sqrt(inner);
                }
            }
    }
    return total;
}

/// Elementwise derivative of the smoothed proxy. On the clamped branch
/// (lambda near 1, inner expression <= 0) the gradient is the plain reward.
template <class Scalar>
LayerTable<Scalar> smoothed_gradient(const OccupancyMeasure<Scalar>& occ,
                                     const VaporProblem<Scalar>& prob, Scalar delta) {
    if (!(delta > Scalar(0)))
        throw std::invalid_argument("smoothed_gradient: delta must be > 0");
    LayerTable<Scalar> grad;
    grad.reserve(occ.lambda.size());
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        Table<Scalar> g = prob.reward[l];
        for (Eigen::Index s = 0; s < g.rows(); ++s)
            for (Eigen::Index a = 0; a < g.cols(); ++a) {
                const Scalar sig = prob.sigma[l](s, a);
                if (sig == Scalar(0)) continue;
                const Scalar x = occ.lambda[l](s, a);
                const Scalar inner = Scalar(-2) * (std::log(x + delta) + delta);
                if (inner <= Scalar(0)) continue;
                const Scalar root = std::sqrt(inner);
                g(s, a) += sig * (root - x / ((x + delta) * root));
            }
        grad.push_back(std::move(g));
    }
    return grad;
}

/// Tabular VAPOR-lite objective: linear uncertainty bonus plus uncertainty
/// weighted entropy of the row-normalized policy, scaled by state mass.
template <class Scalar>
Scalar vapor_lite_objective(const OccupancyMeasure<Scalar>& occ, const VaporProblem<Scalar>& prob,
                            Scalar c, Scalar pi_floor = Scalar(1e-12)) {
    if (!(c > Scalar(0))) throw std::invalid_argument("vapor_lite_objective: c must be > 0");
    Scalar total = Scalar(0);
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        const auto& lam = occ.lambda[l];
        for (Eigen::Index s = 0; s < lam.rows(); ++s) {
            const Scalar mass = lam.row(s).sum();
            for (Eigen::Index a = 0; a < lam.cols(); ++a) {
                const Scalar u = lam(s, a);
                const Scalar w = c * prob.sigma[l](s, a);
                total += u * (prob.reward[l](s, a) + w);
                if (mass > Scalar(1e-300) && u > Scalar(0))
                    total -= w * u * std::log(std::max(u / mass, pi_floor));
            }
        }
    }
    return total;
}

template <class Scalar>
LayerTable<Scalar> vapor_lite_gradient(const OccupancyMeasure<Scalar>& occ,
                                       const VaporProblem<Scalar>& prob, Scalar c,
                                       Scalar pi_floor = Scalar(1e-12)) {
    LayerTable<Scalar> grad;
    grad.reserve(occ.lambda.size());
    const int actions = prob.num_actions();
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        const auto& lam = occ.lambda[l];
        Table<Scalar> g(lam.rows(), lam.cols());
        for (Eigen::Index s = 0; s < lam.rows(); ++s) {
            const Scalar mass = lam.row(s).sum();
            Scalar w_avg = Scalar(0);
            for (Eigen::Index a = 0; a < lam.cols(); ++a) {
                const Scalar pi = mass > Scalar(1e-300) ? lam(s, a) / mass : Scalar(1) / Scalar(actions);
                w_avg += c * prob.sigma[l](s, a) * pi;
            }
            for (Eigen::Index a = 0; a < lam.cols(); ++a) {
                const Scalar pi = mass > Scalar(1e-300) ? lam(s, a) / mass : Scalar(1) / Scalar(actions);
                const Scalar w = c * prob.sigma[l](s, a);
                g(s, a) = prob.reward[l](s, a) - w * std::log(std::max(pi, pi_floor)) + w_avg;
            }
        }
        grad.push_back(std::move(g));
    }
    return grad;
}

/// Episode-indexed VAPOR-lite scale c_t = sqrt(2) (1 + log(S L t)).
template <class Scalar>
Scalar vapor_lite_schedule(int total_states, int num_layers, int episode) {
    if (episode < 1) throw std::invalid_argument("vapor_lite_schedule: episode must be >= 1");
    return std::sqrt(Scalar(2)) *
           (Scalar(1) + std::log(Scalar(total_states) * Scalar(num_layers) * Scalar(episode)));
}

/// Weighted occupancy entropy H_w(lambda) = -sum w lambda log(lambda + delta).
template <class Scalar>
Scalar weighted_entropy_objective(const OccupancyMeasure<Scalar>& occ,
                                  const LayerTable<Scalar>& weights, Scalar delta) {
    Scalar total = Scalar(0);
    for (size_t l = 0; l < occ.lambda.size(); ++l)
        total -= (weights[l] * occ.lambda[l] * (occ.lambda[l] + delta).log()).sum();
    return total;
}

template <class Scalar>
LayerTable<Scalar> weighted_entropy_gradient(const OccupancyMeasure<Scalar>& occ,
                                             const LayerTable<Scalar>& weights, Scalar delta) {
    LayerTable<Scalar> grad;
    grad.reserve(occ.lambda.size());
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        const auto& lam = occ.lambda[l];
        grad.push_back(-weights[l] * ((lam + delta).log() + lam / (lam + delta)));
    }
    return grad;
}

}  // namespace vapor
