#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>

#include "vapor/dp.hpp"
#include "vapor/objective.hpp"

namespace vapor {

// The x sqrt(-log x) terms also admit an exponential-cone epigraph
// (maximize y subject to -x log x >= y^2 / x), so any cone solver can
// cross-check these solves; the in-repo path is Frank-Wolfe plus the dual
// certificate below.
struct SolverOptions {
    int max_iters = 5000;
    double gap_tol = 1e-5;
    // Smoothing parameter; 0 selects gap_tol / (sigma_max * L * S * A).
    double delta = 0.0;
    double lambda_floor = kDefaultLambdaFloor;
    bool compute_dual = true;
    bool record_residual_trace = false;
};

template <class Scalar>
struct SolveDiagnostics {
    std::vector<Scalar> objective_trace;  // smoothed objective per iteration
    std::vector<Scalar> gap_trace;
    std::vector<Scalar> residual_trace;   // only with record_residual_trace
    Scalar final_gap = std::numeric_limits<Scalar>::infinity();
    Scalar dual_value = std::numeric_limits<Scalar>::quiet_NaN();
    int iterations = 0;
    Scalar max_flow_residual = std::numeric_limits<Scalar>::infinity();
    bool converged = false;
};

using SolveDiagnosticsd = SolveDiagnostics<double>;

namespace detail {

template <class Scalar>
OccupancyMeasure<Scalar> uniform_occupancy(const std::vector<TransitionMatrix<Scalar>>& transitions,
                                           const Vector<Scalar>& rho,
                                           const std::vector<int>& layer_sizes, int actions) {
    Policy<Scalar> uni;
    uni.pi.reserve(layer_sizes.size());
    for (int sl : layer_sizes)
        uni.pi.push_back(Table<Scalar>::Constant(sl, actions, Scalar(1) / Scalar(actions)));
    return occupancy_from_policy(transitions, rho, uni);
}

// DP over explicit tables (no LayeredMdp wrapper); rewards define the shapes.
template <class Scalar>
DpResult<Scalar> backward_induction_tables(const std::vector<TransitionMatrix<Scalar>>& transitions,
                                           const LayerTable<Scalar>& reward) {
    const int L = static_cast<int>(reward.size());
    DpResult<Scalar> out;
    out.values.q.resize(reward.size());
    out.values.v.resize(reward.size());
    out.greedy.pi.resize(reward.size());
    Vector<Scalar> v_next;
    for (int l = L - 1; l >= 0; --l) {
        const int sl = static_cast<int>(reward[static_cast<size_t>(l)].rows());
        const int actions = static_cast<int>(reward[static_cast<size_t>(l)].cols());
        Table<Scalar> q = reward[static_cast<size_t>(l)];
        if (l + 1 < L) {
            Vector<Scalar> cont = transitions[static_cast<size_t>(l)] * v_next;
            q += unflatten_sa(cont, sl, actions);
        }
        Vector<Scalar> v(sl);
        Table<Scalar> pi = Table<Scalar>::Zero(sl, actions);
        for (int s = 0; s < sl; ++s) {
            int best = 0;
            for (int a = 1; a < actions; ++a)
                if (q(s, a) > q(s, best)) best = a;
            v[s] = q(s, best);
            pi(s, best) = Scalar(1);
        }
        out.values.q[static_cast<size_t>(l)] = std::move(q);
        out.values.v[static_cast<size_t>(l)] = v;
        out.greedy.pi[static_cast<size_t>(l)] = std::move(pi);
        v_next = std::move(v);
    }
    return out;
}

/// Frank-Wolfe over the occupancy polytope for a generic smooth concave
/// objective. Each iteration is a backward message pass (optimal policy for
/// the gradient reward) and a forward message pass (its occupancy), combined
/// with base step size 2/(k+2). The offset keeps every step strictly short of
/// a full vertex replacement, so iterates remain interior mixtures of the
/// initializer; cells pinned at exact 0 or 1 would otherwise sit on the
/// clamped branch of the smoothed objective where the gap understates the
/// attainable improvement. A step that would decrease the objective is
/// deterministically halved until it improves, so the recorded trace is
/// non-decreasing and iterates stay reproducible.
template <class Scalar, class Objective, class Gradient>
std::pair<OccupancyMeasure<Scalar>, SolveDiagnostics<Scalar>> frank_wolfe(
    const std::vector<TransitionMatrix<Scalar>>& transitions, const Vector<Scalar>& rho,
    const std::vector<int>& layer_sizes, int actions, Objective&& objective, Gradient&& gradient,
    const SolverOptions& opts, const OccupancyMeasure<Scalar>* warm_start = nullptr) {
    OccupancyMeasure<Scalar> lam =
        warm_start ? *warm_start : uniform_occupancy(transitions, rho, layer_sizes, actions);
    SolveDiagnostics<Scalar> diag;

    Scalar f_cur = objective(lam);
    Scalar gap = std::numeric_limits<Scalar>::infinity();

    int k = 0;
    while (k < opts.max_iters) {
        ++k;
        LayerTable<Scalar> grad = gradient(lam);
        DpResult<Scalar> dp = backward_induction_tables(transitions, grad);
        OccupancyMeasure<Scalar> vertex = occupancy_from_policy(transitions, rho, dp.greedy);
        gap = Scalar(0);
        for (size_t l = 0; l < grad.size(); ++l)
            gap += ((vertex.lambda[l] - lam.lambda[l]) * grad[l]).sum();
        diag.objective_trace.push_back(f_cur);
        diag.gap_trace.push_back(gap);
        if (opts.record_residual_trace)
            diag.residual_trace.push_back(
                check_flow(lam, transitions, rho, Scalar(kFlowTolSolver)).max_residual);
        if (gap <= Scalar(opts.gap_tol)) {
            diag.converged = true;
            break;
        }
        Scalar gamma = Scalar(2) / Scalar(k + 2);
        OccupancyMeasure<Scalar> cand;
        cand.lambda.resize(lam.lambda.size());
        const Scalar accept_slack = Scalar(1e-15) * std::max(Scalar(1), std::abs(f_cur));
        for (int halving = 0; halving < 60; ++halving) {
            for (size_t l = 0; l < lam.lambda.size(); ++l)
                cand.lambda[l] = (Scalar(1) - gamma) * lam.lambda[l] + gamma * vertex.lambda[l];
            const Scalar f_cand = objective(cand);
            if (f_cand + accept_slack >= f_cur) {
                lam.lambda.swap(cand.lambda);
                f_cur = std::max(f_cand, f_cur);
                break;
            }
            gamma /= Scalar(2);
        }
    }
    diag.iterations = k;
    diag.final_gap = gap;
    diag.max_flow_residual = check_flow(lam, transitions, rho, Scalar(kFlowTolSolver)).max_residual;
    return {std::move(lam), std::move(diag)};
}

template <class Scalar>
Scalar effective_delta(const VaporProblem<Scalar>& prob, const SolverOptions& opts) {
    if (opts.delta > 0) return Scalar(opts.delta);
    const Scalar smax = prob.sigma_max();
    if (smax <= Scalar(0)) return Scalar(1e-8);
    const Scalar d = Scalar(opts.gap_tol) /
                     (smax * Scalar(prob.num_layers()) * Scalar(prob.total_states()) *
                      Scalar(prob.num_actions()));
    return std::clamp(d, Scalar(1e-12), Scalar(1e-3));
}

}  // namespace detail

template <class Scalar>
struct DualCertificate {
    std::vector<Vector<Scalar>> v;
    LayerTable<Scalar> tau;
    Scalar value = std::numeric_limits<Scalar>::quiet_NaN();
};

/// Unconstrained dual evaluated at (V, tau):
///   sum_s rho(s) V_1(s) + sum_{l,s,a} tau exp(delta_{V,tau}/tau - 1),
/// with delta_{V,tau} = r + sigma^2/(2 tau) + P V_{l+1} - V_l and V_{L+1} = 0.
/// Sentinel cells (tau = +inf) contribute no exponential term.
template <class Scalar>
Scalar dual_value(const std::vector<Vector<Scalar>>& v, const LayerTable<Scalar>& tau,
                  const VaporProblem<Scalar>& prob) {
    const int L = prob.num_layers();
    Scalar total = prob.rho.dot(v[0]);
    for (int l = 0; l < L; ++l) {
        const int sl = static_cast<int>(prob.reward[static_cast<size_t>(l)].rows());
        const int actions = prob.num_actions();
        Table<Scalar> cont = Table<Scalar>::Zero(sl, actions);
        if (l + 1 < L)
            cont = unflatten_sa<Scalar>(prob.transitions[static_cast<size_t>(l)] * v[static_cast<size_t>(l) + 1],
                                        sl, actions);
        for (int s = 0; s < sl; ++s)
            for (int a = 0; a < actions; ++a) {
                const Scalar t = tau[static_cast<size_t>(l)](s, a);
                if (std::isinf(t)) continue;
                if (!(t > Scalar(0))) throw std::invalid_argument("dual_value: tau must be positive");
                const Scalar sig = prob.sigma[static_cast<size_t>(l)](s, a);
                const Scalar adv = prob.reward[static_cast<size_t>(l)](s, a) +
                                   sig * sig / (Scalar(2) * t) + cont(s, a) -
                                   v[static_cast<size_t>(l)][s];
                total += t * std::exp(adv / t - Scalar(1));
            }
    }
    return total;
}

namespace detail {

// Backward pass of the stationarity relation for a fixed temperature table:
// V_l(s) solves sum_a exp((r + sigma^2/(2 tau) + P V_{l+1} - V_l)/tau - 1)
// = sum_a lambda_l(s,a), raised where needed so sentinel cells keep
// non-positive advantage (their sup over lambda >= 0 is then 0).
template <class Scalar>
std::vector<Vector<Scalar>> dual_v_for_tau(const VaporProblem<Scalar>& prob,
                                           const OccupancyMeasure<Scalar>& occ,
                                           const LayerTable<Scalar>& tau) {
    const int L = prob.num_layers();
    const int actions = prob.num_actions();
    std::vector<Vector<Scalar>> v(static_cast<size_t>(L));
    Scalar tau_cap = Scalar(1);
    for (const auto& t : tau)
        for (Eigen::Index i = 0; i < t.size(); ++i)
            if (!std::isinf(t(i))) tau_cap = std::max(tau_cap, t(i));

    for (int l = L - 1; l >= 0; --l) {
        const int sl = static_cast<int>(prob.reward[static_cast<size_t>(l)].rows());
        Table<Scalar> base = prob.reward[static_cast<size_t>(l)];
        if (l + 1 < L)
            base += unflatten_sa<Scalar>(
                prob.transitions[static_cast<size_t>(l)] * v[static_cast<size_t>(l) + 1], sl,
                actions);
        Vector<Scalar> vl(sl);
        for (int s = 0; s < sl; ++s) {
            const Scalar mass = occ.lambda[static_cast<size_t>(l)].row(s).sum();
            std::vector<int> finite;
            Scalar z_max = -std::numeric_limits<Scalar>::infinity();
            Scalar b_max = -std::numeric_limits<Scalar>::infinity();
            for (int a = 0; a < actions; ++a) {
                const Scalar t = tau[static_cast<size_t>(l)](s, a);
                const Scalar sig = prob.sigma[static_cast<size_t>(l)](s, a);
                const Scalar b = base(s, a) + (std::isinf(t) ? Scalar(0) : sig * sig / (Scalar(2) * t));
                b_max = std::max(b_max, b);
                if (std::isinf(t))
                    z_max = std::max(z_max, b);
                else
                    finite.push_back(a);
            }
            Scalar root = -std::numeric_limits<Scalar>::infinity();
            if (!finite.empty()) {
                // Zero-mass states still get a solvable target; their
                // exponential terms are then negligible by construction.
                const Scalar target = std::max(mass, Scalar(1e-12));
                auto expsum = [&](Scalar v_try) {
                    Scalar acc = Scalar(0);
                    for (int a : finite) {
                        const Scalar t = tau[static_cast<size_t>(l)](s, a);
                        const Scalar sig = prob.sigma[static_cast<size_t>(l)](s, a);
                        const Scalar b = base(s, a) + sig * sig / (Scalar(2) * t);
                        acc += std::exp((b - v_try) / t - Scalar(1));
                    }
                    return acc;
                };
                Scalar lo = b_max - Scalar(100) * tau_cap, hi = b_max + Scalar(100) * tau_cap;
                for (int it = 0; it < 200; ++it) {
                    const Scalar mid = (lo + hi) / Scalar(2);
                    if (expsum(mid) > target)
                        lo = mid;
                    else
                        hi = mid;
                }
                root = hi;  // expsum(root) <= target keeps the bound one-sided
            }
            vl[s] = std::max(root, z_max);
        }
        v[static_cast<size_t>(l)] = std::move(vl);
    }
    return v;
}

// Exact per-cell minimizer of tau exp((r + sigma^2/(2 tau) + c - V)/tau - 1)
// for fixed V: with u = 1/tau the log of the term is convex in u and its
// stationary point solves sigma^2 u^2 + m u - 1 = 0, m = r + c - V.
template <class Scalar>
LayerTable<Scalar> dual_tau_for_v(const VaporProblem<Scalar>& prob,
                                  const std::vector<Vector<Scalar>>& v) {
    const int L = prob.num_layers();
    const int actions = prob.num_actions();
    LayerTable<Scalar> tau;
    tau.reserve(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l) {
        const int sl = static_cast<int>(prob.reward[static_cast<size_t>(l)].rows());
        Table<Scalar> cont = Table<Scalar>::Zero(sl, actions);
        if (l + 1 < L)
            cont = unflatten_sa<Scalar>(
                prob.transitions[static_cast<size_t>(l)] * v[static_cast<size_t>(l) + 1], sl,
                actions);
        Table<Scalar> t(sl, actions);
        for (int s = 0; s < sl; ++s)
            for (int a = 0; a < actions; ++a) {
                const Scalar sig = prob.sigma[static_cast<size_t>(l)](s, a);
                if (sig == Scalar(0)) {
                    t(s, a) = kTauSentinel<Scalar>;
                    continue;
                }
                const Scalar m = prob.reward[static_cast<size_t>(l)](s, a) + cont(s, a) -
                                 v[static_cast<size_t>(l)][s];
                const Scalar u = (-m + std::sqrt(m * m + Scalar(4) * sig * sig)) /
                                 (Scalar(2) * sig * sig);
                t(s, a) = Scalar(1) / std::max(u, Scalar(1e-100));
            }
        tau.push_back(std::move(t));
    }
    return tau;
}

// Envelope evaluation of the dual at a value vector with the per-cell
// minimizing tau substituted. Also reports the gradient: the flow imbalance
// of the dual-induced occupancy exp(delta/tau - 1). Cells with sigma = 0 must
// keep non-positive advantage or the true dual is unbounded there.
template <class Scalar>
Scalar dual_envelope(const VaporProblem<Scalar>& prob, const std::vector<Vector<Scalar>>& v,
                     LayerTable<Scalar>* tau_out, std::vector<Vector<Scalar>>* grad_out) {
    const int L = prob.num_layers();
    const int actions = prob.num_actions();
    LayerTable<Scalar> tau = detail::dual_tau_for_v(prob, v);
    Scalar value = prob.rho.dot(v[0]);
    Vector<Scalar> inflow = prob.rho;
    for (int l = 0; l < L; ++l) {
        const int sl = static_cast<int>(prob.reward[static_cast<size_t>(l)].rows());
        Table<Scalar> cont = Table<Scalar>::Zero(sl, actions);
        if (l + 1 < L)
            cont = unflatten_sa<Scalar>(
                prob.transitions[static_cast<size_t>(l)] * v[static_cast<size_t>(l) + 1], sl,
                actions);
        Table<Scalar> e(sl, actions);
        for (int s = 0; s < sl; ++s)
            for (int a = 0; a < actions; ++a) {
                const Scalar t = tau[static_cast<size_t>(l)](s, a);
                const Scalar sig = prob.sigma[static_cast<size_t>(l)](s, a);
                const Scalar adv = prob.reward[static_cast<size_t>(l)](s, a) + cont(s, a) -
                                   v[static_cast<size_t>(l)][s] +
                                   (std::isinf(t) ? Scalar(0) : sig * sig / (Scalar(2) * t));
                if (std::isinf(t)) {
                    if (adv > Scalar(1e-12)) return std::numeric_limits<Scalar>::infinity();
                    e(s, a) = Scalar(0);
                } else {
                    e(s, a) = std::exp(adv / t - Scalar(1));
                    value += t * e(s, a);
                }
            }
        if (grad_out)
            (*grad_out)[static_cast<size_t>(l)] = inflow - e.rowwise().sum().matrix();
        if (l + 1 < L) inflow = prob.transitions[static_cast<size_t>(l)].transpose() * flatten_sa(e);
    }
    if (tau_out) *tau_out = std::move(tau);
    return value;
}

}  // namespace detail

/// Builds a certified dual pair from a primal iterate: tau is seeded with the
/// closed form of the iterate and V with a backward root-find of the
/// stationarity relation; the pair is then polished by descending the convex
/// dual in V (exact per-cell tau minimization folded in). Every evaluated
/// pair is a valid upper bound; the best one is returned, with no claim of
/// tightness beyond what the iterate supports.
template <class Scalar>
DualCertificate<Scalar> construct_dual_certificate(const VaporProblem<Scalar>& prob,
                                                   const OccupancyMeasure<Scalar>& occ,
                                                   int sweeps = 4, int polish_iters = 200,
                                                   Scalar lambda_floor = Scalar(kDefaultLambdaFloor)) {
    DualCertificate<Scalar> cert;
    // Seed temperatures: closed form with lambda clamped away from 1, so the
    // +inf sentinel only ever marks sigma = 0 cells. The zero-contribution
    // convention is exact there but would under-claim the bound on saturated
    // cells with positive sigma.
    LayerTable<Scalar> tau;
    tau.reserve(occ.lambda.size());
    for (size_t l = 0; l < occ.lambda.size(); ++l) {
        Table<Scalar> t(occ.lambda[l].rows(), occ.lambda[l].cols());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const Scalar sig = prob.sigma[l](i);
            if (sig == Scalar(0)) {
                t(i) = kTauSentinel<Scalar>;
            } else {
                const Scalar x =
                    std::min(std::max(occ.lambda[l](i), lambda_floor), Scalar(1) - Scalar(1e-9));
                t(i) = sig / std::sqrt(Scalar(-2) * std::log(x));
            }
        }
        tau.push_back(std::move(t));
    }
    cert.value = std::numeric_limits<Scalar>::infinity();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        auto v = detail::dual_v_for_tau(prob, occ, tau);
        const Scalar value = dual_value(v, tau, prob);
        if (value < cert.value) {
            cert.value = value;
            cert.v = v;
            cert.tau = tau;
        }
        tau = detail::dual_tau_for_v(prob, v);
    }

    std::vector<Vector<Scalar>> v = cert.v;
    std::vector<Vector<Scalar>> grad(v.size()), cand(v.size());
    for (size_t l = 0; l < v.size(); ++l) grad[l] = Vector<Scalar>::Zero(v[l].size());
    LayerTable<Scalar> tau_cur;
    Scalar h_cur = detail::dual_envelope(prob, v, &tau_cur, &grad);
    if (h_cur < cert.value) {
        cert.value = h_cur;
        cert.tau = tau_cur;
    }
    Scalar step = Scalar(1);
    for (int it = 0; it < polish_iters; ++it) {
        Scalar gnorm = Scalar(0);
        for (const auto& g : grad) gnorm = std::max(gnorm, g.template lpNorm<Eigen::Infinity>());
        if (gnorm < Scalar(1e-10)) break;
        bool improved = false;
        for (int halving = 0; halving < 30; ++halving) {
            for (size_t l = 0; l < v.size(); ++l) cand[l] = v[l] - step * grad[l];
            std::vector<Vector<Scalar>> cand_grad(v.size());
            for (size_t l = 0; l < v.size(); ++l)
                cand_grad[l] = Vector<Scalar>::Zero(v[l].size());
            LayerTable<Scalar> cand_tau;
            const Scalar h_cand = detail::dual_envelope(prob, cand, &cand_tau, &cand_grad);
            if (h_cand < h_cur) {
                v.swap(cand);
                grad.swap(cand_grad);
                h_cur = h_cand;
                if (h_cur < cert.value) {
                    cert.value = h_cur;
                    cert.v = v;
                    cert.tau = std::move(cand_tau);
                }
                step *= Scalar(1.5);
                improved = true;
                break;
            }
            step /= Scalar(2);
        }
        if (!improved) break;
    }
    return cert;
}

/// Smoothed Frank-Wolfe solve of the VAPOR program. Non-convergence is
/// reported through the diagnostics (final_gap above tolerance), never thrown.
template <class Scalar>
std::pair<OccupancyMeasure<Scalar>, SolveDiagnostics<Scalar>> solve_frank_wolfe(
    const VaporProblem<Scalar>& prob, const SolverOptions& opts = SolverOptions{},
    const OccupancyMeasure<Scalar>* warm_start = nullptr) {
    const Scalar delta = detail::effective_delta(prob, opts);
    auto objective = [&](const OccupancyMeasure<Scalar>& lam) {
        return smoothed_objective(lam, prob, delta);
    };
    auto gradient = [&](const OccupancyMeasure<Scalar>& lam) {
        return smoothed_gradient(lam, prob, delta);
    };
    auto [lam, diag] = detail::frank_wolfe(prob.transitions, prob.rho, prob.layer_sizes(),
                                           prob.num_actions(), objective, gradient, opts, warm_start);
    if (opts.compute_dual)
        diag.dual_value =
            construct_dual_certificate(prob, lam, 4, 200, Scalar(opts.lambda_floor)).value;
    return {std::move(lam), std::move(diag)};
}

/// Frank-Wolfe on the VAPOR-lite(c) objective.
template <class Scalar>
std::pair<OccupancyMeasure<Scalar>, SolveDiagnostics<Scalar>> solve_vapor_lite_tabular(
    const VaporProblem<Scalar>& prob, Scalar c, const SolverOptions& opts = SolverOptions{},
    const OccupancyMeasure<Scalar>* warm_start = nullptr) {
    if (!(c > Scalar(0))) throw std::invalid_argument("solve_vapor_lite_tabular: c must be > 0");
    auto objective = [&](const OccupancyMeasure<Scalar>& lam) {
        return vapor_lite_objective(lam, prob, c);
    };
    auto gradient = [&](const OccupancyMeasure<Scalar>& lam) {
        return vapor_lite_gradient(lam, prob, c);
    };
    return detail::frank_wolfe(prob.transitions, prob.rho, prob.layer_sizes(), prob.num_actions(),
                               objective, gradient, opts, warm_start);
}

/// Frank-Wolfe maximization of the weighted occupancy entropy H_w.
template <class Scalar>
std::pair<OccupancyMeasure<Scalar>, SolveDiagnostics<Scalar>> solve_weighted_max_entropy(
    const LayerTable<Scalar>& weights, const std::vector<TransitionMatrix<Scalar>>& transitions,
    const Vector<Scalar>& rho, const SolverOptions& opts = SolverOptions{},
    const OccupancyMeasure<Scalar>* warm_start = nullptr) {
    for (const auto& w : weights)
        if (w.minCoeff() < Scalar(0))
            throw std::invalid_argument("solve_weighted_max_entropy: weights must be >= 0");
    std::vector<int> layer_sizes;
    layer_sizes.reserve(weights.size());
    for (const auto& w : weights) layer_sizes.push_back(static_cast<int>(w.rows()));
    const int actions = static_cast<int>(weights[0].cols());
    const Scalar delta = opts.delta > 0 ? Scalar(opts.delta) : Scalar(1e-9);
    auto objective = [&](const OccupancyMeasure<Scalar>& lam) {
        return weighted_entropy_objective(lam, weights, delta);
    };
    auto gradient = [&](const OccupancyMeasure<Scalar>& lam) {
        return weighted_entropy_gradient(lam, weights, delta);
    };
    return detail::frank_wolfe(transitions, rho, layer_sizes, actions, objective, gradient, opts,
                               warm_start);
}

/// Per-iteration trace dump: iter, objective, fw_gap, max_flow_residual.
template <class Scalar>
void dump_trace_csv(const SolveDiagnostics<Scalar>& diag, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_trace_csv: cannot open " + path);
    out << "iter,objective,fw_gap,max_flow_residual\n";
    for (size_t i = 0; i < diag.objective_trace.size(); ++i) {
        out << (i + 1) << ',' << diag.objective_trace[i] << ',' << diag.gap_trace[i] << ',';
        if (i < diag.residual_trace.size())
            out << diag.residual_trace[i];
        else
            out << diag.max_flow_residual;
        out << '\n';
    }
}

}  // namespace vapor
