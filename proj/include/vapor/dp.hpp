#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "vapor/types.hpp"

namespace vapor {

template <class Scalar>
struct DpResult {
    ValueTables<Scalar> values;
    Policy<Scalar> greedy;
};

namespace detail {

template <class Scalar>
void require_table_shapes(const LayeredMdp<Scalar>& mdp, const LayerTable<Scalar>& t,
                          const char* what) {
    if (static_cast<int>(t.size()) != mdp.num_layers)
        throw std::invalid_argument(std::string(what) + ": wrong number of layers");
    for (int l = 0; l < mdp.num_layers; ++l)
        if (t[static_cast<size_t>(l)].rows() != mdp.states(l) ||
            t[static_cast<size_t>(l)].cols() != mdp.num_actions)
            throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace detail

/// Exact dynamic programming:
///   Q_l(s,a) = r_l(s,a) + sum_{s'} P_l(s'|s,a) V_{l+1}(s'),  V_l(s) = max_a Q_l(s,a),
/// with V_{L+1} = 0. The greedy policy puts mass 1 on the argmax, ties broken
/// by lowest action index. `reward_override` substitutes the reward tables
/// (used for gradient rewards and posterior samples).
template <class Scalar>
DpResult<Scalar> backward_induction(const LayeredMdp<Scalar>& mdp,
                                    const LayerTable<Scalar>* reward_override = nullptr) {
    const LayerTable<Scalar>& reward = reward_override ? *reward_override : mdp.reward_mean;
    if (reward_override) detail::require_table_shapes(mdp, *reward_override, "reward_override");

    DpResult<Scalar> out;
    out.values.q.resize(static_cast<size_t>(mdp.num_layers));
    out.values.v.resize(static_cast<size_t>(mdp.num_layers));
    out.greedy.pi.resize(static_cast<size_t>(mdp.num_layers));

    Vector<Scalar> v_next;
    for (int l = mdp.num_layers - 1; l >= 0; --l) {
        const int sl = mdp.states(l);
        Table<Scalar> q = reward[static_cast<size_t>(l)];
        if (l + 1 < mdp.num_layers) {
            Vector<Scalar> cont = mdp.transitions[static_cast<size_t>(l)] * v_next;
            q += unflatten_sa(cont, sl, mdp.num_actions);
        }
        Vector<Scalar> v(sl);
        Table<Scalar> pi = Table<Scalar>::Zero(sl, mdp.num_actions);
        for (int s = 0; s < sl; ++s) {
            int best = 0;
            for (int a = 1; a < mdp.num_actions; ++a)
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

/// Exact evaluation of a fixed policy: Q^pi, V^pi by backward recursion.
template <class Scalar>
ValueTables<Scalar> policy_value(const LayeredMdp<Scalar>& mdp, const Policy<Scalar>& policy,
                                 const LayerTable<Scalar>* reward_override = nullptr) {
    const LayerTable<Scalar>& reward = reward_override ? *reward_override : mdp.reward_mean;
    detail::require_table_shapes(mdp, policy.pi, "policy");

    ValueTables<Scalar> out;
    out.q.resize(static_cast<size_t>(mdp.num_layers));
    out.v.resize(static_cast<size_t>(mdp.num_layers));

    Vector<Scalar> v_next;
    for (int l = mdp.num_layers - 1; l >= 0; --l) {
        const int sl = mdp.states(l);
        Table<Scalar> q = reward[static_cast<size_t>(l)];
        if (l + 1 < mdp.num_layers) {
            Vector<Scalar> cont = mdp.transitions[static_cast<size_t>(l)] * v_next;
            q += unflatten_sa(cont, sl, mdp.num_actions);
        }
        Vector<Scalar> v = (policy.pi[static_cast<size_t>(l)] * q).rowwise().sum().matrix();
        out.q[static_cast<size_t>(l)] = std::move(q);
        out.v[static_cast<size_t>(l)] = v;
        v_next = std::move(v);
    }
    return out;
}

template <class Scalar>
Scalar initial_value(const LayeredMdp<Scalar>& mdp, const ValueTables<Scalar>& values) {
    return mdp.initial_dist.dot(values.v[0]);
}

/// Forward flow recursion: lambda_l(s,a) = P(reach (s,a) at layer l under pi).
template <class Scalar>
OccupancyMeasure<Scalar> occupancy_from_policy(const std::vector<TransitionMatrix<Scalar>>& transitions,
                                               const Vector<Scalar>& rho,
                                               const Policy<Scalar>& policy) {
    OccupancyMeasure<Scalar> occ;
    occ.lambda.resize(policy.pi.size());
    Vector<Scalar> d = rho;
    for (size_t l = 0; l < policy.pi.size(); ++l) {
        if (policy.pi[l].rows() != d.size())
            throw std::invalid_argument("occupancy_from_policy: shape mismatch");
        occ.lambda[l] = policy.pi[l].colwise() * d.array();
        if (l + 1 < policy.pi.size()) d = transitions[l].transpose() * flatten_sa(occ.lambda[l]);
    }
    return occ;
}

template <class Scalar>
OccupancyMeasure<Scalar> occupancy_from_policy(const LayeredMdp<Scalar>& mdp,
                                               const Policy<Scalar>& policy) {
    detail::require_table_shapes(mdp, policy.pi, "policy");
    return occupancy_from_policy(mdp.transitions, Vector<Scalar>(mdp.initial_dist), policy);
}

/// Row-normalizes an occupancy measure; rows with total mass below 1e-300
/// become uniform.
template <class Scalar>
Policy<Scalar> policy_from_occupancy(const OccupancyMeasure<Scalar>& occ) {
    Policy<Scalar> policy;
    policy.pi.reserve(occ.lambda.size());
    for (const auto& lam : occ.lambda) {
        Table<Scalar> pi(lam.rows(), lam.cols());
        for (Eigen::Index s = 0; s < lam.rows(); ++s) {
            Scalar mass = lam.row(s).sum();
            if (mass < Scalar(1e-300))
                pi.row(s).setConstant(Scalar(1) / Scalar(lam.cols()));
            else
                pi.row(s) = lam.row(s) / mass;
        }
        policy.pi.push_back(std::move(pi));
    }
    return policy;
}

template <class Scalar>
Policy<Scalar> uniform_policy(const LayeredMdp<Scalar>& mdp) {
    Policy<Scalar> policy;
    policy.pi.reserve(static_cast<size_t>(mdp.num_layers));
    for (int l = 0; l < mdp.num_layers; ++l)
        policy.pi.push_back(
            Table<Scalar>::Constant(mdp.states(l), mdp.num_actions, Scalar(1) / Scalar(mdp.num_actions)));
    return policy;
}

}  // namespace vapor
