#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace vapor {

template <class Scalar>
using Table = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Transition table for one layer, shape (S_l * A) x S_{l+1}.
// Row index is s * A + a; row (s,a) is the distribution over next states.
template <class Scalar>
using TransitionMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// One (S_l x A) table per layer.
template <class Scalar>
using LayerTable = std::vector<Table<Scalar>>;

inline constexpr double kFlowTolExact = 1e-12;
inline constexpr double kFlowTolSolver = 1e-8;

/// Finite, time-inhomogeneous MDP. Layers are indexed 0..L-1; transitions
/// exist for layers 0..L-2 (the last layer's action ends the episode).
template <class Scalar>
struct LayeredMdp {
    int num_layers = 0;
    std::vector<int> layer_sizes;
    int num_actions = 0;
    std::vector<TransitionMatrix<Scalar>> transitions;  // size L-1
    LayerTable<Scalar> reward_mean;                     // size L, each S_l x A
    Vector<Scalar> initial_dist;                        // size S_0
    Scalar reward_noise_std = Scalar(0);

    int states(int layer) const { return layer_sizes[static_cast<size_t>(layer)]; }
};

/// Per-layer state-action visitation probabilities lambda_l(s,a).
template <class Scalar>
struct OccupancyMeasure {
    LayerTable<Scalar> lambda;
};

/// Per-layer state-conditional action distributions pi_l(s,.).
template <class Scalar>
struct Policy {
    LayerTable<Scalar> pi;
};

template <class Scalar>
struct ValueTables {
    LayerTable<Scalar> q;                // S_l x A
    std::vector<Vector<Scalar>> v;       // S_l
};

/// Discrete beliefs over a finite set of shape-compatible MDPs.
template <class Scalar>
struct FiniteSupportPrior {
    std::vector<LayeredMdp<Scalar>> mdps;
    Vector<Scalar> weights;
};

using LayeredMdpd = LayeredMdp<double>;
using OccupancyMeasured = OccupancyMeasure<double>;
using Policyd = Policy<double>;
using ValueTablesd = ValueTables<double>;
using FiniteSupportPriord = FiniteSupportPrior<double>;

// Flatten an S x A table into a vector with index s * A + a (matching the
// transition-row convention).
template <class Derived>
Vector<typename Derived::Scalar> flatten_sa(const Eigen::DenseBase<Derived>& table) {
    using S = typename Derived::Scalar;
    Vector<S> out(table.size());
    for (Eigen::Index s = 0; s < table.rows(); ++s)
        for (Eigen::Index a = 0; a < table.cols(); ++a)
            out[s * table.cols() + a] = table(s, a);
    return out;
}

template <class Scalar>
Table<Scalar> unflatten_sa(const Vector<Scalar>& flat, int states, int actions) {
    Table<Scalar> out(states, actions);
    for (int s = 0; s < states; ++s)
        for (int a = 0; a < actions; ++a) out(s, a) = flat[s * actions + a];
    return out;
}

template <class Scalar>
Scalar dot(const LayerTable<Scalar>& a, const LayerTable<Scalar>& b) {
    Scalar acc = Scalar(0);
    for (size_t l = 0; l < a.size(); ++l) acc += (a[l] * b[l]).sum();
    return acc;
}

template <class Scalar>
LayerTable<Scalar> zeros_like_layers(const std::vector<int>& layer_sizes, int actions) {
    LayerTable<Scalar> t;
    t.reserve(layer_sizes.size());
    for (int sl : layer_sizes) t.push_back(Table<Scalar>::Zero(sl, actions));
    return t;
}

template <class Scalar>
LayerTable<Scalar> constant_like(const LayeredMdp<Scalar>& mdp, Scalar value) {
    LayerTable<Scalar> t;
    t.reserve(static_cast<size_t>(mdp.num_layers));
    for (int l = 0; l < mdp.num_layers; ++l)
        t.push_back(Table<Scalar>::Constant(mdp.states(l), mdp.num_actions, value));
    return t;
}

/// Checks every structural invariant of an MDP and returns one message per
/// violation (empty means valid). Probability rows must sum to 1 within tol.
template <class Scalar>
std::vector<std::string> validate_mdp(const LayeredMdp<Scalar>& mdp, Scalar tol = Scalar(1e-9)) {
    std::vector<std::string> report;
    auto fail = [&report](const std::string& msg) { report.push_back(msg); };

    if (mdp.num_layers < 1) fail("num_layers must be >= 1");
    if (static_cast<int>(mdp.layer_sizes.size()) != mdp.num_layers)
        fail("layer_sizes length does not match num_layers");
    if (mdp.num_actions < 1) fail("num_actions must be >= 1");
    if (!report.empty()) return report;

    if (static_cast<int>(mdp.transitions.size()) != mdp.num_layers - 1)
        fail("transitions must have num_layers-1 tables");
    if (static_cast<int>(mdp.reward_mean.size()) != mdp.num_layers)
        fail("reward_mean must have one table per layer");
    if (mdp.initial_dist.size() != mdp.states(0)) fail("initial_dist size does not match layer 0");
    if (!(mdp.reward_noise_std >= Scalar(0))) fail("reward_noise_std must be >= 0");
    if (!report.empty()) return report;

    if (std::abs(mdp.initial_dist.sum() - Scalar(1)) > tol)
        fail("initial_dist does not sum to 1");
    for (int s = 0; s < mdp.states(0); ++s)
        if (mdp.initial_dist[s] < Scalar(0)) {
            std::ostringstream os;
            os << "initial_dist has negative entry at state " << s;
            fail(os.str());
        }

    for (int l = 0; l < mdp.num_layers; ++l) {
        const auto& r = mdp.reward_mean[static_cast<size_t>(l)];
        if (r.rows() != mdp.states(l) || r.cols() != mdp.num_actions) {
            std::ostringstream os;
            os << "reward table shape mismatch at layer " << l;
            fail(os.str());
            continue;
        }
        if (!r.isFinite().all()) {
            std::ostringstream os;
            os << "reward table has non-finite entry at layer " << l;
            fail(os.str());
        }
    }

    for (int l = 0; l + 1 < mdp.num_layers; ++l) {
        const auto& p = mdp.transitions[static_cast<size_t>(l)];
        if (p.rows() != static_cast<Eigen::Index>(mdp.states(l)) * mdp.num_actions ||
            p.cols() != mdp.states(l + 1)) {
            std::ostringstream os;
            os << "transition table shape mismatch at layer " << l;
            fail(os.str());
            continue;
        }
        for (int s = 0; s < mdp.states(l); ++s) {
            for (int a = 0; a < mdp.num_actions; ++a) {
                auto row = p.row(s * mdp.num_actions + a);
                if (row.minCoeff() < Scalar(0)) {
                    std::ostringstream os;
                    os << "negative transition probability at layer " << l << " state " << s
                       << " action " << a;
                    fail(os.str());
                }
                if (std::abs(row.sum() - Scalar(1)) > tol) {
                    std::ostringstream os;
                    os << "transition row does not sum to 1 at layer " << l << " state " << s
                       << " action " << a << " (sum=" << row.sum() << ")";
                    fail(os.str());
                }
            }
        }
    }
    return report;
}

template <class Scalar>
bool is_valid(const LayeredMdp<Scalar>& mdp, Scalar tol = Scalar(1e-9)) {
    return validate_mdp(mdp, tol).empty();
}

template <class Scalar>
std::vector<std::string> validate_policy(const Policy<Scalar>& policy, Scalar tol = Scalar(1e-12)) {
    std::vector<std::string> report;
    for (size_t l = 0; l < policy.pi.size(); ++l) {
        const auto& p = policy.pi[l];
        for (Eigen::Index s = 0; s < p.rows(); ++s) {
            if (p.row(s).minCoeff() < Scalar(0)) {
                std::ostringstream os;
                os << "negative policy entry at layer " << l << " state " << s;
                report.push_back(os.str());
            }
            if (std::abs(p.row(s).sum() - Scalar(1)) > tol) {
                std::ostringstream os;
                os << "policy row does not sum to 1 at layer " << l << " state " << s;
                report.push_back(os.str());
            }
        }
    }
    return report;
}

template <class Scalar>
struct FlowReport {
    bool ok = false;
    Scalar max_residual = std::numeric_limits<Scalar>::infinity();
};

/// Sup-norm residual of the occupancy flow constraints
///   sum_a lambda_0(s,a) = rho(s),
///   sum_a lambda_{l+1}(s',a) = sum_{s,a} P_l(s'|s,a) lambda_l(s,a),
/// plus elementwise non-negativity.
template <class Scalar>
FlowReport<Scalar> check_flow(const OccupancyMeasure<Scalar>& occ,
                              const std::vector<TransitionMatrix<Scalar>>& transitions,
                              const Vector<Scalar>& rho, Scalar tol) {
    Scalar residual = Scalar(0);
    const auto& lam = occ.lambda;
    for (const auto& layer : lam) {
        Scalar neg = layer.minCoeff();
        if (neg < Scalar(0)) residual = std::max(residual, -neg);
    }
    residual = std::max(residual, (lam[0].rowwise().sum().matrix() - rho).template lpNorm<Eigen::Infinity>());
    for (size_t l = 0; l + 1 < lam.size(); ++l) {
        Vector<Scalar> inflow = transitions[l].transpose() * flatten_sa(lam[l]);
        residual = std::max(residual,
                            (lam[l + 1].rowwise().sum().matrix() - inflow).template lpNorm<Eigen::Infinity>());
    }
    return {residual <= tol, residual};
}

template <class Scalar>
FlowReport<Scalar> check_flow(const OccupancyMeasure<Scalar>& occ, const LayeredMdp<Scalar>& mdp,
                              Scalar tol) {
    return check_flow(occ, mdp.transitions, Vector<Scalar>(mdp.initial_dist), tol);
}

}  // namespace vapor
