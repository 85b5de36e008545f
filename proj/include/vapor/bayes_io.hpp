#pragma once

#include <json.hpp>

#include "vapor/bayes.hpp"

namespace vapor {

// Belief snapshot schema:
//   {"L":..., "alpha":[...], "reward_mu":[...], "reward_count":[...], "nu":...}
// plus the remaining sufficient statistics so a snapshot reloads exactly.

namespace detail {

template <class Scalar>
nlohmann::json table_to_json(const Table<Scalar>& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index s = 0; s < t.rows(); ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index a = 0; a < t.cols(); ++a) row.push_back(t(s, a));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class Scalar>
Table<Scalar> table_from_json(const nlohmann::json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Table<Scalar> t(rows, cols);
    for (Eigen::Index s = 0; s < rows; ++s)
        for (Eigen::Index a = 0; a < cols; ++a) t(s, a) = j[static_cast<size_t>(s)][static_cast<size_t>(a)].template get<Scalar>();
    return t;
}

template <class Scalar>
nlohmann::json layers_to_json(const LayerTable<Scalar>& layers) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : layers) out.push_back(table_to_json(t));
    return out;
}

template <class Scalar>
LayerTable<Scalar> layers_from_json(const nlohmann::json& j) {
    LayerTable<Scalar> out;
    for (const auto& t : j) out.push_back(table_from_json<Scalar>(t));
    return out;
}

}  // namespace detail

template <class Scalar>
nlohmann::json belief_to_json(const BeliefState<Scalar>& b) {
    nlohmann::json j;
    j["L"] = b.shape.num_layers;
    j["layer_sizes"] = b.shape.layer_sizes;
    j["num_actions"] = b.shape.num_actions;
    j["nu"] = b.nu;
    j["rho"] = std::vector<Scalar>(b.initial_dist.data(), b.initial_dist.data() + b.initial_dist.size());
    nlohmann::json alpha = nlohmann::json::array();
    for (const auto& a : b.alpha) alpha.push_back(detail::table_to_json<Scalar>(a.array()));
    j["alpha"] = std::move(alpha);
    j["known_p"] = b.known_p.has_value();
    if (b.known_p) {
        nlohmann::json kp = nlohmann::json::array();
        for (const auto& p : *b.known_p) kp.push_back(detail::table_to_json<Scalar>(p.array()));
        j["known_p_tables"] = std::move(kp);
    }
    j["reward_mu"] = detail::layers_to_json(posterior_reward_mean(b));
    j["reward_count"] = detail::layers_to_json(b.counts);
    j["reward_sum"] = detail::layers_to_json(b.reward_sum);
    j["reward_prior_mu"] = detail::layers_to_json(b.prior_mu);
    j["reward_prior_var"] = detail::layers_to_json(b.prior_var);
    return j;
}

template <class Scalar>
BeliefState<Scalar> belief_from_json(const nlohmann::json& j) {
    BeliefState<Scalar> b;
    b.shape.num_layers = j.at("L").get<int>();
    b.shape.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    b.shape.num_actions = j.at("num_actions").get<int>();
    b.nu = j.at("nu").get<Scalar>();
    auto rho = j.at("rho").get<std::vector<Scalar>>();
    b.initial_dist = Eigen::Map<const Vector<Scalar>>(rho.data(), static_cast<Eigen::Index>(rho.size()));
    for (const auto& a : j.at("alpha"))
        b.alpha.push_back(detail::table_from_json<Scalar>(a).matrix());
    if (j.at("known_p").get<bool>()) {
        std::vector<TransitionMatrix<Scalar>> kp;
        for (const auto& p : j.at("known_p_tables")) kp.push_back(detail::table_from_json<Scalar>(p).matrix());
        b.known_p = std::move(kp);
    }
    b.counts = detail::layers_from_json<Scalar>(j.at("reward_count"));
    b.reward_sum = detail::layers_from_json<Scalar>(j.at("reward_sum"));
    b.prior_mu = detail::layers_from_json<Scalar>(j.at("reward_prior_mu"));
    b.prior_var = detail::layers_from_json<Scalar>(j.at("reward_prior_var"));
    return b;
}

}  // namespace vapor
