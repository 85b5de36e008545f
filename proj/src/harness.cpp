#include "vapor/harness.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <mutex>
#include <iomanip>
#include <set>
#include <thread>

#include "vapor/bayes_io.hpp"
#include "vapor/rng.hpp"

namespace vapor::harness {

namespace {

void require_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument("unknown config key '" + key + "' in " + where);
    }
}

SigmaMode parse_sigma_mode(const std::string& mode) {
    if (mode == "count_bound") return SigmaMode::kCountBound;
    if (mode == "exact") return SigmaMode::kExactPosteriorStd;
    throw std::invalid_argument("sigma_mode must be 'count_bound' or 'exact', got '" + mode + "'");
}

AgentConfig parse_agent(const nlohmann::json& j) {
    require_keys(j, {"kind", "sigma_mode", "temperature", "samples", "tau_min", "tau_max",
                     "weighted", "solver"},
                 "agent");
    AgentConfig agent;
    agent.kind = j.at("kind").get<std::string>();
    const std::vector<std::string> kinds = {"vapor",    "psrl",  "klearning", "softq",
                                            "marginal", "rlsvi", "vaporlite", "maxent",
                                            "pgamma",   "oracle"};
    if (std::find(kinds.begin(), kinds.end(), agent.kind) == kinds.end())
        throw std::invalid_argument("unknown agent kind '" + agent.kind + "'");
    if (j.contains("sigma_mode")) agent.sigma_mode = j.at("sigma_mode").get<std::string>();
    agent.options.sigma_mode = parse_sigma_mode(agent.sigma_mode);
    if (j.contains("temperature"))
        agent.options.softq_temperature = j.at("temperature").get<double>();
    if (j.contains("samples")) agent.options.marginal_samples = j.at("samples").get<int>();
    if (j.contains("tau_min")) agent.options.klearning_tau_min = j.at("tau_min").get<double>();
    if (j.contains("tau_max")) agent.options.klearning_tau_max = j.at("tau_max").get<double>();
    if (j.contains("weighted")) agent.options.maxent_weighted = j.at("weighted").get<bool>();
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        require_keys(s, {"max_iters", "gap_tol", "delta", "compute_dual"}, "agent.solver");
        if (s.contains("max_iters")) agent.options.solver.max_iters = s.at("max_iters").get<int>();
        if (s.contains("gap_tol")) agent.options.solver.gap_tol = s.at("gap_tol").get<double>();
        if (s.contains("delta")) agent.options.solver.delta = s.at("delta").get<double>();
        if (s.contains("compute_dual"))
            agent.options.solver.compute_dual = s.at("compute_dual").get<bool>();
    }
    return agent;
}

nlohmann::json agent_to_json(const AgentConfig& a) {
    nlohmann::json j;
    j["kind"] = a.kind;
    j["sigma_mode"] = a.sigma_mode;
    j["temperature"] = a.options.softq_temperature;
    j["samples"] = a.options.marginal_samples;
    j["tau_min"] = a.options.klearning_tau_min;
    j["tau_max"] = a.options.klearning_tau_max;
    j["weighted"] = a.options.maxent_weighted;
    j["solver"] = {{"max_iters", a.options.solver.max_iters},
                   {"gap_tol", a.options.solver.gap_tol},
                   {"delta", a.options.solver.delta},
                   {"compute_dual", a.options.solver.compute_dual}};
    return j;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
    require_keys(j, {"env", "agent", "agents", "episodes", "seeds", "replication", "workers",
                     "stop_when_solved", "out"},
                 "config");
    ExperimentConfig config;
    const auto& env = j.at("env");
    require_keys(env, {"name", "size", "epsilon", "noise_std", "horizon", "seed", "sparsity",
                       "layers", "states", "actions", "bayes_protocol"},
                 "env");
    config.env.name = env.at("name").get<std::string>();
    const std::vector<std::string> envs = {"deepsea", "gridworld", "chain", "fourroom", "random"};
    if (std::find(envs.begin(), envs.end(), config.env.name) == envs.end())
        throw std::invalid_argument("unknown env '" + config.env.name + "'");
    if (env.contains("size")) config.env.size = env.at("size").get<int>();
    if (env.contains("epsilon")) config.env.epsilon = env.at("epsilon").get<double>();
    if (env.contains("noise_std")) config.env.noise_std = env.at("noise_std").get<double>();
    if (env.contains("horizon")) config.env.horizon = env.at("horizon").get<int>();
    if (env.contains("seed")) config.env.seed = env.at("seed").get<std::uint64_t>();
    if (env.contains("sparsity")) config.env.sparsity = env.at("sparsity").get<double>();
    if (env.contains("layers")) config.env.layers = env.at("layers").get<int>();
    if (env.contains("states")) config.env.states = env.at("states").get<int>();
    if (env.contains("actions")) config.env.actions = env.at("actions").get<int>();
    config.env.bayes_protocol =
        config.env.name == "chain" || config.env.name == "random" || config.env.name == "gridworld";
    if (env.contains("bayes_protocol"))
        config.env.bayes_protocol = env.at("bayes_protocol").get<bool>();

    if (j.contains("agent") == j.contains("agents"))
        throw std::invalid_argument("config needs exactly one of 'agent' or 'agents'");
    if (j.contains("agent"))
        config.agents.push_back(parse_agent(j.at("agent")));
    else
        for (const auto& a : j.at("agents")) config.agents.push_back(parse_agent(a));

    if (j.contains("episodes")) config.episodes = j.at("episodes").get<int>();
    if (config.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (!j.contains("seeds"))
        throw std::invalid_argument("config requires a non-empty 'seeds' list");
    config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (config.seeds.empty())
        throw std::invalid_argument("config requires a non-empty 'seeds' list");
    if (j.contains("replication")) config.replication = j.at("replication").get<int>();
    if (config.replication < 1) throw std::invalid_argument("replication must be >= 1");
    if (j.contains("workers")) config.workers = j.at("workers").get<int>();
    if (j.contains("stop_when_solved"))
        config.stop_when_solved = j.at("stop_when_solved").get<bool>();
    if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j;
    in >> j;
    return parse_config(j);
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["env"] = {{"name", config.env.name},
                {"size", config.env.size},
                {"epsilon", config.env.epsilon},
                {"noise_std", config.env.noise_std},
                {"horizon", config.env.horizon},
                {"seed", config.env.seed},
                {"sparsity", config.env.sparsity},
                {"layers", config.env.layers},
                {"states", config.env.states},
                {"actions", config.env.actions},
                {"bayes_protocol", config.env.bayes_protocol}};
    j["agents"] = nlohmann::json::array();
    for (const auto& a : config.agents) j["agents"].push_back(agent_to_json(a));
    j["episodes"] = config.episodes;
    j["seeds"] = config.seeds;
    j["replication"] = config.replication;
    j["workers"] = config.workers;
    j["stop_when_solved"] = config.stop_when_solved;
    j["out"] = config.out_dir;
    return j;
}

Trajectory run_episode(const LayeredMdpd& mdp, const Policyd& policy, std::mt19937_64& rng) {
    Trajectory traj;
    traj.reserve(static_cast<size_t>(mdp.num_layers));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int state = 0;
    {
        const double u = unit(rng);
        double acc = 0.0;
        for (int s = 0; s < mdp.states(0); ++s) {
            state = s;
            acc += mdp.initial_dist[s];
            if (u <= acc) break;
        }
    }
    for (int l = 0; l < mdp.num_layers; ++l) {
        const auto row = policy.pi[static_cast<size_t>(l)].row(state);
        const double u = unit(rng);
        double acc = 0.0;
        int action = mdp.num_actions - 1;
        for (int a = 0; a < mdp.num_actions; ++a) {
            acc += row[a];
            if (u <= acc) {
                action = a;
                break;
            }
        }
        auto [reward, next] = envs::env_step(mdp, l, state, action, rng);
        traj.push_back({l, state, action, reward, next});
        state = next;
    }
    return traj;
}

std::optional<int> time_to_solve(const std::vector<bool>& goal_found) {
    int found = 0;
    for (size_t t = 0; t < goal_found.size(); ++t) {
        found += goal_found[t] ? 1 : 0;
        if (10 * found >= static_cast<int>(t) + 1) return static_cast<int>(t) + 1;
    }
    return std::nullopt;
}

std::optional<int> coverage_time(const std::vector<std::vector<int>>& visited_per_episode,
                                 const std::vector<int>& reachable) {
    std::set<int> needed(reachable.begin(), reachable.end());
    if (needed.empty()) return 1;
    for (size_t t = 0; t < visited_per_episode.size(); ++t) {
        for (int key : visited_per_episode[t]) needed.erase(key);
        if (needed.empty()) return static_cast<int>(t) + 1;
    }
    return std::nullopt;
}

RegretCurve aggregate_bayes_regret(const ExperimentResult& result) {
    if (result.seeds.size() < 2)
        throw std::invalid_argument("aggregate_bayes_regret: need at least 2 seeds");
    size_t episodes = 0;
    for (const auto& s : result.seeds) episodes = std::max(episodes, s.episodes.size());
    RegretCurve curve;
    curve.mean_cum_regret.resize(episodes, 0.0);
    curve.std_error.resize(episodes, 0.0);
    const double n = static_cast<double>(result.seeds.size());
    for (size_t t = 0; t < episodes; ++t) {
        double mean = 0.0, m2 = 0.0;
        int count = 0;
        for (const auto& s : result.seeds) {
            const double x = s.episodes.empty()
                                 ? 0.0
                                 : s.episodes[std::min(t, s.episodes.size() - 1)].cum_regret;
            ++count;
            const double d = x - mean;
            mean += d / count;
            m2 += d * (x - mean);
        }
        curve.mean_cum_regret[t] = mean;
        curve.std_error[t] = count > 1 ? std::sqrt(m2 / (count - 1) / n) : 0.0;
    }
    return curve;
}

namespace {

struct EnvBundle {
    EnvConfig cfg;
    std::optional<LayeredMdpd> fixed_truth;
    std::optional<FiniteSupportPriord> finite_prior;  // chain
    std::function<BeliefStated()> make_beliefs;       // conjugate-belief envs
    bool track_coverage = false;
    std::vector<int> reachable_pairs;                 // aggregated s * A + a keys
};

EnvBundle build_env(const EnvConfig& cfg) {
    EnvBundle bundle;
    bundle.cfg = cfg;
    if (cfg.name == "deepsea") {
        auto mdp = envs::make_deepsea(cfg.size, cfg.noise_std);
        auto shape = shape_of(mdp);
        const double scale = 1.0 / std::sqrt(static_cast<double>(shape.total_states()));
        Vector<double> rho = mdp.initial_dist;
        bundle.make_beliefs = [shape, rho, scale, cfg]() {
            return belief_init(shape, rho, scale, 0.0, 1.0, cfg.noise_std);
        };
        bundle.fixed_truth = std::move(mdp);
    } else if (cfg.name == "chain") {
        bundle.finite_prior = envs::make_chain_pair(cfg.size, cfg.epsilon);
    } else if (cfg.name == "gridworld") {
        std::mt19937_64 rng = make_rng(cfg.seed, 0x6121d);
        envs::GridRewardSpec spec;
        spec.sparsity = cfg.sparsity;
        auto gw = envs::make_gridworld(cfg.size, rng, spec, cfg.horizon);
        LayerTable<double> mu = gw.mdp.reward_mean;
        LayerTable<double> var;
        for (int l = 0; l < gw.mdp.num_layers; ++l) var.push_back(gw.reward_sigma0.square());
        LayeredMdpd mdp = gw.mdp;
        bundle.make_beliefs = [mdp, mu, var, cfg]() {
            return belief_init_known_p(mdp, mu, var, cfg.noise_std);
        };
        bundle.fixed_truth = std::move(gw.mdp);
    } else if (cfg.name == "fourroom") {
        auto mdp = envs::make_four_room(cfg.size);
        LayerTable<double> mu = zeros_like_layers<double>(mdp.layer_sizes, mdp.num_actions);
        LayerTable<double> var = zeros_like_layers<double>(mdp.layer_sizes, mdp.num_actions);
        LayeredMdpd copy = mdp;
        bundle.make_beliefs = [copy, mu, var]() { return belief_init_known_p(copy, mu, var, 0.0); };
        bundle.track_coverage = true;
        auto occ = occupancy_from_policy(mdp, uniform_policy(mdp));
        std::set<int> pairs;
        for (const auto& layer : occ.lambda)
            for (Eigen::Index s = 0; s < layer.rows(); ++s)
                for (Eigen::Index a = 0; a < layer.cols(); ++a)
                    if (layer(s, a) > 1e-12) pairs.insert(static_cast<int>(s * layer.cols() + a));
        bundle.reachable_pairs.assign(pairs.begin(), pairs.end());
        bundle.fixed_truth = std::move(mdp);
    } else if (cfg.name == "random") {
        MdpShape shape{cfg.layers, std::vector<int>(static_cast<size_t>(cfg.layers), cfg.states),
                       cfg.actions};
        Vector<double> rho = Vector<double>::Constant(cfg.states, 1.0 / cfg.states);
        bundle.make_beliefs = [shape, rho, cfg]() {
            return belief_init(shape, rho, 1.0, 0.0, 1.0, cfg.noise_std);
        };
    } else {
        throw std::invalid_argument("unknown env " + cfg.name);
    }
    return bundle;
}

bool goal_reached(const EnvConfig& cfg, const LayeredMdpd& truth, const Trajectory& traj) {
    if (traj.empty()) return false;
    const auto& last = traj.back();
    if (cfg.name == "deepsea")
        return envs::deepsea_goal_transition(truth, last.layer, last.state, last.action);
    if (cfg.name == "chain") return envs::chain_reached_end(truth, last.layer, last.state);
    return false;
}

// Per-seed state for agents that reuse work across episodes.
struct AgentScratch {
    std::optional<OccupancyMeasured> maxent_warm;
    std::optional<Policyd> maxent_policy;
    std::vector<double> maxent_weights_key;
};

Policyd finite_support_policy(const AgentConfig& agent, const FiniteSupportPriord& posterior,
                              std::mt19937_64& rng, EpisodeRecord* record) {
    const auto& kind = agent.kind;
    if (kind == "psrl") return psrl_policy(posterior, rng);
    if (kind == "marginal")
        return marginal_optimality_policy(posterior, agent.options.marginal_samples, rng);
    if (kind == "pgamma") return policy_from_occupancy(exact_pgamma(posterior));
    auto prob = vapor_problem_from_prior(posterior);
    if (kind == "vapor") {
        auto [lam, diag] = solve_frank_wolfe(prob, agent.options.solver);
        record->fw_gap = diag.final_gap;
        record->fw_iters = diag.iterations;
        return policy_from_occupancy(lam);
    }
    if (kind == "softq")
        return soft_q_policy(prob.reward, prob.transitions, agent.options.softq_temperature);
    if (kind == "klearning")
        return klearning_policy(prob.transitions, prob.rho, prob.reward, prob.sigma,
                                agent.options.klearning_tau_min, agent.options.klearning_tau_max);
    throw std::invalid_argument("agent kind '" + kind + "' is not available on the chain env");
}

Policyd belief_policy(const AgentConfig& agent, const BeliefStated& beliefs, int episode,
                      const LayeredMdpd& truth, std::mt19937_64& rng, AgentScratch& scratch,
                      EpisodeRecord* record) {
    const auto& kind = agent.kind;
    if (kind == "vapor") {
        auto [pi, diag] = vapor_policy(beliefs, agent.options);
        record->fw_gap = diag.final_gap;
        record->fw_iters = diag.iterations;
        return pi;
    }
    if (kind == "psrl") return psrl_policy(beliefs, rng);
    if (kind == "klearning") return klearning_policy(beliefs, agent.options);
    if (kind == "softq")
        return soft_q_policy(posterior_reward_mean(beliefs), posterior_mean_dynamics(beliefs),
                             agent.options.softq_temperature);
    if (kind == "marginal")
        return marginal_optimality_policy(beliefs, agent.options.marginal_samples, rng);
    if (kind == "rlsvi") return rlsvi_variant_policy(beliefs, rng, agent.options);
    if (kind == "vaporlite") {
        SolveDiagnosticsd diag;
        auto pi = vapor_lite_policy(beliefs, episode, agent.options, &diag);
        record->fw_gap = diag.final_gap;
        record->fw_iters = diag.iterations;
        return pi;
    }
    if (kind == "maxent") {
        // entropy weights keyed on aggregated grid (state, action) visits
        const int actions = beliefs.shape.num_actions;
        const int cells = beliefs.shape.states(0);
        std::vector<double> agg(static_cast<size_t>(cells * actions), 0.0);
        for (const auto& layer : beliefs.counts)
            for (Eigen::Index s = 0; s < layer.rows(); ++s)
                for (Eigen::Index a = 0; a < layer.cols(); ++a)
                    agg[static_cast<size_t>(s * actions + a)] += layer(s, a);
        std::vector<double> key(agg.size());
        for (size_t i = 0; i < agg.size(); ++i)
            key[i] = agent.options.maxent_weighted ? (agg[i] == 0.0 ? 1.0 : 0.0) : 1.0;
        if (scratch.maxent_policy && key == scratch.maxent_weights_key)
            return *scratch.maxent_policy;
        LayerTable<double> weights;
        for (int l = 0; l < beliefs.shape.num_layers; ++l) {
            Table<double> w(cells, actions);
            for (int s = 0; s < cells; ++s)
                for (int a = 0; a < actions; ++a)
                    w(s, a) = key[static_cast<size_t>(s * actions + a)];
            weights.push_back(std::move(w));
        }
        auto p_mean = posterior_mean_dynamics(beliefs);
        OccupancyMeasured lam;
        Vector<double> rho = beliefs.initial_dist;
        auto pi = max_entropy_policy(p_mean, rho, weights, agent.options.solver,
                                     scratch.maxent_warm ? &*scratch.maxent_warm : nullptr, &lam);
        scratch.maxent_warm = std::move(lam);
        scratch.maxent_policy = pi;
        scratch.maxent_weights_key = std::move(key);
        return pi;
    }
    if (kind == "oracle") return backward_induction(truth).greedy;
    throw std::invalid_argument("unknown agent kind '" + kind + "'");
}

SeedResult run_seed(const ExperimentConfig& config, const EnvBundle& bundle,
                    const AgentConfig& agent, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    SeedResult result;
    result.seed = seed;

    std::mt19937_64 rng_truth = make_rng(seed, 0x72074);

    std::optional<FiniteSupportPriord> posterior;
    std::optional<BeliefStated> beliefs;
    LayeredMdpd truth;
    if (bundle.finite_prior) {
        posterior = *bundle.finite_prior;
        const int idx = bundle.cfg.bayes_protocol ? sample_support_index(*posterior, rng_truth) : 0;
        truth = posterior->mdps[static_cast<size_t>(idx)];
    } else {
        beliefs = bundle.make_beliefs();
        if (bundle.cfg.bayes_protocol)
            truth = sample_mdp(*beliefs, rng_truth);
        else
            truth = *bundle.fixed_truth;
    }
    const double v_star = initial_value(truth, backward_induction(truth).values);

    AgentScratch scratch;
    std::vector<std::vector<int>> visited;
    double cum_regret = 0.0;
    int solved_at = -1;
    int goal_count = 0;

    for (int episode = 1; episode <= config.episodes; ++episode) {
        std::mt19937_64 rng_agent = make_rng(seed, static_cast<std::uint64_t>(episode), 0xA6e27);
        std::mt19937_64 rng_env = make_rng(seed, static_cast<std::uint64_t>(episode), 0xE74e9);
        EpisodeRecord record;
        Policyd policy;
        if (posterior && agent.kind != "oracle") {
            policy = finite_support_policy(agent, *posterior, rng_agent, &record);
        } else if (posterior) {
            policy = backward_induction(truth).greedy;
        } else {
            policy = belief_policy(agent, *beliefs, episode, truth, rng_agent, scratch, &record);
        }

        record.regret = v_star - initial_value(truth, policy_value(truth, policy));
        cum_regret += record.regret;
        record.cum_regret = cum_regret;

        Trajectory traj = run_episode(truth, policy, rng_env);
        record.goal_found = goal_reached(bundle.cfg, truth, traj);
        goal_count += record.goal_found ? 1 : 0;

        if (posterior) {
            for (const auto& step : traj)
                finite_support_update(*posterior, step.layer, step.state, step.action,
                                      step.reward_obs, step.next_state, truth.reward_noise_std);
        } else {
            for (const auto& step : traj)
                belief_update(*beliefs, step.layer, step.state, step.action, step.reward_obs,
                              step.next_state, config.replication);
        }
        if (bundle.track_coverage) {
            std::vector<int> keys;
            keys.reserve(traj.size());
            for (const auto& step : traj)
                keys.push_back(step.state * truth.num_actions + step.action);
            visited.push_back(std::move(keys));
        }
        result.episodes.push_back(record);

        if (solved_at < 0 && 10 * goal_count >= episode) {
            solved_at = episode;
            if (config.stop_when_solved) break;
        }
    }
    if (solved_at > 0) result.time_to_solve = solved_at;
    if (bundle.track_coverage)
        result.coverage_time = coverage_time(visited, bundle.reachable_pairs);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace

std::vector<ExperimentResult> run_learning(const ExperimentConfig& config) {
    EnvBundle bundle = build_env(config.env);
    std::vector<ExperimentResult> results(config.agents.size());
    for (size_t a = 0; a < config.agents.size(); ++a) {
        results[a].agent = config.agents[a];
        results[a].seeds.resize(config.seeds.size());
    }

    struct Task {
        size_t agent;
        size_t seed_index;
    };
    std::vector<Task> tasks;
    for (size_t a = 0; a < config.agents.size(); ++a)
        for (size_t s = 0; s < config.seeds.size(); ++s) tasks.push_back({a, s});

    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        try {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                const Task& task = tasks[i];
                results[task.agent].seeds[task.seed_index] = run_seed(
                    config, bundle, config.agents[task.agent], config.seeds[task.seed_index]);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(tasks.size());
        }
    };
    const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(tasks.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

void write_results_csv(const std::vector<ExperimentResult>& results, const std::string& path,
                       bool agent_column) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << (agent_column ? "agent,seed,episode,regret,cum_regret,goal_found,fw_gap,fw_iters\n"
                         : "seed,episode,regret,cum_regret,goal_found,fw_gap,fw_iters\n");
    out << std::setprecision(17);
    for (const auto& result : results) {
        for (const auto& seed : result.seeds) {
            for (size_t t = 0; t < seed.episodes.size(); ++t) {
                const auto& e = seed.episodes[t];
                if (agent_column) out << result.agent.kind << ',';
                out << seed.seed << ',' << (t + 1) << ',' << e.regret << ',' << e.cum_regret << ','
                    << (e.goal_found ? 1 : 0) << ',' << e.fw_gap << ',' << e.fw_iters << '\n';
            }
        }
    }
}

void write_manifest(const ExperimentConfig& config, double wall_seconds, const std::string& path) {
    nlohmann::json j;
    j["config"] = config_to_json(config);
    j["version"] = kVersion;
    j["wall_seconds"] = wall_seconds;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buffer[64];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["finished_at"] = buffer;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

}  // namespace vapor::harness
