#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "vapor/agents.hpp"
#include "vapor/envs.hpp"
#include "vapor/oracles.hpp"

namespace vapor::harness {

inline constexpr const char* kVersion = "0.1.0";

struct EnvConfig {
    std::string name;              // deepsea | gridworld | chain | fourroom | random
    int size = 10;                 // depth L (deepsea/chain) or grid side n
    double epsilon = 0.00125;      // chain step cost
    double noise_std = 1.0;        // observation noise nu
    int horizon = 0;               // gridworld horizon override (0 = 2n)
    std::uint64_t seed = 0;        // builder seed (gridworld rewards, random family)
    double sparsity = 0.1;         // gridworld reward sparsity
    int layers = 3;                // random family shape
    int states = 3;
    int actions = 2;
    bool bayes_protocol = false;   // draw the true MDP from the agent's prior
};

struct AgentConfig {
    std::string kind;              // vapor|psrl|klearning|softq|marginal|rlsvi|vaporlite|maxent|pgamma|oracle
    AgentOptions options;
    std::string sigma_mode = "count_bound";  // or "exact"
};

struct ExperimentConfig {
    EnvConfig env;
    std::vector<AgentConfig> agents;
    int episodes = 100;
    std::vector<std::uint64_t> seeds;
    int replication = 1;
    int workers = 1;
    bool stop_when_solved = false;
    std::string out_dir = "results";
};

/// Strict parse: unknown keys anywhere are rejected with their JSON path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct TrajectoryStep {
    int layer;
    int state;
    int action;
    double reward_obs;
    int next_state;  // -1 at the final layer
};
using Trajectory = std::vector<TrajectoryStep>;

/// Samples one length-L rollout of `policy` on the true MDP.
Trajectory run_episode(const LayeredMdpd& mdp, const Policyd& policy, std::mt19937_64& rng);

struct EpisodeRecord {
    double regret = 0.0;
    double cum_regret = 0.0;
    bool goal_found = false;
    double fw_gap = std::numeric_limits<double>::quiet_NaN();
    int fw_iters = 0;
};

struct SeedResult {
    std::uint64_t seed = 0;
    std::vector<EpisodeRecord> episodes;
    std::optional<int> time_to_solve;   // 1-based episode index
    std::optional<int> coverage_time;   // 1-based episode index
    double wall_seconds = 0.0;
};

struct ExperimentResult {
    AgentConfig agent;
    std::vector<SeedResult> seeds;
};

/// First t with (sum_{i<=t} found_i) / t >= 0.1 (inclusive), or nullopt.
std::optional<int> time_to_solve(const std::vector<bool>& goal_found);

/// First episode after which every reachable index is covered, or nullopt.
/// Indices are whatever the caller keys coverage by (grid state-action pairs
/// in the four-room experiment).
std::optional<int> coverage_time(const std::vector<std::vector<int>>& visited_per_episode,
                                 const std::vector<int>& reachable);

struct RegretCurve {
    std::vector<double> mean_cum_regret;  // per episode, averaged over seeds
    std::vector<double> std_error;
};

RegretCurve aggregate_bayes_regret(const ExperimentResult& result);

/// Runs the full experiment: one ExperimentResult per configured agent, seeds
/// evaluated in a worker pool. Results are a pure function of (config, seeds)
/// regardless of worker count.
std::vector<ExperimentResult> run_learning(const ExperimentConfig& config);

void write_results_csv(const std::vector<ExperimentResult>& results, const std::string& path,
                       bool agent_column);
void write_manifest(const ExperimentConfig& config, double wall_seconds, const std::string& path);

}  // namespace vapor::harness
