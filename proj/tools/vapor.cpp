// Command-line front end: solve one VAPOR program, run learning experiments,
// compare agents, or print P(Gamma) estimates side by side.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "vapor/harness.hpp"
#include "vapor/rng.hpp"
#include "vapor/solver.hpp"

namespace {

using namespace vapor;

struct SolveArgs {
    std::string env = "deepsea";
    int size = 10;
    double epsilon = 0.00125;
    double noise = 1.0;
    std::uint64_t seed = 0;
    std::string sigma_mode = "count_bound";
    double gap_tol = 1e-5;
    int max_iters = 5000;
    std::string trace_path;
};

VaporProblemd assemble_problem(const SolveArgs& args) {
    if (args.env == "chain")
        return vapor_problem_from_prior(envs::make_chain_pair(args.size, args.epsilon));
    harness::EnvConfig env;
    env.name = args.env;
    env.size = args.size;
    env.noise_std = args.noise;
    env.seed = args.seed;
    if (args.env == "deepsea") {
        auto mdp = envs::make_deepsea(args.size, args.noise);
        auto b = belief_init(shape_of(mdp), Vector<double>(mdp.initial_dist),
                             1.0 / std::sqrt(double(shape_of(mdp).total_states())), 0.0, 1.0,
                             args.noise);
        const auto mode = args.sigma_mode == "exact" ? SigmaMode::kExactPosteriorStd
                                                     : SigmaMode::kCountBound;
        return make_vapor_problem(transform_beliefs(b, mode));
    }
    if (args.env == "gridworld") {
        std::mt19937_64 rng = make_rng(args.seed, 0x6121d);
        auto gw = envs::make_gridworld(args.size, rng);
        VaporProblemd prob;
        prob.transitions = gw.mdp.transitions;
        prob.rho = gw.mdp.initial_dist;
        prob.reward = gw.mdp.reward_mean;
        for (int l = 0; l < gw.mdp.num_layers; ++l) prob.sigma.push_back(gw.reward_sigma0);
        return prob;
    }
    if (args.env == "fourroom") {
        auto mdp = envs::make_four_room(args.size);
        VaporProblemd prob;
        prob.transitions = mdp.transitions;
        prob.rho = mdp.initial_dist;
        prob.reward = mdp.reward_mean;
        prob.sigma = constant_like(mdp, 1.0);
        return prob;
    }
    throw std::invalid_argument("solve: unsupported env " + args.env);
}

int cmd_solve(const SolveArgs& args) {
    auto prob = assemble_problem(args);
    SolverOptions opts;
    opts.gap_tol = args.gap_tol;
    opts.max_iters = args.max_iters;
    opts.record_residual_trace = !args.trace_path.empty();
    auto [lam, diag] = solve_frank_wolfe(prob, opts);
    const double primal = vapor_objective(lam, prob);

    std::cout << "objective      " << primal << "\n";
    std::cout << "dual value     " << diag.dual_value << "\n";
    std::cout << "dual gap       " << diag.dual_value - primal << "\n";
    std::cout << "fw gap         " << diag.final_gap << " (tol " << opts.gap_tol << ")\n";
    std::cout << "iterations     " << diag.iterations << "\n";
    std::cout << "flow residual  " << diag.max_flow_residual << "\n";

    auto policy = policy_from_occupancy(lam);
    int cells = 0;
    for (const auto& p : policy.pi) cells += static_cast<int>(p.size());
    if (cells <= 200) {
        std::cout << "policy rows (layer state: probabilities)\n";
        for (size_t l = 0; l < policy.pi.size(); ++l)
            for (Eigen::Index s = 0; s < policy.pi[l].rows(); ++s) {
                std::cout << "  " << l << " " << s << ":";
                for (Eigen::Index a = 0; a < policy.pi[l].cols(); ++a)
                    std::cout << " " << policy.pi[l](s, a);
                std::cout << "\n";
            }
    } else {
        std::cout << "policy         " << cells << " cells (suppressed); layer-0 row:";
        for (Eigen::Index a = 0; a < policy.pi[0].cols(); ++a)
            std::cout << " " << policy.pi[0](0, a);
        std::cout << "\n";
    }
    if (!args.trace_path.empty()) {
        dump_trace_csv(diag, args.trace_path);
        std::cout << "trace written to " << args.trace_path << "\n";
    }
    return diag.final_gap <= opts.gap_tol ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& out_override, int workers_override,
            bool agent_column) {
    auto config = harness::load_config(config_path);
    if (!out_override.empty()) config.out_dir = out_override;
    if (workers_override > 0) config.workers = workers_override;
    if (agent_column == false && config.agents.size() > 1)
        throw std::invalid_argument("run expects a single agent; use compare for several");

    const auto start = std::chrono::steady_clock::now();
    auto results = harness::run_learning(config);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::filesystem::create_directories(config.out_dir);
    const std::string csv = config.out_dir + "/results.csv";
    harness::write_results_csv(results, csv, agent_column);
    harness::write_manifest(config, wall, config.out_dir + "/manifest.json");

    for (const auto& result : results) {
        std::vector<int> solves;
        for (const auto& s : result.seeds)
            if (s.time_to_solve) solves.push_back(*s.time_to_solve);
        std::cout << result.agent.kind << ": " << result.seeds.size() << " seeds, "
                  << config.episodes << " episode budget";
        if (!solves.empty()) {
            std::sort(solves.begin(), solves.end());
            std::cout << ", median time-to-solve "
                      << solves[solves.size() / 2] << " (" << solves.size() << " solved)";
        }
        if (result.seeds.size() >= 2) {
            auto curve = harness::aggregate_bayes_regret(result);
            std::cout << ", final mean cum regret " << curve.mean_cum_regret.back();
        }
        std::cout << "\n";
    }
    std::cout << "wrote " << csv << "\n";
    return 0;
}

int cmd_pgamma(int length, double epsilon, const std::string& method, int samples,
               std::uint64_t seed, double gap_tol, int max_iters) {
    auto prior = envs::make_chain_pair(length, epsilon);
    const bool all = method.empty();

    std::optional<OccupancyMeasured> exact, tsmc, vapor_lam;
    if (all || method == "exact") exact = exact_pgamma(prior);
    if (all || method == "ts-mc") {
        std::mt19937_64 rng = make_rng(seed, 0x7e6a);
        tsmc = ts_monte_carlo_pgamma(prior, samples, rng);
    }
    if (all || method == "vapor") {
        SolverOptions opts;
        opts.gap_tol = gap_tol;
        opts.max_iters = max_iters;
        auto [lam, diag] = solve_frank_wolfe(vapor_problem_from_prior(prior), opts);
        vapor_lam = std::move(lam);
    }

    std::cout << "chain L=" << length << " eps=" << epsilon
              << "  lambda_l(s_l, a) for a in {down, right}\n";
    std::cout << "layer";
    if (exact) std::cout << "        exact-P(Gamma)";
    if (tsmc) std::cout << "      ts-mc(" << samples << ")";
    if (vapor_lam) std::cout << "           vapor";
    std::cout << "\n";
    for (int l = 0; l < length; ++l) {
        std::cout << std::setw(4) << (l + 1) << " ";
        auto print = [&](const OccupancyMeasured& occ) {
            std::cout << "  [" << std::setw(8) << std::setprecision(4) << std::fixed
                      << occ.lambda[(size_t)l](envs::kChainState, 0) << "," << std::setw(8)
                      << occ.lambda[(size_t)l](envs::kChainState, 1) << "]";
            std::cout.unsetf(std::ios::fixed);
        };
        if (exact) print(*exact);
        if (tsmc) print(*tsmc);
        if (vapor_lam) print(*vapor_lam);
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VAPOR: variational Bayesian exploration in layered MDPs"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "solve one VAPOR program and print diagnostics");
    solve->add_option("--env", solve_args.env, "deepsea|gridworld|chain|fourroom")
        ->default_val("deepsea");
    solve->add_option("--size,--L", solve_args.size, "depth / side length")->default_val(10);
    solve->add_option("--eps", solve_args.epsilon, "chain step cost");
    solve->add_option("--noise", solve_args.noise, "observation noise std");
    solve->add_option("--seed", solve_args.seed, "builder seed");
    solve->add_option("--sigma-mode", solve_args.sigma_mode, "count_bound|exact");
    solve->add_option("--gap-tol", solve_args.gap_tol, "Frank-Wolfe gap tolerance");
    solve->add_option("--max-iters", solve_args.max_iters, "iteration budget");
    solve->add_option("--dump-trace", solve_args.trace_path, "write per-iteration CSV trace");

    std::string run_config, run_out;
    int run_workers = 0;
    auto* run = app.add_subcommand("run", "run a learning experiment from a JSON config");
    run->add_option("--config", run_config, "config path")->required();
    run->add_option("--out", run_out, "output directory override");
    run->add_option("--workers", run_workers, "seed-level worker threads");

    std::string cmp_config, cmp_out;
    int cmp_workers = 0;
    auto* compare = app.add_subcommand("compare", "multi-agent run with long-format CSV");
    compare->add_option("--config", cmp_config, "config path")->required();
    compare->add_option("--out", cmp_out, "output directory override");
    compare->add_option("--workers", cmp_workers, "seed-level worker threads");

    int pg_length = 8;
    double pg_eps = 0.00125;
    std::string pg_env = "chain";
    std::string pg_method;
    int pg_samples = 10000;
    std::uint64_t pg_seed = 0;
    double pg_gap_tol = 1e-6;
    int pg_iters = 20000;
    auto* pgamma = app.add_subcommand("pgamma", "print P(Gamma) estimates side by side");
    pgamma->add_option("--env", pg_env, "environment (exact P(Gamma) exists for chain only)")
        ->check(CLI::IsMember({"chain"}));
    pgamma->add_option("--L", pg_length, "chain length")->default_val(8);
    pgamma->add_option("--eps", pg_eps, "chain step cost");
    pgamma->add_option("--method", pg_method, "exact|ts-mc|vapor (default: all three)");
    pgamma->add_option("--samples", pg_samples, "TS Monte-Carlo samples");
    pgamma->add_option("--seed", pg_seed, "sampler seed");
    pgamma->add_option("--gap-tol", pg_gap_tol, "solver gap tolerance");
    pgamma->add_option("--max-iters", pg_iters, "solver iteration budget");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(solve_args);
        if (run->parsed()) return cmd_run(run_config, run_out, run_workers, false);
        if (compare->parsed()) return cmd_run(cmp_config, cmp_out, cmp_workers, true);
        if (pgamma->parsed())
            return cmd_pgamma(pg_length, pg_eps, pg_method, pg_samples, pg_seed, pg_gap_tol,
                              pg_iters);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
