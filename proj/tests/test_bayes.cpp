#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "vapor/bayes.hpp"
#include "vapor/bayes_io.hpp"
#include "vapor/dp.hpp"
#include "vapor/envs.hpp"
#include "vapor/rng.hpp"

using namespace vapor;

namespace {

MdpShape small_shape() { return MdpShape{3, {2, 3, 2}, 2}; }

Vector<double> point_mass(int n) {
    Vector<double> v = Vector<double>::Zero(n);
    v[0] = 1.0;
    return v;
}

BeliefState<double> small_beliefs(double scale = 0.5, double nu = 1.0) {
    return belief_init(small_shape(), point_mass(2), scale, 0.0, 1.0, nu);
}

}  // namespace

TEST_CASE("belief_init: symmetric Dirichlet rows, rescaled up to total 1") {
    auto b = belief_init(MdpShape{2, {1, 4}, 2}, point_mass(1), 0.1, 0.0, 1.0, 1.0);
    // 4 next states at scale 0.1 sum to 0.4 < 1: rescaled to 0.25 each
    CHECK(b.alpha[0](0, 0) == doctest::Approx(0.25));
    CHECK(b.alpha[0].row(0).sum() == doctest::Approx(1.0));

    auto b2 = belief_init(MdpShape{2, {1, 4}, 2}, point_mass(1), 0.6, 0.0, 1.0, 1.0);
    CHECK(b2.alpha[0](0, 0) == doctest::Approx(0.6));

    CHECK_THROWS_AS(belief_init(small_shape(), point_mass(2), 0.0, 0.0, 1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("belief_update: Dirichlet pseudo-count and Gaussian arithmetic") {
    auto b = small_beliefs(1.0);
    CHECK(b.alpha[0](0, 0) == doctest::Approx(1.0));
    belief_update(b, 0, 0, 0, 1.0, 0);
    CHECK(b.alpha[0](0, 0) == doctest::Approx(2.0));
    CHECK(b.alpha[0](0, 1) == doctest::Approx(1.0));
    CHECK(b.counts[0](0, 0) == 1.0);

    // prior N(0,1), nu = 1, one observation of 1 -> posterior N(0.5, 0.5)
    double m, v;
    detail::posterior_reward(b, 0, 0, 0, &m, &v);
    CHECK(m == doctest::Approx(0.5));
    CHECK(v == doctest::Approx(0.5));

    CHECK_THROWS_AS(belief_update(b, 0, 5, 0, 0.0, 0), std::out_of_range);
    CHECK_THROWS_AS(belief_update(b, 0, 0, 0, 0.0, 7), std::out_of_range);
}

TEST_CASE("belief_update: replication equals repeated single updates") {
    auto a = small_beliefs();
    auto b = small_beliefs();
    std::mt19937_64 rng = make_rng(5);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    for (int step = 0; step < 20; ++step) {
        const double obs = r(rng);
        const int s_next = int(rng() % 3);
        belief_update(a, 0, 0, 1, obs, s_next, 100);
        for (int i = 0; i < 100; ++i) belief_update(b, 0, 0, 1, obs, s_next, 1);
    }
    CHECK((a.alpha[0] - b.alpha[0]).array().abs().maxCoeff() <= 1e-9);
    CHECK((a.counts[0] - b.counts[0]).abs().maxCoeff() == 0.0);
    CHECK((a.reward_sum[0] - b.reward_sum[0]).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("nu = 0 is the exact-observation limit") {
    auto b = belief_init(small_shape(), point_mass(2), 0.5, 0.0, 1.0, 0.0);
    auto sigma0 = uncertainty_sigma(b, SigmaMode::kExactPosteriorStd);
    CHECK(sigma0[0](0, 0) == doctest::Approx(1.0));  // prior std before any visit
    belief_update(b, 0, 0, 0, 0.37, 1);
    double m, v;
    detail::posterior_reward(b, 0, 0, 0, &m, &v);
    CHECK(m == doctest::Approx(0.37));
    CHECK(v == 0.0);
}

TEST_CASE("uncertainty_sigma: count bound formula and monotonicity") {
    auto b = small_beliefs(0.5, 1.0);
    auto sig = uncertainty_sigma(b, SigmaMode::kCountBound);
    CHECK(sig[0](0, 0) == doctest::Approx(std::sqrt(2.0)));
    for (int i = 0; i < 7; ++i) belief_update(b, 0, 0, 0, 0.0, 0);
    sig = uncertainty_sigma(b, SigmaMode::kCountBound);
    CHECK(sig[0](0, 0) == doctest::Approx(std::sqrt(2.0 / 7.0)));

    // non-increasing in n for every cell
    auto before = uncertainty_sigma(b, SigmaMode::kCountBound);
    belief_update(b, 1, 2, 1, 0.3, 0);
    auto after = uncertainty_sigma(b, SigmaMode::kCountBound);
    for (size_t l = 0; l < before.size(); ++l)
        CHECK((after[l] <= before[l] + 1e-15).all());
}

TEST_CASE("uncertainty_sigma: exact posterior std") {
    auto b = small_beliefs(0.5, 1.0);
    belief_update(b, 0, 0, 0, 1.0, 0);
    auto sig = uncertainty_sigma(b, SigmaMode::kExactPosteriorStd);
    CHECK(sig[0](0, 0) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("transform_beliefs: spot values of the inflation formula") {
    // sigma = 1 at the last layer: sigma_tilde^2 = 3.6^2 = 12.96
    auto b = small_beliefs(0.5, 1.0);  // count bound at n=0 gives sqrt(2)... use exact mode
    // configure a point prior with known variance 1 so exact sigma = 1
    auto t = transform_beliefs(b, SigmaMode::kExactPosteriorStd);
    const size_t last = 2;
    CHECK(t.sigma_tilde[last](0, 0) == doctest::Approx(std::sqrt(12.96)));

    // sigma = 0, sum alpha = 4, L - l = 2 -> sigma_tilde^2 = 1
    auto b2 = belief_init(small_shape(), point_mass(2), 0.5, 0.0, 0.0, 1.0);
    b2.alpha[0].row(0).setConstant(4.0 / 3.0);
    auto t2 = transform_beliefs(b2, SigmaMode::kExactPosteriorStd);
    CHECK(t2.sigma_tilde[0](0, 0) == doctest::Approx(1.0));

    // P_mean rows sum to one
    for (const auto& p : t.p_mean)
        for (Eigen::Index r = 0; r < p.rows(); ++r)
            CHECK(p.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
    // count-bound sigma_tilde is strictly positive
    auto t3 = transform_beliefs(b, SigmaMode::kCountBound);
    for (const auto& s : t3.sigma_tilde) CHECK((s > 0.0).all());
}

TEST_CASE("transform_beliefs: count-bound regime inequality") {
    std::mt19937_64 rng = make_rng(17);
    auto b = small_beliefs(0.5, 1.3);
    // random visit pattern
    for (int i = 0; i < 200; ++i) {
        int l = int(rng() % 3);
        int s = int(rng() % b.shape.states(l));
        int a = int(rng() % 2);
        int nx = l + 1 < 3 ? int(rng() % b.shape.states(l + 1)) : -1;
        belief_update(b, l, s, a, 0.1, nx);
    }
    auto t = transform_beliefs(b, SigmaMode::kCountBound);
    const double nu2 = b.nu * b.nu;
    for (int l = 0; l < 3; ++l)
        for (int s = 0; s < b.shape.states(l); ++s)
            for (int a = 0; a < 2; ++a) {
                const double n = std::max(b.counts[(size_t)l](s, a), 1.0);
                const double steps = double(3 - 1 - l);
                const double bound = (3.6 * 3.6 * (nu2 + 1.0) + steps * steps) / n;
                CHECK(t.sigma_tilde[(size_t)l](s, a) * t.sigma_tilde[(size_t)l](s, a) <=
                      bound + 1e-12);
            }
}

TEST_CASE("sample_mdp: concentration, determinism, moment check") {
    auto b = small_beliefs();
    b.alpha[0].row(0) << 1e9, 1.0, 1.0;
    std::mt19937_64 rng = make_rng(23);
    auto m = sample_mdp(b, rng);
    CHECK(m.transitions[0](0, 0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(validate_mdp(m).empty());

    std::mt19937_64 r1 = make_rng(99), r2 = make_rng(99);
    auto m1 = sample_mdp(b, r1);
    auto m2 = sample_mdp(b, r2);
    CHECK((m1.transitions[1] - m2.transitions[1]).norm() == 0.0);
    CHECK((m1.reward_mean[0] - m2.reward_mean[0]).abs().maxCoeff() == 0.0);

    // Dirichlet moments: empirical mean within 3 SEs of alpha / sum(alpha)
    auto bm = small_beliefs(0.7);
    std::mt19937_64 r3 = make_rng(31);
    const int n = 10000;
    Vector<double> acc = Vector<double>::Zero(3);
    for (int i = 0; i < n; ++i) acc += sample_mdp(bm, r3).transitions[0].row(1).transpose();
    const double total = bm.alpha[0].row(1).sum();
    for (int s2 = 0; s2 < 3; ++s2) {
        const double mean = bm.alpha[0](1, s2) / total;
        const double var = mean * (1 - mean) / (total + 1);
        CHECK(std::abs(acc[s2] / n - mean) <= 3 * std::sqrt(var / n));
    }
}

TEST_CASE("sample_transformed_rewards: exact at zero spread, right spread otherwise") {
    auto b = small_beliefs();
    auto t = transform_beliefs(b, SigmaMode::kCountBound);
    for (auto& s : t.sigma_tilde) s.setZero();
    std::mt19937_64 rng = make_rng(3);
    auto r = sample_transformed_rewards(t, rng);
    for (size_t l = 0; l < r.size(); ++l)
        CHECK((r[l] - t.reward_mu[l]).abs().maxCoeff() == 0.0);

    auto t2 = transform_beliefs(b, SigmaMode::kCountBound);
    const int n = 10000;
    double sum = 0, sumsq = 0;
    std::mt19937_64 rng2 = make_rng(5);
    for (int i = 0; i < n; ++i) {
        auto draw = sample_transformed_rewards(t2, rng2);
        const double x = draw[1](2, 1);
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(sd == doctest::Approx(t2.sigma_tilde[1](2, 1)).epsilon(0.05));

    std::mt19937_64 ra = make_rng(8), rb = make_rng(8);
    auto d1 = sample_transformed_rewards(t2, ra);
    auto d2 = sample_transformed_rewards(t2, rb);
    CHECK((d1[0] - d2[0]).abs().maxCoeff() == 0.0);
}

TEST_CASE("posterior consistency: beliefs concentrate on the data-generating MDP") {
    std::mt19937_64 rng = make_rng(77);
    auto truth = testing::random_mdp(rng, {3, 3, 2, 1.0});
    truth.reward_noise_std = 1.0;
    auto b = belief_init(shape_of(truth), Vector<double>(truth.initial_dist), 0.5, 0.0, 1.0, 1.0);
    const int visits = 10000;
    for (int i = 0; i < visits; ++i)
        for (int l = 0; l < truth.num_layers; ++l)
            for (int s = 0; s < truth.states(l); ++s)
                for (int a = 0; a < truth.num_actions; ++a) {
                    auto [r, nx] = envs::env_step(truth, l, s, a, rng);
                    belief_update(b, l, s, a, r, nx);
                }
    auto mu = posterior_reward_mean(b);
    auto p = posterior_mean_dynamics(b);
    for (int l = 0; l < truth.num_layers; ++l)
        CHECK((mu[(size_t)l] - truth.reward_mean[(size_t)l]).abs().maxCoeff() <= 0.05);
    for (size_t l = 0; l < p.size(); ++l)
        CHECK((p[l] - truth.transitions[l]).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("fixed-policy value equality under Dirichlet sampling vs mean dynamics") {
    std::mt19937_64 rng = make_rng(111);
    auto b = small_beliefs(0.8);
    // seed some observations so the posterior is not symmetric
    for (int i = 0; i < 30; ++i) {
        int l = int(rng() % 2);
        belief_update(b, l, int(rng() % b.shape.states(l)), int(rng() % 2), 0.0,
                      int(rng() % b.shape.states(l + 1)));
    }
    auto mu = posterior_reward_mean(b);
    auto p_mean = posterior_mean_dynamics(b);
    LayeredMdpd mean_mdp{3, b.shape.layer_sizes, 2, p_mean, mu, b.initial_dist, b.nu};
    Policyd pi = testing::random_policy(mean_mdp, rng);
    const double v_mean = initial_value(mean_mdp, policy_value(mean_mdp, pi));

    const int n = 2000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        auto draw = sample_mdp(b, rng);
        draw.reward_mean = mu;  // rewards held at posterior means
        const double v = initial_value(draw, policy_value(draw, pi));
        sum += v;
        sumsq += v * v;
    }
    const double mc = sum / n;
    const double se = std::sqrt(std::max(0.0, sumsq / n - mc * mc) / n);
    CHECK(std::abs(mc - v_mean) <= 3 * se + 1e-12);
}

TEST_CASE("transformation dominance: E_phi V* <= E_phitilde V* within 3 combined SEs") {
    std::mt19937_64 rng = make_rng(13);
    for (int rep = 0; rep < 5; ++rep) {
        auto b = small_beliefs(0.6, 1.0);
        for (int i = 0; i < int(rng() % 40); ++i) {
            int l = int(rng() % 3);
            int s = int(rng() % b.shape.states(l));
            std::normal_distribution<double> obs(0.0, 1.0);
            belief_update(b, l, s, int(rng() % 2), obs(rng),
                          l + 1 < 3 ? int(rng() % b.shape.states(l + 1)) : -1);
        }
        const int n = 2000;
        double s1 = 0, q1 = 0, s2 = 0, q2 = 0;
        for (int i = 0; i < n; ++i) {
            auto draw = sample_mdp(b, rng);
            const double v = initial_value(draw, backward_induction(draw).values);
            s1 += v;
            q1 += v * v;
        }
        auto t = transform_beliefs(b, SigmaMode::kExactPosteriorStd);
        LayeredMdpd mean_mdp{3, b.shape.layer_sizes, 2, t.p_mean, t.reward_mu, b.initial_dist, 0.0};
        for (int i = 0; i < n; ++i) {
            LayerTable<double> r = sample_transformed_rewards(t, rng);
            const double v = initial_value(mean_mdp, backward_induction(mean_mdp, &r).values);
            s2 += v;
            q2 += v * v;
        }
        const double m1 = s1 / n, m2 = s2 / n;
        const double se1 = std::sqrt(std::max(0.0, q1 / n - m1 * m1) / n);
        const double se2 = std::sqrt(std::max(0.0, q2 / n - m2 * m2) / n);
        CHECK(m1 <= m2 + 3 * std::sqrt(se1 * se1 + se2 * se2));
    }
}

TEST_CASE("belief snapshots round-trip through JSON") {
    auto b = small_beliefs(0.9, 0.8);
    std::mt19937_64 rng = make_rng(21);
    for (int i = 0; i < 25; ++i) {
        int l = int(rng() % 3);
        belief_update(b, l, int(rng() % b.shape.states(l)), int(rng() % 2), 0.25,
                      l + 1 < 3 ? int(rng() % b.shape.states(l + 1)) : -1);
    }
    auto j = belief_to_json(b);
    CHECK(j.contains("L"));
    CHECK(j.contains("alpha"));
    CHECK(j.contains("reward_mu"));
    CHECK(j.contains("reward_count"));
    CHECK(j.contains("nu"));
    auto b2 = belief_from_json<double>(j);
    CHECK(b2.shape.layer_sizes == b.shape.layer_sizes);
    for (size_t l = 0; l < b.alpha.size(); ++l)
        CHECK((b.alpha[l] - b2.alpha[l]).cwiseAbs().maxCoeff() == 0.0);
    for (size_t l = 0; l < b.counts.size(); ++l) {
        CHECK((b.counts[l] - b2.counts[l]).abs().maxCoeff() == 0.0);
        CHECK((b.reward_sum[l] - b2.reward_sum[l]).abs().maxCoeff() == 0.0);
    }
    std::mt19937_64 ra = make_rng(2), rb = make_rng(2);
    auto ma = sample_mdp(b, ra);
    auto mb = sample_mdp(b2, rb);
    CHECK((ma.reward_mean[1] - mb.reward_mean[1]).abs().maxCoeff() == 0.0);
}
