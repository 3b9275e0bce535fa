#include <doctest.h>

#include <cmath>
#include <map>

#include "isingtest/exact.hpp"
#include "isingtest/hard_instances.hpp"
#include "isingtest/testers.hpp"
#include "support/oracles.hpp"

using namespace isingtest;

TEST_CASE("product perturbation family") {
    const HardInstance inst = make_product_perturbation(8, 0.1, 5);
    CHECK(inst.delta == doctest::Approx(std::sqrt(3.0 * 0.1 / 16.0)).epsilon(1e-12));
    CHECK(inst.delta == doctest::Approx(0.136931).epsilon(1e-4));
    CHECK(inst.certified_skl == doctest::Approx(8.0 * inst.delta * std::tanh(inst.delta)));
    CHECK(inst.certified_skl >= 0.1);
    CHECK(std::fabs(skl_direct(inst.model, IsingModel(8)) - inst.certified_skl) <= 1e-9);

    // eps -> 0 drives the model to uniform
    const HardInstance tiny = make_product_perturbation(8, 1e-8, 5);
    CHECK(tiny.delta <= 1e-4);

    // determinism
    const HardInstance again = make_product_perturbation(8, 0.1, 5);
    CHECK(inst.model.same_parameters(again.model));

    CHECK_THROWS_AS(make_product_perturbation(8, 8.0 / 6.0 + 0.1, 5), std::invalid_argument);
}

TEST_CASE("random matching family") {
    const HardInstance inst = make_random_matching(6, 0.12, 9);
    CHECK(inst.delta == doctest::Approx(std::sqrt(3.0 * 0.12 / 6.0)).epsilon(1e-12));
    CHECK(inst.delta == doctest::Approx(0.244949).epsilon(1e-4));
    CHECK(inst.certified_skl == doctest::Approx(3.0 * inst.delta * std::tanh(inst.delta)));
    CHECK(inst.certified_skl >= 0.12);
    CHECK(std::fabs(skl_direct(inst.model, IsingModel(6)) - inst.certified_skl) <= 1e-9);

    CHECK_THROWS_AS(make_random_matching(5, 0.1, 1), std::invalid_argument);

    for (int t = 0; t < 50; ++t) {
        const HardInstance m = make_random_matching(8, 0.1, 100 + t);
        CHECK(m.model.edge_count() == 4);
        CHECK(m.model.max_degree() == 1);
        const ModelClass c = classify_model(m.model);
        CHECK(c.is_forest);
        CHECK(c.is_ferromagnetic);
        CHECK(c.is_zero_field);
    }
}

TEST_CASE("random matchings are uniform over the matching set") {
    // each of the 15 pairs at n=6 appears with probability 1/5
    const int draws = 10000;
    std::map<std::pair<int, int>, int> counts;
    for (int t = 0; t < draws; ++t) {
        const HardInstance m = make_random_matching(6, 0.1, 5000 + t);
        for (const Edge& e : m.model.edges()) ++counts[{e.u, e.v}];
    }
    CHECK(counts.size() == 15);
    const double expected = draws * 3.0 / 15.0;
    double chi2 = 0.0;
    for (const auto& [pair, c] : counts) {
        const double d = c - expected;
        chi2 += d * d / expected;
    }
    CHECK(oracles::chi_square_sf(chi2, 14) > 0.001);

    // spot-check the per-pair frequency against 1/(n-1)
    CHECK(std::fabs(counts[{0, 1}] / static_cast<double>(draws) - 0.2) <= 0.02);
}

TEST_CASE("two-node pairs solve the gap exactly") {
    SUBCASE("beta independence") {
        const TwoNodePair pair = make_two_node_pair(TwoNodeMode::BetaIndependence, 1.0, 0.1);
        CHECK(std::fabs(pair.certified_skl - 0.1) <= 1e-10);
        CHECK(std::fabs(skl_direct(pair.p, pair.q) - 0.1) <= 1e-10);
        // the gap equals beta * (mu_uv^edge - tanh^2 tau) by the moment expression
        const MomentTable pm = exact_moments(pair.p);
        CHECK(std::fabs(1.0 * (pm.edge_marginal(0, 1) - std::pow(std::tanh(pair.tau), 2.0)) - 0.1) <=
              1e-9);
        // eps beyond beta*tanh(beta) is unreachable
        CHECK_THROWS_AS(make_two_node_pair(TwoNodeMode::BetaIndependence, 0.5, 0.5),
                        std::invalid_argument);
    }
    SUBCASE("beta identity") {
        const TwoNodePair pair = make_two_node_pair(TwoNodeMode::BetaIdentity, 6.0, 0.1);
        CHECK(std::fabs(pair.certified_skl - 0.1) <= 1e-10);
        CHECK(pair.tau >= 3.0);
        CHECK(pair.tau <= 6.0);
        // bracket endpoint tau = beta has gap beta*tanh(beta)
        CHECK(6.0 * (std::tanh(6.0) - std::tanh(0.0)) == doctest::Approx(6.0 * std::tanh(6.0)));
        // small beta cannot reach the bracket: the gap at tau=beta/2 exceeds eps
        CHECK_THROWS_AS(make_two_node_pair(TwoNodeMode::BetaIdentity, 0.5, 0.001),
                        std::invalid_argument);
    }
    SUBCASE("h identity") {
        const TwoNodePair pair = make_two_node_pair(TwoNodeMode::HIdentity, 5.0, 0.2);
        CHECK(std::fabs(pair.certified_skl - 0.2) <= 1e-10);
        const double tau = pair.tau;
        CHECK(pair.certified_skl ==
              doctest::Approx(tau * (std::tanh(5.0) - std::tanh(5.0 - tau))).epsilon(1e-9));
        CHECK(std::fabs(skl_direct(pair.p, pair.q) - 0.2) <= 1e-10);
    }
}

TEST_CASE("power grows with the sample budget on matching instances") {
    const int n = 8;
    const HardInstance inst = make_random_matching(n, 0.4, 77);
    const double eps = inst.certified_skl / 2.0;
    PromisedBounds bounds{inst.delta, 0.0, n / 2, 0};
    auto reject_rate = [&](long long budget, std::uint64_t seed_base) {
        int rejects = 0;
        for (int t = 0; t < 60; ++t) {
            ExactSampleSource source(inst.model, derive_seed(seed_base, t));
            TesterConfig cfg;
            cfg.epsilon = eps;
            cfg.rng_seed = derive_seed(seed_base, t, 1);
            cfg.budget = budget;
            if (test_independence_localization(source, cfg, bounds).reject) ++rejects;
        }
        return rejects;
    };
    const long long tiny = static_cast<long long>(n / (4.0 * eps));
    const long long big = static_cast<long long>(16.0 * n / eps);
    const int low = reject_rate(tiny, 301);
    const int high = reject_rate(big, 302);
    CHECK(low < high);
    CHECK(high >= 55);  // 60 trials
}
