#include <doctest.h>

#include <cmath>

#include "isingtest/exact.hpp"
#include "isingtest/model.hpp"
#include "support/oracles.hpp"

using namespace isingtest;

namespace {

IsingModel single_edge(double theta) { return IsingModel(2, {0.0, 0.0}, {{0, 1, theta}}); }

double sum_exp_log_pmf(const IsingModel& m) {
    const ExactSummary s = exact_summary(m);
    double total = 0.0;
    for (std::uint32_t bits = 0; bits < (1u << m.n()); ++bits) {
        const SpinConfiguration x = decode_state(bits, m.n());
        total += std::exp(log_pmf(m, x, s.log_partition));
    }
    return total;
}

// joint pair probability P(X_u = su, X_v = sv) by enumeration
double joint_pair_prob(const IsingModel& m, int u, int v, int su, int sv) {
    const StateWeights sw = state_log_weights(m);
    double total = 0.0;
    for (std::uint32_t bits = 0; bits < sw.log_prob.size(); ++bits) {
        const int xu = (bits >> u) & 1 ? 1 : -1;
        const int xv = (bits >> v) & 1 ? 1 : -1;
        if (xu == su && xv == sv) total += std::exp(sw.log_prob[bits]);
    }
    return total;
}

}  // namespace

TEST_CASE("model invariants and validation") {
    CHECK_THROWS_AS(IsingModel(0), std::invalid_argument);
    CHECK_THROWS_AS(IsingModel(2, {0.0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(IsingModel(2, {0.0, 0.0}, {{0, 0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(IsingModel(2, {0.0, 0.0}, {{1, 0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(IsingModel(2, {0.0, 0.0}, {{0, 2, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(IsingModel(3, {0.0, 0.0, 0.0}, {{0, 1, 0.5}, {0, 1, 0.2}}),
                    std::invalid_argument);

    const IsingModel m(4, {0.1, 0.0, -0.4, 0.0}, {{0, 1, 0.5}, {1, 2, -0.3}});
    CHECK(m.edge_theta(0, 1) == m.edge_theta(1, 0));
    CHECK(m.max_edge_weight() == doctest::Approx(0.5));
    CHECK(m.max_node_weight() == doctest::Approx(0.4));
    CHECK(m.edge_count() == 2);
    CHECK(m.max_degree() == 2);

    const IsingModel bumped = m.with_edge(0, 1, 0.9);
    CHECK(bumped.edge_theta(1, 0) == doctest::Approx(0.9));
    CHECK(m.edge_theta(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("log_pmf matches closed forms") {
    const IsingModel one(1);
    const ExactSummary s1 = exact_summary(one);
    CHECK(log_pmf(one, SpinConfiguration{1}, s1.log_partition) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));

    const IsingModel m = single_edge(0.5);
    const double phi = std::log(4.0 * std::cosh(0.5));
    const ExactSummary s = exact_summary(m);
    CHECK(s.log_partition == doctest::Approx(phi).epsilon(1e-12));
    CHECK(log_pmf(m, SpinConfiguration{1, 1}, phi) == doctest::Approx(0.5 - phi));
    CHECK(log_pmf(m, SpinConfiguration{1, -1}, phi) == doctest::Approx(-0.5 - phi));
    CHECK(sum_exp_log_pmf(m) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(log_pmf(m, SpinConfiguration{1}, phi), std::invalid_argument);
}

TEST_CASE("normalization holds on random models") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + rng.uniform_int(7);
        const IsingModel m = oracles::random_model(n, 0.4, 1.0, 1.0, rng);
        CHECK(sum_exp_log_pmf(m) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("exact_summary closed forms") {
    const IsingModel zero(3);
    const ExactSummary s0 = exact_summary(zero);
    CHECK(s0.log_partition == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
    for (double mu : s0.node_marginals) CHECK(mu == doctest::Approx(0.0).epsilon(1e-12));
    for (double mu : s0.edge_marginals) CHECK(mu == doctest::Approx(0.0).epsilon(1e-12));

    const ExactSummary s = exact_summary(single_edge(0.5));
    CHECK(s.edge_marginal(2, 0, 1) == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));

    const IsingModel field(2, {0.7, 0.0}, {});
    const ExactSummary sf = exact_summary(field);
    CHECK(sf.node_marginals[0] == doctest::Approx(std::tanh(0.7)).epsilon(1e-12));
    CHECK(sf.node_marginals[1] == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(exact_summary(IsingModel(21)), doctest::Contains("use sampling"),
                         std::runtime_error);
}

TEST_CASE("skl_divergence closed forms") {
    const IsingModel p = single_edge(0.5);
    const IsingModel q = single_edge(0.3);
    const MomentTable pm = exact_moments(p), qm = exact_moments(q);

    CHECK(skl_divergence(p, pm, p, pm) == doctest::Approx(0.0));
    const double expected = 0.2 * (std::tanh(0.5) - std::tanh(0.3));
    CHECK(skl_divergence(p, pm, q, qm) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(skl_divergence(q, qm, p, pm) == doctest::Approx(expected).epsilon(1e-12));

    const IsingModel u(2);
    const MomentTable um = exact_moments(u);
    CHECK(skl_divergence(p, pm, u, um) == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-12));

    const IsingModel bigger(3);
    CHECK_THROWS_AS(skl_divergence(p, pm, bigger, exact_moments(bigger)), std::invalid_argument);
}

TEST_CASE("skl_direct agrees with the moment expression") {
    const IsingModel p = single_edge(0.5);
    CHECK(skl_direct(p, p) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(skl_direct(p, IsingModel(2)) == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-10));

    // product model with fields delta on all nodes vs uniform: 4 delta tanh(delta)
    const double delta = 0.35;
    const IsingModel prod(4, {delta, delta, delta, delta}, {});
    CHECK(skl_direct(prod, IsingModel(4)) ==
          doctest::Approx(4.0 * delta * std::tanh(delta)).epsilon(1e-10));

    Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + rng.uniform_int(7);
        const IsingModel a = oracles::random_model(n, 0.4, 1.0, 1.0, rng);
        const IsingModel b = oracles::random_model(n, 0.4, 1.0, 1.0, rng);
        const double direct = skl_direct(a, b);
        const double via_moments = skl_divergence(a, exact_moments(a), b, exact_moments(b));
        CHECK(std::fabs(direct - via_moments) <= 1e-9);
        CHECK(direct >= -1e-12);
    }
}

TEST_CASE("tv_direct and the Pinsker relation") {
    const IsingModel p = single_edge(0.5);
    CHECK(tv_direct(p, p) == doctest::Approx(0.0));

    // uniform vs single-node field h: TV = tanh(h)/2
    const IsingModel field(1, {0.7}, {});
    CHECK(tv_direct(field, IsingModel(1)) == doctest::Approx(0.5 * std::tanh(0.7)).epsilon(1e-12));

    Rng rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + rng.uniform_int(7);
        const IsingModel a = oracles::random_model(n, 0.4, 1.0, 1.0, rng);
        const IsingModel b = oracles::random_model(n, 0.4, 1.0, 1.0, rng);
        const double tv = tv_direct(a, b);
        CHECK(2.0 * tv * tv <= skl_direct(a, b) + 1e-12);
    }
}

TEST_CASE("dobrushin_check") {
    CHECK(dobrushin_check(IsingModel(4), 0.99));

    std::vector<Edge> path;
    for (int v = 0; v < 3; ++v) path.push_back({v, v + 1, 0.2});
    const IsingModel p4(4, std::vector<double>(4, 0.0), path);
    CHECK(dobrushin_influence(p4) == doctest::Approx(2.0 * std::tanh(0.2)).epsilon(1e-12));
    CHECK(dobrushin_check(p4, 0.6));

    CHECK_FALSE(dobrushin_check(single_edge(2.0), 0.1));
    CHECK_THROWS_AS(dobrushin_check(p4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(dobrushin_check(p4, 1.0), std::invalid_argument);
}

TEST_CASE("classify_model") {
    const ModelClass zero = classify_model(IsingModel(3));
    CHECK(zero.is_forest);
    CHECK(zero.is_ferromagnetic);
    CHECK(zero.is_zero_field);

    const IsingModel triangle(3, {0.0, 0.0, 0.0}, {{0, 1, 0.1}, {0, 2, 0.1}, {1, 2, 0.1}});
    const ModelClass tc = classify_model(triangle);
    CHECK_FALSE(tc.is_forest);
    CHECK(tc.is_ferromagnetic);
    CHECK(tc.is_zero_field);

    const IsingModel star(4, {0.0, 0.3, 0.0, 0.0}, {{0, 1, 0.2}, {0, 2, 0.2}, {0, 3, 0.2}});
    const ModelClass sc = classify_model(star);
    CHECK(sc.is_forest);
    CHECK(sc.is_ferromagnetic);
    CHECK_FALSE(sc.is_zero_field);

    CHECK_FALSE(classify_model(single_edge(-0.1)).is_ferromagnetic);
}

TEST_CASE("skl_independence_gap") {
    const IsingModel prod(3, {0.4, -0.2, 0.0}, {});
    CHECK(skl_independence_gap(prod, exact_summary(prod)) == doctest::Approx(0.0));

    const IsingModel e = single_edge(0.5);
    CHECK(skl_independence_gap(e, exact_summary(e)) ==
          doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-12));

    // with fields the covariance replaces the raw edge marginal
    const IsingModel f(2, {0.3, 0.3}, {{0, 1, 0.5}});
    const ExactSummary s = exact_summary(f);
    const double lambda = s.edge_marginal(2, 0, 1) - s.node_marginals[0] * s.node_marginals[1];
    CHECK(skl_independence_gap(f, s) == doctest::Approx(0.5 * lambda).epsilon(1e-12));
}

TEST_CASE("forest edge marginals follow tanh(theta)") {
    Rng rng(44);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + rng.uniform_int(8);
        const IsingModel f = oracles::random_forest(n, 0.8, 0.1, 2.0, rng);
        const ExactSummary s = exact_summary(f);
        for (const Edge& e : f.edges())
            CHECK(std::fabs(s.edge_marginal(n, e.u, e.v) - std::tanh(e.theta)) <= 1e-10);
    }
}

TEST_CASE("forest joint pair probabilities satisfy the exp(2 theta) ratio") {
    Rng rng(55);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + rng.uniform_int(6);
        const IsingModel f = oracles::random_forest(n, 0.8, 0.1, 2.0, rng);
        for (const Edge& e : f.edges()) {
            const double pp = joint_pair_prob(f, e.u, e.v, 1, 1);
            const double pm = joint_pair_prob(f, e.u, e.v, 1, -1);
            CHECK(std::fabs(pp - std::exp(2.0 * e.theta) * pm) <= 1e-10);
        }
    }
}

TEST_CASE("ferromagnet edge marginals dominate tanh(theta)") {
    Rng rng(66);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + rng.uniform_int(7);
        const IsingModel m = oracles::random_ferromagnet(n, 0.4, 1.5, rng);
        const ExactSummary s = exact_summary(m);
        for (const Edge& e : m.edges())
            CHECK(s.edge_marginal(n, e.u, e.v) >= std::tanh(e.theta) - 1e-12);
    }
}

TEST_CASE("raising a ferromagnetic edge never decreases any edge marginal") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + rng.uniform_int(6);
        const IsingModel m = oracles::random_ferromagnet(n, 0.5, 1.0, rng);
        if (m.edge_count() == 0) continue;
        const Edge& e = m.edges()[rng.uniform_int(m.edge_count())];
        const IsingModel bumped = m.with_edge(e.u, e.v, e.theta + 0.1);
        const ExactSummary before = exact_summary(m);
        const ExactSummary after = exact_summary(bumped);
        for (std::size_t i = 0; i < before.edge_marginals.size(); ++i)
            CHECK(after.edge_marginals[i] >= before.edge_marginals[i] - 1e-12);
    }
}

TEST_CASE("zero-field models are spin-flip symmetric") {
    Rng rng(88);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + rng.uniform_int(6);
        const IsingModel m = oracles::random_model(n, 0.5, 1.0, 0.0, rng);
        const ExactSummary s = exact_summary(m);
        for (double mu : s.node_marginals) CHECK(std::fabs(mu) <= 1e-12);
        for (int check = 0; check < 5; ++check) {
            SpinConfiguration x(n), neg(n);
            for (int v = 0; v < n; ++v) {
                x[v] = rng.random_spin();
                neg[v] = -x[v];
            }
            CHECK(log_pmf(m, x, s.log_partition) ==
                  doctest::Approx(log_pmf(m, neg, s.log_partition)).epsilon(1e-12));
        }
    }
}
