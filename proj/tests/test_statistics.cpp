#include <doctest.h>

#include <cmath>

#include "isingtest/exact.hpp"
#include "isingtest/statistics.hpp"
#include "support/oracles.hpp"

using namespace isingtest;

namespace {

IsingModel complete_high_temp(int n) {
    std::vector<Edge> edges;
    const double theta = 1.0 / (4.0 * (n - 1));
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.push_back({u, v, theta});
    return IsingModel(n, std::vector<double>(n, 0.0), edges);
}

SignVector random_pair_signs(int n, Rng& rng) {
    SignVector s = SignVector::for_pairs(n);
    for (std::size_t i = 0; i < s.size(); ++i) s.set(i, rng.random_spin());
    return s;
}

}  // namespace

TEST_CASE("statistic formulas") {
    const SignVector plus4 = SignVector::for_pairs(4);
    CHECK(bilinear_statistic(SpinConfiguration{1, 1, 1, 1}, plus4) == doctest::Approx(6.0));

    const SignVector plus2 = SignVector::for_pairs(2);
    CHECK(bilinear_statistic(SpinConfiguration{1, -1}, plus2) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(bilinear_statistic(SpinConfiguration{1}, plus2), std::invalid_argument);

    CHECK(centered_bilinear_statistic(SpinConfiguration{1, -1}, SpinConfiguration{1, -1}, plus2) ==
          doctest::Approx(0.0));
    CHECK(centered_bilinear_statistic(SpinConfiguration{1, 1}, SpinConfiguration{-1, -1}, plus2) ==
          doctest::Approx(4.0));

    const SignVector node1 = SignVector::for_nodes(1);
    CHECK(linear_statistic(SpinConfiguration{1}, node1, std::vector<double>{0.5}) ==
          doctest::Approx(0.5));
}

TEST_CASE("bilinear variance under the uniform model is the pair count") {
    // pairwise independence makes Var(Z') = C(10,2) = 45 exactly
    const IsingModel u(10);
    const StatisticEvaluator z = make_bilinear_evaluator(SignVector::for_pairs(10));
    CHECK(exact_variance(u, z) == doctest::Approx(45.0).epsilon(1e-9));
    CHECK(exact_expectation(u, z) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("centered statistic has zero expectation on product models") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + rng.uniform_int(4);
        std::vector<double> fields(n);
        for (double& f : fields) f = 1.5 * (2.0 * rng.uniform01() - 1.0);
        const IsingModel prod(n, std::move(fields), {});
        const MomentTable t = exact_moments(prod);
        const SignVector signs = random_pair_signs(n, rng);
        // E[Z'_cen] = 2 sum c_uv lambda_uv, and every covariance vanishes
        double expectation = 0.0;
        std::size_t idx = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b, ++idx) expectation += 2.0 * signs.at(idx) * t.cov[idx];
        CHECK(std::fabs(expectation) <= 1e-12);
    }
}

TEST_CASE("linear statistic expectations") {
    // offsets equal to the true marginals: expectation zero
    const IsingModel m(2, {0.4, -0.2}, {{0, 1, 0.3}});
    const MomentTable t = exact_moments(m);
    const StatisticEvaluator z =
        make_linear_evaluator(SignVector::for_nodes(2), std::vector<double>(t.node));
    CHECK(exact_expectation(m, z) == doctest::Approx(0.0).epsilon(1e-10));

    // single node with field h, zero offset: expectation tanh(h)
    const IsingModel f(1, {0.3}, {});
    const StatisticEvaluator zf =
        make_linear_evaluator(SignVector::for_nodes(1), std::vector<double>{0.0});
    CHECK(exact_expectation(f, zf) == doctest::Approx(std::tanh(0.3)).epsilon(1e-12));
}

TEST_CASE("variance_estimate") {
    const IsingModel u(10);
    // constant statistic
    StatisticEvaluator constant;
    constant.arity = 1;
    constant.one = [](SpinView) { return 3.25; };
    ExactSampleSource s0(u, 1);
    const StatisticReport r0 = variance_estimate(s0, constant, 100);
    CHECK(r0.variance == doctest::Approx(0.0));
    CHECK(r0.mean == doctest::Approx(3.25));
    CHECK_THROWS_AS(variance_estimate(s0, constant, 1), std::invalid_argument);

    ExactSampleSource s1(u, 2);
    const StatisticReport r1 =
        variance_estimate(s1, make_bilinear_evaluator(SignVector::for_pairs(10)), 10000);
    CHECK(r1.variance == doctest::Approx(45.0).epsilon(0.10));

    // high-temperature path n=20: comfortably below 5 * C(20,2)
    std::vector<Edge> edges;
    for (int v = 0; v < 19; ++v) edges.push_back({v, v + 1, 0.1});
    const IsingModel path(20, std::vector<double>(20, 0.0), edges);
    ExactSampleSource s2(path, 3);
    const StatisticReport r2 =
        variance_estimate(s2, make_bilinear_evaluator(SignVector::for_pairs(20)), 10000);
    CHECK(r2.variance <= 5.0 * 190.0);
}

TEST_CASE("dirichlet form estimates") {
    // constant function
    const IsingModel u4(4);
    StatisticEvaluator constant;
    constant.arity = 1;
    constant.one = [](SpinView) { return 1.0; };
    ExactSampleSource src(u4, 5);
    CHECK(dirichlet_form_estimate(u4, src, constant, 2000, 9) == doctest::Approx(0.0));

    // f = single spin on the uniform model: E(f) = 1/n exactly
    StatisticEvaluator spin0;
    spin0.arity = 1;
    spin0.one = [](SpinView x) { return static_cast<double>(x[0]); };
    CHECK(exact_dirichlet_form(u4, spin0) == doctest::Approx(0.25).epsilon(1e-12));
    ExactSampleSource src2(u4, 6);
    CHECK(dirichlet_form_estimate(u4, src2, spin0, 40000, 10) ==
          doctest::Approx(0.25).epsilon(0.10));

    // bilinear statistic at high temperature: E(Z') = O(n log^2 n)
    const IsingModel m = complete_high_temp(16);
    ExactSampleSource src3(m, 7);
    const double est = dirichlet_form_estimate(
        m, src3, make_bilinear_evaluator(SignVector::for_pairs(16)), 20000, 11);
    const double logn = std::log(16.0);
    CHECK(est <= 3.0 * 16.0 * logn * logn);
}

TEST_CASE("spectral gap bounds the variance through the dirichlet form") {
    Rng rng(23);
    int done = 0;
    while (done < 20) {
        const int n = 3 + rng.uniform_int(4);  // 3..6
        const IsingModel m = oracles::random_model(n, 0.5, 0.6, 0.4, rng);
        const StatisticEvaluator f = make_bilinear_evaluator(random_pair_signs(n, rng));
        const double gap = glauber_spectral_gap(m);
        CHECK(gap > 0.0);
        CHECK(gap <= 1.0 + 1e-12);
        CHECK(gap * exact_variance(m, f) <= exact_dirichlet_form(m, f) + 1e-9);
        ++done;
    }
    CHECK_THROWS_AS(glauber_spectral_gap(IsingModel(7)), std::runtime_error);
}

TEST_CASE("variance scaling stays near quadratic at high temperature") {
    // quick two-point check; the three-point slope runs in the acceptance suite
    std::vector<double> vars;
    for (const int n : {8, 16}) {
        ExactSampleSource src(complete_high_temp(n), 40 + n);
        vars.push_back(
            variance_estimate(src, make_bilinear_evaluator(SignVector::for_pairs(n)), 4000)
                .variance);
    }
    const double slope = std::log(vars[1] / vars[0]) / std::log(2.0);
    CHECK(slope <= 2.5);
}

TEST_CASE("centered statistic cancels field bias") {
    const int n = 8;
    std::vector<double> fields(n, 0.6);
    const IsingModel prod(n, std::move(fields), {});
    const SignVector signs = SignVector::for_pairs(n);

    ExactSampleSource s1(prod, 31);
    const StatisticReport cen =
        variance_estimate(s1, make_centered_bilinear_evaluator(signs), 10000);
    const double cen_se = std::sqrt(cen.variance / cen.reps);
    CHECK(std::fabs(cen.mean) <= 3.0 * cen_se + 1e-9);

    ExactSampleSource s2(prod, 32);
    const StatisticReport raw = variance_estimate(s2, make_bilinear_evaluator(signs), 10000);
    const double raw_se = std::sqrt(raw.variance / raw.reps);
    CHECK(std::fabs(raw.mean) > 3.0 * raw_se);  // uncentered keeps the bias
}

TEST_CASE("linear statistics have O(n) variance at high temperature") {
    for (const int n : {16, 64}) {
        const IsingModel m = complete_high_temp(n);
        GlauberConfig cfg;
        GlauberSampleSource src(m, cfg, 91 + n);
        const StatisticReport r =
            variance_estimate(src, make_linear_evaluator(SignVector::for_nodes(n),
                                                         std::vector<double>(n, 0.0)),
                              4000);
        CHECK(r.variance <= 4.0 * n);
    }
}

TEST_CASE("packed pair products match the direct statistic") {
    Rng rng(77);
    const IsingModel m = oracles::random_model(9, 0.4, 0.7, 0.4, rng);
    const SampleBatch batch = exact_draw(m, 500, 12);
    const PackedPairProducts packed = pack_pair_products(batch);
    const PackedCenteredProducts packed_cen = pack_centered_products(batch);
    for (int check = 0; check < 5; ++check) {
        const SignVector signs = random_pair_signs(9, rng);
        const std::vector<std::uint64_t> neg = pack_sign_vector(signs);
        for (long long i = 0; i < 20; ++i) {
            CHECK(packed_bilinear(packed, i, neg, pair_count(9)) ==
                  doctest::Approx(bilinear_statistic(batch.row(i), signs)));
            CHECK(packed_centered_bilinear(packed_cen, i, neg) ==
                  doctest::Approx(
                      centered_bilinear_statistic(batch.row(2 * i), batch.row(2 * i + 1), signs)));
        }
    }
}
