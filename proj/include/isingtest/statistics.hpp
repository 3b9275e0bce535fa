#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "isingtest/estimation.hpp"
#include "isingtest/model.hpp"
#include "isingtest/sampling.hpp"
#include "isingtest/types.hpp"

namespace isingtest {

/// Z' = sum_{u<v} c_uv x_u x_v, each unordered pair counted once.
double bilinear_statistic(SpinView x, const SignVector& signs);

/// Z'_cen = sum_{u<v} c_uv (x1_u - x2_u)(x1_v - x2_v); cancels field bias.
double centered_bilinear_statistic(SpinView x1, SpinView x2, const SignVector& signs);

/// Z = sum_v c_v (x_v - offset_v).
double linear_statistic(SpinView x, const SignVector& node_signs,
                        std::span<const double> offsets);

/// Opaque statistic evaluator with declared arity (configurations consumed per
/// evaluation), so variance estimation serves one- and two-sample statistics
/// uniformly.
struct StatisticEvaluator {
    int arity = 1;
    std::function<double(SpinView)> one;
    std::function<double(SpinView, SpinView)> two;

    double evaluate(SpinView a) const { return one(a); }
    double evaluate(SpinView a, SpinView b) const { return two(a, b); }
};

StatisticEvaluator make_bilinear_evaluator(SignVector signs);
StatisticEvaluator make_centered_bilinear_evaluator(SignVector signs);
StatisticEvaluator make_linear_evaluator(SignVector node_signs, std::vector<double> offsets);

struct StatisticReport {
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
    long long k_used = 0;
    long long reps = 0;
};

/// Sample mean and unbiased sample variance of the statistic over reps
/// independent draws from the source. reps >= 2.
StatisticReport variance_estimate(SampleSource& source, const StatisticEvaluator& statistic,
                                  long long reps);

/// (1/2) * mean over k trials of (f(x) - f(y))^2 with x at stationarity and y
/// one single-site update away.
double dirichlet_form_estimate(const IsingModel& model, SampleSource& source,
                               const StatisticEvaluator& f, long long k, std::uint64_t seed);

// Exact counterparts by enumeration (small n), used as oracles.
double exact_expectation(const IsingModel& model, const StatisticEvaluator& f);
double exact_variance(const IsingModel& model, const StatisticEvaluator& f);
double exact_dirichlet_form(const IsingModel& model, const StatisticEvaluator& f);

/// Absolute spectral gap of the single-site chain, 1 - max_{i>=2} |lambda_i|,
/// via a symmetrized eigendecomposition of the 2^n x 2^n transition matrix.
/// Guarded to n <= 6.
double glauber_spectral_gap(const IsingModel& model);

/// Pair products of one configuration packed into bit masks (bit set <=> the
/// product is -1), in pair_index order. Lets a batch be scored against many
/// sign vectors with XOR/popcount.
struct PackedPairProducts {
    int n = 0;
    long long rows = 0;
    std::size_t words_per_row = 0;
    std::vector<std::uint64_t> negative;  // rows x words

    const std::uint64_t* row(long long i) const { return negative.data() + i * words_per_row; }
};

PackedPairProducts pack_pair_products(const SampleBatch& batch);

/// Packed centered products over consecutive sample pairs (rows 2i, 2i+1):
/// active marks pairs where both spin differences are nonzero, negative their
/// product sign. Each packed row represents one evaluation of Z'_cen / 4.
struct PackedCenteredProducts {
    int n = 0;
    long long rows = 0;  // batch.k() / 2
    std::size_t words_per_row = 0;
    std::vector<std::uint64_t> active;
    std::vector<std::uint64_t> negative;
};

PackedCenteredProducts pack_centered_products(const SampleBatch& batch);

std::vector<std::uint64_t> pack_sign_vector(const SignVector& signs);

double packed_bilinear(const PackedPairProducts& packed, long long row,
                       std::span<const std::uint64_t> negative_signs, std::size_t num_pairs);
double packed_centered_bilinear(const PackedCenteredProducts& packed, long long row,
                                std::span<const std::uint64_t> negative_signs);

}  // namespace isingtest
