#include "isingtest/statistics.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <stdexcept>

#include "isingtest/exact.hpp"

namespace isingtest {

double bilinear_statistic(SpinView x, const SignVector& signs) {
    const int n = signs.n();
    if (static_cast<int>(x.size()) != n || !signs.over_pairs())
        throw std::invalid_argument("bilinear_statistic: dimension mismatch");
    long long total = 0;
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v, ++idx)
            total += static_cast<long long>(signs.at(idx)) * x[u] * x[v];
    return static_cast<double>(total);
}

double centered_bilinear_statistic(SpinView x1, SpinView x2, const SignVector& signs) {
    const int n = signs.n();
    if (static_cast<int>(x1.size()) != n || static_cast<int>(x2.size()) != n ||
        !signs.over_pairs())
        throw std::invalid_argument("centered_bilinear_statistic: dimension mismatch");
    long long total = 0;
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u) {
        const int du = x1[u] - x2[u];
        for (int v = u + 1; v < n; ++v, ++idx)
            total += static_cast<long long>(signs.at(idx)) * du * (x1[v] - x2[v]);
    }
    return static_cast<double>(total);
}

double linear_statistic(SpinView x, const SignVector& node_signs,
                        std::span<const double> offsets) {
    const int n = node_signs.n();
    if (static_cast<int>(x.size()) != n || static_cast<int>(offsets.size()) != n ||
        node_signs.over_pairs())
        throw std::invalid_argument("linear_statistic: dimension mismatch");
    double total = 0.0;
    for (int v = 0; v < n; ++v) total += node_signs.node(v) * (x[v] - offsets[v]);
    return total;
}

StatisticEvaluator make_bilinear_evaluator(SignVector signs) {
    StatisticEvaluator e;
    e.arity = 1;
    e.one = [s = std::move(signs)](SpinView x) { return bilinear_statistic(x, s); };
    return e;
}

StatisticEvaluator make_centered_bilinear_evaluator(SignVector signs) {
    StatisticEvaluator e;
    e.arity = 2;
    e.two = [s = std::move(signs)](SpinView a, SpinView b) {
        return centered_bilinear_statistic(a, b, s);
    };
    return e;
}

StatisticEvaluator make_linear_evaluator(SignVector node_signs, std::vector<double> offsets) {
    StatisticEvaluator e;
    e.arity = 1;
    e.one = [s = std::move(node_signs), o = std::move(offsets)](SpinView x) {
        return linear_statistic(x, s, o);
    };
    return e;
}

StatisticReport variance_estimate(SampleSource& source, const StatisticEvaluator& statistic,
                                  long long reps) {
    if (reps < 2) throw std::invalid_argument("variance_estimate: reps >= 2 required");
    const SampleBatch batch = source.draw(reps * statistic.arity);
    double sum = 0.0, sumsq = 0.0;
    for (long long i = 0; i < reps; ++i) {
        const double z = statistic.arity == 1
                             ? statistic.evaluate(batch.row(i))
                             : statistic.evaluate(batch.row(2 * i), batch.row(2 * i + 1));
        sum += z;
        sumsq += z * z;
    }
    StatisticReport r;
    r.reps = reps;
    r.k_used = reps * statistic.arity;
    r.mean = sum / reps;
    r.variance = std::max(0.0, (sumsq - reps * r.mean * r.mean) / (reps - 1));
    return r;
}

double dirichlet_form_estimate(const IsingModel& model, SampleSource& source,
                               const StatisticEvaluator& f, long long k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("dirichlet_form_estimate: k >= 1 required");
    if (f.arity != 1) throw std::invalid_argument("dirichlet_form_estimate: arity-1 statistic");
    const SampleBatch batch = source.draw(k);
    Rng rng(derive_seed(seed, 0xd1));
    double total = 0.0;
    SpinConfiguration y(model.n());
    for (long long i = 0; i < k; ++i) {
        const SpinView x = batch.row(i);
        y.assign(x.begin(), x.end());
        glauber_step(model, y, rng);
        const double d = f.evaluate(x) - f.evaluate(y);
        total += d * d;
    }
    return 0.5 * total / k;
}

double exact_expectation(const IsingModel& model, const StatisticEvaluator& f) {
    const StateWeights sw = state_log_weights(model);
    double mean = 0.0;
    for (std::size_t s = 0; s < sw.log_prob.size(); ++s)
        mean += std::exp(sw.log_prob[s]) *
                f.evaluate(decode_state(static_cast<std::uint32_t>(s), model.n()));
    return mean;
}

double exact_variance(const IsingModel& model, const StatisticEvaluator& f) {
    const StateWeights sw = state_log_weights(model);
    double mean = 0.0, second = 0.0;
    for (std::size_t s = 0; s < sw.log_prob.size(); ++s) {
        const double w = std::exp(sw.log_prob[s]);
        const double z = f.evaluate(decode_state(static_cast<std::uint32_t>(s), model.n()));
        mean += w * z;
        second += w * z * z;
    }
    return second - mean * mean;
}

double exact_dirichlet_form(const IsingModel& model, const StatisticEvaluator& f) {
    const int n = model.n();
    if (n > 8) throw std::runtime_error("exact_dirichlet_form: guarded to n <= 8");
    const StateWeights sw = state_log_weights(model);
    double total = 0.0;
    for (std::uint32_t s = 0; s < sw.log_prob.size(); ++s) {
        const double pi = std::exp(sw.log_prob[s]);
        const SpinConfiguration x = decode_state(s, n);
        const double fx = f.evaluate(x);
        for (int u = 0; u < n; ++u) {
            double local = model.node_theta(u);
            for (const auto& [v, theta] : model.neighbors(u)) local += theta * x[v];
            const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * local));
            const double p_flip = x[u] > 0 ? 1.0 - p_plus : p_plus;
            const double fy = f.evaluate(decode_state(s ^ (std::uint32_t{1} << u), n));
            total += pi * (p_flip / n) * (fx - fy) * (fx - fy);
        }
    }
    return 0.5 * total;
}

double glauber_spectral_gap(const IsingModel& model) {
    const int n = model.n();
    if (n > 6) throw std::runtime_error("glauber_spectral_gap: guarded to n <= 6");
    const std::size_t states = std::size_t{1} << n;
    const std::vector<double> P = glauber_transition_matrix(model);
    const StateWeights sw = state_log_weights(model);

    // Reversibility makes D^{1/2} P D^{-1/2} symmetric with the same spectrum.
    Eigen::MatrixXd S(states, states);
    for (std::size_t i = 0; i < states; ++i)
        for (std::size_t j = 0; j < states; ++j)
            S(i, j) = std::exp(0.5 * (sw.log_prob[i] - sw.log_prob[j])) * P[i * states + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (S + S.transpose()));
    const Eigen::VectorXd ev = solver.eigenvalues();  // ascending
    double second = 0.0;
    for (Eigen::Index i = 0; i < ev.size() - 1; ++i)
        second = std::max(second, std::fabs(ev[i]));
    return 1.0 - second;
}

PackedPairProducts pack_pair_products(const SampleBatch& batch) {
    PackedPairProducts out;
    out.n = batch.n();
    out.rows = batch.k();
    const std::size_t pairs = pair_count(out.n);
    out.words_per_row = (pairs + 63) / 64;
    out.negative.assign(out.words_per_row * out.rows, 0);
    for (long long i = 0; i < out.rows; ++i) {
        const Spin* row = batch.row_ptr(i);
        std::uint64_t* dst = out.negative.data() + i * out.words_per_row;
        std::size_t idx = 0;
        for (int u = 0; u < out.n; ++u)
            for (int v = u + 1; v < out.n; ++v, ++idx)
                if (row[u] * row[v] < 0) dst[idx >> 6] |= std::uint64_t{1} << (idx & 63);
    }
    return out;
}

PackedCenteredProducts pack_centered_products(const SampleBatch& batch) {
    PackedCenteredProducts out;
    out.n = batch.n();
    out.rows = batch.k() / 2;
    const std::size_t pairs = pair_count(out.n);
    out.words_per_row = (pairs + 63) / 64;
    out.active.assign(out.words_per_row * out.rows, 0);
    out.negative.assign(out.words_per_row * out.rows, 0);
    for (long long i = 0; i < out.rows; ++i) {
        const Spin* a = batch.row_ptr(2 * i);
        const Spin* b = batch.row_ptr(2 * i + 1);
        std::uint64_t* act = out.active.data() + i * out.words_per_row;
        std::uint64_t* neg = out.negative.data() + i * out.words_per_row;
        std::size_t idx = 0;
        for (int u = 0; u < out.n; ++u) {
            const int du = a[u] - b[u];
            for (int v = u + 1; v < out.n; ++v, ++idx) {
                const int dv = a[v] - b[v];
                if (du == 0 || dv == 0) continue;
                act[idx >> 6] |= std::uint64_t{1} << (idx & 63);
                if (du * dv < 0) neg[idx >> 6] |= std::uint64_t{1} << (idx & 63);
            }
        }
    }
    return out;
}

std::vector<std::uint64_t> pack_sign_vector(const SignVector& signs) {
    const std::size_t m = signs.size();
    std::vector<std::uint64_t> out((m + 63) / 64, 0);
    for (std::size_t i = 0; i < m; ++i)
        if (signs.at(i) < 0) out[i >> 6] |= std::uint64_t{1} << (i & 63);
    return out;
}

double packed_bilinear(const PackedPairProducts& packed, long long row,
                       std::span<const std::uint64_t> negative_signs, std::size_t num_pairs) {
    const std::uint64_t* r = packed.row(row);
    long long disagree = 0;
    for (std::size_t w = 0; w < packed.words_per_row; ++w)
        disagree += std::popcount(r[w] ^ negative_signs[w]);
    // product * sign is -1 exactly when the negativity bits differ
    return static_cast<double>(static_cast<long long>(num_pairs) - 2 * disagree);
}

double packed_centered_bilinear(const PackedCenteredProducts& packed, long long row,
                                std::span<const std::uint64_t> negative_signs) {
    const std::uint64_t* act = packed.active.data() + row * packed.words_per_row;
    const std::uint64_t* neg = packed.negative.data() + row * packed.words_per_row;
    long long pos = 0, minus = 0;
    for (std::size_t w = 0; w < packed.words_per_row; ++w) {
        const std::uint64_t mismatch = neg[w] ^ negative_signs[w];
        minus += std::popcount(act[w] & mismatch);
        pos += std::popcount(act[w] & ~mismatch);
    }
    // each active pair contributes +-4 = (x1_u - x2_u)(x1_v - x2_v)
    return 4.0 * static_cast<double>(pos - minus);
}

}  // namespace isingtest
