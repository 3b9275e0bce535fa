#include "isingtest/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace isingtest {

SignVector SignVector::for_pairs(int n, Spin fill) {
    SignVector s;
    s.n_ = n;
    s.over_pairs_ = true;
    s.values_.assign(pair_count(n), fill);
    return s;
}

SignVector SignVector::for_nodes(int n, Spin fill) {
    SignVector s;
    s.n_ = n;
    s.over_pairs_ = false;
    s.values_.assign(n, fill);
    return s;
}

Spin sign_guess(std::span<const Spin> values, Rng& rng) {
    if (values.empty()) throw std::invalid_argument("sign_guess: empty sequence");
    long long sum = 0;
    for (Spin v : values) sum += v;
    if (sum > 0) return 1;
    if (sum < 0) return -1;
    return rng.random_spin();
}

std::vector<Spin> recenter_stream(std::span<const Spin> x_values,
                                  std::span<const Spin> y_values, Rng& rng) {
    if (x_values.size() != y_values.size())
        throw std::invalid_argument("recenter_stream: length mismatch");
    std::vector<Spin> out(x_values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (x_values[i] != y_values[i]) {
            out[i] = static_cast<Spin>((x_values[i] - y_values[i]) / 2);
        } else {
            out[i] = rng.random_spin();
        }
    }
    return out;
}

long long weak_learn_sample_count(int n, double tau, double eps_over_scale, double c_wl) {
    if (!(tau > 0.0 && tau <= 2.0)) throw std::invalid_argument("weak learning: tau in (0,2]");
    if (!(eps_over_scale > 0.0))
        throw std::invalid_argument("weak learning: eps_over_scale must be positive");
    const double k = c_wl * std::pow(n, 2.0 * tau) / (eps_over_scale * eps_over_scale);
    return std::max<long long>(1, static_cast<long long>(std::ceil(k)));
}

std::vector<Spin> weak_learn_signs(std::size_t num_items, long long k,
                                   const ObservationProvider& provider, Rng& rng) {
    std::vector<long long> sums(num_items, 0);
    // Observation order is fixed (j outer, item inner) so the coin stream used
    // for zero-resolution is reproducible.
    for (long long j = 0; j < k; ++j) {
        for (std::size_t item = 0; item < num_items; ++item) {
            int z = provider(item, j);
            if (z == 0) z = rng.coin() ? 1 : -1;
            sums[item] += z;
        }
    }
    std::vector<Spin> out(num_items);
    for (std::size_t item = 0; item < num_items; ++item) {
        if (sums[item] > 0) {
            out[item] = 1;
        } else if (sums[item] < 0) {
            out[item] = -1;
        } else {
            out[item] = rng.random_spin();
        }
    }
    return out;
}

SignVector weak_learn_sign_vector(const ObservationProvider& provider, int n, bool over_pairs,
                                  double tau, double eps_over_scale, double c_wl,
                                  std::uint64_t seed) {
    const long long k = weak_learn_sample_count(n, tau, eps_over_scale, c_wl);
    Rng rng(derive_seed(seed, 0x77));
    SignVector signs = over_pairs ? SignVector::for_pairs(n) : SignVector::for_nodes(n);
    const std::vector<Spin> learned = weak_learn_signs(signs.size(), k, provider, rng);
    for (std::size_t i = 0; i < learned.size(); ++i) signs.set(i, learned[i]);
    return signs;
}

}  // namespace isingtest
