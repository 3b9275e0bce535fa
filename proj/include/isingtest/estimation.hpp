#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "isingtest/moments.hpp"
#include "isingtest/sampling.hpp"
#include "isingtest/types.hpp"

namespace isingtest {

/// +-1 assignment per unordered node pair, or per node for the node variant.
class SignVector {
public:
    static SignVector for_pairs(int n, Spin fill = 1);
    static SignVector for_nodes(int n, Spin fill = 1);

    int n() const { return n_; }
    bool over_pairs() const { return over_pairs_; }
    std::size_t size() const { return values_.size(); }

    Spin pair(int u, int v) const { return values_[pair_index(n_, u, v)]; }
    void set_pair(int u, int v, Spin s) { values_[pair_index(n_, u, v)] = s; }
    Spin node(int v) const { return values_[v]; }
    void set_node(int v, Spin s) { values_[v] = s; }

    Spin at(std::size_t i) const { return values_[i]; }
    void set(std::size_t i, Spin s) { values_[i] = s; }
    const std::vector<Spin>& values() const { return values_; }

private:
    int n_ = 0;
    bool over_pairs_ = true;
    std::vector<Spin> values_;
};

/// Sign of the sum of a +-1 sequence; a tie is broken by a fair coin from the
/// caller's stream. With k <= 1/(4 lambda^2) samples of Rademacher(1/2+lambda)
/// the success probability is 1/2 + Omega(|lambda| sqrt(k)).
Spin sign_guess(std::span<const Spin> values, Rng& rng);

/// Element-wise recentering of two +-1 streams: emit (x-y)/2 when they differ,
/// a fair coin otherwise. Turns Rademacher(p) vs Rademacher(q) inputs into a
/// Rademacher(1/2 + (p-q)/2) output.
std::vector<Spin> recenter_stream(std::span<const Spin> x_values,
                                  std::span<const Spin> y_values, Rng& rng);

/// ceil(c_wl * n^{2 tau} / eps_over_scale^2): observations per item used by
/// the weak sign learner.
long long weak_learn_sample_count(int n, double tau, double eps_over_scale, double c_wl);

/// One batch of observations serves all items simultaneously (items may be
/// arbitrarily correlated). provider(item, j) must return a value in
/// {-1, 0, +1}; zeros are coin-resolved before the empirical sign is taken.
using ObservationProvider = std::function<int(std::size_t item, long long j)>;

std::vector<Spin> weak_learn_signs(std::size_t num_items, long long k,
                                   const ObservationProvider& provider, Rng& rng);

/// Full-signature variant: draws k = weak_learn_sample_count(n, tau,
/// eps_over_scale, c_wl) observations per item and emits the empirical signs.
SignVector weak_learn_sign_vector(const ObservationProvider& provider, int n,
                                  bool over_pairs, double tau, double eps_over_scale,
                                  double c_wl, std::uint64_t seed);

}  // namespace isingtest
