#pragma once

#include <cstdint>
#include <vector>

#include "isingtest/model.hpp"
#include "isingtest/moments.hpp"
#include "isingtest/types.hpp"

namespace isingtest {

/// Largest n for which full state enumeration is allowed (2^20 states).
/// Operations refuse larger models instead of approximating silently.
inline constexpr int kEnumerationCutoff = 20;

struct ExactSummary {
    double log_partition = 0.0;
    std::vector<double> node_marginals;  // size n, in [-1,1]
    std::vector<double> edge_marginals;  // packed pairs, in [-1,1]

    double edge_marginal(int n, int u, int v) const {
        return edge_marginals[pair_index(n, u, v)];
    }
};

/// Log-partition function and all first/second moments by enumeration over all
/// 2^n states (log-sum-exp with running-max rescaling). Throws for n above the
/// cutoff with a hint to use sampling instead.
ExactSummary exact_summary(const IsingModel& model);

MomentTable exact_moments(const IsingModel& model);
MomentTable moments_from_summary(const ExactSummary& summary, int n);

/// log p(x) given the model's true log-partition value.
double log_pmf(const IsingModel& model, SpinView x, double log_partition);

/// Log-probabilities of every state, indexed by bit mask (bit v set <=> spin
/// +1). n <= cutoff.
struct StateWeights {
    double log_partition = 0.0;
    std::vector<double> log_prob;  // size 2^n
};
StateWeights state_log_weights(const IsingModel& model);

SpinConfiguration decode_state(std::uint32_t bits, int n);

/// Symmetrized KL divergence from parameters and moments:
///   sum_v (th_v^p - th_v^q)(mu_v^p - mu_v^q) + sum_{u<v} (...edges...).
double skl_divergence(const IsingModel& p, const MomentTable& p_moments,
                      const IsingModel& q, const MomentTable& q_moments);

/// Symmetrized KL by direct enumeration: sum_x (p(x)-q(x))(log p(x)-log q(x)).
double skl_direct(const IsingModel& p, const IsingModel& q);

/// Total variation distance by enumeration.
double tv_direct(const IsingModel& p, const IsingModel& q);

/// sum_e theta_e (mu_e - mu_u mu_v): upper bound on the SKL distance from the
/// set of product distributions, via the product model with matching node
/// marginals.
double skl_independence_gap(const IsingModel& model, const ExactSummary& summary);

}  // namespace isingtest
