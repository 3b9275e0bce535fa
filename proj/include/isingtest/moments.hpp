#pragma once

#include <vector>

#include "isingtest/types.hpp"

namespace isingtest {

class SampleBatch;

/// Node marginals mu_u, edge marginals mu_uv and covariances
/// lambda_uv = mu_uv - mu_u*mu_v, either exact (from enumeration) or empirical
/// (from a sample batch). Covariances are always recomputed from the stored
/// marginals, so the table is algebraically consistent by construction.
struct MomentTable {
    int n = 0;
    std::vector<double> node;  // size n
    std::vector<double> edge;  // packed pairs, u < v
    std::vector<double> cov;   // packed pairs
    bool exact = false;
    long long sample_count = 0;

    double node_marginal(int v) const { return node[v]; }
    double edge_marginal(int u, int v) const { return edge[pair_index(n, u, v)]; }
    double covariance(int u, int v) const { return cov[pair_index(n, u, v)]; }

    void recompute_covariances();
};

/// mu_hat_u = mean of X_u, mu_hat_uv = mean of X_u X_v over the batch.
/// Throws on an empty batch.
MomentTable empirical_moments(const SampleBatch& batch);

}  // namespace isingtest
