#pragma once

#include <span>
#include <utility>
#include <vector>

#include "isingtest/types.hpp"

namespace isingtest {

struct Edge {
    int u = 0;
    int v = 0;
    double theta = 0.0;
};

/// Pairwise binary Markov random field over n labeled nodes: a dense symmetric
/// edge-parameter table plus a node-parameter vector. A zero edge entry means
/// the edge is absent. Immutable after construction; safe to share across
/// threads. Adjacency lists for the nonzero edges are built once.
class IsingModel {
public:
    explicit IsingModel(int n);
    IsingModel(int n, std::vector<double> node_theta, const std::vector<Edge>& edges);

    static IsingModel uniform(int n) { return IsingModel(n); }

    int n() const { return n_; }
    double node_theta(int v) const { return node_theta_[v]; }
    double edge_theta(int u, int v) const { return edge_theta_[u * static_cast<std::size_t>(n_) + v]; }
    std::span<const double> node_thetas() const { return node_theta_; }

    /// Nonzero-edge neighbors of u as (node, theta) pairs.
    const std::vector<std::pair<int, double>>& neighbors(int u) const { return adjacency_[u]; }
    /// Nonzero edges with u < v, sorted lexicographically.
    const std::vector<Edge>& edges() const { return edges_; }

    double max_edge_weight() const { return beta_; }   // beta
    double max_node_weight() const { return h_; }      // h
    int edge_count() const { return static_cast<int>(edges_.size()); }  // m
    int max_degree() const { return d_max_; }

    /// Copy with one edge parameter replaced (models are immutable).
    IsingModel with_edge(int u, int v, double theta) const;
    IsingModel with_node_theta(int v, double theta) const;

    bool same_parameters(const IsingModel& other) const;

private:
    int n_;
    std::vector<double> node_theta_;
    std::vector<double> edge_theta_;  // dense n*n, symmetric, zero diagonal
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    double beta_ = 0.0;
    double h_ = 0.0;
    int d_max_ = 0;

    void rebuild_derived();
};

struct ModelClass {
    bool is_forest = true;
    bool is_ferromagnetic = true;
    bool is_zero_field = true;
};

/// Structure flags: forest via cycle detection on nonzero edges, ferromagnetic
/// iff all edge parameters are nonnegative, zero-field iff all node parameters
/// vanish.
ModelClass classify_model(const IsingModel& model);

/// max_v sum_{u != v} tanh(|theta_uv|); the model is in the high-temperature
/// regime when this is strictly below 1.
double dobrushin_influence(const IsingModel& model);

/// True iff the influence is at most 1 - eta, eta in (0,1).
bool dobrushin_check(const IsingModel& model, double eta);

}  // namespace isingtest
