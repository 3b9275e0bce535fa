#include "isingtest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace isingtest {

IsingModel::IsingModel(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("IsingModel: n must be positive");
    node_theta_.assign(n, 0.0);
    edge_theta_.assign(static_cast<std::size_t>(n) * n, 0.0);
    adjacency_.resize(n);
}

IsingModel::IsingModel(int n, std::vector<double> node_theta, const std::vector<Edge>& edges)
    : IsingModel(n) {
    if (static_cast<int>(node_theta.size()) != n)
        throw std::invalid_argument("IsingModel: node_theta length must equal n");
    for (double t : node_theta)
        if (!std::isfinite(t)) throw std::invalid_argument("IsingModel: non-finite node parameter");
    node_theta_ = std::move(node_theta);
    for (const Edge& e : edges) {
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
            throw std::invalid_argument("IsingModel: edge index out of range");
        if (e.u == e.v) throw std::invalid_argument("IsingModel: self edge");
        if (e.u >= e.v) throw std::invalid_argument("IsingModel: edges require u < v");
        if (!std::isfinite(e.theta)) throw std::invalid_argument("IsingModel: non-finite edge parameter");
        std::size_t idx = static_cast<std::size_t>(e.u) * n + e.v;
        if (edge_theta_[idx] != 0.0) throw std::invalid_argument("IsingModel: duplicate edge");
        edge_theta_[idx] = e.theta;
        edge_theta_[static_cast<std::size_t>(e.v) * n + e.u] = e.theta;
    }
    rebuild_derived();
}

void IsingModel::rebuild_derived() {
    edges_.clear();
    adjacency_.assign(n_, {});
    beta_ = 0.0;
    h_ = 0.0;
    for (double t : node_theta_) h_ = std::max(h_, std::fabs(t));
    for (int u = 0; u < n_; ++u) {
        for (int v = u + 1; v < n_; ++v) {
            double t = edge_theta(u, v);
            if (t == 0.0) continue;
            edges_.push_back({u, v, t});
            adjacency_[u].emplace_back(v, t);
            adjacency_[v].emplace_back(u, t);
            beta_ = std::max(beta_, std::fabs(t));
        }
    }
    d_max_ = 0;
    for (const auto& a : adjacency_) d_max_ = std::max(d_max_, static_cast<int>(a.size()));
}

IsingModel IsingModel::with_edge(int u, int v, double theta) const {
    if (u > v) std::swap(u, v);
    if (u == v || u < 0 || v >= n_) throw std::invalid_argument("with_edge: bad pair");
    IsingModel out = *this;
    out.edge_theta_[static_cast<std::size_t>(u) * n_ + v] = theta;
    out.edge_theta_[static_cast<std::size_t>(v) * n_ + u] = theta;
    out.rebuild_derived();
    return out;
}

IsingModel IsingModel::with_node_theta(int v, double theta) const {
    if (v < 0 || v >= n_) throw std::invalid_argument("with_node_theta: bad node");
    IsingModel out = *this;
    out.node_theta_[v] = theta;
    out.rebuild_derived();
    return out;
}

bool IsingModel::same_parameters(const IsingModel& other) const {
    return n_ == other.n_ && node_theta_ == other.node_theta_ && edge_theta_ == other.edge_theta_;
}

ModelClass classify_model(const IsingModel& model) {
    ModelClass out;
    for (int v = 0; v < model.n(); ++v)
        if (model.node_theta(v) != 0.0) out.is_zero_field = false;

    // union-find cycle detection on nonzero edges
    std::vector<int> parent(model.n());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : model.edges()) {
        if (e.theta < 0.0) out.is_ferromagnetic = false;
        int ru = find(e.u), rv = find(e.v);
        if (ru == rv) {
            out.is_forest = false;
        } else {
            parent[ru] = rv;
        }
    }
    return out;
}

double dobrushin_influence(const IsingModel& model) {
    double worst = 0.0;
    for (int v = 0; v < model.n(); ++v) {
        double row = 0.0;
        for (const auto& [u, theta] : model.neighbors(v)) {
            (void)u;
            row += std::tanh(std::fabs(theta));
        }
        worst = std::max(worst, row);
    }
    return worst;
}

bool dobrushin_check(const IsingModel& model, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("dobrushin_check: eta in (0,1)");
    return dobrushin_influence(model) <= 1.0 - eta;
}

}  // namespace isingtest
