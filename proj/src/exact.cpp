#include "isingtest/exact.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isingtest {

namespace {

void check_cutoff(int n, const char* op) {
    if (n > kEnumerationCutoff)
        throw std::runtime_error(std::string(op) +
                                 ": n exceeds the enumeration cutoff of 20; use sampling");
}

double initial_energy(const IsingModel& m) {
    // all spins -1
    double e = 0.0;
    for (int v = 0; v < m.n(); ++v) e -= m.node_theta(v);
    for (const Edge& edge : m.edges()) e += edge.theta;
    return e;
}

// Visits every state in Gray-code order; f(state_bits, energy) with bit v set
// <=> spin_v = +1. spins holds the current configuration throughout.
template <class F>
void for_each_state(const IsingModel& m, std::vector<double>& spins, F&& f) {
    const int n = m.n();
    spins.assign(n, -1.0);
    double e = initial_energy(m);
    std::uint32_t bits = 0;
    f(bits, e);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int v = std::countr_zero(i);
        double local = m.node_theta(v);
        for (const auto& [u, theta] : m.neighbors(v)) local += theta * spins[u];
        e -= 2.0 * spins[v] * local;
        spins[v] = -spins[v];
        bits ^= std::uint32_t{1} << v;
        f(bits, e);
    }
}

double log_partition_of(const IsingModel& m) {
    double mx = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    std::vector<double> spins;
    for_each_state(m, spins, [&](std::uint32_t, double e) {
        if (e <= mx) {
            s += std::exp(e - mx);
        } else {
            s = s * std::exp(mx - e) + 1.0;
            mx = e;
        }
    });
    return mx + std::log(s);
}

}  // namespace

ExactSummary exact_summary(const IsingModel& model) {
    check_cutoff(model.n(), "exact_summary");
    const int n = model.n();
    ExactSummary out;
    out.log_partition = log_partition_of(model);
    out.node_marginals.assign(n, 0.0);
    out.edge_marginals.assign(pair_count(n), 0.0);

    std::vector<double> spins;
    for_each_state(model, spins, [&](std::uint32_t, double e) {
        const double w = std::exp(e - out.log_partition);
        for (int v = 0; v < n; ++v) out.node_marginals[v] += w * spins[v];
        std::size_t idx = 0;
        for (int u = 0; u < n; ++u) {
            const double su = spins[u];
            for (int v = u + 1; v < n; ++v, ++idx) out.edge_marginals[idx] += w * su * spins[v];
        }
    });
    return out;
}

MomentTable moments_from_summary(const ExactSummary& summary, int n) {
    MomentTable t;
    t.n = n;
    t.node = summary.node_marginals;
    t.edge = summary.edge_marginals;
    t.exact = true;
    t.recompute_covariances();
    return t;
}

MomentTable exact_moments(const IsingModel& model) {
    return moments_from_summary(exact_summary(model), model.n());
}

double log_pmf(const IsingModel& model, SpinView x, double log_partition) {
    if (static_cast<int>(x.size()) != model.n())
        throw std::invalid_argument("log_pmf: configuration length mismatch");
    double e = 0.0;
    for (int v = 0; v < model.n(); ++v) e += model.node_theta(v) * x[v];
    for (const Edge& edge : model.edges()) e += edge.theta * x[edge.u] * x[edge.v];
    return e - log_partition;
}

StateWeights state_log_weights(const IsingModel& model) {
    check_cutoff(model.n(), "state_log_weights");
    StateWeights out;
    out.log_partition = log_partition_of(model);
    out.log_prob.assign(std::size_t{1} << model.n(), 0.0);
    std::vector<double> spins;
    for_each_state(model, spins,
                   [&](std::uint32_t bits, double e) { out.log_prob[bits] = e - out.log_partition; });
    return out;
}

SpinConfiguration decode_state(std::uint32_t bits, int n) {
    SpinConfiguration x(n);
    for (int v = 0; v < n; ++v) x[v] = (bits >> v) & 1 ? Spin{1} : Spin{-1};
    return x;
}

double skl_divergence(const IsingModel& p, const MomentTable& p_moments,
                      const IsingModel& q, const MomentTable& q_moments) {
    const int n = p.n();
    if (q.n() != n) throw std::invalid_argument("skl_divergence: node-count mismatch");
    if (p_moments.n != n || q_moments.n != n)
        throw std::invalid_argument("skl_divergence: moment table incomplete");
    double total = 0.0;
    for (int v = 0; v < n; ++v)
        total += (p.node_theta(v) - q.node_theta(v)) * (p_moments.node[v] - q_moments.node[v]);
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v, ++idx)
            total += (p.edge_theta(u, v) - q.edge_theta(u, v)) *
                     (p_moments.edge[idx] - q_moments.edge[idx]);
    return total;
}

namespace {

// Joint enumeration over both models; f(w_p, w_q, log w_p, log w_q).
template <class F>
void for_each_joint(const IsingModel& p, const IsingModel& q, F&& f) {
    const int n = p.n();
    const double phi_p = log_partition_of(p);
    const double phi_q = log_partition_of(q);
    std::vector<double> spins(n, -1.0);
    double ep = initial_energy(p), eq = initial_energy(q);
    f(std::exp(ep - phi_p), std::exp(eq - phi_q), ep - phi_p, eq - phi_q);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int v = std::countr_zero(i);
        double lp = p.node_theta(v), lq = q.node_theta(v);
        for (const auto& [u, theta] : p.neighbors(v)) lp += theta * spins[u];
        for (const auto& [u, theta] : q.neighbors(v)) lq += theta * spins[u];
        ep -= 2.0 * spins[v] * lp;
        eq -= 2.0 * spins[v] * lq;
        spins[v] = -spins[v];
        f(std::exp(ep - phi_p), std::exp(eq - phi_q), ep - phi_p, eq - phi_q);
    }
}

}  // namespace

double skl_direct(const IsingModel& p, const IsingModel& q) {
    if (p.n() != q.n()) throw std::invalid_argument("skl_direct: node-count mismatch");
    check_cutoff(p.n(), "skl_direct");
    double total = 0.0;
    for_each_joint(p, q, [&](double wp, double wq, double lp, double lq) {
        total += (wp - wq) * (lp - lq);
    });
    return total;
}

double tv_direct(const IsingModel& p, const IsingModel& q) {
    if (p.n() != q.n()) throw std::invalid_argument("tv_direct: node-count mismatch");
    check_cutoff(p.n(), "tv_direct");
    double total = 0.0;
    for_each_joint(p, q,
                   [&](double wp, double wq, double, double) { total += std::fabs(wp - wq); });
    return 0.5 * total;
}

double skl_independence_gap(const IsingModel& model, const ExactSummary& summary) {
    const int n = model.n();
    double total = 0.0;
    for (const Edge& e : model.edges()) {
        const double lambda = summary.edge_marginal(n, e.u, e.v) -
                              summary.node_marginals[e.u] * summary.node_marginals[e.v];
        total += e.theta * lambda;
    }
    return total;
}

}  // namespace isingtest
