#include "isingtest/hard_instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "isingtest/exact.hpp"
#include "isingtest/types.hpp"

namespace isingtest {

HardInstance make_product_perturbation(int n, double eps, const std::vector<int>& signs) {
    if (!(eps > 0.0)) throw std::invalid_argument("make_product_perturbation: eps must be positive");
    if (eps > n / 6.0)
        throw std::invalid_argument("make_product_perturbation: eps too large (needs eps <= n/6)");
    if (static_cast<int>(signs.size()) != n)
        throw std::invalid_argument("make_product_perturbation: sign vector length mismatch");
    const double delta = std::sqrt(3.0 * eps / (2.0 * n));
    std::vector<double> fields(n);
    for (int v = 0; v < n; ++v) fields[v] = (signs[v] >= 0 ? delta : -delta);
    HardInstance out{IsingModel(n, std::move(fields), {}), "product-perturbation",
                     n * delta * std::tanh(delta), delta};
    return out;
}

HardInstance make_product_perturbation(int n, double eps, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x50));
    std::vector<int> signs(n);
    for (int& s : signs) s = rng.coin() ? 1 : -1;
    return make_product_perturbation(n, eps, signs);
}

HardInstance make_random_matching(int n, double eps, std::uint64_t seed) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("make_random_matching: n must be even");
    if (!(eps > 0.0)) throw std::invalid_argument("make_random_matching: eps must be positive");
    if (eps > n / 3.0)
        throw std::invalid_argument("make_random_matching: eps too large (needs eps <= n/3)");
    const double delta = std::sqrt(3.0 * eps / n);

    // uniform shuffle then pairing of consecutive nodes: exactly uniform over
    // perfect matchings
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x51));
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(i + 1)]);

    std::vector<Edge> edges;
    edges.reserve(n / 2);
    for (int i = 0; i < n; i += 2) {
        int u = order[i], v = order[i + 1];
        if (u > v) std::swap(u, v);
        edges.push_back({u, v, delta});
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    HardInstance out{IsingModel(n, std::vector<double>(n, 0.0), edges), "random-matching",
                     (n / 2.0) * delta * std::tanh(delta), delta};
    return out;
}

namespace {

double pair_skl(const IsingModel& p, const IsingModel& q) { return skl_direct(p, q); }

// Bisection for f(tau) = eps over [lo, hi]; f must straddle eps at the ends.
template <class F>
double bisect(F&& f, double lo, double hi, double eps) {
    double flo = f(lo) - eps, fhi = f(hi) - eps;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("make_two_node_pair: no root in the bracket; "
                                    "parameters outside the construction's regime");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid) - eps;
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TwoNodePair make_two_node_pair(TwoNodeMode mode, double beta_or_h, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("make_two_node_pair: eps must lie in (0,1)");
    TwoNodePair out;
    switch (mode) {
        case TwoNodeMode::BetaIndependence: {
            const double beta = beta_or_h;
            if (!(beta > 0.0)) throw std::invalid_argument("make_two_node_pair: beta must be positive");
            // p: fields tau plus edge beta; q: fields tau, no edge. The gap
            // beta*(mu^p_uv - tanh^2 tau) falls from beta*tanh(beta) to 0 as
            // tau grows.
            auto gap = [&](double tau) {
                const IsingModel p(2, {tau, tau}, {{0, 1, beta}});
                const IsingModel q(2, {tau, tau}, {});
                return pair_skl(p, q);
            };
            const double tau = bisect(gap, 0.0, 60.0, eps);
            out.tau = tau;
            out.p = IsingModel(2, {tau, tau}, {{0, 1, beta}});
            out.q = IsingModel(2, {tau, tau}, {});
            break;
        }
        case TwoNodeMode::BetaIdentity: {
            const double beta = beta_or_h;
            if (!(beta > 0.0)) throw std::invalid_argument("make_two_node_pair: beta must be positive");
            auto gap = [&](double tau) {
                return tau * (std::tanh(beta) - std::tanh(beta - tau));
            };
            const double tau = bisect(gap, beta / 2.0, beta, eps);
            out.tau = tau;
            out.p = IsingModel(2, {0.0, 0.0}, {{0, 1, beta}});
            out.q = IsingModel(2, {0.0, 0.0}, {{0, 1, beta - tau}});
            break;
        }
        case TwoNodeMode::HIdentity: {
            const double h = beta_or_h;
            if (!(h > 0.0)) throw std::invalid_argument("make_two_node_pair: h must be positive");
            auto gap = [&](double tau) { return tau * (std::tanh(h) - std::tanh(h - tau)); };
            const double tau = bisect(gap, h / 2.0, h, eps);
            out.tau = tau;
            out.q = IsingModel(1, {h}, {});
            out.p = IsingModel(1, {h - tau}, {});
            break;
        }
    }
    out.certified_skl = pair_skl(out.p, out.q);
    return out;
}

}  // namespace isingtest
