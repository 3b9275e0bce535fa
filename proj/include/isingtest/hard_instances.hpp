#pragma once

#include <cstdint>
#include <string>

#include "isingtest/model.hpp"

namespace isingtest {

/// A model from one of the lower-bound families, with its SKL distance from
/// the tester's null certified in closed form (re-verifiable by enumeration).
struct HardInstance {
    IsingModel model;
    std::string family;
    double certified_skl = 0.0;
    double delta = 0.0;  // perturbation magnitude
};

/// Product model with node fields +-delta, delta = sqrt(3 eps / 2n);
/// certified SKL from uniform is n * delta * tanh(delta) >= eps.
/// Requires eps <= n/6 so that delta <= 1. Signs are drawn from the seed.
HardInstance make_product_perturbation(int n, double eps, std::uint64_t seed);
HardInstance make_product_perturbation(int n, double eps, const std::vector<int>& signs);

/// Uniformly random perfect matching with delta = sqrt(3 eps / n) on each
/// edge: ferromagnetic forest, certified SKL (n/2) * delta * tanh(delta).
HardInstance make_random_matching(int n, double eps, std::uint64_t seed);

enum class TwoNodeMode { BetaIndependence, BetaIdentity, HIdentity };

struct TwoNodePair {
    IsingModel p{1};
    IsingModel q{1};
    double certified_skl = 0.0;
    double tau = 0.0;  // solved parameter
};

/// One- and two-node model pairs whose SKL distance equals eps exactly
/// (bisection residual <= 1e-10):
///  - BetaIndependence: fields tau on both nodes; p adds edge beta;
///    d = beta (mu^edge_uv - tanh^2 tau), solved over tau >= 0.
///  - BetaIdentity: single edge beta vs beta - tau, tau in [beta/2, beta];
///    requires beta large enough that the bracket straddles eps.
///  - HIdentity: single node field h vs h - tau, tau in [h/2, h].
TwoNodePair make_two_node_pair(TwoNodeMode mode, double beta_or_h, double eps);

}  // namespace isingtest
