#pragma once

#include <cstdint>

namespace isingtest {

/// Accuracy/failure targets plus explicit multipliers for every asymptotic
/// sample-count and threshold formula. Defaults were fixed by a calibration
/// experiment targeting >= 0.9 null acceptance at n = 12.
struct TesterConfig {
    double epsilon = 0.1;     // SKL distance threshold
    double fail_prob = 0.1;   // target failure probability (drives log factors)

    double c_loc = 16.0;      // localization sample counts
    double c_f = 48.0;        // forest / ferromagnet sample counts
    double c_pre = 24.0;      // learn-then-test prefilter sample counts
    double c_wl = 1.0;        // weak-learning sample counts
    double c_rep = 2.0;       // weak-learning repetition counts
    double c_ch = 1.0;        // chebyshev block sizes
    double c_thr = 4.0;       // chebyshev decision thresholds

    bool ltt_prefilter = true;  // localization prefilter phase toggle

    std::uint64_t rng_seed = 1;

    // > 0 overrides every sample-count formula; multi-phase testers scale
    // their per-phase counts proportionally.
    long long budget = 0;

    void validate() const;  // throws std::invalid_argument
};

/// Analyst-side promise parameters. Zero entries mean "unknown": m falls back
/// to n(n-1)/2 and d_max to the quadratic-sample regime.
struct PromisedBounds {
    double beta = 0.0;  // bound on |edge parameters|
    double h = 0.0;     // bound on |node parameters|
    long long m = 0;    // bound on the number of nonzero edges
    int d_max = 0;      // bound on the maximum degree

    long long edge_bound(int n) const;
};

}  // namespace isingtest
