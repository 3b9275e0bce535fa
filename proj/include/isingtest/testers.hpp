#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isingtest/config.hpp"
#include "isingtest/estimation.hpp"
#include "isingtest/exact.hpp"
#include "isingtest/model.hpp"
#include "isingtest/moments.hpp"
#include "isingtest/sampling.hpp"
#include "isingtest/statistics.hpp"

namespace isingtest {

struct Witness {
    enum class Kind { Edge, Node, Statistic };
    Kind kind = Kind::Edge;
    int u = -1;
    int v = -1;           // unused for Node/Statistic
    double observed = 0.0;
    double threshold = 0.0;
};

struct TestVerdict {
    bool reject = false;
    std::optional<Witness> witness;  // present on every reject
    long long samples_used = 0;
    std::string algorithm;
    std::uint64_t seed = 0;
    // Statistical promises about the sampled model (structure, temperature)
    // cannot be verified from samples; testers that rely on one mark it here.
    bool promise_unverified = false;
};

struct FlaggedPair {
    int u = 0, v = 0;
    double value = 0.0;
};
struct FlaggedNode {
    int v = 0;
    double value = 0.0;
};

/// Every pair whose |lambda_hat_uv| (independence mode, reference == nullptr)
/// or |mu_hat_uv - reference| (identity mode) is at least gap/2. With
/// k = c_loc ln n / (gap/2)^2 samples, pairs at >= gap are flagged and pairs
/// at 0 are not, each with probability >= 9/10.
std::vector<FlaggedPair> flag_discrepant_pairs(const SampleBatch& batch,
                                               const MomentTable* reference, double gap);
std::vector<FlaggedNode> flag_discrepant_nodes(const SampleBatch& batch,
                                               const MomentTable* reference, double gap);

/// Independence via localization: k = ceil(c_loc ln n / t^2) samples with
/// t = eps/(4 m beta); rejects iff some |lambda_hat_uv| >= t.
TestVerdict test_independence_localization(SampleSource& source, const TesterConfig& config,
                                           const PromisedBounds& bounds);

/// Identity via localization: rejects iff some |mu_hat_uv - mu^q_uv| >=
/// eps/(8 m beta) or some |mu_hat_u - mu^q_u| >= eps/(8 n h). The node phase
/// is skipped when h = 0. q_moments must be exact.
TestVerdict test_identity_localization(SampleSource& source, const IsingModel& q,
                                       const MomentTable& q_moments,
                                       const TesterConfig& config,
                                       const PromisedBounds& bounds);

/// Forest-structured, zero-field promise: k = ceil(c_f n ln n / eps) samples;
/// rejects iff some |mu_hat_uv| >= (1/2) sqrt(eps/n).
TestVerdict test_independence_forest(SampleSource& source, const TesterConfig& config);

/// cosh^4(beta) vs the large-discrepancy branch; the sample-count factor for
/// forest identity testing.
double forest_identity_cost(double beta);

/// Forest identity: immediate reject when q is not a zero-field forest;
/// otherwise rejects iff some |mu_hat_uv - tanh(theta^q_uv)| >=
/// (sech^2(beta)/2) sqrt(eps/n), with k = ceil(c_f c(beta) n ln n / eps).
TestVerdict test_identity_forest(SampleSource& source, const IsingModel& q,
                                 const TesterConfig& config);

/// Ferromagnetic, zero-field promise: one-sided; rejects iff some
/// mu_hat_uv >= (1/2) sqrt(eps/m_eff) with m_eff = n*d_max (or n^2 when the
/// degree is unknown) and k = ceil(c_f m_eff ln n / eps).
TestVerdict test_independence_ferro(SampleSource& source, const TesterConfig& config,
                                    const PromisedBounds& bounds);

/// tau minimizing n^{2+tau} + n^{4-2tau} * n^s: (2+s)/3.
double choose_tau(double variance_exponent);

enum class LttTask { Independence, Identity };
enum class FieldMode { ZeroField, Field };

struct LttOptions {
    LttTask task = LttTask::Independence;
    FieldMode field = FieldMode::ZeroField;
    const IsingModel* q = nullptr;          // identity target
    const MomentTable* q_moments = nullptr; // exact moments of q
};

/// Per-phase plan of one learn-then-test pipeline (node pipeline only for
/// field identity): repetition count, prefilter gap and sample counts, and the
/// chebyshev block layout.
struct LttPlan {
    double tau = 4.0 / 3.0;       // edge phase; (2+s)/3 for variance n^s
    double tau_node = 2.0 / 3.0;  // node phase balance point
    long long reps = 1;           // L ~ c_rep n^{2-tau}
    long long reps_node = 0;
    long long prefilter_k = 0;
    long long prefilter_node_k = 0;
    double prefilter_gap = 0.0;
    double prefilter_node_gap = 0.0;
    long long weaklearn_k = 0;       // observations per repetition
    long long weaklearn_node_k = 0;
    long long chebyshev_k = 0;       // rows in the shared decision batch
    long long chebyshev_node_k = 0;
    int chebyshev_blocks = 1;        // odd; median-of-means boosting
    int chebyshev_node_blocks = 1;
    double threshold = 0.0;          // c_thr eps / (4 scale n^{2-tau})
    double threshold_node = 0.0;
    double delta_each = 0.1;         // per-repetition failure budget
};

LttPlan make_ltt_plan(int n, const LttOptions& options, const TesterConfig& config,
                      const PromisedBounds& bounds);

enum class LttStatistic {
    PairProduct,      // sum c_uv X_u X_v
    PairCentered,     // sum c_uv (X1_u - X2_u)(X1_v - X2_v), two rows each
    PairVsReference,  // sum c_uv (X_u X_v - mu^q_uv)
    NodeVsReference,  // sum c_v (X_v - mu^q_v)
};

struct ChebyshevSpec {
    LttStatistic stat = LttStatistic::PairProduct;
    double threshold = 0.0;
    int blocks = 1;
    const MomentTable* reference = nullptr;
};

struct ChebyshevOutcome {
    bool reject = false;
    double statistic = 0.0;  // median of block means
    double threshold = 0.0;
};

/// Median-of-means decision: rejects iff the median block mean of the
/// statistic is at least spec.threshold.
ChebyshevOutcome chebyshev_decision(const SampleBatch& batch, const SignVector& signs,
                                    const ChebyshevSpec& spec);

/// Three phases: localization prefilter, L weak-learning repetitions, and one
/// chebyshev decision per learned sign vector sharing a single sample batch.
/// Rejects iff any phase rejects. Field identity runs a node pipeline first.
TestVerdict test_learn_then_test(SampleSource& source, const LttOptions& options,
                                 const TesterConfig& config, const PromisedBounds& bounds);

}  // namespace isingtest
