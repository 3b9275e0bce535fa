#include "isingtest/testers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isingtest {

namespace {

double log_n(int n) { return std::log(static_cast<double>(std::max(n, 3))); }

long long ceil_count(double x) {
    return std::max<long long>(1, static_cast<long long>(std::ceil(x)));
}

TestVerdict start_verdict(const char* algorithm, const TesterConfig& config) {
    TestVerdict v;
    v.algorithm = algorithm;
    v.seed = config.rng_seed;
    return v;
}

void finish(TestVerdict& v, const SampleSource& source, long long drawn_before) {
    v.samples_used = source.samples_drawn() - drawn_before;
}

std::optional<Witness> worst_pair(const std::vector<FlaggedPair>& flags, double threshold) {
    if (flags.empty()) return std::nullopt;
    const auto it = std::max_element(
        flags.begin(), flags.end(),
        [](const FlaggedPair& a, const FlaggedPair& b) { return a.value < b.value; });
    return Witness{Witness::Kind::Edge, it->u, it->v, it->value, threshold};
}

std::optional<Witness> worst_node(const std::vector<FlaggedNode>& flags, double threshold) {
    if (flags.empty()) return std::nullopt;
    const auto it = std::max_element(
        flags.begin(), flags.end(),
        [](const FlaggedNode& a, const FlaggedNode& b) { return a.value < b.value; });
    return Witness{Witness::Kind::Node, it->v, -1, it->value, threshold};
}

}  // namespace

std::vector<FlaggedPair> flag_discrepant_pairs(const SampleBatch& batch,
                                               const MomentTable* reference, double gap) {
    if (!(gap > 0.0)) throw std::invalid_argument("flag_discrepant_pairs: gap must be positive");
    const MomentTable emp = empirical_moments(batch);
    std::vector<FlaggedPair> out;
    const double cut = gap / 2.0;
    std::size_t idx = 0;
    for (int u = 0; u < emp.n; ++u) {
        for (int v = u + 1; v < emp.n; ++v, ++idx) {
            const double value = reference ? std::fabs(emp.edge[idx] - reference->edge[idx])
                                           : std::fabs(emp.cov[idx]);
            if (value >= cut) out.push_back({u, v, value});
        }
    }
    return out;
}

std::vector<FlaggedNode> flag_discrepant_nodes(const SampleBatch& batch,
                                               const MomentTable* reference, double gap) {
    if (!(gap > 0.0)) throw std::invalid_argument("flag_discrepant_nodes: gap must be positive");
    const MomentTable emp = empirical_moments(batch);
    std::vector<FlaggedNode> out;
    const double cut = gap / 2.0;
    for (int v = 0; v < emp.n; ++v) {
        const double value =
            reference ? std::fabs(emp.node[v] - reference->node[v]) : std::fabs(emp.node[v]);
        if (value >= cut) out.push_back({v, value});
    }
    return out;
}

TestVerdict test_independence_localization(SampleSource& source, const TesterConfig& config,
                                           const PromisedBounds& bounds) {
    config.validate();
    TestVerdict v = start_verdict("localization-independence", config);
    const long long before = source.samples_drawn();
    const int n = source.n();
    const long long m = bounds.edge_bound(n);
    if (bounds.beta == 0.0) {
        // no edges possible, every model in the promise class is product
        finish(v, source, before);
        return v;
    }
    const double t = config.epsilon / (4.0 * m * bounds.beta);
    const long long k =
        config.budget > 0 ? config.budget : ceil_count(config.c_loc * log_n(n) / (t * t));
    const SampleBatch batch = source.draw(k);
    v.witness = worst_pair(flag_discrepant_pairs(batch, nullptr, 2.0 * t), t);
    v.reject = v.witness.has_value();
    finish(v, source, before);
    return v;
}

TestVerdict test_identity_localization(SampleSource& source, const IsingModel& q,
                                       const MomentTable& q_moments, const TesterConfig& config,
                                       const PromisedBounds& bounds) {
    config.validate();
    if (!q_moments.exact)
        throw std::invalid_argument("test_identity_localization: q moments must be exact");
    if (q.n() != source.n())
        throw std::invalid_argument("test_identity_localization: node-count mismatch");
    TestVerdict v = start_verdict("localization-identity", config);
    const long long before = source.samples_drawn();
    const int n = source.n();
    const long long m = std::max<long long>(bounds.edge_bound(n), q.edge_count());
    const double beta = std::max(bounds.beta, q.max_edge_weight());
    const double h = std::max(bounds.h, q.max_node_weight());

    double per_sample = 0.0;
    const double t_edge = beta > 0.0 ? config.epsilon / (8.0 * m * beta) : 0.0;
    const double t_node = h > 0.0 ? config.epsilon / (8.0 * n * h) : 0.0;
    if (t_edge > 0.0) per_sample += 1.0 / (t_edge * t_edge);
    if (t_node > 0.0) per_sample += 1.0 / (t_node * t_node);
    if (per_sample == 0.0) {
        finish(v, source, before);  // both models are uniform under the promise
        return v;
    }
    const long long k =
        config.budget > 0 ? config.budget : ceil_count(config.c_loc * log_n(n) * per_sample);
    const SampleBatch batch = source.draw(k);
    if (t_edge > 0.0)
        v.witness = worst_pair(flag_discrepant_pairs(batch, &q_moments, 2.0 * t_edge), t_edge);
    if (!v.witness && t_node > 0.0)
        v.witness = worst_node(flag_discrepant_nodes(batch, &q_moments, 2.0 * t_node), t_node);
    v.reject = v.witness.has_value();
    finish(v, source, before);
    return v;
}

TestVerdict test_independence_forest(SampleSource& source, const TesterConfig& config) {
    config.validate();
    TestVerdict v = start_verdict("forest-independence", config);
    v.promise_unverified = true;  // forest structure of p is not checkable
    const long long before = source.samples_drawn();
    const int n = source.n();
    const double t = 0.5 * std::sqrt(config.epsilon / n);
    const long long k = config.budget > 0
                            ? config.budget
                            : ceil_count(config.c_f * n * log_n(n) / config.epsilon);
    const SampleBatch batch = source.draw(k);
    // zero field: the only product model is uniform, so flag raw edge marginals
    const MomentTable emp = empirical_moments(batch);
    std::vector<FlaggedPair> flags;
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u)
        for (int w = u + 1; w < n; ++w, ++idx)
            if (std::fabs(emp.edge[idx]) >= t) flags.push_back({u, w, std::fabs(emp.edge[idx])});
    v.witness = worst_pair(flags, t);
    v.reject = v.witness.has_value();
    finish(v, source, before);
    return v;
}

namespace {

// Exact pair marginals of a zero-field forest: the product of tanh(theta)
// along the unique path, zero across components. O(n^2) by BFS from each node.
std::vector<double> forest_pair_marginals(const IsingModel& q) {
    const int n = q.n();
    std::vector<double> out(pair_count(n), 0.0);
    std::vector<double> reach(n);
    std::vector<int> stack;
    for (int root = 0; root < n; ++root) {
        reach.assign(n, 0.0);
        reach[root] = 1.0;
        stack.assign(1, root);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& [v, theta] : q.neighbors(u)) {
                if (reach[v] != 0.0) continue;
                reach[v] = reach[u] * std::tanh(theta);
                stack.push_back(v);
            }
        }
        for (int v = root + 1; v < n; ++v) out[pair_index(n, root, v)] = reach[v];
    }
    return out;
}

}  // namespace

double forest_identity_cost(double beta) {
    const double c1 = std::pow(std::cosh(beta), 4.0);
    double c2 = 0.0;
    if (beta > 0.0) {
        const double drop = std::tanh(beta) - std::tanh(beta - 1.0 / (2.0 * std::tanh(beta)));
        c2 = std::min(beta * beta, 1.0 / (drop * drop));
    }
    return std::max(c1, c2);
}

TestVerdict test_identity_forest(SampleSource& source, const IsingModel& q,
                                 const TesterConfig& config) {
    config.validate();
    if (q.n() != source.n())
        throw std::invalid_argument("test_identity_forest: node-count mismatch");
    TestVerdict v = start_verdict("forest-identity", config);
    v.promise_unverified = true;
    const long long before = source.samples_drawn();
    const ModelClass qc = classify_model(q);
    if (!qc.is_forest || !qc.is_zero_field) {
        // the target violates the promise; flag the offending parameter
        v.reject = true;
        if (!qc.is_zero_field) {
            for (int node = 0; node < q.n(); ++node)
                if (q.node_theta(node) != 0.0) {
                    v.witness = Witness{Witness::Kind::Node, node, -1, q.node_theta(node), 0.0};
                    break;
                }
        } else {
            const Edge& e = q.edges().back();
            v.witness = Witness{Witness::Kind::Edge, e.u, e.v, e.theta, 0.0};
        }
        finish(v, source, before);
        return v;
    }
    const int n = source.n();
    const double beta = q.max_edge_weight();
    const double t = 0.5 / (std::cosh(beta) * std::cosh(beta)) * std::sqrt(config.epsilon / n);
    const long long k = config.budget > 0
                            ? config.budget
                            : ceil_count(config.c_f * forest_identity_cost(beta) * n * log_n(n) /
                                         config.epsilon);
    const SampleBatch batch = source.draw(k);
    const MomentTable emp = empirical_moments(batch);
    // q's pair marginals: tanh(theta) on edges, path products elsewhere
    const std::vector<double> q_pairs = forest_pair_marginals(q);
    std::vector<FlaggedPair> flags;
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u)
        for (int w = u + 1; w < n; ++w, ++idx) {
            const double dev = std::fabs(emp.edge[idx] - q_pairs[idx]);
            if (dev >= t) flags.push_back({u, w, dev});
        }
    v.witness = worst_pair(flags, t);
    v.reject = v.witness.has_value();
    finish(v, source, before);
    return v;
}

TestVerdict test_independence_ferro(SampleSource& source, const TesterConfig& config,
                                    const PromisedBounds& bounds) {
    config.validate();
    TestVerdict v = start_verdict("ferro-independence", config);
    v.promise_unverified = true;
    const long long before = source.samples_drawn();
    const int n = source.n();
    const double m_eff = bounds.d_max > 0 ? static_cast<double>(n) * bounds.d_max
                                          : static_cast<double>(n) * n;
    const double t = 0.5 * std::sqrt(config.epsilon / m_eff);
    const long long k = config.budget > 0
                            ? config.budget
                            : ceil_count(config.c_f * m_eff * log_n(n) / config.epsilon);
    const SampleBatch batch = source.draw(k);
    const MomentTable emp = empirical_moments(batch);
    std::vector<FlaggedPair> flags;
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u)
        for (int w = u + 1; w < n; ++w, ++idx)
            if (emp.edge[idx] >= t) flags.push_back({u, w, emp.edge[idx]});  // one-sided
    v.witness = worst_pair(flags, t);
    v.reject = v.witness.has_value();
    finish(v, source, before);
    return v;
}

double choose_tau(double variance_exponent) {
    if (variance_exponent < 0.0) throw std::invalid_argument("choose_tau: exponent must be >= 0");
    return (2.0 + variance_exponent) / 3.0;
}

namespace {

int odd_blocks(double x) {
    int b = std::max(1, static_cast<int>(std::ceil(x)));
    return b | 1;
}

struct PhaseShape {
    LttStatistic stat = LttStatistic::PairProduct;
    double scale = 1.0;           // beta, 2*beta or 2*h
    double variance_bound = 1.0;  // plugged into the block sizes
    double signal_factor = 1.0;   // 2 for the centered two-sample statistic
    int rows_per_eval = 1;
};

PhaseShape edge_shape(const LttOptions& options, const PromisedBounds& bounds) {
    PhaseShape s;
    if (options.task == LttTask::Independence) {
        if (options.field == FieldMode::ZeroField) {
            s.stat = LttStatistic::PairProduct;
            s.scale = bounds.beta;
        } else {
            s.stat = LttStatistic::PairCentered;
            s.scale = bounds.beta;
            s.signal_factor = 2.0;
            s.rows_per_eval = 2;
        }
    } else {
        s.stat = LttStatistic::PairVsReference;
        s.scale = 2.0 * bounds.beta;
    }
    return s;
}

}  // namespace

LttPlan make_ltt_plan(int n, const LttOptions& options, const TesterConfig& config,
                      const PromisedBounds& bounds) {
    config.validate();
    if (!(bounds.beta > 0.0)) throw std::invalid_argument("learn-then-test: beta bound required");
    const bool node_phase = options.task == LttTask::Identity && options.field == FieldMode::Field;
    if (node_phase && !(bounds.h > 0.0))
        throw std::invalid_argument("learn-then-test: h bound required for field identity");

    LttPlan plan;
    // variance n^2 for the zero-field and centered statistics, n^3 for the
    // uncentered identity statistic under a field
    const bool uncentered_field = options.task == LttTask::Identity &&
                                  options.field == FieldMode::Field;
    const double s_exp = uncentered_field ? 3.0 : 2.0;
    plan.tau = choose_tau(s_exp);
    plan.tau_node = 2.0 / 3.0;

    const PhaseShape shape = edge_shape(options, bounds);
    const double eps = config.epsilon;
    const double n_d = n;

    plan.reps = ceil_count(config.c_rep * std::pow(n_d, 2.0 - plan.tau));
    plan.reps_node = node_phase ? ceil_count(config.c_rep * std::pow(n_d, 1.0 - plan.tau_node)) : 0;
    plan.delta_each = config.fail_prob / (2.0 * (plan.reps + plan.reps_node));
    const double log_inv_delta = std::log(1.0 / plan.delta_each);

    // edge pipeline
    plan.prefilter_gap = options.task == LttTask::Independence
                             ? eps / (bounds.beta * std::pow(n_d, plan.tau))
                             : eps / (2.0 * bounds.beta * std::pow(n_d, plan.tau));
    plan.prefilter_k = config.ltt_prefilter
                           ? ceil_count(config.c_pre * log_n(n) * 4.0 /
                                        (plan.prefilter_gap * plan.prefilter_gap))
                           : 0;
    plan.weaklearn_k = weak_learn_sample_count(n, plan.tau, eps / shape.scale, config.c_wl);
    plan.threshold = config.c_thr * shape.signal_factor * eps /
                     (4.0 * shape.scale * std::pow(n_d, 2.0 - plan.tau));
    plan.chebyshev_blocks = odd_blocks(3.0 * log_inv_delta);
    const double var_edge = shape.variance_bound * std::pow(n_d, s_exp) *
                            (shape.stat == LttStatistic::PairCentered ? 4.0 : 1.0);
    plan.chebyshev_k = plan.chebyshev_blocks *
                       ceil_count(config.c_ch * 4.0 * var_edge / (plan.threshold * plan.threshold));

    if (node_phase) {
        plan.prefilter_node_gap = eps / (2.0 * bounds.h * std::pow(n_d, plan.tau_node));
        plan.prefilter_node_k =
            config.ltt_prefilter
                ? ceil_count(config.c_pre * log_n(n) * 4.0 /
                             (plan.prefilter_node_gap * plan.prefilter_node_gap))
                : 0;
        plan.weaklearn_node_k =
            weak_learn_sample_count(n, plan.tau_node, eps / (2.0 * bounds.h), config.c_wl);
        plan.threshold_node = config.c_thr * eps /
                              (4.0 * 2.0 * bounds.h * std::pow(n_d, 1.0 - plan.tau_node));
        plan.chebyshev_node_blocks = odd_blocks(3.0 * log_inv_delta);
        plan.chebyshev_node_k =
            plan.chebyshev_node_blocks *
            ceil_count(config.c_ch * 4.0 * n_d / (plan.threshold_node * plan.threshold_node));
    }

    if (config.budget > 0) {
        const long long total = plan.prefilter_k + plan.prefilter_node_k +
                                plan.reps * plan.weaklearn_k * shape.rows_per_eval +
                                plan.reps_node * plan.weaklearn_node_k +
                                plan.chebyshev_k * shape.rows_per_eval + plan.chebyshev_node_k;
        const double f = static_cast<double>(config.budget) / static_cast<double>(total);
        auto scaled = [&](long long x) {
            return x == 0 ? 0ll : std::max<long long>(1, static_cast<long long>(x * f));
        };
        plan.prefilter_k = scaled(plan.prefilter_k);
        plan.prefilter_node_k = scaled(plan.prefilter_node_k);
        plan.weaklearn_k = scaled(plan.weaklearn_k);
        plan.weaklearn_node_k = scaled(plan.weaklearn_node_k);
        plan.chebyshev_k = scaled(plan.chebyshev_k);
        plan.chebyshev_node_k = scaled(plan.chebyshev_node_k);
    }
    return plan;
}

namespace {

struct BlockMeans {
    std::vector<double> means;
    double median() {
        std::nth_element(means.begin(), means.begin() + means.size() / 2, means.end());
        return means[means.size() / 2];
    }
};

// Block means of the per-row statistic values; rows are split into `blocks`
// contiguous blocks of near-equal size.
template <class RowValue>
BlockMeans block_means(long long rows, int blocks, RowValue&& value) {
    BlockMeans out;
    out.means.reserve(blocks);
    long long start = 0;
    for (int b = 0; b < blocks; ++b) {
        const long long end = rows * (b + 1) / blocks;
        double sum = 0.0;
        for (long long i = start; i < end; ++i) sum += value(i);
        out.means.push_back(end > start ? sum / (end - start) : 0.0);
        start = end;
    }
    return out;
}

double reference_offset(const SignVector& signs, const MomentTable& ref) {
    double total = 0.0;
    std::size_t idx = 0;
    for (int u = 0; u < ref.n; ++u)
        for (int v = u + 1; v < ref.n; ++v, ++idx) total += signs.at(idx) * ref.edge[idx];
    return total;
}

ChebyshevOutcome chebyshev_pairs_packed(const PackedPairProducts& packed,
                                        const SignVector& signs, const ChebyshevSpec& spec) {
    const std::vector<std::uint64_t> neg = pack_sign_vector(signs);
    const std::size_t pairs = pair_count(packed.n);
    const double offset = spec.stat == LttStatistic::PairVsReference && spec.reference
                              ? reference_offset(signs, *spec.reference)
                              : 0.0;
    BlockMeans bm = block_means(packed.rows, spec.blocks, [&](long long i) {
        return packed_bilinear(packed, i, neg, pairs) - offset;
    });
    const double med = bm.median();
    return {med >= spec.threshold, med, spec.threshold};
}

ChebyshevOutcome chebyshev_centered_packed(const PackedCenteredProducts& packed,
                                           const SignVector& signs, const ChebyshevSpec& spec) {
    const std::vector<std::uint64_t> neg = pack_sign_vector(signs);
    BlockMeans bm = block_means(packed.rows, spec.blocks, [&](long long i) {
        return packed_centered_bilinear(packed, i, neg);
    });
    const double med = bm.median();
    return {med >= spec.threshold, med, spec.threshold};
}

ChebyshevOutcome chebyshev_nodes(const SampleBatch& batch, const SignVector& signs,
                                 const ChebyshevSpec& spec) {
    const int n = batch.n();
    BlockMeans bm = block_means(batch.k(), spec.blocks, [&](long long i) {
        const Spin* row = batch.row_ptr(i);
        double z = 0.0;
        for (int v = 0; v < n; ++v)
            z += signs.node(v) * (row[v] - (spec.reference ? spec.reference->node[v] : 0.0));
        return z;
    });
    const double med = bm.median();
    return {med >= spec.threshold, med, spec.threshold};
}

}  // namespace

ChebyshevOutcome chebyshev_decision(const SampleBatch& batch, const SignVector& signs,
                                    const ChebyshevSpec& spec) {
    switch (spec.stat) {
        case LttStatistic::PairProduct:
        case LttStatistic::PairVsReference: {
            const PackedPairProducts packed = pack_pair_products(batch);
            return chebyshev_pairs_packed(packed, signs, spec);
        }
        case LttStatistic::PairCentered: {
            const PackedCenteredProducts packed = pack_centered_products(batch);
            return chebyshev_centered_packed(packed, signs, spec);
        }
        case LttStatistic::NodeVsReference:
            return chebyshev_nodes(batch, signs, spec);
    }
    throw std::logic_error("chebyshev_decision: unknown statistic");
}

namespace {

const char* ltt_tag(const LttOptions& o) {
    if (o.task == LttTask::Independence)
        return o.field == FieldMode::ZeroField ? "ltt-independence-zero-field"
                                               : "ltt-independence-field";
    return o.field == FieldMode::ZeroField ? "ltt-identity-zero-field" : "ltt-identity-field";
}

Spin synthetic_rademacher(double marginal, Rng& rng) {
    return rng.uniform01() < 0.5 * (1.0 + marginal) ? Spin{1} : Spin{-1};
}

// Recentered observation: (x - y)/2 when the streams differ, 0 otherwise
// (zeros are coin-resolved downstream).
int recentered(Spin x, Spin y) { return x == y ? 0 : (x - y) / 2; }

}  // namespace

TestVerdict test_learn_then_test(SampleSource& source, const LttOptions& options,
                                 const TesterConfig& config, const PromisedBounds& bounds) {
    const int n = source.n();
    if (options.task == LttTask::Identity) {
        if (options.q == nullptr || options.q_moments == nullptr)
            throw std::invalid_argument("learn-then-test: identity mode requires q and its moments");
        if (options.q->n() != n || !options.q_moments->exact)
            throw std::invalid_argument("learn-then-test: q moments must be exact over n nodes");
    }
    const LttPlan plan = make_ltt_plan(n, options, config, bounds);
    TestVerdict v = start_verdict(ltt_tag(options), config);
    v.promise_unverified = true;  // high-temperature promise about p
    const long long before = source.samples_drawn();
    const MomentTable* ref = options.q_moments;
    const bool centered = options.task == LttTask::Independence &&
                          options.field == FieldMode::Field;

    // --- node pipeline (field identity only) ---
    if (options.task == LttTask::Identity && options.field == FieldMode::Field) {
        if (plan.prefilter_node_k > 0) {
            const SampleBatch batch = source.draw(plan.prefilter_node_k);
            const auto flags = flag_discrepant_nodes(batch, ref, plan.prefilter_node_gap);
            if (!flags.empty()) {
                v.reject = true;
                v.witness = worst_node(flags, plan.prefilter_node_gap / 2.0);
                finish(v, source, before);
                return v;
            }
        }
        std::vector<SignVector> gammas;
        gammas.reserve(plan.reps_node);
        for (long long rep = 0; rep < plan.reps_node; ++rep) {
            const SampleBatch batch = source.draw(plan.weaklearn_node_k);
            Rng rng(derive_seed(config.rng_seed, 0xa0, rep));
            const ObservationProvider provider = [&](std::size_t item, long long j) {
                const Spin x = batch.row_ptr(j)[item];
                const Spin y = synthetic_rademacher(ref->node[item], rng);
                return recentered(x, y);
            };
            SignVector signs = SignVector::for_nodes(n);
            const auto learned = weak_learn_signs(signs.size(), plan.weaklearn_node_k, provider, rng);
            for (std::size_t i = 0; i < learned.size(); ++i) signs.set(i, learned[i]);
            gammas.push_back(std::move(signs));
        }
        const SampleBatch decision = source.draw(plan.chebyshev_node_k);
        for (long long rep = 0; rep < plan.reps_node; ++rep) {
            ChebyshevSpec spec{LttStatistic::NodeVsReference, plan.threshold_node,
                               plan.chebyshev_node_blocks, ref};
            const ChebyshevOutcome out = chebyshev_decision(decision, gammas[rep], spec);
            if (out.reject) {
                v.reject = true;
                v.witness = Witness{Witness::Kind::Statistic, static_cast<int>(rep), -1,
                                    out.statistic, out.threshold};
                finish(v, source, before);
                return v;
            }
        }
    }

    // --- edge pipeline ---
    if (plan.prefilter_k > 0) {
        const SampleBatch batch = source.draw(plan.prefilter_k);
        const MomentTable* prefilter_ref = options.task == LttTask::Identity ? ref : nullptr;
        const auto flags = flag_discrepant_pairs(batch, prefilter_ref, plan.prefilter_gap);
        if (!flags.empty()) {
            v.reject = true;
            v.witness = worst_pair(flags, plan.prefilter_gap / 2.0);
            finish(v, source, before);
            return v;
        }
    }

    const std::size_t pairs = pair_count(n);
    // providers index items in pair_index order
    std::vector<std::pair<int, int>> pair_of;
    pair_of.reserve(pairs);
    for (int u = 0; u < n; ++u)
        for (int w = u + 1; w < n; ++w) pair_of.emplace_back(u, w);

    std::vector<SignVector> gammas;
    gammas.reserve(plan.reps);
    for (long long rep = 0; rep < plan.reps; ++rep) {
        const SampleBatch batch = source.draw(plan.weaklearn_k * (centered ? 2 : 1));
        Rng rng(derive_seed(config.rng_seed, 0xe0, rep));
        ObservationProvider provider;
        if (options.task == LttTask::Independence && !centered) {
            provider = [&](std::size_t item, long long j) {
                const Spin* row = batch.row_ptr(j);
                const auto [u, w] = pair_of[item];
                return static_cast<int>(row[u]) * row[w];
            };
        } else if (centered) {
            provider = [&](std::size_t item, long long j) {
                const Spin* a = batch.row_ptr(2 * j);
                const Spin* b = batch.row_ptr(2 * j + 1);
                const auto [u, w] = pair_of[item];
                return ((a[u] - b[u]) * (a[w] - b[w])) / 4;
            };
        } else {
            provider = [&](std::size_t item, long long j) {
                const Spin* row = batch.row_ptr(j);
                const auto [u, w] = pair_of[item];
                const Spin x = static_cast<Spin>(row[u] * row[w]);
                const Spin y = synthetic_rademacher(ref->edge[item], rng);
                return recentered(x, y);
            };
        }
        SignVector signs = SignVector::for_pairs(n);
        const auto learned = weak_learn_signs(pairs, plan.weaklearn_k, provider, rng);
        for (std::size_t i = 0; i < learned.size(); ++i) signs.set(i, learned[i]);
        gammas.push_back(std::move(signs));
    }

    const SampleBatch decision = source.draw(plan.chebyshev_k * (centered ? 2 : 1));
    const LttStatistic stat = centered ? LttStatistic::PairCentered
                              : options.task == LttTask::Identity
                                  ? LttStatistic::PairVsReference
                                  : LttStatistic::PairProduct;
    // pack once, score every learned sign vector against the same batch
    PackedPairProducts packed_plain;
    PackedCenteredProducts packed_centered;
    if (centered) {
        packed_centered = pack_centered_products(decision);
    } else {
        packed_plain = pack_pair_products(decision);
    }
    for (long long rep = 0; rep < plan.reps; ++rep) {
        ChebyshevSpec spec{stat, plan.threshold, plan.chebyshev_blocks, ref};
        const ChebyshevOutcome out =
            centered ? chebyshev_centered_packed(packed_centered, gammas[rep], spec)
                     : chebyshev_pairs_packed(packed_plain, gammas[rep], spec);
        if (out.reject) {
            v.reject = true;
            v.witness = Witness{Witness::Kind::Statistic, static_cast<int>(rep), -1,
                                out.statistic, out.threshold};
            finish(v, source, before);
            return v;
        }
    }
    finish(v, source, before);
    return v;
}

}  // namespace isingtest
