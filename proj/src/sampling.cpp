#include "isingtest/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isingtest/exact.hpp"

namespace isingtest {

SampleBatch SampleBatch::negated() const {
    SampleBatch out = *this;
    for (Spin& s : out.spins_) s = -s;
    return out;
}

long long GlauberConfig::burn_in_steps(int n) const {
    return static_cast<long long>(
        std::ceil(burn_in_multiplier * n * std::log(std::max(n, 2))));
}

long long GlauberConfig::thinning_steps(int n) const {
    return std::max<long long>(
        1, static_cast<long long>(std::ceil(thinning_multiplier * n * std::log(std::max(n, 2)))));
}

namespace {

std::vector<double> cumulative_weights(const IsingModel& model) {
    const StateWeights sw = state_log_weights(model);
    std::vector<double> cum(sw.log_prob.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < sw.log_prob.size(); ++i) {
        acc += std::exp(sw.log_prob[i]);
        cum[i] = acc;
    }
    return cum;
}

void draw_from_table(const std::vector<double>& cum, int n, long long k, Rng& rng,
                     SampleBatch& out, long long first_row) {
    const double total = cum.back();
    for (long long i = 0; i < k; ++i) {
        const double u = rng.uniform01() * total;
        const auto it = std::lower_bound(cum.begin(), cum.end(), u);
        const std::uint32_t bits =
            static_cast<std::uint32_t>(std::min<std::size_t>(it - cum.begin(), cum.size() - 1));
        Spin* row = out.mutable_row(first_row + i);
        for (int v = 0; v < n; ++v) row[v] = (bits >> v) & 1 ? Spin{1} : Spin{-1};
    }
}

}  // namespace

SampleBatch exact_draw(const IsingModel& model, long long k, std::uint64_t seed) {
    const std::vector<double> cum = cumulative_weights(model);
    SampleBatch batch(model.n(), k);
    Rng rng(derive_seed(seed, 0));
    draw_from_table(cum, model.n(), k, rng, batch, 0);
    batch.meta() = {"exact", seed, 0, 0, 1, true};
    return batch;
}

void glauber_step(const IsingModel& model, SpinConfiguration& x, Rng& rng) {
    const int u = rng.uniform_int(model.n());
    double local = model.node_theta(u);
    for (const auto& [v, theta] : model.neighbors(u)) local += theta * x[v];
    const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * local));
    x[u] = rng.uniform01() < p_plus ? Spin{1} : Spin{-1};
}

namespace {

void random_spins(SpinConfiguration& x, Rng& rng) {
    for (Spin& s : x) s = rng.random_spin();
}

}  // namespace

SampleBatch glauber_draw(const IsingModel& model, long long k, const GlauberConfig& config,
                         std::uint64_t seed) {
    if (config.burn_in_multiplier <= 0 || config.thinning_multiplier <= 0 || config.chains < 1)
        throw std::invalid_argument("glauber_draw: invalid configuration");
    const int n = model.n();
    const long long burn = config.burn_in_steps(n);
    const long long thin = config.thinning_steps(n);
    SampleBatch batch(n, k);
    long long row = 0;
    for (int chain = 0; chain < config.chains; ++chain) {
        long long mine = k / config.chains + (chain < k % config.chains ? 1 : 0);
        if (mine == 0) continue;
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(chain)));
        SpinConfiguration x(n);
        random_spins(x, rng);
        for (long long s = 0; s < burn; ++s) glauber_step(model, x, rng);
        for (long long i = 0; i < mine; ++i) {
            for (long long s = 0; s < thin; ++s) glauber_step(model, x, rng);
            std::copy(x.begin(), x.end(), batch.mutable_row(row++));
        }
    }
    batch.meta() = {"glauber", seed, burn, thin, config.chains,
                    dobrushin_influence(model) < 1.0};
    return batch;
}

std::vector<double> glauber_transition_matrix(const IsingModel& model) {
    const int n = model.n();
    if (n > 8) throw std::runtime_error("glauber_transition_matrix: guarded to n <= 8");
    const std::size_t states = std::size_t{1} << n;
    std::vector<double> P(states * states, 0.0);
    for (std::uint32_t s = 0; s < states; ++s) {
        const SpinConfiguration x = decode_state(s, n);
        double stay = 0.0;
        for (int u = 0; u < n; ++u) {
            double local = model.node_theta(u);
            for (const auto& [v, theta] : model.neighbors(u)) local += theta * x[v];
            const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * local));
            const double p_keep = x[u] > 0 ? p_plus : 1.0 - p_plus;
            const std::uint32_t flipped = s ^ (std::uint32_t{1} << u);
            P[s * states + flipped] += (1.0 - p_keep) / n;
            stay += p_keep / n;
        }
        P[s * states + s] += stay;
    }
    return P;
}

ExactSampleSource::ExactSampleSource(const IsingModel& model, std::uint64_t seed)
    : model_(model), rng_(derive_seed(seed, 0)), seed_(seed) {}

SampleBatch ExactSampleSource::draw(long long k) {
    if (cumulative_.empty()) cumulative_ = cumulative_weights(model_);
    SampleBatch batch(model_.n(), k);
    draw_from_table(cumulative_, model_.n(), k, rng_, batch, 0);
    batch.meta() = {"exact", seed_, 0, 0, 1, true};
    drawn_ += k;
    return batch;
}

GlauberSampleSource::GlauberSampleSource(const IsingModel& model, const GlauberConfig& config,
                                         std::uint64_t seed)
    : model_(model), config_(config), rng_(derive_seed(seed, 0)), seed_(seed),
      state_(model.n()) {}

SampleBatch GlauberSampleSource::draw(long long k) {
    const int n = model_.n();
    if (!burned_in_) {
        random_spins(state_, rng_);
        const long long burn = config_.burn_in_steps(n);
        for (long long s = 0; s < burn; ++s) glauber_step(model_, state_, rng_);
        burned_in_ = true;
    }
    const long long thin = config_.thinning_steps(n);
    SampleBatch batch(n, k);
    for (long long i = 0; i < k; ++i) {
        for (long long s = 0; s < thin; ++s) glauber_step(model_, state_, rng_);
        std::copy(state_.begin(), state_.end(), batch.mutable_row(i));
    }
    batch.meta() = {"glauber", seed_, config_.burn_in_steps(n), thin, 1,
                    dobrushin_influence(model_) < 1.0};
    drawn_ += k;
    return batch;
}

SampleBatch ReplaySource::draw(long long k) {
    if (cursor_ + k > batch_.k()) throw std::runtime_error("ReplaySource: batch exhausted");
    SampleBatch out(batch_.n(), k);
    std::copy(batch_.row_ptr(cursor_), batch_.row_ptr(cursor_) + k * batch_.n(),
              out.mutable_row(0));
    out.meta() = batch_.meta();
    cursor_ += k;
    return out;
}

}  // namespace isingtest
