#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "isingtest/model.hpp"
#include "isingtest/types.hpp"

namespace isingtest {

struct SampleMeta {
    std::string sampler;
    std::uint64_t seed = 0;
    long long burn_in_steps = 0;
    long long thinning_steps = 0;
    int chains = 1;
    bool dobrushin_ok = true;  // recorded warning, never an error
};

/// k spin configurations in {-1,+1}^n, row-major, plus generation metadata.
class SampleBatch {
public:
    SampleBatch() = default;
    SampleBatch(int n, long long k) : n_(n), k_(k), spins_(static_cast<std::size_t>(n) * k) {}

    int n() const { return n_; }
    long long k() const { return k_; }
    SpinView row(long long i) const { return {row_ptr(i), static_cast<std::size_t>(n_)}; }
    const Spin* row_ptr(long long i) const { return spins_.data() + i * n_; }
    Spin* mutable_row(long long i) { return spins_.data() + i * n_; }

    const SampleMeta& meta() const { return meta_; }
    SampleMeta& meta() { return meta_; }

    const std::vector<Spin>& raw() const { return spins_; }
    std::vector<Spin>& raw() { return spins_; }

    SampleBatch negated() const;

private:
    int n_ = 0;
    long long k_ = 0;
    std::vector<Spin> spins_;
    SampleMeta meta_;
};

struct GlauberConfig {
    double burn_in_multiplier = 10.0;  // steps = ceil(C * n * ln n)
    double thinning_multiplier = 2.0;  // steps between retained samples
    int chains = 1;

    long long burn_in_steps(int n) const;
    long long thinning_steps(int n) const;
};

/// k i.i.d. samples via the cumulative-probability table of the exact PMF and
/// binary search. Deterministic given the seed. n <= enumeration cutoff.
SampleBatch exact_draw(const IsingModel& model, long long k, std::uint64_t seed);

/// One single-site update: pick node u uniformly, resample X_u from its
/// conditional exp(th_u + sum_{v in N(u)} th_uv X_v) / (e^{+} + e^{-}).
void glauber_step(const IsingModel& model, SpinConfiguration& x, Rng& rng);

/// k samples collected across config.chains independent chains, each with its
/// own burn-in and thinning and a stream derived from (seed, chain index).
/// Non-high-temperature models are sampled anyway with meta.dobrushin_ok=false.
SampleBatch glauber_draw(const IsingModel& model, long long k, const GlauberConfig& config,
                         std::uint64_t seed);

/// Dense single-site transition matrix, row-major over 2^n states (bit v set
/// <=> spin +1). Guarded to n <= 8.
std::vector<double> glauber_transition_matrix(const IsingModel& model);

/// Pull-based sample stream shared by the testers and estimators.
class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual int n() const = 0;
    virtual SampleBatch draw(long long k) = 0;
    virtual long long samples_drawn() const = 0;
    virtual std::string describe() const = 0;
};

class ExactSampleSource final : public SampleSource {
public:
    ExactSampleSource(const IsingModel& model, std::uint64_t seed);
    int n() const override { return model_.n(); }
    SampleBatch draw(long long k) override;
    long long samples_drawn() const override { return drawn_; }
    std::string describe() const override { return "exact"; }

private:
    IsingModel model_;
    Rng rng_;
    std::uint64_t seed_;
    std::vector<double> cumulative_;  // built on first draw
    long long drawn_ = 0;
};

/// Single persistent chain: burn-in once, then one thinning interval per row.
class GlauberSampleSource final : public SampleSource {
public:
    GlauberSampleSource(const IsingModel& model, const GlauberConfig& config,
                        std::uint64_t seed);
    int n() const override { return model_.n(); }
    SampleBatch draw(long long k) override;
    long long samples_drawn() const override { return drawn_; }
    std::string describe() const override { return "glauber"; }

private:
    IsingModel model_;
    GlauberConfig config_;
    Rng rng_;
    std::uint64_t seed_;
    SpinConfiguration state_;
    bool burned_in_ = false;
    long long drawn_ = 0;
};

/// Replays a fixed batch; throws when exhausted. Used for budgeted reruns and
/// paired-batch tests.
class ReplaySource final : public SampleSource {
public:
    explicit ReplaySource(SampleBatch batch) : batch_(std::move(batch)) {}
    int n() const override { return batch_.n(); }
    SampleBatch draw(long long k) override;
    long long samples_drawn() const override { return cursor_; }
    std::string describe() const override { return "replay"; }

private:
    SampleBatch batch_;
    long long cursor_ = 0;
};

}  // namespace isingtest
