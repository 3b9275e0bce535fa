#include "isingtest/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "isingtest/exact.hpp"
#include "isingtest/hard_instances.hpp"
#include "isingtest/io.hpp"
#include "isingtest/testers.hpp"

namespace isingtest {

using nlohmann::json;

void ExperimentSpec::validate() const {
    if (trials < 1) throw std::invalid_argument("experiment: trials >= 1 required");
    if (budgets.empty()) throw std::invalid_argument("experiment: at least one budget required");
    for (std::size_t i = 1; i < budgets.size(); ++i)
        if (budgets[i] <= budgets[i - 1])
            throw std::invalid_argument("experiment: budgets must be strictly increasing");
    if (instances < 1) throw std::invalid_argument("experiment: instances >= 1 required");
}

ExperimentSpec parse_experiment_spec_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentSpec s;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("tester", s.tester);
    get("family", s.family);
    get("model", s.model_path);
    get("q", s.q_path);
    get("n", s.n);
    get("eps", s.eps);
    get("theta", s.theta);
    get("instances", s.instances);
    get("budgets", s.budgets);
    get("trials", s.trials);
    get("seed", s.seed);
    get("out", s.out);
    get("sampler", s.sampler);
    get("burn_in_multiplier", s.burn_in_multiplier);
    get("thinning_multiplier", s.thinning_multiplier);
    get("timings", s.timings);
    get("beta", s.bounds.beta);
    get("h", s.bounds.h);
    get("m", s.bounds.m);
    get("dmax", s.bounds.d_max);
    auto getc = [&](const char* key, double& field) {
        if (j.contains(key)) field = j[key].get<double>();
    };
    getc("c_loc", s.tester_config.c_loc);
    getc("c_f", s.tester_config.c_f);
    getc("c_pre", s.tester_config.c_pre);
    getc("c_wl", s.tester_config.c_wl);
    getc("c_rep", s.tester_config.c_rep);
    getc("c_ch", s.tester_config.c_ch);
    getc("c_thr", s.tester_config.c_thr);
    getc("fail_prob", s.tester_config.fail_prob);
    if (j.contains("ltt_prefilter")) s.tester_config.ltt_prefilter = j["ltt_prefilter"].get<bool>();
    return s;
}

ExperimentSpec parse_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_spec_json(ss.str());
}

namespace {

struct Instance {
    std::string label;
    IsingModel model{1};
    std::unique_ptr<IsingModel> q;  // identity target; null = uniform
    double certified_skl = 0.0;
    double eps = 0.0;
    PromisedBounds bounds;
};

IsingModel dense_alternating(int n) {
    std::vector<Edge> edges;
    const double theta = 1.0 / (4.0 * n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            edges.push_back({u, v, (u + v) % 2 == 0 ? theta : -theta});
    return IsingModel(n, std::vector<double>(n, 0.0), edges);
}

IsingModel path_graph(int n, double theta) {
    std::vector<Edge> edges;
    for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, theta});
    return IsingModel(n, std::vector<double>(n, 0.0), edges);
}

double certified_gap_from_uniform(const IsingModel& model) {
    if (model.n() > kEnumerationCutoff) return 0.0;
    return skl_independence_gap(model, exact_summary(model));
}

std::vector<Instance> realize_instances(const ExperimentSpec& spec,
                                        std::vector<std::string>& warnings) {
    std::vector<Instance> out;
    const bool identity = spec.tester == "loc-id" || spec.tester == "forest-id" ||
                          spec.tester == "ltt-id";
    for (int i = 0; i < spec.instances; ++i) {
        Instance inst;
        inst.label = spec.family + "-" + std::to_string(i);
        const std::uint64_t seed = derive_seed(spec.seed, 0x1157, i);
        if (spec.family == "uniform") {
            inst.model = IsingModel::uniform(spec.n);
            inst.certified_skl = 0.0;
        } else if (spec.family == "random-matching") {
            const double target = spec.eps > 0.0 ? spec.eps : 0.01 * spec.n;
            HardInstance hi = make_random_matching(spec.n, target, seed);
            inst.model = hi.model;
            inst.certified_skl = hi.certified_skl;
        } else if (spec.family == "product-perturbation") {
            const double target = spec.eps > 0.0 ? spec.eps : 0.01 * spec.n;
            HardInstance hi = make_product_perturbation(spec.n, target, seed);
            inst.model = hi.model;
            inst.certified_skl = hi.certified_skl;
        } else if (spec.family == "dense-alternating") {
            inst.model = dense_alternating(spec.n);
            inst.certified_skl = certified_gap_from_uniform(inst.model);
        } else if (spec.family == "path") {
            inst.model = path_graph(spec.n, spec.theta);
            inst.certified_skl = certified_gap_from_uniform(inst.model);
        } else if (spec.family == "model-file") {
            inst.model = parse_model(spec.model_path);
            inst.certified_skl = 0.0;
        } else {
            throw std::invalid_argument("experiment: unknown family " + spec.family);
        }
        inst.eps = spec.eps > 0.0 ? spec.eps
                   : inst.certified_skl > 0.0 ? inst.certified_skl / 2.0
                                              : 0.1;
        if (identity) {
            if (!spec.q_path.empty())
                inst.q = std::make_unique<IsingModel>(parse_model(spec.q_path));
            else
                inst.q = std::make_unique<IsingModel>(IsingModel::uniform(spec.n));
        }
        inst.bounds = spec.bounds;
        if (inst.bounds.beta == 0.0)
            inst.bounds.beta = std::max(inst.model.max_edge_weight(),
                                        inst.q ? inst.q->max_edge_weight() : 0.0);
        if (inst.bounds.h == 0.0)
            inst.bounds.h = std::max(inst.model.max_node_weight(),
                                     inst.q ? inst.q->max_node_weight() : 0.0);
        if (inst.bounds.m == 0)
            inst.bounds.m = std::max<long long>(inst.model.edge_count(),
                                                inst.q ? inst.q->edge_count() : 0);

        // promise screening, reported per cell but not fatal
        const ModelClass c = classify_model(inst.model);
        if (spec.tester == "forest-ind" || spec.tester == "forest-id") {
            if (!c.is_forest || !c.is_zero_field)
                warnings.push_back(inst.label + ": model violates the forest/zero-field promise");
        }
        if (spec.tester == "ferro-ind" && (!c.is_ferromagnetic || !c.is_zero_field))
            warnings.push_back(inst.label + ": model violates the ferromagnet promise");
        out.push_back(std::move(inst));
    }
    return out;
}

std::unique_ptr<SampleSource> make_source(const ExperimentSpec& spec, const IsingModel& model,
                                          std::uint64_t seed) {
    const bool exact = spec.sampler == "exact" ||
                       (spec.sampler == "auto" && model.n() <= kEnumerationCutoff);
    if (exact) return std::make_unique<ExactSampleSource>(model, seed);
    GlauberConfig g;
    g.burn_in_multiplier = spec.burn_in_multiplier;
    g.thinning_multiplier = spec.thinning_multiplier;
    return std::make_unique<GlauberSampleSource>(model, g, seed);
}

TestVerdict dispatch(const ExperimentSpec& spec, const Instance& inst, SampleSource& source,
                     const TesterConfig& config) {
    if (spec.tester == "loc-ind")
        return test_independence_localization(source, config, inst.bounds);
    if (spec.tester == "forest-ind") return test_independence_forest(source, config);
    if (spec.tester == "ferro-ind")
        return test_independence_ferro(source, config, inst.bounds);
    if (spec.tester == "loc-id" || spec.tester == "forest-id" || spec.tester == "ltt-id") {
        const IsingModel& q = *inst.q;
        if (spec.tester == "forest-id") return test_identity_forest(source, q, config);
        const MomentTable qm = exact_moments(q);
        if (spec.tester == "loc-id")
            return test_identity_localization(source, q, qm, config, inst.bounds);
        LttOptions opt{LttTask::Identity,
                       classify_model(q).is_zero_field ? FieldMode::ZeroField : FieldMode::Field,
                       &q, &qm};
        return test_learn_then_test(source, opt, config, inst.bounds);
    }
    if (spec.tester == "ltt-ind") {
        LttOptions opt{LttTask::Independence, FieldMode::ZeroField, nullptr, nullptr};
        return test_learn_then_test(source, opt, config, inst.bounds);
    }
    throw std::invalid_argument("experiment: unknown tester " + spec.tester);
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

ExperimentReport run_trials(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentReport report;
    const std::vector<Instance> instances = realize_instances(spec, report.warnings);

    std::ostringstream csv;
    csv << "schema=1\n";
    csv << "instance,family,n,budget,trial,decision,statistic,seed,ms\n";

    for (std::size_t ii = 0; ii < instances.size(); ++ii) {
        const Instance& inst = instances[ii];
        for (const long long budget : spec.budgets) {
            long long rejects = 0;
            double stat_sum = 0.0;
            long long wall_ms = 0;
            for (int trial = 0; trial < spec.trials; ++trial) {
                const std::uint64_t trial_seed = derive_seed(spec.seed, ii, budget, trial);
                TesterConfig config = spec.tester_config;
                config.epsilon = inst.eps;
                config.rng_seed = trial_seed;
                config.budget = budget;
                auto source = make_source(spec, inst.model, trial_seed);
                const auto t0 = std::chrono::steady_clock::now();
                const TestVerdict v = dispatch(spec, inst, *source, config);
                const auto t1 = std::chrono::steady_clock::now();
                const long long ms =
                    std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
                wall_ms += ms;
                rejects += v.reject ? 1 : 0;
                const double stat = v.witness ? v.witness->observed : 0.0;
                stat_sum += stat;
                csv << inst.label << ',' << spec.family << ',' << spec.n << ',' << budget << ','
                    << trial << ',' << (v.reject ? "reject" : "accept") << ','
                    << format_double(stat) << ',' << trial_seed << ','
                    << (spec.timings ? ms : 0) << '\n';
            }
            CellStats cell;
            cell.reject_rate = static_cast<double>(rejects) / spec.trials;
            cell.mean_statistic = stat_sum / spec.trials;
            cell.wall_time_ms = wall_ms;
            report.cells[{inst.label, budget}] = cell;
        }
    }

    std::ofstream out(spec.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + spec.out);
    out << csv.str();
    out.close();

    // power summary: smallest budget reaching 80% rejection per instance
    std::ostringstream power;
    power << "schema=1\n";
    power << "instance,family,n,dmax,budget80\n";
    for (std::size_t ii = 0; ii < instances.size(); ++ii) {
        const Instance& inst = instances[ii];
        long long budget80 = -1;
        for (const long long budget : spec.budgets) {
            const auto it = report.cells.find({inst.label, budget});
            if (it != report.cells.end() && it->second.reject_rate >= 0.8) {
                budget80 = budget;
                break;
            }
        }
        power << inst.label << ',' << spec.family << ',' << spec.n << ','
              << inst.model.max_degree() << ',' << budget80 << '\n';
    }
    std::ofstream pout(spec.out + ".power.csv", std::ios::binary);
    if (!pout) throw std::runtime_error("cannot write " + spec.out + ".power.csv");
    pout << power.str();
    return report;
}

}  // namespace isingtest
