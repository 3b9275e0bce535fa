// Command-line front end: sampling, exact summaries, hypothesis tests,
// hard-instance generation and power experiments.
//
// Exit codes for `test`: 0 = accept, 1 = reject, 2 = error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "isingtest/experiment.hpp"
#include "isingtest/hard_instances.hpp"
#include "isingtest/io.hpp"
#include "isingtest/testers.hpp"

using namespace isingtest;
using nlohmann::json;

namespace {

// All options can also be set via one JSON config file; command-line flags
// override config values. The config is applied as defaults before parsing.
json load_config_from_argv(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) throw std::runtime_error(std::string("cannot open ") + argv[i + 1]);
            json j;
            in >> j;
            return j;
        }
    }
    return json::object();
}

template <typename T>
void from_config(const json& cfg, const char* key, T& field) {
    if (cfg.contains(key)) field = cfg[key].get<T>();
}

struct Options {
    std::string config_path;
    std::string model_path;
    std::string q_path;
    std::string out;
    std::string tester = "loc-ind";
    std::string family = "random-matching";
    std::string sampler = "auto";
    std::string spec_path;
    long long k = 1000;
    double eps = 0.1;
    std::uint64_t seed = 1;
    double beta = 0.0;
    double h = 0.0;
    long long m = 0;
    int dmax = 0;
    int n = 12;
    long long budget_override = 0;
    double burn = 10.0;
    double thin = 2.0;
    int chains = 1;
    bool timings = false;
    bool no_prefilter = false;
    TesterConfig tester_config;
};

std::unique_ptr<SampleSource> make_cli_source(const Options& opt, const IsingModel& model) {
    const bool exact =
        opt.sampler == "exact" || (opt.sampler == "auto" && model.n() <= kEnumerationCutoff);
    if (exact) return std::make_unique<ExactSampleSource>(model, opt.seed);
    GlauberConfig g{opt.burn, opt.thin, opt.chains};
    return std::make_unique<GlauberSampleSource>(model, g, opt.seed);
}

int run_sample(const Options& opt) {
    const IsingModel model = parse_model(opt.model_path);
    SampleBatch batch;
    if (opt.sampler == "exact" || (opt.sampler == "auto" && model.n() <= kEnumerationCutoff)) {
        batch = exact_draw(model, opt.k, opt.seed);
    } else {
        GlauberConfig g{opt.burn, opt.thin, opt.chains};
        batch = glauber_draw(model, opt.k, g, opt.seed);
        if (!batch.meta().dobrushin_ok)
            std::cerr << "warning: model is outside the high-temperature regime; "
                         "samples may mix slowly\n";
    }
    write_sample_batch(batch, opt.out.empty() ? "samples.csv" : opt.out);
    return 0;
}

int run_exact(const Options& opt) {
    const IsingModel model = parse_model(opt.model_path);
    const ExactSummary summary = exact_summary(model);
    const std::string text = summary_to_json(summary, model);
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(opt.out, std::ios::binary);
        f << text;
    }
    return 0;
}

int run_test(const Options& opt) {
    const IsingModel model = parse_model(opt.model_path);
    TesterConfig config = opt.tester_config;
    config.epsilon = opt.eps;
    config.rng_seed = opt.seed;
    config.budget = opt.budget_override;
    config.ltt_prefilter = !opt.no_prefilter;
    PromisedBounds bounds{opt.beta, opt.h, opt.m, opt.dmax};
    std::unique_ptr<IsingModel> q;
    if (!opt.q_path.empty()) q = std::make_unique<IsingModel>(parse_model(opt.q_path));

    auto source = make_cli_source(opt, model);
    if (bounds.beta == 0.0)
        bounds.beta = std::max(model.max_edge_weight(), q ? q->max_edge_weight() : 0.0);
    if (bounds.h == 0.0)
        bounds.h = std::max(model.max_node_weight(), q ? q->max_node_weight() : 0.0);

    TestVerdict verdict;
    if (opt.tester == "loc-ind") {
        verdict = test_independence_localization(*source, config, bounds);
    } else if (opt.tester == "forest-ind") {
        verdict = test_independence_forest(*source, config);
    } else if (opt.tester == "ferro-ind") {
        verdict = test_independence_ferro(*source, config, bounds);
    } else if (opt.tester == "ltt-ind") {
        const bool zero_field = model.max_node_weight() == 0.0 && opt.h == 0.0;
        LttOptions o{LttTask::Independence,
                     zero_field ? FieldMode::ZeroField : FieldMode::Field, nullptr, nullptr};
        verdict = test_learn_then_test(*source, o, config, bounds);
    } else if (opt.tester == "loc-id" || opt.tester == "forest-id" || opt.tester == "ltt-id") {
        if (!q) throw std::runtime_error("identity testers require --q");
        if (opt.tester == "forest-id") {
            verdict = test_identity_forest(*source, *q, config);
        } else {
            const MomentTable qm = exact_moments(*q);
            if (opt.tester == "loc-id") {
                verdict = test_identity_localization(*source, *q, qm, config, bounds);
            } else {
                const bool zero_field = classify_model(*q).is_zero_field;
                LttOptions o{LttTask::Identity,
                             zero_field ? FieldMode::ZeroField : FieldMode::Field, q.get(), &qm};
                verdict = test_learn_then_test(*source, o, config, bounds);
            }
        }
    } else {
        throw std::runtime_error("unknown tester " + opt.tester);
    }

    const std::string text = verdict_to_json(verdict, config);
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(opt.out, std::ios::binary);
        f << text;
    }
    return verdict.reject ? 1 : 0;
}

int run_make_instance(const Options& opt) {
    HardInstance instance{IsingModel(1), "", 0.0, 0.0};
    if (opt.family == "random-matching") {
        instance = make_random_matching(opt.n, opt.eps, opt.seed);
    } else if (opt.family == "product-perturbation") {
        instance = make_product_perturbation(opt.n, opt.eps, opt.seed);
    } else if (opt.family == "two-node-beta-independence" ||
               opt.family == "two-node-beta-identity" || opt.family == "two-node-h-identity") {
        TwoNodeMode mode = TwoNodeMode::BetaIndependence;
        if (opt.family == "two-node-beta-identity") mode = TwoNodeMode::BetaIdentity;
        if (opt.family == "two-node-h-identity") mode = TwoNodeMode::HIdentity;
        const TwoNodePair pair = make_two_node_pair(
            mode, mode == TwoNodeMode::HIdentity ? opt.h : opt.beta, opt.eps);
        const std::string prefix = opt.out.empty() ? "instance" : opt.out;
        serialize_model(pair.p, prefix + ".p.json");
        serialize_model(pair.q, prefix + ".q.json");
        json side{{"family", opt.family},
                  {"tau", pair.tau},
                  {"certified_skl", pair.certified_skl}};
        std::ofstream f(prefix + ".meta.json", std::ios::binary);
        f << side.dump(2) << "\n";
        return 0;
    } else {
        throw std::runtime_error("unknown family " + opt.family);
    }
    write_instance(instance, opt.out.empty() ? "instance" : opt.out);
    return 0;
}

int run_experiment(const Options& opt) {
    ExperimentSpec spec = parse_experiment_spec(opt.spec_path);
    if (!opt.out.empty()) spec.out = opt.out;
    if (opt.timings) spec.timings = true;
    const ExperimentReport report = run_trials(spec);
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "wrote " << spec.out << " and " << spec.out << ".power.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    try {
        const json cfg = load_config_from_argv(argc, argv);
        from_config(cfg, "model", opt.model_path);
        from_config(cfg, "q", opt.q_path);
        from_config(cfg, "out", opt.out);
        from_config(cfg, "tester", opt.tester);
        from_config(cfg, "family", opt.family);
        from_config(cfg, "sampler", opt.sampler);
        from_config(cfg, "spec", opt.spec_path);
        from_config(cfg, "k", opt.k);
        from_config(cfg, "eps", opt.eps);
        from_config(cfg, "seed", opt.seed);
        from_config(cfg, "beta", opt.beta);
        from_config(cfg, "h", opt.h);
        from_config(cfg, "m", opt.m);
        from_config(cfg, "dmax", opt.dmax);
        from_config(cfg, "n", opt.n);
        from_config(cfg, "budget-override", opt.budget_override);
        from_config(cfg, "burn", opt.burn);
        from_config(cfg, "thin", opt.thin);
        from_config(cfg, "chains", opt.chains);
        from_config(cfg, "c_loc", opt.tester_config.c_loc);
        from_config(cfg, "c_f", opt.tester_config.c_f);
        from_config(cfg, "c_pre", opt.tester_config.c_pre);
        from_config(cfg, "c_wl", opt.tester_config.c_wl);
        from_config(cfg, "c_rep", opt.tester_config.c_rep);
        from_config(cfg, "c_ch", opt.tester_config.c_ch);
        from_config(cfg, "c_thr", opt.tester_config.c_thr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"Statistical hypothesis testing on Ising models"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    std::string config_dummy;
    app.add_option("--config", config_dummy, "JSON config file; flags override its values");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", opt.seed, "RNG seed");
        sub->add_option("--out", opt.out, "output path");
        sub->add_option("--config", config_dummy, "JSON config file");
    };

    CLI::App* sample = app.add_subcommand("sample", "draw samples from a model");
    sample->add_option("--model", opt.model_path, "model JSON")->required();
    sample->add_option("--k", opt.k, "sample count");
    sample->add_option("--sampler", opt.sampler, "auto|exact|glauber");
    sample->add_option("--burn", opt.burn, "burn-in multiplier");
    sample->add_option("--thin", opt.thin, "thinning multiplier");
    sample->add_option("--chains", opt.chains, "chain count");
    add_common(sample);

    CLI::App* exact = app.add_subcommand("exact", "exact summary by enumeration");
    exact->add_option("--model", opt.model_path, "model JSON")->required();
    add_common(exact);

    CLI::App* test = app.add_subcommand("test", "run a hypothesis tester");
    test->add_option("--tester", opt.tester,
                     "loc-ind|loc-id|forest-ind|forest-id|ferro-ind|ltt-ind|ltt-id");
    test->add_option("--model", opt.model_path, "model JSON (sampled model p)")->required();
    test->add_option("--q", opt.q_path, "identity target model JSON");
    test->add_option("--eps", opt.eps, "SKL distance threshold");
    test->add_option("--beta", opt.beta, "promised edge-parameter bound");
    test->add_option("--hmax", opt.h, "promised node-parameter bound");
    test->add_option("--m", opt.m, "promised edge-count bound");
    test->add_option("--dmax", opt.dmax, "promised maximum degree");
    test->add_option("--k,--budget-override", opt.budget_override,
                     "explicit sample budget overriding the formulas");
    test->add_option("--sampler", opt.sampler, "auto|exact|glauber");
    test->add_option("--burn", opt.burn, "burn-in multiplier");
    test->add_option("--thin", opt.thin, "thinning multiplier");
    test->add_flag("--no-prefilter", opt.no_prefilter, "disable the learn-then-test prefilter");
    add_common(test);

    CLI::App* make = app.add_subcommand("make-instance", "generate a hard instance");
    make->add_option("--family", opt.family,
                     "random-matching|product-perturbation|two-node-beta-independence|"
                     "two-node-beta-identity|two-node-h-identity");
    make->add_option("--n", opt.n, "node count");
    make->add_option("--eps", opt.eps, "target SKL distance");
    make->add_option("--beta", opt.beta, "edge parameter (two-node families)");
    make->add_option("--hmax", opt.h, "node parameter (two-node-h-identity)");
    add_common(make);

    CLI::App* experiment = app.add_subcommand("experiment", "run a power-study grid");
    experiment->add_option("--spec", opt.spec_path, "experiment spec JSON")->required();
    experiment->add_flag("--timings", opt.timings,
                         "record wall time per trial (breaks byte-reproducibility)");
    add_common(experiment);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return run_sample(opt);
        if (exact->parsed()) return run_exact(opt);
        if (test->parsed()) return run_test(opt);
        if (make->parsed()) return run_make_instance(opt);
        if (experiment->parsed()) return run_experiment(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
