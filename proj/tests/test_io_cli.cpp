#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "isingtest/experiment.hpp"
#include "isingtest/hard_instances.hpp"
#include "isingtest/io.hpp"
#include "isingtest/sampling.hpp"

using namespace isingtest;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& name) { return "/tmp/isingtest_" + name; }

}  // namespace

TEST_CASE("model JSON round trip") {
    const IsingModel m(4, {0.1, 0.0, -0.25, 0.0}, {{0, 2, 0.5}, {1, 3, -0.125}});
    const std::string path = tmp_path("model.json");
    serialize_model(m, path);
    const IsingModel back = parse_model(path);
    CHECK(back.same_parameters(m));
}

TEST_CASE("model JSON validation") {
    CHECK_THROWS_AS(parse_model_json(R"({"n": 2, "edges": [[1, 1, 0.5]]})"), std::runtime_error);
    CHECK_THROWS_AS(parse_model_json(R"({"n": 2, "edges": [[1, 0, 0.5]]})"), std::runtime_error);
    CHECK_THROWS_AS(parse_model_json(R"({"n": 2, "edges": [[0, 1, 0.5], [0, 1, 0.5]]})"),
                    std::runtime_error);
    CHECK_THROWS_AS(parse_model_json(R"({"n": 2, "edges": [[0, 5, 0.5]]})"), std::runtime_error);
    CHECK_THROWS_AS(parse_model_json(R"({"edges": []})"), std::runtime_error);
    CHECK_THROWS_AS(parse_model_json(R"({"n": 3, "node_theta": [0.0]})"), std::runtime_error);
    const IsingModel ok = parse_model_json(R"({"n": 2, "edges": [[0, 1, 0.5]]})");
    CHECK(ok.edge_theta(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("sample batch round trip") {
    const IsingModel m(3, {0.0, 0.2, 0.0}, {{0, 1, 0.4}});
    const SampleBatch batch = exact_draw(m, 200, 9);
    const std::string path = tmp_path("batch.csv");
    write_sample_batch(batch, path);
    const SampleBatch back = read_sample_batch(path);
    CHECK(back.raw() == batch.raw());
    CHECK(back.meta().sampler == "exact");
    CHECK(back.meta().seed == 9);
}

TEST_CASE("instance files carry the certification sidecar") {
    const HardInstance inst = make_random_matching(6, 0.12, 3);
    const std::string prefix = tmp_path("instance");
    write_instance(inst, prefix);
    const std::string meta = slurp(prefix + ".meta.json");
    CHECK(meta.find("random-matching") != std::string::npos);
    CHECK(meta.find("certified_skl") != std::string::npos);
    const IsingModel back = parse_model(prefix + ".json");
    CHECK(back.same_parameters(inst.model));
}

TEST_CASE("experiment runs are deterministic and power is monotone") {
    const std::string out1 = tmp_path("exp1.csv");
    const std::string out2 = tmp_path("exp2.csv");
    ExperimentSpec spec;
    spec.tester = "loc-ind";
    spec.family = "random-matching";
    spec.n = 8;
    spec.eps = 0.0;  // certified/2 per instance
    spec.instances = 2;
    spec.budgets = {50, 400, 3000};
    spec.trials = 25;
    spec.seed = 11;
    spec.out = out1;
    const ExperimentReport r1 = run_trials(spec);
    spec.out = out2;
    run_trials(spec);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(out1 + ".power.csv") == slurp(out2 + ".power.csv"));

    // reject rate never decreases along the budget ladder, per instance
    for (int i = 0; i < spec.instances; ++i) {
        const std::string label = "random-matching-" + std::to_string(i);
        double prev = -1.0;
        for (const long long b : spec.budgets) {
            const double rate = r1.cells.at({label, b}).reject_rate;
            CHECK(rate >= prev);
            prev = rate;
        }
    }

    ExperimentSpec bad = spec;
    bad.budgets = {100, 100};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("experiment spec JSON parsing") {
    const ExperimentSpec spec = parse_experiment_spec_json(R"({
        "tester": "forest-ind", "family": "path", "n": 10, "theta": 0.25,
        "budgets": [100, 200], "trials": 5, "seed": 3, "out": "x.csv",
        "c_f": 12.5, "ltt_prefilter": false
    })");
    CHECK(spec.tester == "forest-ind");
    CHECK(spec.n == 10);
    CHECK(spec.theta == doctest::Approx(0.25));
    CHECK(spec.tester_config.c_f == doctest::Approx(12.5));
    CHECK_FALSE(spec.tester_config.ltt_prefilter);
}

#ifdef ISING_CLI_PATH
TEST_CASE("command line round trip") {
    const std::string cli = ISING_CLI_PATH;
    const std::string dir = tmp_path("cli");
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

    // make-instance then exact then test; exit code 1 = reject
    REQUIRE(std::system((cli + " make-instance --family random-matching --n 8 --eps 0.4"
                              " --seed 4 --out " + dir + "/inst >/dev/null 2>&1").c_str()) == 0);
    REQUIRE(std::system((cli + " exact --model " + dir + "/inst.json --out " + dir +
                         "/summary.json >/dev/null 2>&1").c_str()) == 0);
    const std::string summary = slurp(dir + "/summary.json");
    CHECK(summary.find("\"is_forest\": true") != std::string::npos);

    const int reject_code = std::system((cli + " test --tester loc-ind --model " + dir +
                                         "/inst.json --eps 0.2 --seed 5 --m 4 --out " + dir +
                                         "/verdict.json 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(reject_code) == 1);
    CHECK(slurp(dir + "/verdict.json").find("\"decision\": \"reject\"") != std::string::npos);

    // uniform null accepts (exit 0)
    std::ofstream um(dir + "/uniform.json");
    um << R"({"n": 8, "node_theta": [0,0,0,0,0,0,0,0], "edges": []})";
    um.close();
    const int accept_code = std::system((cli + " test --tester loc-ind --model " + dir +
                                         "/uniform.json --eps 0.2 --beta 0.4 --m 4 --seed 5"
                                         " >/dev/null 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(accept_code) == 0);

    // sampling writes the CSV and the metadata sidecar
    REQUIRE(std::system((cli + " sample --model " + dir + "/inst.json --k 50 --seed 6 --out " +
                         dir + "/s.csv >/dev/null 2>&1").c_str()) == 0);
    CHECK(slurp(dir + "/s.csv.meta.json").find("\"sampler\": \"exact\"") != std::string::npos);

    // config file supplies defaults, flags override
    std::ofstream cfg(dir + "/config.json");
    cfg << R"({"eps": 0.2, "m": 4, "beta": 0.4})";
    cfg.close();
    const int cfg_code = std::system((cli + " test --tester loc-ind --model " + dir +
                                      "/uniform.json --config " + dir + "/config.json --seed 7"
                                      " >/dev/null 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(cfg_code) == 0);

    // malformed model file: exit 2
    std::ofstream bad(dir + "/bad.json");
    bad << R"({"n": 2, "edges": [[0, 0, 1.0]]})";
    bad.close();
    const int bad_code = std::system((cli + " exact --model " + dir +
                                      "/bad.json >/dev/null 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(bad_code) == 2);
}
#endif
