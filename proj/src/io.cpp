#include "isingtest/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace isingtest {

using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

IsingModel parse_model_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw std::runtime_error("model: missing integer field n");
    const int n = j["n"].get<int>();
    std::vector<double> node_theta(n, 0.0);
    if (j.contains("node_theta")) {
        const auto& nt = j["node_theta"];
        if (!nt.is_array() || static_cast<int>(nt.size()) != n)
            throw std::runtime_error("model: node_theta must be an array of length n");
        for (int v = 0; v < n; ++v) node_theta[v] = nt[v].get<double>();
    }
    std::vector<Edge> edges;
    if (j.contains("edges")) {
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 3)
                throw std::runtime_error("model: each edge must be [u, v, theta]");
            const int u = e[0].get<int>();
            const int v = e[1].get<int>();
            if (u >= v) throw std::runtime_error("model: edges require u < v");
            edges.push_back({u, v, e[2].get<double>()});
        }
    }
    try {
        return IsingModel(n, std::move(node_theta), edges);
    } catch (const std::invalid_argument& err) {
        throw std::runtime_error(std::string("model: ") + err.what());
    }
}

IsingModel parse_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_json(ss.str());
}

std::string model_to_json(const IsingModel& model) {
    json j;
    j["n"] = model.n();
    j["node_theta"] = std::vector<double>(model.node_thetas().begin(), model.node_thetas().end());
    json edges = json::array();
    for (const Edge& e : model.edges()) edges.push_back({e.u, e.v, e.theta});
    j["edges"] = edges;
    return j.dump(2) + "\n";
}

void serialize_model(const IsingModel& model, const std::string& path) {
    write_text(path, model_to_json(model));
}

void write_sample_batch(const SampleBatch& batch, const std::string& csv_path) {
    std::ostringstream out;
    for (long long i = 0; i < batch.k(); ++i) {
        const Spin* row = batch.row_ptr(i);
        for (int v = 0; v < batch.n(); ++v) {
            if (v) out << ',';
            out << static_cast<int>(row[v]);
        }
        out << '\n';
    }
    write_text(csv_path, out.str());

    const SampleMeta& m = batch.meta();
    json meta;
    meta["n"] = batch.n();
    meta["k"] = batch.k();
    meta["sampler"] = m.sampler;
    meta["seed"] = m.seed;
    meta["burn_in_steps"] = m.burn_in_steps;
    meta["thinning_steps"] = m.thinning_steps;
    meta["chains"] = m.chains;
    meta["dobrushin_ok"] = m.dobrushin_ok;
    write_text(csv_path + ".meta.json", meta.dump(2) + "\n");
}

SampleBatch read_sample_batch(const std::string& csv_path) {
    const json meta = load_json_file(csv_path + ".meta.json");
    const int n = meta["n"].get<int>();
    const long long k = meta["k"].get<long long>();
    SampleBatch batch(n, k);
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open " + csv_path);
    std::string line;
    for (long long i = 0; i < k; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("sample CSV truncated");
        std::stringstream ss(line);
        std::string cell;
        Spin* row = batch.mutable_row(i);
        for (int v = 0; v < n; ++v) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("sample CSV short row");
            const int value = std::stoi(cell);
            if (value != 1 && value != -1) throw std::runtime_error("sample CSV entries must be +-1");
            row[v] = static_cast<Spin>(value);
        }
    }
    batch.meta().sampler = meta["sampler"].get<std::string>();
    batch.meta().seed = meta["seed"].get<std::uint64_t>();
    batch.meta().burn_in_steps = meta["burn_in_steps"].get<long long>();
    batch.meta().thinning_steps = meta["thinning_steps"].get<long long>();
    batch.meta().chains = meta["chains"].get<int>();
    batch.meta().dobrushin_ok = meta["dobrushin_ok"].get<bool>();
    return batch;
}

std::string verdict_to_json(const TestVerdict& verdict, const TesterConfig& config) {
    json j;
    j["algorithm"] = verdict.algorithm;
    j["decision"] = verdict.reject ? "reject" : "accept";
    if (verdict.witness) {
        const Witness& w = *verdict.witness;
        json wj;
        switch (w.kind) {
            case Witness::Kind::Edge: wj["kind"] = "edge"; break;
            case Witness::Kind::Node: wj["kind"] = "node"; break;
            case Witness::Kind::Statistic: wj["kind"] = "statistic"; break;
        }
        wj["u"] = w.u;
        if (w.v >= 0) wj["v"] = w.v;
        wj["observed"] = w.observed;
        wj["threshold"] = w.threshold;
        j["witness"] = wj;
    } else {
        j["witness"] = nullptr;
    }
    j["samples_used"] = verdict.samples_used;
    j["seed"] = verdict.seed;
    j["promise_unverified"] = verdict.promise_unverified;
    j["config"] = {{"epsilon", config.epsilon},   {"fail_prob", config.fail_prob},
                   {"c_loc", config.c_loc},       {"c_f", config.c_f},
                   {"c_pre", config.c_pre},       {"c_wl", config.c_wl},
                   {"c_rep", config.c_rep},       {"c_ch", config.c_ch},
                   {"c_thr", config.c_thr},       {"ltt_prefilter", config.ltt_prefilter},
                   {"budget", config.budget}};
    return j.dump(2) + "\n";
}

std::string summary_to_json(const ExactSummary& summary, const IsingModel& model) {
    const int n = model.n();
    json j;
    j["n"] = n;
    j["log_partition"] = summary.log_partition;
    j["node_marginals"] = summary.node_marginals;
    json edges = json::array();
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            edges.push_back({u, v, summary.edge_marginal(n, u, v)});
    j["edge_marginals"] = edges;
    const ModelClass c = classify_model(model);
    j["is_forest"] = c.is_forest;
    j["is_ferromagnetic"] = c.is_ferromagnetic;
    j["is_zero_field"] = c.is_zero_field;
    j["dobrushin_influence"] = dobrushin_influence(model);
    return j.dump(2) + "\n";
}

std::string report_to_json(const StatisticReport& report) {
    json j;
    j["mean"] = report.mean;
    j["variance"] = report.variance;
    j["k_used"] = report.k_used;
    j["reps"] = report.reps;
    return j.dump(2) + "\n";
}

void write_instance(const HardInstance& instance, const std::string& path_prefix) {
    serialize_model(instance.model, path_prefix + ".json");
    json side;
    side["family"] = instance.family;
    side["delta"] = instance.delta;
    side["certified_skl"] = instance.certified_skl;
    write_text(path_prefix + ".meta.json", side.dump(2) + "\n");
}

}  // namespace isingtest
