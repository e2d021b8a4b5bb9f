#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "psonn/baselines.hpp"
#include "psonn/dataset.hpp"
#include "psonn/metrics.hpp"
#include "psonn/neural_net.hpp"
#include "psonn/pso.hpp"
#include "psonn/serialize.hpp"
#include "psonn/util.hpp"

namespace psonn {

// Malformed or invalid experiment configuration.
struct ConfigError : DataError {
    using DataError::DataError;
};

enum class ModelKind { psonn, bpnn, tree, forest, nb };

inline const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::psonn: return "psonn";
        case ModelKind::bpnn: return "bpnn";
        case ModelKind::tree: return "tree";
        case ModelKind::forest: return "forest";
        case ModelKind::nb: return "nb";
    }
    return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
    for (ModelKind k : {ModelKind::psonn, ModelKind::bpnn, ModelKind::tree, ModelKind::forest, ModelKind::nb})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown model kind '" + s +
                      "' (expected one of: psonn, bpnn, tree, forest, nb)");
}

enum class NormalizeMode { train_only, full, off };

inline const char* to_string(NormalizeMode mode) {
    switch (mode) {
        case NormalizeMode::train_only: return "train-only";
        case NormalizeMode::full: return "full";
        case NormalizeMode::off: return "off";
    }
    return "?";
}

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t feature_subset = 2;
    bool bootstrap = true;
};

struct ExperimentConfig {
    ModelKind model = ModelKind::psonn;
    std::string dataset_path;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    double threshold = 0.5;
    SplitSpec split;  // fraction defaults per model; seed is derived from the master seed at run time
    NormalizeMode normalize = NormalizeMode::train_only;

    std::vector<std::size_t> hidden = {5, 5};  // psonn, bpnn
    SwarmConfig pso;
    PsonnFitness psonn_fitness = PsonnFitness::mse;
    BackpropConfig bpnn;
    TreeConfig tree;   // tree, forest
    ForestConfig forest;
    NbConfig nb;
};

namespace detail {

inline double parse_double_value(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used == v.size() && std::isfinite(d)) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
}

inline std::uint64_t parse_uint_value(const std::string& key, const std::string& v) {
    // stoull wraps negatives around instead of failing
    if (v.find('-') == std::string::npos) {
        try {
            std::size_t used = 0;
            unsigned long long u = std::stoull(v, &used);
            if (used == v.size()) return u;
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
}

inline bool parse_bool_value(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

inline std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<std::size_t>(parse_uint_value(key, trim(item))));
    if (out.empty()) throw ConfigError("key '" + key + "': expected a comma-separated list");
    return out;
}

}  // namespace detail

// Parses the flat dotted key=value format. Unknown keys, keys that do not
// apply to the chosen model, duplicates, and out-of-range values are rejected
// with the offending key named.
inline ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + " line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(source + " line " + std::to_string(line_no) + ": expected key = value");
        for (const auto& [k, v] : entries)
            if (k == key) throw ConfigError(source + ": duplicate key '" + key + "'");
        entries.emplace_back(std::move(key), std::move(value));
    }

    ExperimentConfig cfg;
    bool have_model = false, have_dataset = false, have_fraction = false;
    for (const auto& [k, v] : entries) {
        if (k == "model") {
            cfg.model = model_kind_from_string(v);
            have_model = true;
            break;
        }
    }
    if (!have_model) throw ConfigError(source + ": missing required key 'model'");

    const bool is_net = cfg.model == ModelKind::psonn || cfg.model == ModelKind::bpnn;
    const bool is_treeish = cfg.model == ModelKind::tree || cfg.model == ModelKind::forest;
    auto only_for = [&](const std::string& key, bool applies) {
        if (!applies)
            throw ConfigError(source + ": key '" + key + "' does not apply to model '" +
                              to_string(cfg.model) + "'");
    };

    for (const auto& [key, value] : entries) {
        if (key == "model") {
            continue;
        } else if (key == "dataset") {
            cfg.dataset_path = value;
            have_dataset = true;
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "seed") {
            cfg.seed = detail::parse_uint_value(key, value);
        } else if (key == "threshold") {
            cfg.threshold = detail::parse_double_value(key, value);
            if (cfg.threshold < 0.0 || cfg.threshold > 1.0)
                throw ConfigError("key 'threshold': must be in [0, 1]");
        } else if (key == "split.train_fraction") {
            cfg.split.train_fraction = detail::parse_double_value(key, value);
            if (!(cfg.split.train_fraction > 0.0 && cfg.split.train_fraction < 1.0))
                throw ConfigError("key 'split.train_fraction': must be in (0, 1), got " + value);
            have_fraction = true;
        } else if (key == "split.shuffle") {
            cfg.split.shuffle = detail::parse_bool_value(key, value);
        } else if (key == "split.stratified") {
            cfg.split.stratified = detail::parse_bool_value(key, value);
        } else if (key == "normalize") {
            if (value == "train-only") cfg.normalize = NormalizeMode::train_only;
            else if (value == "full") cfg.normalize = NormalizeMode::full;
            else if (value == "off") cfg.normalize = NormalizeMode::off;
            else throw ConfigError("key 'normalize': expected train-only, full or off, got '" + value + "'");
        } else if (key == "net.hidden") {
            only_for(key, is_net);
            cfg.hidden = detail::parse_size_list(key, value);
            for (std::size_t h : cfg.hidden)
                if (h == 0) throw ConfigError("key 'net.hidden': layer sizes must be positive");
        } else if (key == "pso.swarm_size") {
            only_for(key, cfg.model == ModelKind::psonn);
            cfg.pso.swarm_size = static_cast<std::size_t>(detail::parse_uint_value(key, value));
        } else if (key == "pso.inertia") {
            only_for(key, cfg.model == ModelKind::psonn);
            cfg.pso.inertia = detail::parse_double_value(key, value);
        } else if (key == "pso.cognitive") {
            only_for(key, cfg.model == ModelKind::psonn);
            cfg.pso.cognitive = detail::parse_double_value(key, value);
        } else if (key == "pso.social") {
            only_for(key, cfg.model == ModelKind::psonn);
            cfg.pso.social = detail::parse_double_value(key, value);
        } else if (key == "pso.bound_low") {
            only_for(key, cfg.model == ModelKind::psonn);
            cfg.pso.bound_low = detail::parse_double_value(key, value);
        } else if (key == "pso.bound_high") {
            only_for(key, cfg.model == ModelKind::psonn);
            cfg.pso.bound_high = detail::parse_double_value(key, value);
        } else if (key == "pso.vmax") {
            only_for(key, cfg.model == ModelKind::psonn);
            cfg.pso.vmax = detail::parse_double_value(key, value);
        } else if (key == "pso.iterations") {
            only_for(key, cfg.model == ModelKind::psonn);
            cfg.pso.iterations = static_cast<std::size_t>(detail::parse_uint_value(key, value));
        } else if (key == "pso.fitness") {
            only_for(key, cfg.model == ModelKind::psonn);
            if (value == "mse") cfg.psonn_fitness = PsonnFitness::mse;
            else if (value == "misclassification") cfg.psonn_fitness = PsonnFitness::misclassification;
            else throw ConfigError("key 'pso.fitness': expected mse or misclassification, got '" + value + "'");
        } else if (key == "bpnn.learning_rate") {
            only_for(key, cfg.model == ModelKind::bpnn);
            cfg.bpnn.learning_rate = detail::parse_double_value(key, value);
            if (!(cfg.bpnn.learning_rate > 0.0))
                throw ConfigError("key 'bpnn.learning_rate': must be positive");
        } else if (key == "bpnn.epochs") {
            only_for(key, cfg.model == ModelKind::bpnn);
            cfg.bpnn.epochs = static_cast<std::size_t>(detail::parse_uint_value(key, value));
            if (cfg.bpnn.epochs == 0) throw ConfigError("key 'bpnn.epochs': must be at least 1");
        } else if (key == "tree.max_depth") {
            only_for(key, is_treeish);
            cfg.tree.max_depth = static_cast<std::size_t>(detail::parse_uint_value(key, value));
        } else if (key == "tree.min_samples_leaf") {
            only_for(key, is_treeish);
            cfg.tree.min_samples_leaf = static_cast<std::size_t>(detail::parse_uint_value(key, value));
            if (cfg.tree.min_samples_leaf == 0)
                throw ConfigError("key 'tree.min_samples_leaf': must be at least 1");
        } else if (key == "forest.trees") {
            only_for(key, cfg.model == ModelKind::forest);
            cfg.forest.n_trees = static_cast<std::size_t>(detail::parse_uint_value(key, value));
            if (cfg.forest.n_trees == 0) throw ConfigError("key 'forest.trees': must be at least 1");
        } else if (key == "forest.feature_subset") {
            only_for(key, cfg.model == ModelKind::forest);
            cfg.forest.feature_subset = static_cast<std::size_t>(detail::parse_uint_value(key, value));
            if (cfg.forest.feature_subset == 0)
                throw ConfigError("key 'forest.feature_subset': must be at least 1");
        } else if (key == "forest.bootstrap") {
            only_for(key, cfg.model == ModelKind::forest);
            cfg.forest.bootstrap = detail::parse_bool_value(key, value);
        } else if (key == "nb.bernoulli_binary") {
            only_for(key, cfg.model == ModelKind::nb);
            cfg.nb.bernoulli_binary = detail::parse_bool_value(key, value);
        } else {
            throw ConfigError(source + ": unknown key '" + key + "'");
        }
    }

    if (!have_dataset) throw ConfigError(source + ": missing required key 'dataset'");
    // The published protocols differ: 80/20 for the swarm-trained network,
    // 70/30 for the comparison classifiers.
    if (!have_fraction) cfg.split.train_fraction = cfg.model == ModelKind::psonn ? 0.8 : 0.7;
    if (cfg.model == ModelKind::psonn) {
        SwarmConfig check = cfg.pso;
        check.seed = 0;
        check.validate();
    }
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

inline json config_to_json(const ExperimentConfig& cfg) {
    json j{{"model", to_string(cfg.model)},
           {"dataset", cfg.dataset_path},
           {"output_dir", cfg.output_dir},
           {"seed", cfg.seed},
           {"threshold", cfg.threshold},
           {"split",
            {{"train_fraction", cfg.split.train_fraction},
             {"shuffle", cfg.split.shuffle},
             {"stratified", cfg.split.stratified}}},
           {"normalize", to_string(cfg.normalize)}};
    switch (cfg.model) {
        case ModelKind::psonn: {
            j["net"] = {{"hidden", cfg.hidden}};
            json p = swarm_config_to_json(cfg.pso);
            p.erase("seed");  // derived from the master seed at run time
            p["fitness"] = cfg.psonn_fitness == PsonnFitness::mse ? "mse" : "misclassification";
            j["pso"] = std::move(p);
            break;
        }
        case ModelKind::bpnn:
            j["net"] = {{"hidden", cfg.hidden}};
            j["bpnn"] = {{"learning_rate", cfg.bpnn.learning_rate}, {"epochs", cfg.bpnn.epochs}};
            break;
        case ModelKind::tree:
            j["tree"] = {{"max_depth", cfg.tree.max_depth},
                         {"min_samples_leaf", cfg.tree.min_samples_leaf}};
            break;
        case ModelKind::forest:
            j["tree"] = {{"max_depth", cfg.tree.max_depth},
                         {"min_samples_leaf", cfg.tree.min_samples_leaf}};
            j["forest"] = {{"trees", cfg.forest.n_trees},
                           {"feature_subset", cfg.forest.feature_subset},
                           {"bootstrap", cfg.forest.bootstrap}};
            break;
        case ModelKind::nb:
            j["nb"] = {{"bernoulli_binary", cfg.nb.bernoulli_binary}};
            break;
    }
    return j;
}

// A trained classifier of any kind, reduced to the one operation the
// evaluation engine needs: the probability of the positive class.
struct TrainedModel {
    ModelKind kind = ModelKind::psonn;
    double threshold = 0.5;
    std::variant<Network, DecisionTree, RandomForest, NaiveBayesModel> model;

    double prob(const std::vector<double>& features) const {
        if (const auto* net = std::get_if<Network>(&model)) return net->forward(features);
        if (const auto* tree = std::get_if<DecisionTree>(&model)) return predict_tree_proba(*tree, features);
        if (const auto* forest = std::get_if<RandomForest>(&model))
            return predict_forest_proba(*forest, features);
        return predict_nb_proba(std::get<NaiveBayesModel>(model), features);
    }

    int predict(const std::vector<double>& features) const {
        return prob(features) >= threshold ? 1 : 0;
    }
};

inline json model_to_json(const TrainedModel& m) {
    json j{{"kind", to_string(m.kind)}, {"threshold", m.threshold}};
    if (const auto* net = std::get_if<Network>(&m.model))
        j["network"] = network_to_json(*net, m.threshold);
    else if (const auto* tree = std::get_if<DecisionTree>(&m.model))
        j["tree"] = tree_to_json(*tree);
    else if (const auto* forest = std::get_if<RandomForest>(&m.model))
        j["forest"] = forest_to_json(*forest);
    else
        j["naive_bayes"] = nb_to_json(std::get<NaiveBayesModel>(m.model));
    return j;
}

inline TrainedModel model_from_json(const json& j) {
    TrainedModel m;
    try {
        m.kind = model_kind_from_string(j.at("kind").get<std::string>());
        m.threshold = j.at("threshold").get<double>();
        switch (m.kind) {
            case ModelKind::psonn:
            case ModelKind::bpnn:
                m.model = network_from_json(j.at("network"));
                break;
            case ModelKind::tree:
                m.model = tree_from_json(j.at("tree"));
                break;
            case ModelKind::forest:
                m.model = forest_from_json(j.at("forest"));
                break;
            case ModelKind::nb:
                m.model = nb_from_json(j.at("naive_bayes"));
                break;
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    } catch (const TrainingError& e) {  // inconsistent network shape is a file problem here
        throw DataError(std::string("malformed model document: ") + e.what());
    }
    return m;
}

struct ExperimentResult {
    ExperimentConfig config;
    SplitIndices indices;
    EvaluationSummary train_summary;
    EvaluationSummary test_summary;
    TrainedModel model;
    json extras;  // psonn optimization trace / bpnn loss history
    double duration_seconds = 0;  // reported, never serialized: result files stay byte-deterministic
    std::vector<std::string> warnings;
};

namespace detail {

// Stream ids for deriving per-purpose seeds from one master seed. Training
// streams differ per model kind, so a shared master seed keeps one split while
// giving every trainer its own randomness.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kTrainStreamBase = 16;

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(name) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(std::string(name) + ": " + e.what());
    } catch (const TrainingError& e) {
        throw TrainingError(std::string(name) + ": " + e.what());
    }
}

inline std::vector<double> fold_probs(const TrainedModel& model, const Dataset& fold) {
    std::vector<double> probs(fold.size());
    for (std::size_t i = 0; i < fold.size(); ++i) probs[i] = model.prob(fold.records[i].features);
    return probs;
}

inline std::vector<int> fold_labels(const Dataset& fold) {
    std::vector<int> labels(fold.size());
    for (std::size_t i = 0; i < fold.size(); ++i) labels[i] = fold.records[i].label;
    return labels;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace detail

inline std::string render_run_report(const ExperimentResult& r) {
    std::ostringstream out;
    out << "Experiment: " << to_string(r.config.model) << " on " << r.config.dataset_path << "\n";
    out << "Split: " << r.indices.train.size() << " train / " << r.indices.test.size()
        << " test (fraction " << r.config.split.train_fraction << ", seed " << r.config.seed << ")\n";
    out << "Normalization: " << to_string(r.config.normalize) << "\n";
    out << "\n== Training fold ==\n\n" << render_report(r.train_summary);
    out << "\n== Test fold ==\n\n" << render_report(r.test_summary);
    return out.str();
}

inline json result_to_json(const ExperimentResult& r) {
    json j{{"config", config_to_json(r.config)},
           {"train_indices", r.indices.train},
           {"test_indices", r.indices.test},
           {"train_summary", summary_to_json(r.train_summary)},
           {"test_summary", summary_to_json(r.test_summary)},
           {"model_file", "model.json"}};
    if (!r.extras.is_null())
        for (const auto& [k, v] : r.extras.items()) j[k] = v;
    return j;
}

inline void write_run_artifacts(const ExperimentResult& r) {
    const std::filesystem::path dir(r.config.output_dir);
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "result.json", result_to_json(r).dump(2) + "\n");
    detail::write_file(dir / "model.json", model_to_json(r.model).dump(2) + "\n");
    detail::write_file(dir / "report.txt", render_run_report(r));
}

// Laplace-smoothed positive frequency of the training fold; the reference
// predictor for the relative errors. Smoothing keeps single-class folds from
// producing a degenerate prior.
inline double train_prior_positive(const Dataset& train) {
    const auto [pos, neg] = class_counts(train);
    return static_cast<double>(pos + 1) / static_cast<double>(pos + neg + 2);
}

// The full pipeline: load, encode, split, normalize, train, evaluate both
// folds, persist artifacts. Errors carry their pipeline stage.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.config = cfg;

    const RawTable raw = detail::stage("load", [&] { return load_csv(cfg.dataset_path); });
    const Dataset full = detail::stage("encode", [&] { return encode(raw, &result.warnings); });

    SplitSpec spec = cfg.split;
    spec.seed = mix_seed(cfg.seed, detail::kSplitStream);
    result.indices = detail::stage("split", [&] { return split_indices(full, spec); });
    Dataset train = take(full, result.indices.train);
    Dataset test = take(full, result.indices.test);

    detail::stage("normalize", [&] {
        if (cfg.normalize == NormalizeMode::off) return;
        const NormalizationParams params =
            fit_normalizer(cfg.normalize == NormalizeMode::train_only ? train : full);
        train = apply_normalizer(train, params);
        test = apply_normalizer(test, params);
    });

    const std::uint64_t train_seed =
        mix_seed(cfg.seed, detail::kTrainStreamBase + static_cast<std::uint64_t>(cfg.model));
    detail::stage("train", [&] {
        result.model.kind = cfg.model;
        result.model.threshold = cfg.threshold;
        switch (cfg.model) {
            case ModelKind::psonn: {
                std::vector<std::size_t> layers;
                layers.push_back(train.n_features());
                layers.insert(layers.end(), cfg.hidden.begin(), cfg.hidden.end());
                layers.push_back(1);
                SwarmConfig sc = cfg.pso;
                sc.seed = train_seed;
                PsonnResult r = train_psonn(Topology{layers}, train, sc, cfg.psonn_fitness, threads);
                result.model.model = std::move(r.network);
                result.extras = json{{"optimization", optimize_result_to_json(r.optimization, sc)}};
                break;
            }
            case ModelKind::bpnn: {
                std::vector<std::size_t> layers;
                layers.push_back(train.n_features());
                layers.insert(layers.end(), cfg.hidden.begin(), cfg.hidden.end());
                layers.push_back(1);
                BackpropConfig bc = cfg.bpnn;
                bc.seed = train_seed;
                BackpropResult r = backprop_train(Topology{layers}, train, bc);
                result.model.model = std::move(r.network);
                result.extras = json{{"training", json{{"loss_history", r.loss_history}}}};
                break;
            }
            case ModelKind::tree:
                result.model.model = train_tree(train, cfg.tree);
                break;
            case ModelKind::forest:
                result.model.model = train_forest(train, cfg.forest.n_trees, cfg.forest.feature_subset,
                                                  train_seed, cfg.tree, cfg.forest.bootstrap, threads);
                break;
            case ModelKind::nb:
                result.model.model = train_nb(train, cfg.nb);
                break;
        }
    });

    detail::stage("evaluate", [&] {
        const double prior = train_prior_positive(train);
        result.train_summary =
            evaluate(detail::fold_probs(result.model, train), detail::fold_labels(train), cfg.threshold, prior);
        result.test_summary =
            evaluate(detail::fold_probs(result.model, test), detail::fold_labels(test), cfg.threshold, prior);
    });

    result.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.output_dir.empty()) detail::stage("write", [&] { write_run_artifacts(result); });
    return result;
}

// Evaluation of an already-trained model under a config: the data pipeline is
// re-derived from the config, training is skipped.
inline ExperimentResult evaluate_pretrained(const ExperimentConfig& cfg, TrainedModel model) {
    ExperimentResult result;
    result.config = cfg;

    const RawTable raw = detail::stage("load", [&] { return load_csv(cfg.dataset_path); });
    const Dataset full = detail::stage("encode", [&] { return encode(raw, &result.warnings); });
    SplitSpec spec = cfg.split;
    spec.seed = mix_seed(cfg.seed, detail::kSplitStream);
    result.indices = detail::stage("split", [&] { return split_indices(full, spec); });
    Dataset train = take(full, result.indices.train);
    Dataset test = take(full, result.indices.test);
    detail::stage("normalize", [&] {
        if (cfg.normalize == NormalizeMode::off) return;
        const NormalizationParams params =
            fit_normalizer(cfg.normalize == NormalizeMode::train_only ? train : full);
        train = apply_normalizer(train, params);
        test = apply_normalizer(test, params);
    });

    result.model = std::move(model);
    detail::stage("evaluate", [&] {
        const double prior = train_prior_positive(train);
        result.train_summary = evaluate(detail::fold_probs(result.model, train), detail::fold_labels(train),
                                        result.model.threshold, prior);
        result.test_summary = evaluate(detail::fold_probs(result.model, test), detail::fold_labels(test),
                                       result.model.threshold, prior);
    });

    if (!cfg.output_dir.empty()) {
        const std::filesystem::path dir(cfg.output_dir);
        std::filesystem::create_directories(dir);
        json j{{"config", config_to_json(cfg)},
               {"train_indices", result.indices.train},
               {"test_indices", result.indices.test},
               {"train_summary", summary_to_json(result.train_summary)},
               {"test_summary", summary_to_json(result.test_summary)}};
        detail::write_file(dir / "result.json", j.dump(2) + "\n");
        detail::write_file(dir / "report.txt", render_run_report(result));
    }
    return result;
}

struct SweepResult {
    std::vector<ExperimentResult> runs;
    std::string table;
};

// One run per epoch count, nested under the sweep's output directory, plus a
// table shaped like the published per-epoch results.
inline SweepResult epoch_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& epochs,
                               unsigned threads = 1) {
    if (cfg.model != ModelKind::psonn)
        throw ConfigError("epoch sweep applies to the psonn model only");
    if (epochs.empty()) throw ConfigError("epoch list is empty");

    SweepResult sweep;
    for (std::size_t e : epochs) {
        ExperimentConfig sub = cfg;
        sub.pso.iterations = e;
        if (!cfg.output_dir.empty())
            sub.output_dir = (std::filesystem::path(cfg.output_dir) / ("epochs_" + std::to_string(e))).string();
        sweep.runs.push_back(run_experiment(sub, threads));
    }

    std::ostringstream out;
    out << "PSONN epoch sweep: " << cfg.dataset_path << "\n";
    auto block = [&](bool train_phase) {
        out << "\n" << (train_phase ? "Train phase" : "Test phase") << "\n";
        out << detail::pad_right("ID", 4) << detail::pad_right("# of epochs", 13)
            << detail::pad_right("# of features", 15) << detail::pad_right("# of observations", 19)
            << detail::pad_right("# of hidden layers", 20) << detail::pad_right("MAE", 9)
            << detail::pad_right("RMSE", 9) << (train_phase ? "Training accuracy" : "Testing accuracy")
            << "\n";
        for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
            const auto& r = sweep.runs[i];
            const EvaluationSummary& s = train_phase ? r.train_summary : r.test_summary;
            const auto& net = std::get<Network>(r.model.model);
            out << detail::pad_right(std::to_string(i + 1), 4)
                << detail::pad_right(std::to_string(r.config.pso.iterations), 13)
                << detail::pad_right(std::to_string(net.topology.input_size()), 15)
                << detail::pad_right(std::to_string(s.total()), 19)
                << detail::pad_right(std::to_string(r.config.hidden.size()), 20)
                << detail::pad_right(detail::trimmed(s.mae, 4), 9)
                << detail::pad_right(detail::trimmed(s.rmse, 4), 9)
                << detail::fixed(100.0 * s.accuracy(), 4) << " %\n";
        }
    };
    block(true);
    block(false);
    sweep.table = out.str();

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        detail::write_file(std::filesystem::path(cfg.output_dir) / "sweep.txt", sweep.table);
    }
    return sweep;
}

struct CompareRow {
    ModelKind kind = ModelKind::psonn;
    bool ok = false;
    std::string error;
    double train_accuracy = 0;
    double test_accuracy = 0;
};

struct CompareResult {
    std::vector<CompareRow> rows;  // ranked by test accuracy, failed runs last
    std::vector<ExperimentResult> runs;
    std::string table;
};

// Runs all five models, each under its published protocol (80/20 for the
// swarm-trained network, 70/30 for the rest), off one master seed. A failing
// model is reported in its row instead of aborting the comparison.
inline CompareResult compare_models(const std::string& dataset_path, std::uint64_t seed,
                                    const std::string& output_dir, unsigned threads = 1) {
    CompareResult cmp;
    for (ModelKind kind :
         {ModelKind::psonn, ModelKind::tree, ModelKind::forest, ModelKind::bpnn, ModelKind::nb}) {
        ExperimentConfig cfg;
        cfg.model = kind;
        cfg.dataset_path = dataset_path;
        cfg.seed = seed;
        cfg.split.train_fraction = kind == ModelKind::psonn ? 0.8 : 0.7;
        if (!output_dir.empty())
            cfg.output_dir = (std::filesystem::path(output_dir) / to_string(kind)).string();
        else
            cfg.output_dir.clear();

        CompareRow row;
        row.kind = kind;
        try {
            ExperimentResult r = run_experiment(cfg, threads);
            row.ok = true;
            row.train_accuracy = r.train_summary.accuracy();
            row.test_accuracy = r.test_summary.accuracy();
            cmp.runs.push_back(std::move(r));
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        cmp.rows.push_back(std::move(row));
    }

    std::stable_sort(cmp.rows.begin(), cmp.rows.end(), [](const CompareRow& a, const CompareRow& b) {
        if (a.ok != b.ok) return a.ok;
        return a.test_accuracy > b.test_accuracy;
    });

    std::ostringstream out;
    out << "Model comparison on " << dataset_path << " (master seed " << seed << ")\n";
    out << "Protocols: psonn uses an 80/20 split, the four baselines share a 70/30 split;\n";
    out << "normalization is fitted on each training fold. One master seed derives every\n";
    out << "fold, so published folds are approximated, not recovered.\n\n";
    out << detail::pad_right("Rank", 6) << detail::pad_right("Model", 8)
        << detail::pad_right("Test accuracy", 16) << "Train accuracy\n";
    for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
        const auto& row = cmp.rows[i];
        out << detail::pad_right(std::to_string(i + 1), 6) << detail::pad_right(to_string(row.kind), 8);
        if (row.ok) {
            out << detail::pad_right(detail::fixed(100.0 * row.test_accuracy, 4) + " %", 16)
                << detail::fixed(100.0 * row.train_accuracy, 4) << " %\n";
        } else {
            out << "failed: " << row.error << "\n";
        }
    }
    cmp.table = out.str();

    if (!output_dir.empty()) {
        std::filesystem::create_directories(output_dir);
        detail::write_file(std::filesystem::path(output_dir) / "comparison.txt", cmp.table);
    }
    return cmp;
}

}  // namespace psonn
