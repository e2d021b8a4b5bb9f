#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "psonn/baselines.hpp"
#include "psonn/metrics.hpp"
#include "psonn/neural_net.hpp"
#include "psonn/pso.hpp"

// JSON forms for every persisted artifact. nlohmann emits doubles in the
// shortest representation that parses back to the identical value, so all
// round-trips are lossless at full precision.

namespace psonn {

using json = nlohmann::ordered_json;

inline json network_to_json(const Network& net, double threshold = 0.5) {
    return json{{"topology", net.topology.layer_sizes},
                {"params", net.params},
                {"activation", "sigmoid"},
                {"threshold", threshold}};
}

inline Network network_from_json(const json& j, double* threshold = nullptr) {
    if (j.at("activation").get<std::string>() != "sigmoid")
        throw DataError("unsupported activation '" + j.at("activation").get<std::string>() + "'");
    if (threshold) *threshold = j.at("threshold").get<double>();
    Topology topology{j.at("topology").get<std::vector<std::size_t>>()};
    return unflatten(topology, j.at("params").get<ParamVector>());
}

namespace detail {

inline json tree_node_to_json(const DecisionTree& tree, int id) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    if (node.is_leaf()) return json{{"p_positive", node.p_positive}};
    return json{{"feature", node.feature},
                {"threshold", node.threshold},
                {"left", tree_node_to_json(tree, node.left)},
                {"right", tree_node_to_json(tree, node.right)}};
}

inline int tree_node_from_json(const json& j, DecisionTree& tree) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("feature")) {
        tree.nodes[static_cast<std::size_t>(id)].feature = j.at("feature").get<int>();
        tree.nodes[static_cast<std::size_t>(id)].threshold = j.at("threshold").get<double>();
        const int left = tree_node_from_json(j.at("left"), tree);
        const int right = tree_node_from_json(j.at("right"), tree);
        tree.nodes[static_cast<std::size_t>(id)].left = left;
        tree.nodes[static_cast<std::size_t>(id)].right = right;
    } else {
        tree.nodes[static_cast<std::size_t>(id)].p_positive = j.at("p_positive").get<double>();
    }
    return id;
}

}  // namespace detail

inline json tree_to_json(const DecisionTree& tree) {
    return json{{"root", detail::tree_node_to_json(tree, 0)}};
}

inline DecisionTree tree_from_json(const json& j) {
    DecisionTree tree;
    detail::tree_node_from_json(j.at("root"), tree);
    return tree;
}

inline json forest_to_json(const RandomForest& forest) {
    json trees = json::array();
    for (const auto& t : forest.trees) trees.push_back(tree_to_json(t));
    return json{{"feature_subset", forest.feature_subset},
                {"tree_seeds", forest.tree_seeds},
                {"trees", std::move(trees)}};
}

inline RandomForest forest_from_json(const json& j) {
    RandomForest forest;
    forest.feature_subset = j.at("feature_subset").get<std::size_t>();
    forest.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& t : j.at("trees")) forest.trees.push_back(tree_from_json(t));
    return forest;
}

inline json nb_to_json(const NaiveBayesModel& model) {
    json features = json::array();
    for (const auto& fm : model.features) {
        features.push_back(json{{"bernoulli", fm.bernoulli},
                                {"mean", {fm.mean[0], fm.mean[1]}},
                                {"variance", {fm.variance[0], fm.variance[1]}},
                                {"p_one", {fm.p_one[0], fm.p_one[1]}}});
    }
    return json{{"prior", {model.prior[0], model.prior[1]}}, {"features", std::move(features)}};
}

inline NaiveBayesModel nb_from_json(const json& j) {
    NaiveBayesModel model;
    model.prior[0] = j.at("prior")[0].get<double>();
    model.prior[1] = j.at("prior")[1].get<double>();
    for (const auto& f : j.at("features")) {
        NaiveBayesModel::FeatureModel fm;
        fm.bernoulli = f.at("bernoulli").get<bool>();
        for (int c = 0; c < 2; ++c) {
            fm.mean[c] = f.at("mean")[static_cast<std::size_t>(c)].get<double>();
            fm.variance[c] = f.at("variance")[static_cast<std::size_t>(c)].get<double>();
            fm.p_one[c] = f.at("p_one")[static_cast<std::size_t>(c)].get<double>();
        }
        model.features.push_back(fm);
    }
    return model;
}

inline json swarm_config_to_json(const SwarmConfig& cfg) {
    return json{{"swarm_size", cfg.swarm_size}, {"inertia", cfg.inertia},
                {"cognitive", cfg.cognitive},   {"social", cfg.social},
                {"bound_low", cfg.bound_low},   {"bound_high", cfg.bound_high},
                {"vmax", cfg.vmax},             {"iterations", cfg.iterations},
                {"seed", cfg.seed}};
}

inline json optimize_result_to_json(const OptimizeResult& result, const SwarmConfig& cfg) {
    return json{{"config", swarm_config_to_json(cfg)},
                {"best_position", result.best_position},
                {"best_fitness", result.best_fitness},
                {"fitness_history", result.fitness_history}};
}

inline json confusion_to_json(const ConfusionMatrix& cm) {
    return json{{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
}

inline ConfusionMatrix confusion_from_json(const json& j) {
    return ConfusionMatrix{j.at("tp").get<std::size_t>(), j.at("fn").get<std::size_t>(),
                           j.at("fp").get<std::size_t>(), j.at("tn").get<std::size_t>()};
}

inline json class_metrics_to_json(const ClassMetrics& m) {
    return json{{"tp_rate", m.tp_rate},     {"fp_rate", m.fp_rate}, {"precision", m.precision},
                {"recall", m.recall},       {"f_measure", m.f_measure}, {"mcc", m.mcc},
                {"roc_area", m.roc_area},   {"prc_area", m.prc_area}};
}

inline json summary_to_json(const EvaluationSummary& s) {
    return json{{"correct", s.correct()},
                {"incorrect", s.incorrect()},
                {"total", s.total()},
                {"accuracy", s.accuracy()},
                {"kappa", s.kappa},
                {"mae", s.mae},
                {"rmse", s.rmse},
                {"relative_absolute_error_percent", s.rae_percent},
                {"root_relative_squared_error_percent", s.rrse_percent},
                {"class_positive", class_metrics_to_json(s.classes.positive)},
                {"class_negative", class_metrics_to_json(s.classes.negative)},
                {"class_weighted", class_metrics_to_json(s.classes.weighted)},
                {"confusion_matrix", confusion_to_json(s.cm)}};
}

}  // namespace psonn
