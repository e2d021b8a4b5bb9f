#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "psonn/dataset.hpp"
#include "psonn/util.hpp"

namespace psonn {

struct TreeConfig {
    std::size_t max_depth = 0;        // 0 = unlimited
    std::size_t min_samples_leaf = 1;

    void validate() const {
        if (min_samples_leaf == 0) throw TrainingError("min_samples_leaf must be at least 1");
    }
};

// Internal node when feature >= 0; leaf otherwise. Values <= threshold route
// left. Leaf probabilities carry Laplace add-1 smoothing.
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    double p_positive = 0;

    bool is_leaf() const { return feature < 0; }

    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // root at index 0

    bool operator==(const DecisionTree&) const = default;
};

namespace detail {

inline double entropy(std::size_t pos, std::size_t total) {
    if (total == 0 || pos == 0 || pos == total) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0;
    double gain = 0;
};

// Near-equal gains count as ties so the lowest-feature, lowest-threshold rule
// is stable against rounding.
constexpr double kGainTieEps = 1e-12;

// Best (feature, threshold) by information gain over midpoint thresholds of
// sorted distinct values. Candidates must leave min_samples_leaf on each side.
inline SplitChoice best_split(const Dataset& data, const std::vector<std::size_t>& indices,
                              const std::vector<std::size_t>& features, std::size_t min_samples_leaf) {
    const std::size_t n = indices.size();
    std::size_t total_pos = 0;
    for (std::size_t i : indices) total_pos += data.records[i].label == 1 ? 1 : 0;
    const double parent_entropy = entropy(total_pos, n);

    SplitChoice best;
    std::vector<std::pair<double, int>> column(n);  // (value, label), sorted per feature

    for (std::size_t f : features) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto& rec = data.records[indices[k]];
            column[k] = {rec.features[f], rec.label};
        }
        std::sort(column.begin(), column.end());

        std::size_t left_n = 0, left_pos = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            ++left_n;
            left_pos += column[k].second == 1 ? 1 : 0;
            if (column[k].first == column[k + 1].first) continue;  // midpoints exist between distinct values only
            if (left_n < min_samples_leaf || n - left_n < min_samples_leaf) continue;

            const double threshold = column[k].first + 0.5 * (column[k + 1].first - column[k].first);
            const double child =
                (static_cast<double>(left_n) * entropy(left_pos, left_n) +
                 static_cast<double>(n - left_n) * entropy(total_pos - left_pos, n - left_n)) /
                static_cast<double>(n);
            const double gain = parent_entropy - child;
            if (!best.found || gain > best.gain + kGainTieEps) {
                best = {true, static_cast<int>(f), threshold, gain};
            }
        }
    }
    if (best.found && best.gain <= kGainTieEps) best.found = false;  // nothing informative
    return best;
}

struct TreeBuilder {
    const Dataset& data;
    const TreeConfig& cfg;
    std::size_t feature_subset;  // candidate features per split; n_features = plain induction
    Rng* rng;                    // nullptr when every feature is a candidate
    DecisionTree tree;

    int build(std::vector<std::size_t>& indices, std::size_t depth) {
        const std::size_t n = indices.size();
        std::size_t pos = 0;
        for (std::size_t i : indices) pos += data.records[i].label == 1 ? 1 : 0;

        TreeNode node;
        node.p_positive = static_cast<double>(pos + 1) / static_cast<double>(n + 2);

        const bool pure = pos == 0 || pos == n;
        const bool depth_capped = cfg.max_depth > 0 && depth >= cfg.max_depth;
        if (!pure && !depth_capped && n >= 2 * cfg.min_samples_leaf) {
            const auto candidates = pick_features();
            const SplitChoice choice = best_split(data, indices, candidates, cfg.min_samples_leaf);
            if (choice.found) {
                std::vector<std::size_t> left_idx, right_idx;
                left_idx.reserve(n);
                right_idx.reserve(n);
                for (std::size_t i : indices)
                    (data.records[i].features[static_cast<std::size_t>(choice.feature)] <= choice.threshold
                         ? left_idx
                         : right_idx)
                        .push_back(i);
                indices.clear();
                indices.shrink_to_fit();

                node.feature = choice.feature;
                node.threshold = choice.threshold;
                const int id = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back(node);
                const int left = build(left_idx, depth + 1);
                const int right = build(right_idx, depth + 1);
                tree.nodes[static_cast<std::size_t>(id)].left = left;
                tree.nodes[static_cast<std::size_t>(id)].right = right;
                return id;
            }
        }
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(node);
        return id;
    }

    std::vector<std::size_t> pick_features() {
        std::vector<std::size_t> all(data.n_features());
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (!rng || feature_subset >= all.size()) return all;
        // partial Fisher-Yates, then ascending so tie-breaking stays canonical
        for (std::size_t i = 0; i < feature_subset; ++i) {
            const std::size_t j = i + rng->index(all.size() - i);
            std::swap(all[i], all[j]);
        }
        all.resize(feature_subset);
        std::sort(all.begin(), all.end());
        return all;
    }
};

}  // namespace detail

// Greedy top-down induction maximizing information gain; stops on purity,
// depth cap, min leaf size, or when no split has positive gain.
inline DecisionTree train_tree(const Dataset& train, const TreeConfig& cfg = {}) {
    cfg.validate();
    if (train.empty()) throw TrainingError("cannot train on an empty dataset");
    detail::TreeBuilder builder{train, cfg, train.n_features(), nullptr, {}};
    std::vector<std::size_t> indices(train.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    builder.build(indices, 0);
    return std::move(builder.tree);
}

inline double predict_tree_proba(const DecisionTree& tree, const std::vector<double>& features) {
    if (tree.nodes.empty()) throw DataError("empty tree");
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
        const auto f = static_cast<std::size_t>(node->feature);
        if (f >= features.size())
            throw DataError("tree tests feature " + std::to_string(f) + ", input has " +
                            std::to_string(features.size()));
        node = features[f] <= node->threshold ? &tree.nodes[static_cast<std::size_t>(node->left)]
                                              : &tree.nodes[static_cast<std::size_t>(node->right)];
    }
    return node->p_positive;
}

struct RandomForest {
    std::vector<DecisionTree> trees;
    std::vector<std::uint64_t> tree_seeds;
    std::size_t feature_subset = 0;
};

// Bagged trees: each trained on a seeded bootstrap (with replacement, same
// size) with feature_subset random candidates per split. Per-tree seeds derive
// from the master seed by tree index, so parallel training is reproducible.
inline RandomForest train_forest(const Dataset& train, std::size_t n_trees, std::size_t feature_subset,
                                 std::uint64_t seed, const TreeConfig& cfg = {}, bool bootstrap = true,
                                 unsigned threads = 1) {
    cfg.validate();
    if (train.empty()) throw TrainingError("cannot train on an empty dataset");
    if (n_trees == 0) throw TrainingError("a forest needs at least 1 tree");
    if (feature_subset == 0 || feature_subset > train.n_features())
        throw TrainingError("feature_subset must be in [1, " + std::to_string(train.n_features()) + "]");

    RandomForest forest;
    forest.feature_subset = feature_subset;
    forest.trees.resize(n_trees);
    forest.tree_seeds.resize(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) forest.tree_seeds[t] = mix_seed(seed, t);

    parallel_for(n_trees, threads, [&](std::size_t t) {
        Rng rng(forest.tree_seeds[t]);
        std::vector<std::size_t> indices(train.size());
        if (bootstrap) {
            for (auto& i : indices) i = rng.index(train.size());
        } else {
            std::iota(indices.begin(), indices.end(), std::size_t{0});
        }
        detail::TreeBuilder builder{train, cfg, feature_subset, &rng, {}};
        builder.build(indices, 0);
        forest.trees[t] = std::move(builder.tree);
    });
    return forest;
}

// Mean of the member trees' positive probabilities.
inline double predict_forest_proba(const RandomForest& forest, const std::vector<double>& features) {
    if (forest.trees.empty()) throw DataError("empty forest");
    double sum = 0;
    for (const auto& tree : forest.trees) sum += predict_tree_proba(tree, features);
    return sum / static_cast<double>(forest.trees.size());
}

struct NbConfig {
    bool bernoulli_binary = false;  // Bernoulli likelihoods for 0/1-valued features
};

constexpr double kVarianceFloor = 1e-9;

struct NaiveBayesModel {
    // index 0 = negative class, 1 = positive class
    double prior[2] = {0, 0};
    struct FeatureModel {
        bool bernoulli = false;
        double mean[2] = {0, 0};
        double variance[2] = {kVarianceFloor, kVarianceFloor};
        double p_one[2] = {0.5, 0.5};  // Laplace-smoothed P(x=1 | class), Bernoulli mode
    };
    std::vector<FeatureModel> features;
};

// Class priors from frequencies; per class and feature a Gaussian with the
// sample mean and variance (floored). Both classes must be present.
inline NaiveBayesModel train_nb(const Dataset& train, const NbConfig& cfg = {}) {
    if (train.empty()) throw TrainingError("cannot train on an empty dataset");
    const auto [n_pos, n_neg] = class_counts(train);
    if (n_pos == 0 || n_neg == 0) throw TrainingError("naive Bayes needs both classes in the training data");

    NaiveBayesModel model;
    const std::size_t counts[2] = {n_neg, n_pos};
    model.prior[0] = static_cast<double>(n_neg) / static_cast<double>(train.size());
    model.prior[1] = static_cast<double>(n_pos) / static_cast<double>(train.size());
    model.features.resize(train.n_features());

    for (std::size_t f = 0; f < train.n_features(); ++f) {
        auto& fm = model.features[f];
        double sum[2] = {0, 0};
        std::size_t ones[2] = {0, 0};
        bool binary = true;
        for (const auto& rec : train.records) {
            const int c = rec.label == 1 ? 1 : 0;
            const double v = rec.features[f];
            sum[c] += v;
            if (v == 1.0) ++ones[c];
            else if (v != 0.0) binary = false;
        }
        fm.bernoulli = cfg.bernoulli_binary && binary;
        for (int c = 0; c < 2; ++c) {
            fm.mean[c] = sum[c] / static_cast<double>(counts[c]);
            fm.p_one[c] = static_cast<double>(ones[c] + 1) / static_cast<double>(counts[c] + 2);
        }
        double sq[2] = {0, 0};
        for (const auto& rec : train.records) {
            const int c = rec.label == 1 ? 1 : 0;
            const double d = rec.features[f] - fm.mean[c];
            sq[c] += d * d;
        }
        for (int c = 0; c < 2; ++c) {
            fm.variance[c] =
                counts[c] > 1 ? sq[c] / static_cast<double>(counts[c] - 1) : kVarianceFloor;
            fm.variance[c] = std::max(fm.variance[c], kVarianceFloor);
        }
    }
    return model;
}

// Posterior of the positive class, computed in log space and normalized over
// both classes.
inline double predict_nb_proba(const NaiveBayesModel& model, const std::vector<double>& features) {
    if (features.size() != model.features.size())
        throw DataError("input has " + std::to_string(features.size()) + " features, model expects " +
                        std::to_string(model.features.size()));
    double log_post[2];
    for (int c = 0; c < 2; ++c) {
        double lp = std::log(model.prior[c]);
        for (std::size_t f = 0; f < features.size(); ++f) {
            const auto& fm = model.features[f];
            if (fm.bernoulli) {
                const double p = fm.p_one[c];
                lp += features[f] == 1.0 ? std::log(p) : std::log(1.0 - p);
            } else {
                const double d = features[f] - fm.mean[c];
                lp += -0.5 * std::log(2.0 * std::numbers::pi * fm.variance[c]) - d * d / (2.0 * fm.variance[c]);
            }
        }
        log_post[c] = lp;
    }
    const double m = std::max(log_post[0], log_post[1]);
    const double e0 = std::exp(log_post[0] - m);
    const double e1 = std::exp(log_post[1] - m);
    return e1 / (e0 + e1);
}

}  // namespace psonn
