#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "psonn/util.hpp"

namespace psonn {

// 2x2 counts with the positive class (label 1, Weka class "a") first.
struct ConfusionMatrix {
    std::size_t tp = 0;  // actual positive, predicted positive
    std::size_t fn = 0;  // actual positive, predicted negative
    std::size_t fp = 0;  // actual negative, predicted positive
    std::size_t tn = 0;  // actual negative, predicted negative

    std::size_t total() const { return tp + fn + fp + tn; }
    std::size_t correct() const { return tp + tn; }
    std::size_t incorrect() const { return fn + fp; }
    std::size_t actual_positive() const { return tp + fn; }
    std::size_t actual_negative() const { return fp + tn; }

    bool operator==(const ConfusionMatrix&) const = default;
};

// Swaps the class roles: the negative class seen as the class of interest.
inline ConfusionMatrix transpose(const ConfusionMatrix& cm) {
    return {cm.tn, cm.fp, cm.fn, cm.tp};
}

inline ConfusionMatrix build_confusion(const std::vector<int>& actuals, const std::vector<int>& predicted) {
    if (actuals.size() != predicted.size())
        throw DataError("actuals (" + std::to_string(actuals.size()) + ") and predictions (" +
                        std::to_string(predicted.size()) + ") differ in length");
    if (actuals.empty()) throw DataError("cannot build a confusion matrix from no labels");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (actuals[i] == 1)
            predicted[i] == 1 ? ++cm.tp : ++cm.fn;
        else
            predicted[i] == 1 ? ++cm.fp : ++cm.tn;
    }
    return cm;
}

struct ScalarMetrics {
    double accuracy = 0;
    double kappa = 0;
};

// Cohen's kappa from the matrix marginals. Chance agreement of exactly 1 can
// only arise from a single-class diagonal matrix, where kappa is defined as 1;
// any other p_e == 1 case is a division by zero and is rejected.
inline ScalarMetrics scalar_metrics(const ConfusionMatrix& cm) {
    const double t = static_cast<double>(cm.total());
    if (cm.total() == 0) throw DataError("empty confusion matrix");
    const double po = static_cast<double>(cm.correct()) / t;
    const double pe = (static_cast<double>(cm.actual_positive()) * static_cast<double>(cm.tp + cm.fp) +
                       static_cast<double>(cm.actual_negative()) * static_cast<double>(cm.fn + cm.tn)) /
                      (t * t);
    ScalarMetrics m;
    m.accuracy = po;
    if (pe >= 1.0) {
        if (po == 1.0) {
            m.kappa = 1.0;
            return m;
        }
        throw DataError("kappa undefined: chance agreement is 1 with imperfect agreement");
    }
    m.kappa = (po - pe) / (1.0 - pe);
    return m;
}

struct ClassMetrics {
    double tp_rate = 0;
    double fp_rate = 0;
    double precision = 0;
    double recall = 0;
    double f_measure = 0;
    double mcc = 0;
    double roc_area = 0;
    double prc_area = 0;
};

struct ClassReport {
    ClassMetrics positive;
    ClassMetrics negative;
    ClassMetrics weighted;  // averaged by actual-class support
};

namespace detail {

inline double ratio0(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Count-based metrics for the class whose hits sit in cm.tp.
inline ClassMetrics one_class_metrics(const ConfusionMatrix& cm) {
    const auto tp = static_cast<double>(cm.tp), fn = static_cast<double>(cm.fn);
    const auto fp = static_cast<double>(cm.fp), tn = static_cast<double>(cm.tn);
    ClassMetrics m;
    m.tp_rate = ratio0(tp, tp + fn);
    m.recall = m.tp_rate;
    m.fp_rate = ratio0(fp, fp + tn);
    m.precision = ratio0(tp, tp + fp);
    m.f_measure = ratio0(2.0 * m.precision * m.recall, m.precision + m.recall);
    const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    m.mcc = den > 0.0 ? (tp * tn - fp * fn) / std::sqrt(den) : 0.0;
    return m;
}

inline ClassMetrics support_weighted(const ClassMetrics& pos, const ClassMetrics& neg,
                                     std::size_t n_pos, std::size_t n_neg) {
    const double wp = static_cast<double>(n_pos) / static_cast<double>(n_pos + n_neg);
    const double wn = 1.0 - wp;
    ClassMetrics w;
    w.tp_rate = wp * pos.tp_rate + wn * neg.tp_rate;
    w.fp_rate = wp * pos.fp_rate + wn * neg.fp_rate;
    w.precision = wp * pos.precision + wn * neg.precision;
    w.recall = wp * pos.recall + wn * neg.recall;
    w.f_measure = wp * pos.f_measure + wn * neg.f_measure;
    w.mcc = wp * pos.mcc + wn * neg.mcc;
    w.roc_area = wp * pos.roc_area + wn * neg.roc_area;
    w.prc_area = wp * pos.prc_area + wn * neg.prc_area;
    return w;
}

}  // namespace detail

// Per-class rates, precision/recall/F and MCC; ROC/PRC areas are filled by
// evaluate() where probabilities are available. Every 0/0 rate is defined as 0.
inline ClassReport class_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("empty confusion matrix");
    ClassReport report;
    report.positive = detail::one_class_metrics(cm);
    report.negative = detail::one_class_metrics(transpose(cm));
    report.weighted =
        detail::support_weighted(report.positive, report.negative, cm.actual_positive(), cm.actual_negative());
    return report;
}

struct ProbabilisticErrors {
    double mae = 0;
    double rmse = 0;
    double rae_percent = 0;   // relative to the class-prior predictor
    double rrse_percent = 0;
};

// Weka-style probabilistic errors over both class-probability columns, which
// collapses to the positive-column form below. The reference predictor
// outputs train_prior_positive for every instance.
inline ProbabilisticErrors probabilistic_errors(const std::vector<double>& probs,
                                                const std::vector<int>& actuals,
                                                double train_prior_positive) {
    if (probs.size() != actuals.size())
        throw DataError("probabilities and labels differ in length");
    if (probs.empty()) throw DataError("no predictions to score");
    if (!(train_prior_positive > 0.0 && train_prior_positive < 1.0))
        throw DataError("prior predictor is degenerate: prior must lie strictly in (0, 1)");

    const double n = static_cast<double>(probs.size());
    double abs_sum = 0, sq_sum = 0, prior_abs = 0, prior_sq = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double y = actuals[i] == 1 ? 1.0 : 0.0;
        abs_sum += std::fabs(probs[i] - y);
        sq_sum += (probs[i] - y) * (probs[i] - y);
        prior_abs += std::fabs(train_prior_positive - y);
        prior_sq += (train_prior_positive - y) * (train_prior_positive - y);
    }
    ProbabilisticErrors e;
    e.mae = abs_sum / n;
    e.rmse = std::sqrt(sq_sum / n);
    const double prior_mae = prior_abs / n;
    const double prior_rmse = std::sqrt(prior_sq / n);
    if (prior_mae == 0.0 || prior_rmse == 0.0)
        throw DataError("prior predictor has zero error; relative errors undefined");
    e.rae_percent = 100.0 * e.mae / prior_mae;
    e.rrse_percent = 100.0 * e.rmse / prior_rmse;
    return e;
}

// Probability that a random positive outranks a random negative, ties at 1/2
// (Mann-Whitney rank form).
inline double roc_auc(const std::vector<double>& probs, const std::vector<int>& actuals) {
    if (probs.size() != actuals.size())
        throw DataError("probabilities and labels differ in length");
    std::size_t n_pos = 0;
    for (int a : actuals) n_pos += a == 1 ? 1 : 0;
    const std::size_t n_neg = actuals.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("ROC area needs both classes present");

    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

    double positive_rank_sum = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && probs[order[j]] == probs[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (actuals[order[k]] == 1) positive_rank_sum += mean_rank;
        i = j;
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

// Area under the precision-recall curve, threshold sweep with step
// interpolation (rectangles ending at each distinct score).
inline double prc_auc(const std::vector<double>& probs, const std::vector<int>& actuals) {
    if (probs.size() != actuals.size())
        throw DataError("probabilities and labels differ in length");
    std::size_t n_pos = 0;
    for (int a : actuals) n_pos += a == 1 ? 1 : 0;
    if (n_pos == 0 || n_pos == actuals.size()) throw DataError("PRC area needs both classes present");

    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

    double area = 0, prev_recall = 0;
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && probs[order[j]] == probs[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k)
            actuals[order[k]] == 1 ? ++tp : ++fp;
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

// The full Weka-style evaluation block for one fold.
struct EvaluationSummary {
    ConfusionMatrix cm;
    double kappa = 0;
    double mae = 0;
    double rmse = 0;
    double rae_percent = 0;
    double rrse_percent = 0;
    ClassReport classes;

    std::size_t correct() const { return cm.correct(); }
    std::size_t incorrect() const { return cm.incorrect(); }
    std::size_t total() const { return cm.total(); }
    double accuracy() const { return static_cast<double>(cm.correct()) / static_cast<double>(cm.total()); }
    // Complement of accuracy, so the two rates always sum to exactly 1.
    double error_rate() const { return 1.0 - accuracy(); }
};

// Scores one fold from positive-class probabilities. The prior feeds the
// relative error denominators. ROC/PRC areas fall back to the 0 convention
// when the fold holds a single class.
inline EvaluationSummary evaluate(const std::vector<double>& probs, const std::vector<int>& actuals,
                                  double threshold, double train_prior_positive) {
    std::vector<int> predicted(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) predicted[i] = probs[i] >= threshold ? 1 : 0;

    EvaluationSummary s;
    s.cm = build_confusion(actuals, predicted);
    s.kappa = scalar_metrics(s.cm).kappa;
    const auto errors = probabilistic_errors(probs, actuals, train_prior_positive);
    s.mae = errors.mae;
    s.rmse = errors.rmse;
    s.rae_percent = errors.rae_percent;
    s.rrse_percent = errors.rrse_percent;
    s.classes = class_metrics(s.cm);

    if (s.cm.actual_positive() > 0 && s.cm.actual_negative() > 0) {
        std::vector<double> flipped(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i) flipped[i] = 1.0 - probs[i];
        std::vector<int> neg_actuals(actuals.size());
        for (std::size_t i = 0; i < actuals.size(); ++i) neg_actuals[i] = actuals[i] == 1 ? 0 : 1;

        s.classes.positive.roc_area = roc_auc(probs, actuals);
        s.classes.negative.roc_area = roc_auc(flipped, neg_actuals);
        s.classes.positive.prc_area = prc_auc(probs, actuals);
        s.classes.negative.prc_area = prc_auc(flipped, neg_actuals);
        s.classes.weighted = detail::support_weighted(s.classes.positive, s.classes.negative,
                                                      s.cm.actual_positive(), s.cm.actual_negative());
    }
    return s;
}

namespace detail {

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// Rounds to `decimals` places and drops trailing zeros, the way the reference
// tool prints its summary statistics ("0.9839", "0.03", "1").
inline std::string trimmed(double v, int decimals) {
    std::string s = fixed(v, decimals);
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

inline std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

// Renders the three-section text block: Summary, Detailed Accuracy By Class,
// Confusion Matrix. Percentages carry 4 decimals; plain statistics are
// 4-decimal with trailing zeros trimmed; per-class columns carry 3 decimals.
inline std::string render_report(const EvaluationSummary& s) {
    using detail::fixed;
    using detail::pad_left;
    using detail::pad_right;
    using detail::trimmed;

    std::ostringstream out;
    out << "=== Summary ===\n\n";
    auto summary_line = [&](const std::string& label, const std::string& value) {
        out << pad_right(label, 33) << pad_left(value, 8);
    };
    summary_line("Correctly Classified Instances", std::to_string(s.correct()));
    out << pad_left(fixed(100.0 * s.accuracy(), 4), 18) << " %\n";
    summary_line("Incorrectly Classified Instances", std::to_string(s.incorrect()));
    out << pad_left(fixed(100.0 * s.error_rate(), 4), 18) << " %\n";
    summary_line("Kappa statistic", trimmed(s.kappa, 4));
    out << "\n";
    summary_line("Mean absolute error", trimmed(s.mae, 4));
    out << "\n";
    summary_line("Root mean squared error", trimmed(s.rmse, 4));
    out << "\n";
    summary_line("Relative absolute error", fixed(s.rae_percent, 4));
    out << " %\n";
    summary_line("Root relative squared error", fixed(s.rrse_percent, 4));
    out << " %\n";
    summary_line("Total Number of Instances", std::to_string(s.total()));
    out << "\n\n";

    out << "=== Detailed Accuracy By Class ===\n\n";
    static const char* headers[] = {"TP Rate", "FP Rate", "Precision", "Recall",
                                    "F-Measure", "MCC", "ROC Area", "PRC Area"};
    auto column_width = [](const char* h) { return std::max(std::string(h).size(), std::size_t{5}) + 2; };
    out << pad_right("", 17);
    for (const char* h : headers) out << pad_right(h, column_width(h));
    out << "Class\n";
    auto class_row = [&](const std::string& prefix, const ClassMetrics& m, const std::string& name) {
        const double values[] = {m.tp_rate, m.fp_rate, m.precision, m.recall,
                                 m.f_measure, m.mcc, m.roc_area, m.prc_area};
        out << pad_right(prefix, 17);
        for (std::size_t i = 0; i < 8; ++i)
            out << pad_right(fixed(values[i], 3), column_width(headers[i]));
        out << name << "\n";
    };
    class_row("", s.classes.positive, "positive");
    class_row("", s.classes.negative, "negative");
    class_row("Weighted Avg.", s.classes.weighted, "");

    out << "\n=== Confusion Matrix ===\n\n";
    const std::size_t cells[] = {s.cm.tp, s.cm.fn, s.cm.fp, s.cm.tn};
    std::size_t width = 1;
    for (std::size_t c : cells) width = std::max(width, std::to_string(c).size());
    auto cell = [&](const std::string& v) { return " " + pad_left(v, width); };
    out << cell("a") << cell("b") << "   <-- classified as\n";
    out << cell(std::to_string(s.cm.tp)) << cell(std::to_string(s.cm.fn)) << " |   a = positive\n";
    out << cell(std::to_string(s.cm.fp)) << cell(std::to_string(s.cm.tn)) << " |   b = negative\n";
    return out.str();
}

}  // namespace psonn
