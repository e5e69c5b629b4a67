#include "density/evalkit/metrics.hpp"

#include <algorithm>

#include "density/common/error.hpp"
#include "density/evalkit/roc.hpp"

namespace density::evalkit {

namespace {

void require_aligned(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths) {
    if (probabilities.empty()) {
        throw Error(ErrorCategory::Data, "metric requires a non-empty prediction list");
    }
    if (probabilities.size() != truths.size()) {
        throw Error(ErrorCategory::Data, "predictions and truths are not aligned");
    }
}

// Class indices ordered by probability descending, lower index first on ties.
std::vector<int> ranked_classes(const ProbVector& probabilities) {
    std::vector<int> order(probabilities.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probabilities[a] > probabilities[b]; });
    return order;
}

}  // namespace

int predicted_class(const ProbVector& probabilities) {
    if (probabilities.empty()) {
        throw Error(ErrorCategory::Data, "cannot take argmax of an empty probability vector");
    }
    int best = 0;
    for (int i = 1; i < static_cast<int>(probabilities.size()); ++i) {
        if (probabilities[i] > probabilities[best]) best = i;
    }
    return best;
}

double top_k_accuracy(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths, int k) {
    require_aligned(probabilities, truths);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const auto& probs = probabilities[i];
        if (k < 1 || k > static_cast<int>(probs.size())) {
            throw Error(ErrorCategory::Config, "top-k requires 1 <= k <= class count");
        }
        const auto order = ranked_classes(probs);
        for (int j = 0; j < k; ++j) {
            if (order[j] == truths[i]) {
                ++correct;
                break;
            }
        }
    }
    return static_cast<double>(correct) / static_cast<double>(probabilities.size());
}

int collapse_superclass(int label) {
    if (label < 0 || label > 3) {
        throw Error(ErrorCategory::Data, "density label out of range: " + std::to_string(label));
    }
    return label >= 2 ? 1 : 0;
}

std::vector<int> collapse_superclass(const std::vector<int>& labels) {
    std::vector<int> out;
    out.reserve(labels.size());
    for (int label : labels) out.push_back(collapse_superclass(label));
    return out;
}

double superclass_accuracy(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths) {
    require_aligned(probabilities, truths);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (collapse_superclass(predicted_class(probabilities[i])) == collapse_superclass(truths[i])) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(probabilities.size());
}

std::array<std::array<int, 4>, 4> confusion_matrix(const std::vector<ProbVector>& probabilities,
                                                   const std::vector<int>& truths) {
    require_aligned(probabilities, truths);
    std::array<std::array<int, 4>, 4> matrix{};
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (truths[i] < 0 || truths[i] > 3) {
            throw Error(ErrorCategory::Data, "truth label out of range: " + std::to_string(truths[i]));
        }
        matrix[truths[i]][predicted_class(probabilities[i])] += 1;
    }
    return matrix;
}

EvalReport evaluate(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths) {
    require_aligned(probabilities, truths);
    EvalReport report;
    for (int t : truths) {
        if (t < 0 || t > 3) {
            throw Error(ErrorCategory::Data, "truth label out of range: " + std::to_string(t));
        }
        report.class_counts[t] += 1;
    }
    report.top1 = top_k_accuracy(probabilities, truths, 1);
    report.top2 = top_k_accuracy(probabilities, truths, 2);
    report.top3 = top_k_accuracy(probabilities, truths, 3);
    report.superclass = superclass_accuracy(probabilities, truths);
    const MacAuc auc = mac_auc(probabilities, truths);
    report.auc_per_class = auc.per_class;
    report.mac_auc = auc.macro;
    report.confusion = confusion_matrix(probabilities, truths);
    return report;
}

Json eval_report_to_json(const EvalReport& report) {
    Json doc;
    doc["counts"] = report.class_counts;
    doc["top1"] = round6(report.top1);
    doc["top2"] = round6(report.top2);
    doc["top3"] = round6(report.top3);
    doc["superclass"] = round6(report.superclass);
    Json aucs = Json::array();
    for (double a : report.auc_per_class) aucs.push_back(round6(a));
    doc["auc_per_class"] = std::move(aucs);
    doc["mac_auc"] = round6(report.mac_auc);
    doc["confusion"] = report.confusion;
    return doc;
}

EvalReport eval_report_from_json(const Json& doc) {
    EvalReport report;
    report.class_counts = doc.at("counts").get<std::array<int, 4>>();
    report.top1 = doc.at("top1").get<double>();
    report.top2 = doc.at("top2").get<double>();
    report.top3 = doc.at("top3").get<double>();
    report.superclass = doc.at("superclass").get<double>();
    report.auc_per_class = doc.at("auc_per_class").get<std::array<double, 4>>();
    report.mac_auc = doc.at("mac_auc").get<double>();
    report.confusion = doc.at("confusion").get<std::array<std::array<int, 4>, 4>>();
    return report;
}

}  // namespace density::evalkit
