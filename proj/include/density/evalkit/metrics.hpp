#pragma once

#include <array>
#include <vector>

#include "density/common/jsonio.hpp"

namespace density::evalkit {

using ProbVector = std::vector<double>;

// Argmax with ties broken toward the lower class index.
int predicted_class(const ProbVector& probabilities);

// Correct when the truth is among the k most likely classes; probability
// ties rank the lower class index first.
double top_k_accuracy(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths, int k);

// Binary "dense" (classes 2, 3) versus "not dense" (0, 1) accuracy of the
// argmax prediction.
double superclass_accuracy(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths);

// {0,1} -> 0, {2,3} -> 1.
std::vector<int> collapse_superclass(const std::vector<int>& labels);
int collapse_superclass(int label);

// confusion[truth][predicted]
std::array<std::array<int, 4>, 4> confusion_matrix(const std::vector<ProbVector>& probabilities,
                                                   const std::vector<int>& truths);

struct EvalReport {
    std::array<int, 4> class_counts{};
    double top1 = 0.0;
    double top2 = 0.0;
    double top3 = 0.0;
    double superclass = 0.0;
    std::array<double, 4> auc_per_class{};
    double mac_auc = 0.0;
    std::array<std::array<int, 4>, 4> confusion{};
};

// All metrics for one model on one split. Requires every class present in
// the truths (per-class AUC is undefined otherwise).
EvalReport evaluate(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths);

Json eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const Json& doc);

}  // namespace density::evalkit
