#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "density/evalkit/metrics.hpp"

namespace density::evalkit {

struct RocPoint {
    double threshold;  // predict positive when score >= threshold
    double fpr;
    double tpr;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0,0) at threshold +inf to (1,1)
    double auc = 0.0;              // trapezoidal; equals Mann-Whitney with half-credit ties
};

// Threshold sweep over the distinct score values. Requires at least one
// positive and one negative truth.
RocCurve roc_and_auc(const std::vector<double>& scores, const std::vector<int>& binary_truths);

struct MacAuc {
    std::array<double, 4> per_class{};
    double macro = 0.0;
};

// One-vs-rest AUC per density class (score = predicted probability of that
// class) and their arithmetic mean. Every class must appear in the truths.
MacAuc mac_auc(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths);

// CSV: header "threshold,fpr,tpr", one sweep point per line, trailing
// comment "# auc=<value>". Emit(parse(x)) is byte-identical to emit(x).
void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);
RocCurve read_roc_csv(const std::filesystem::path& path);

}  // namespace density::evalkit
