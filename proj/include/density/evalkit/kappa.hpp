#pragma once

#include <optional>
#include <string>
#include <vector>

#include "density/common/jsonio.hpp"

namespace density::evalkit {

// Unweighted Cohen's kappa, (p_o - p_e) / (1 - p_e). Throws a degenerate
// error when p_e = 1 (both raters constant on the same class).
double cohen_kappa(const std::vector<int>& labels_a, const std::vector<int>& labels_b, int class_count);

struct KappaMatrix {
    std::vector<std::string> raters;
    // cells[i][j] for i != j; diagonal stored as 1 (self-agreement).
    // A cell is empty when that pair was degenerate.
    std::vector<std::vector<std::optional<double>>> cells;
    struct PairError {
        std::string rater_a;
        std::string rater_b;
        std::string message;
    };
    std::vector<PairError> errors;
};

// Pairwise kappa over all unordered rater pairs; degenerate pairs are
// reported in `errors` instead of aborting the table.
KappaMatrix kappa_matrix(const std::vector<std::pair<std::string, std::vector<int>>>& raters, int class_count);

Json kappa_matrix_to_json(const KappaMatrix& matrix);

}  // namespace density::evalkit
