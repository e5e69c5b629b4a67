#include "density/evalkit/kappa.hpp"

#include <vector>

#include "density/common/error.hpp"

namespace density::evalkit {

double cohen_kappa(const std::vector<int>& labels_a, const std::vector<int>& labels_b, int class_count) {
    if (labels_a.empty() || labels_a.size() != labels_b.size()) {
        throw Error(ErrorCategory::Data, "kappa requires aligned, non-empty label vectors");
    }
    if (class_count < 2) {
        throw Error(ErrorCategory::Config, "kappa requires at least two classes");
    }

    const double n = static_cast<double>(labels_a.size());
    std::vector<double> marginal_a(class_count, 0.0), marginal_b(class_count, 0.0);
    double observed = 0.0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        const int a = labels_a[i], b = labels_b[i];
        if (a < 0 || a >= class_count || b < 0 || b >= class_count) {
            throw Error(ErrorCategory::Data, "label out of range in kappa input");
        }
        marginal_a[a] += 1.0;
        marginal_b[b] += 1.0;
        observed += a == b ? 1.0 : 0.0;
    }

    const double p_o = observed / n;
    double p_e = 0.0;
    for (int c = 0; c < class_count; ++c) {
        p_e += (marginal_a[c] / n) * (marginal_b[c] / n);
    }
    if (p_e > 1.0 - 1e-12) {
        throw Error(ErrorCategory::Degenerate,
                    "kappa is undefined: both raters are constant on the same class");
    }
    return (p_o - p_e) / (1.0 - p_e);
}

KappaMatrix kappa_matrix(const std::vector<std::pair<std::string, std::vector<int>>>& raters,
                         int class_count) {
    if (raters.size() < 2) {
        throw Error(ErrorCategory::Data, "kappa matrix requires at least two raters");
    }
    const std::size_t n = raters.front().second.size();
    for (const auto& [name, labels] : raters) {
        if (labels.size() != n) {
            throw Error(ErrorCategory::Data, "rater " + name + " is not aligned with the others");
        }
    }

    KappaMatrix matrix;
    for (const auto& [name, labels] : raters) matrix.raters.push_back(name);
    matrix.cells.assign(raters.size(), std::vector<std::optional<double>>(raters.size()));

    for (std::size_t i = 0; i < raters.size(); ++i) {
        matrix.cells[i][i] = 1.0;
        for (std::size_t j = i + 1; j < raters.size(); ++j) {
            try {
                const double kappa = cohen_kappa(raters[i].second, raters[j].second, class_count);
                matrix.cells[i][j] = kappa;
                matrix.cells[j][i] = kappa;
            } catch (const Error& e) {
                if (e.category() != ErrorCategory::Degenerate) throw;
                matrix.errors.push_back({raters[i].first, raters[j].first, e.what()});
            }
        }
    }
    return matrix;
}

Json kappa_matrix_to_json(const KappaMatrix& matrix) {
    Json doc;
    doc["raters"] = matrix.raters;
    Json rows = Json::array();
    for (const auto& row : matrix.cells) {
        Json cells = Json::array();
        for (const auto& cell : row) {
            if (cell) {
                cells.push_back(round6(*cell));
            } else {
                cells.push_back(nullptr);
            }
        }
        rows.push_back(std::move(cells));
    }
    doc["kappa"] = std::move(rows);
    Json errors = Json::array();
    for (const auto& error : matrix.errors) {
        Json entry;
        entry["rater_a"] = error.rater_a;
        entry["rater_b"] = error.rater_b;
        entry["message"] = error.message;
        errors.push_back(std::move(entry));
    }
    doc["errors"] = std::move(errors);
    return doc;
}

}  // namespace density::evalkit
