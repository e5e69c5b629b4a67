#include "density/evalkit/roc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "density/common/error.hpp"

namespace density::evalkit {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error(ErrorCategory::Numeric, "cannot format value");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::filesystem::path& path) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCategory::Io, "bad number '" + std::string(text) + "' in " + path.string());
    }
    return value;
}

}  // namespace

RocCurve roc_and_auc(const std::vector<double>& scores, const std::vector<int>& binary_truths) {
    if (scores.empty() || scores.size() != binary_truths.size()) {
        throw Error(ErrorCategory::Data, "ROC requires aligned, non-empty scores and truths");
    }
    std::size_t positives = 0;
    for (int t : binary_truths) {
        if (t != 0 && t != 1) throw Error(ErrorCategory::Data, "ROC truths must be binary");
        positives += t;
    }
    const std::size_t negatives = scores.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw Error(ErrorCategory::Degenerate,
                    "AUC is undefined: truth vector contains a single class");
    }

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

    std::size_t tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // Consume the whole tie group at this threshold.
        while (i < order.size() && scores[order[i]] == threshold) {
            if (binary_truths[order[i]]) ++tp; else ++fp;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
        const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        curve.points.push_back({threshold, fpr, tpr});
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auc = auc;
    return curve;
}

MacAuc mac_auc(const std::vector<ProbVector>& probabilities, const std::vector<int>& truths) {
    if (probabilities.empty() || probabilities.size() != truths.size()) {
        throw Error(ErrorCategory::Data, "macAUC requires aligned, non-empty inputs");
    }
    MacAuc result;
    for (int c = 0; c < 4; ++c) {
        std::vector<double> scores;
        std::vector<int> binary;
        scores.reserve(truths.size());
        binary.reserve(truths.size());
        bool present = false;
        for (std::size_t i = 0; i < truths.size(); ++i) {
            if (static_cast<std::size_t>(c) >= probabilities[i].size()) {
                throw Error(ErrorCategory::Data, "probability vector has fewer than 4 classes");
            }
            scores.push_back(probabilities[i][c]);
            binary.push_back(truths[i] == c ? 1 : 0);
            present = present || truths[i] == c;
        }
        if (!present) {
            throw Error(ErrorCategory::Degenerate,
                        "AUC is undefined for class " + std::to_string(c) + ": no such truth present");
        }
        result.per_class[c] = roc_and_auc(scores, binary).auc;
    }
    result.macro =
        (result.per_class[0] + result.per_class[1] + result.per_class[2] + result.per_class[3]) / 4.0;
    return result;
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "threshold,fpr,tpr\n";
    for (const auto& point : curve.points) {
        out << format_double(point.threshold) << "," << format_double(point.fpr) << ","
            << format_double(point.tpr) << "\n";
    }
    out << "# auc=" << format_double(round6(curve.auc)) << "\n";
    write_text_file(path, out.str());
}

RocCurve read_roc_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "threshold,fpr,tpr") {
        throw Error(ErrorCategory::Io, "bad ROC CSV header in " + path.string());
    }
    RocCurve curve;
    bool have_auc = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# auc=", 0) == 0) {
            curve.auc = parse_double(std::string_view(line).substr(6), path);
            have_auc = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw Error(ErrorCategory::Io, "bad ROC CSV row in " + path.string());
        }
        std::string_view view(line);
        RocPoint point{};
        const std::string_view threshold_text = view.substr(0, c1);
        point.threshold = threshold_text == "inf" ? std::numeric_limits<double>::infinity()
                                                  : parse_double(threshold_text, path);
        point.fpr = parse_double(view.substr(c1 + 1, c2 - c1 - 1), path);
        point.tpr = parse_double(view.substr(c2 + 1), path);
        curve.points.push_back(point);
    }
    if (!have_auc) {
        throw Error(ErrorCategory::Io, "ROC CSV is missing its trailing # auc= line: " + path.string());
    }
    return curve;
}

}  // namespace density::evalkit
