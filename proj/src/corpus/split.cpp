#include "density/corpus/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "density/common/error.hpp"
#include "density/common/jsonio.hpp"

namespace density::corpus {

SplitAssignment temporal_split(const Manifest& manifest, std::array<double, 3> fractions) {
    if (manifest.records.empty()) {
        throw Error(ErrorCategory::Data, "cannot split an empty manifest");
    }
    if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
        throw Error(ErrorCategory::Config, "split fractions must sum to 1");
    }

    // Latest (date, exam_id) per patient; the map keeps patients ordered by id
    // so date ties break deterministically.
    std::map<std::string, const ExamRecord*> latest;
    for (const auto& exam : manifest.records) {
        auto [it, inserted] = latest.try_emplace(exam.patient_id, &exam);
        if (!inserted) {
            const ExamRecord* current = it->second;
            if (exam.date > current->date ||
                (exam.date == current->date && exam.exam_id > current->exam_id)) {
                it->second = &exam;
            }
        }
    }

    std::vector<std::pair<std::string, const ExamRecord*>> patients(latest.begin(), latest.end());
    std::stable_sort(patients.begin(), patients.end(), [](const auto& a, const auto& b) {
        if (a.second->date != b.second->date) return a.second->date < b.second->date;
        return a.first < b.first;
    });

    const std::size_t n = patients.size();
    const auto train_end = static_cast<std::size_t>(std::floor(fractions[0] * static_cast<double>(n)));
    const auto val_end = static_cast<std::size_t>(std::floor((fractions[0] + fractions[1]) * static_cast<double>(n)));

    SplitAssignment split;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < train_end) {
            split.train.push_back(patients[i].first);
        } else if (i < val_end) {
            split.validation.push_back(patients[i].first);
        } else {
            split.test.push_back({patients[i].first, patients[i].second->exam_id});
        }
    }
    return split;
}

void save_split(const SplitAssignment& split, const std::filesystem::path& path) {
    Json doc;
    doc["train"] = split.train;
    doc["validation"] = split.validation;
    Json test = Json::array();
    for (const auto& sel : split.test) {
        Json entry;
        entry["patient_id"] = sel.patient_id;
        entry["exam_id"] = sel.exam_id;
        test.push_back(std::move(entry));
    }
    doc["test"] = std::move(test);
    write_json_file(path, doc);
}

SplitAssignment load_split(const std::filesystem::path& path) {
    const Json doc = read_json_file(path);
    SplitAssignment split;
    try {
        split.train = doc.at("train").get<std::vector<std::string>>();
        split.validation = doc.at("validation").get<std::vector<std::string>>();
        for (const auto& entry : doc.at("test")) {
            split.test.push_back({entry.at("patient_id").get<std::string>(),
                                  entry.at("exam_id").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::Io, "malformed split file " + path.string() + ": " + e.what());
    }
    return split;
}

std::vector<const ExamRecord*> partition_exams(const Manifest& manifest, const SplitAssignment& split,
                                               Partition partition) {
    std::vector<const ExamRecord*> exams;
    if (partition == Partition::Test) {
        std::unordered_map<std::string, const ExamRecord*> by_id;
        for (const auto& exam : manifest.records) by_id[exam.exam_id] = &exam;
        for (const auto& sel : split.test) {
            auto it = by_id.find(sel.exam_id);
            if (it == by_id.end()) {
                throw Error(ErrorCategory::Data, "split references unknown exam id " + sel.exam_id);
            }
            exams.push_back(it->second);
        }
        return exams;
    }
    const auto& ids = partition == Partition::Train ? split.train : split.validation;
    const std::unordered_set<std::string> members(ids.begin(), ids.end());
    for (const auto& exam : manifest.records) {
        if (members.count(exam.patient_id)) exams.push_back(&exam);
    }
    return exams;
}

}  // namespace density::corpus
