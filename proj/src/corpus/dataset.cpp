#include "density/corpus/dataset.hpp"

#include "density/common/error.hpp"
#include "density/corpus/pgm.hpp"

namespace density::corpus {

LoadedExam load_exam(const std::filesystem::path& root, const ExamRecord& record, LabelSource source) {
    LoadedExam exam;
    exam.exam_id = record.exam_id;
    if (source == LabelSource::Density) {
        if (!record.density) {
            throw Error(ErrorCategory::Data, "exam " + record.exam_id + " has no density label");
        }
        exam.label = *record.density;
    } else {
        if (!record.birads) {
            throw Error(ErrorCategory::Data, "exam " + record.exam_id + " has no BI-RADS label");
        }
        exam.label = *record.birads;
    }
    for (ViewKind kind : kViewOrder) {
        const auto& rel = record.view_paths[static_cast<int>(kind)];
        if (rel.empty()) {
            throw Error(ErrorCategory::Data,
                        "exam " + record.exam_id + " is missing view " + std::string(view_name(kind)));
        }
        ViewImage image = load_view(root / rel);
        image.kind = kind;
        exam.views[static_cast<int>(kind)] = std::move(image);
    }
    return exam;
}

std::vector<LoadedExam> load_exams(const std::filesystem::path& root,
                                   const std::vector<const ExamRecord*>& records, LabelSource source) {
    std::vector<LoadedExam> exams;
    exams.reserve(records.size());
    for (const ExamRecord* record : records) exams.push_back(load_exam(root, *record, source));
    return exams;
}

}  // namespace density::corpus
