#pragma once

#include <filesystem>

#include "density/corpus/types.hpp"

namespace density::corpus {

enum class LabelSource { Density, Birads };

// An exam materialized for training or evaluation.
struct LoadedExam {
    std::string exam_id;
    int label = -1;
    std::array<ViewImage, 4> views;  // indexed by ViewKind
};

// Reads the four view images (paths resolved against `root`) and the label
// from the record's cache. Missing labels or views are data errors.
LoadedExam load_exam(const std::filesystem::path& root, const ExamRecord& record, LabelSource source);

std::vector<LoadedExam> load_exams(const std::filesystem::path& root,
                                   const std::vector<const ExamRecord*>& records, LabelSource source);

}  // namespace density::corpus
