#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "density/corpus/types.hpp"

namespace density::corpus {

enum class Partition { Train, Validation, Test };

struct TestSelection {
    std::string patient_id;
    std::string exam_id;  // the patient's most recent exam
};

struct SplitAssignment {
    std::vector<std::string> train;       // patient ids
    std::vector<std::string> validation;  // patient ids
    std::vector<TestSelection> test;
};

// Sorts patients ascending by the date of their latest exam (ties broken by
// patient id), then cuts at floor(0.8 n) / floor(0.9 n). Test patients keep
// only their most recent exam.
SplitAssignment temporal_split(const Manifest& manifest,
                               std::array<double, 3> fractions = {0.8, 0.1, 0.1});

void save_split(const SplitAssignment& split, const std::filesystem::path& path);
SplitAssignment load_split(const std::filesystem::path& path);

// Exam lists per partition: train/validation keep every exam of their
// patients, test keeps the selected latest exams only.
std::vector<const ExamRecord*> partition_exams(const Manifest& manifest, const SplitAssignment& split,
                                               Partition partition);

}  // namespace density::corpus
