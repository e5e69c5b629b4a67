#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "density/corpus/types.hpp"
#include "density/synthgen/phantom.hpp"

namespace density::synthgen {

// Everything about one planned exam except its pixel data. Rendering is
// derived deterministically from (master seed, exam_seq, view), so plans
// are cheap to produce at corpus scale and views can be materialized on
// demand.
struct ExamPlan {
    std::string exam_id;
    std::string patient_id;
    std::string date;  // ISO-8601
    int density = 0;
    int birads = 0;
    bool missing_density_phrase = false;
    std::string report;
    std::uint64_t exam_seq = 0;
};

struct CorpusPlan {
    std::vector<ExamPlan> exams;
};

struct SyntheticExam {
    ExamPlan meta;
    std::array<corpus::ViewImage, 4> views;  // indexed by ViewKind
};

struct GenerateOptions {
    int n_patients = 500;
    int exams_per_patient_min = 1;
    int exams_per_patient_max = 3;
    double missing_density_fraction = 0.0;
};

// Samples patients, exam dates (strictly increasing per patient), density
// from the class marginals, BI-RADS from the conditional table, and report
// text. Pure function of (config, options).
CorpusPlan plan_corpus(const PhantomConfig& config, const GenerateOptions& options);

corpus::ViewImage render_exam_view(const ExamPlan& plan, corpus::ViewKind view, const PhantomConfig& config);
SyntheticExam realize_exam(const ExamPlan& plan, const PhantomConfig& config);

// Plan + materialize every exam in memory; intended for desk-scale corpora.
std::vector<SyntheticExam> generate_corpus(const PhantomConfig& config, const GenerateOptions& options);

// Streams a corpus to disk: images/<exam>_<view>.pgm, manifest.jsonl and
// ground_truth.jsonl under out_dir. Returns the manifest.
corpus::Manifest write_corpus(const PhantomConfig& config, const GenerateOptions& options,
                              const std::filesystem::path& out_dir);

}  // namespace density::synthgen
