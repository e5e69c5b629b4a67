#pragma once

#include <filesystem>

#include "density/baseline/features.hpp"
#include "density/corpus/dataset.hpp"
#include "density/evalkit/metrics.hpp"
#include "density/numerics/layers.hpp"

namespace density::baseline {

enum class Variant { Linear, Hidden100 };

const char* variant_name(Variant variant);
Variant variant_from_name(const std::string& name);

inline constexpr int kHiddenUnits = 100;

// Softmax regression over histogram features, optionally with one 100-unit
// rectifier hidden layer.
struct BaselineModel {
    Variant variant = Variant::Linear;
    int bins = 20;
    numerics::ParamSet params;

    numerics::Stack stack() const;
    int feature_width() const { return 4 * bins; }
};

BaselineModel init_baseline(Variant variant, int bins, Rng& rng);

evalkit::ProbVector predict(const BaselineModel& model, const std::array<corpus::ViewImage, 4>& views);

struct BaselineTrainOptions {
    double learning_rate = 1e-3;
    int epochs = 100;
    int batch_size = 32;
    std::uint64_t seed = 0;
};

struct BaselineTrainResult {
    BaselineModel model;  // snapshot from the best validation epoch
    std::vector<double> validation_accuracy;  // per epoch
    int best_epoch = 0;                       // 1-based; 0 when epochs == 0
    double best_accuracy = 0.0;
};

// Adam on mean cross-entropy; the returned model is the snapshot from the
// epoch with the highest validation top-1 accuracy (earliest on ties).
BaselineTrainResult train_baseline(Variant variant, const std::vector<corpus::LoadedExam>& train,
                                   const std::vector<corpus::LoadedExam>& validation, int bins,
                                   const BaselineTrainOptions& options);

struct BinsTuneResult {
    int best_bins = 0;
    std::vector<std::pair<int, double>> accuracy_per_candidate;  // (bins, best val accuracy)
    BaselineTrainResult best;
};

// One training per candidate bin count (shared seed); argmax of validation
// accuracy, smallest B on ties.
BinsTuneResult tune_bins(Variant variant, std::vector<int> candidates,
                         const std::vector<corpus::LoadedExam>& train,
                         const std::vector<corpus::LoadedExam>& validation,
                         const BaselineTrainOptions& options);

// NTW weights plus a JSON sidecar {variant, bins} at the same stem.
void save_baseline(const BaselineModel& model, const std::filesystem::path& ntw_path);
BaselineModel load_baseline(const std::filesystem::path& ntw_path);

}  // namespace density::baseline
