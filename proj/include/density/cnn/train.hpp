#pragma once

#include <optional>

#include "density/cnn/augment.hpp"
#include "density/cnn/model.hpp"

namespace density::cnn {

struct CnnTrainOptions {
    double learning_rate = 1e-3;
    int epochs = 50;
    int batch_size = 8;
    std::uint64_t seed = 0;
    AugmentationPolicy augmentation;  // applied to training samples only
};

struct TrainHistory {
    std::vector<double> train_loss;           // per epoch, mean cross-entropy
    std::vector<double> validation_accuracy;  // per epoch, top-1
    int best_epoch = 0;                       // 1-based; 0 when epochs == 0
    double best_accuracy = 0.0;
};

struct CnnTrainResult {
    numerics::ParamSet params;  // snapshot from the best validation epoch
    TrainHistory history;
};

// Adam on mean cross-entropy with the validation-best snapshot rule
// (ties keep the earliest epoch). Augmentation never touches validation.
CnnTrainResult train_cnn(const MultiColumnConfig& config, const std::vector<corpus::LoadedExam>& train,
                         const std::vector<corpus::LoadedExam>& validation, const CnnTrainOptions& options);

// Copies every parameter by name except the final layer ("head.out.*"),
// which is Glorot/zero initialized for the target class count. Configs must
// be identical apart from output_classes; any other shape mismatch is an
// error listing the offending parameters.
numerics::ParamSet transfer_init(const numerics::ParamSet& pretrained,
                                 const MultiColumnConfig& pretrained_config,
                                 const MultiColumnConfig& target_config, Rng& rng);

// First 1-based epoch whose validation accuracy reaches the threshold.
std::optional<int> epochs_to_threshold(const std::vector<double>& validation_accuracy, double threshold);

// NTW weights plus a JSON sidecar carrying the architecture.
void save_cnn(const numerics::ParamSet& params, const MultiColumnConfig& config,
              const std::filesystem::path& ntw_path, const Json& metadata = Json::object());
std::pair<numerics::ParamSet, MultiColumnConfig> load_cnn(const std::filesystem::path& ntw_path);

}  // namespace density::cnn
