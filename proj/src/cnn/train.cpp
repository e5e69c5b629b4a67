#include "density/cnn/train.hpp"

#include <algorithm>

#include "density/common/error.hpp"
#include "density/numerics/ntw.hpp"

namespace density::cnn {

using corpus::LoadedExam;
using numerics::Gradients;
using numerics::ParamSet;
using numerics::Stack;
using numerics::Tensor;

namespace {

bool is_final_layer(const std::string& name) {
    return name.rfind("head.out.", 0) == 0;
}

double validation_top1(const ParamSet& params, const MultiColumnConfig& config,
                       const std::vector<LoadedExam>& validation) {
    std::vector<evalkit::ProbVector> probs;
    std::vector<int> truths;
    probs.reserve(validation.size());
    for (const auto& exam : validation) {
        probs.push_back(forward_exam(params, config, exam.views));
        truths.push_back(exam.label);
    }
    return evalkit::top_k_accuracy(probs, truths, 1);
}

}  // namespace

CnnTrainResult train_cnn(const MultiColumnConfig& config, const std::vector<LoadedExam>& train,
                         const std::vector<LoadedExam>& validation, const CnnTrainOptions& options) {
    config.validate();
    if (train.empty() || validation.empty()) {
        throw Error(ErrorCategory::Data, "training needs non-empty train and validation splits");
    }
    if (options.batch_size < 1 || options.epochs < 0) {
        throw Error(ErrorCategory::Config, "invalid training options");
    }
    for (const auto& exam : train) {
        if (exam.label < 0 || exam.label >= config.output_classes) {
            throw Error(ErrorCategory::Data, "exam " + exam.exam_id + " has label " +
                                                 std::to_string(exam.label) + " outside the class range");
        }
    }

    Rng rng(derive_seed(options.seed, 0xC4471, config.output_classes));
    CnnTrainResult result;
    result.params = build_model(config, rng);
    if (options.epochs == 0) return result;

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    ParamSet best_snapshot = result.params;
    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.uniform_index(i)]);
        }

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t end = std::min(order.size(), start + options.batch_size);
            const double scale = 1.0 / static_cast<double>(end - start);
            Gradients grads(result.params);

            for (std::size_t i = start; i < end; ++i) {
                const LoadedExam& exam = train[order[i]];
                std::array<corpus::ViewImage, 4> views;
                for (int v = 0; v < 4; ++v) views[v] = augment(exam.views[v], options.augmentation, rng);
                loss_sum += exam_loss_and_gradients(result.params, config, views, exam.label, grads, scale);
            }
            numerics::adam_step(result.params, grads, options.learning_rate);
        }

        const double mean_loss = loss_sum / static_cast<double>(train.size());
        if (!std::isfinite(mean_loss)) {
            throw Error(ErrorCategory::Numeric, "training loss became non-finite at epoch " +
                                                    std::to_string(epoch));
        }
        result.history.train_loss.push_back(mean_loss);

        const double accuracy = validation_top1(result.params, config, validation);
        result.history.validation_accuracy.push_back(accuracy);
        if (result.history.best_epoch == 0 || accuracy > result.history.best_accuracy) {
            result.history.best_epoch = epoch;
            result.history.best_accuracy = accuracy;
            best_snapshot = result.params;
        }
    }
    result.params = std::move(best_snapshot);
    return result;
}

ParamSet transfer_init(const ParamSet& pretrained, const MultiColumnConfig& pretrained_config,
                       const MultiColumnConfig& target_config, Rng& rng) {
    if (!same_architecture_except_output(pretrained_config, target_config)) {
        throw Error(ErrorCategory::Config,
                    "transfer requires identical architectures apart from the output layer");
    }
    ParamSet target = build_model(target_config, rng);

    std::vector<std::string> mismatched;
    for (const auto& name : target.names()) {
        if (is_final_layer(name)) continue;
        if (!pretrained.has(name) || !pretrained.at(name).same_shape(target.at(name))) {
            mismatched.push_back(name);
            continue;
        }
        target.at(name) = pretrained.at(name);
    }
    // Anything in the source that the target never consumed is a mismatch too.
    for (const auto& name : pretrained.names()) {
        if (!is_final_layer(name) && !target.has(name)) mismatched.push_back(name);
    }
    if (!mismatched.empty()) {
        std::string joined;
        for (const auto& name : mismatched) joined += (joined.empty() ? "" : ", ") + name;
        throw Error(ErrorCategory::Shape, "transfer mismatch for parameters: " + joined);
    }
    return target;
}

std::optional<int> epochs_to_threshold(const std::vector<double>& validation_accuracy, double threshold) {
    if (validation_accuracy.empty()) {
        throw Error(ErrorCategory::Data, "epochs_to_threshold needs a non-empty history");
    }
    for (std::size_t i = 0; i < validation_accuracy.size(); ++i) {
        if (validation_accuracy[i] >= threshold) return static_cast<int>(i) + 1;
    }
    return std::nullopt;
}

void save_cnn(const ParamSet& params, const MultiColumnConfig& config, const std::filesystem::path& ntw_path,
              const Json& metadata) {
    numerics::save_ntw(ntw_path, params);
    Json sidecar;
    sidecar["kind"] = "cnn";
    sidecar["config"] = config_to_json(config);
    if (!metadata.empty()) sidecar["training"] = metadata;
    std::filesystem::path json_path = ntw_path;
    json_path.replace_extension(".json");
    write_json_file(json_path, sidecar);
}

std::pair<ParamSet, MultiColumnConfig> load_cnn(const std::filesystem::path& ntw_path) {
    std::filesystem::path json_path = ntw_path;
    json_path.replace_extension(".json");
    const Json sidecar = read_json_file(json_path);
    MultiColumnConfig config = config_from_json(sidecar.at("config"));
    config.validate();
    ParamSet params = numerics::load_ntw(ntw_path);

    Rng probe(0);
    ParamSet expected = build_model(config, probe);
    for (const auto& name : expected.names()) {
        if (!params.has(name) || !params.at(name).same_shape(expected.at(name))) {
            throw Error(ErrorCategory::Config, "weights do not match sidecar config (parameter " + name + ")");
        }
    }
    return {std::move(params), std::move(config)};
}

}  // namespace density::cnn
