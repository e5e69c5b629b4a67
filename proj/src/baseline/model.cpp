#include "density/baseline/model.hpp"

#include <algorithm>

#include "density/common/error.hpp"
#include "density/common/jsonio.hpp"
#include "density/numerics/ntw.hpp"

namespace density::baseline {

using numerics::Gradients;
using numerics::LayerSpec;
using numerics::ParamSet;
using numerics::Stack;
using numerics::Tensor;

const char* variant_name(Variant variant) {
    return variant == Variant::Linear ? "linear" : "hidden100";
}

Variant variant_from_name(const std::string& name) {
    if (name == "linear") return Variant::Linear;
    if (name == "hidden100") return Variant::Hidden100;
    throw Error(ErrorCategory::Config, "unknown baseline variant: " + name);
}

Stack BaselineModel::stack() const {
    Stack stack;
    if (variant == Variant::Linear) {
        stack.push_back({LayerSpec::fully_connected(feature_width(), corpus::kDensityClasses), "out"});
    } else {
        stack.push_back({LayerSpec::fully_connected(feature_width(), kHiddenUnits), "fc1"});
        stack.push_back({LayerSpec::relu(), ""});
        stack.push_back({LayerSpec::fully_connected(kHiddenUnits, corpus::kDensityClasses), "out"});
    }
    stack.push_back({LayerSpec::softmax(), ""});
    return stack;
}

BaselineModel init_baseline(Variant variant, int bins, Rng& rng) {
    BaselineModel model;
    model.variant = variant;
    model.bins = bins;
    for (const auto& node : model.stack()) {
        for (const auto& [suffix, shape] : node.spec.param_shapes()) {
            if (suffix == "bias") {
                model.params.add(node.prefix + "." + suffix, Tensor::zeros(shape));
            } else {
                model.params.add(node.prefix + "." + suffix, numerics::glorot_init(shape, rng));
            }
        }
    }
    return model;
}

namespace {

Tensor feature_tensor(const BaselineModel& model, const std::array<corpus::ViewImage, 4>& views) {
    HistogramFeatures features = extract_features(views, model.bins);
    return Tensor::from_values(std::move(features.values));
}

evalkit::ProbVector forward_features(const BaselineModel& model, const Stack& stack, const Tensor& features) {
    Tensor probs = numerics::forward_stack(stack, model.params, features);
    return evalkit::ProbVector(probs.values().begin(), probs.values().end());
}

double validation_accuracy(const BaselineModel& model, const Stack& stack,
                           const std::vector<Tensor>& features, const std::vector<int>& labels) {
    std::vector<evalkit::ProbVector> probs;
    probs.reserve(features.size());
    for (const auto& f : features) probs.push_back(forward_features(model, stack, f));
    return evalkit::top_k_accuracy(probs, labels, 1);
}

}  // namespace

evalkit::ProbVector predict(const BaselineModel& model, const std::array<corpus::ViewImage, 4>& views) {
    return forward_features(model, model.stack(), feature_tensor(model, views));
}

BaselineTrainResult train_baseline(Variant variant, const std::vector<corpus::LoadedExam>& train,
                                   const std::vector<corpus::LoadedExam>& validation, int bins,
                                   const BaselineTrainOptions& options) {
    if (train.empty() || validation.empty()) {
        throw Error(ErrorCategory::Data, "baseline training needs non-empty train and validation splits");
    }
    if (options.batch_size < 1 || options.epochs < 0) {
        throw Error(ErrorCategory::Config, "invalid baseline training options");
    }

    Rng rng(derive_seed(options.seed, 0xBA5E, bins));
    BaselineModel model = init_baseline(variant, bins, rng);
    const Stack stack = model.stack();

    BaselineTrainResult result;
    result.model = model;
    if (options.epochs == 0) return result;

    std::vector<Tensor> train_features, val_features;
    std::vector<int> train_labels, val_labels;
    train_features.reserve(train.size());
    for (const auto& exam : train) {
        train_features.push_back(feature_tensor(model, exam.views));
        train_labels.push_back(exam.label);
    }
    val_features.reserve(validation.size());
    for (const auto& exam : validation) {
        val_features.push_back(feature_tensor(model, exam.views));
        val_labels.push_back(exam.label);
    }

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.uniform_index(i)]);
        }
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t end = std::min(order.size(), start + options.batch_size);
            const double scale = 1.0 / static_cast<double>(end - start);
            Gradients grads(model.params);
            std::vector<Tensor> activations;
            for (std::size_t i = start; i < end; ++i) {
                const Tensor& features = train_features[order[i]];
                Tensor probs = numerics::forward_stack(stack, model.params, features, &activations);
                Tensor loss_grad = numerics::cross_entropy_backward(probs, train_labels[order[i]]);
                numerics::backward_stack(stack, model.params, activations, loss_grad, grads, scale);
            }
            numerics::adam_step(model.params, grads, options.learning_rate);
        }

        const double accuracy = validation_accuracy(model, stack, val_features, val_labels);
        result.validation_accuracy.push_back(accuracy);
        if (result.best_epoch == 0 || accuracy > result.best_accuracy) {
            result.best_epoch = epoch;
            result.best_accuracy = accuracy;
            result.model = model;
        }
    }
    return result;
}

BinsTuneResult tune_bins(Variant variant, std::vector<int> candidates,
                         const std::vector<corpus::LoadedExam>& train,
                         const std::vector<corpus::LoadedExam>& validation,
                         const BaselineTrainOptions& options) {
    if (candidates.empty()) {
        throw Error(ErrorCategory::Config, "bin tuning needs at least one candidate");
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    BinsTuneResult result;
    for (int bins : candidates) {
        BaselineTrainResult trained = train_baseline(variant, train, validation, bins, options);
        const double accuracy = trained.best_epoch == 0 ? 0.0 : trained.best_accuracy;
        result.accuracy_per_candidate.emplace_back(bins, accuracy);
        if (result.best_bins == 0 || accuracy > result.best.best_accuracy) {
            result.best_bins = bins;
            result.best = std::move(trained);
        }
    }
    return result;
}

void save_baseline(const BaselineModel& model, const std::filesystem::path& ntw_path) {
    numerics::save_ntw(ntw_path, model.params);
    Json sidecar;
    sidecar["kind"] = "baseline";
    sidecar["variant"] = variant_name(model.variant);
    sidecar["bins"] = model.bins;
    std::filesystem::path json_path = ntw_path;
    json_path.replace_extension(".json");
    write_json_file(json_path, sidecar);
}

BaselineModel load_baseline(const std::filesystem::path& ntw_path) {
    std::filesystem::path json_path = ntw_path;
    json_path.replace_extension(".json");
    const Json sidecar = read_json_file(json_path);
    BaselineModel model;
    model.variant = variant_from_name(sidecar.at("variant").get<std::string>());
    model.bins = sidecar.at("bins").get<int>();
    model.params = numerics::load_ntw(ntw_path);

    // Shape sanity against the declared variant and bins.
    for (const auto& node : model.stack()) {
        for (const auto& [suffix, shape] : node.spec.param_shapes()) {
            const auto& name = node.prefix + "." + suffix;
            if (!model.params.has(name) || model.params.at(name).shape() != shape) {
                throw Error(ErrorCategory::Config,
                            "baseline weights do not match sidecar (parameter " + name + ")");
            }
        }
    }
    return model;
}

}  // namespace density::baseline
