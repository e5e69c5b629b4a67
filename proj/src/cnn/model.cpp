#include "density/cnn/model.hpp"

#include "density/common/error.hpp"

namespace density::cnn {

using numerics::LayerSpec;
using numerics::ParamSet;
using numerics::Stack;
using numerics::Tensor;

std::string column_prefix(const MultiColumnConfig& config, int view_index) {
    return config.share_columns ? "column" : "column" + std::to_string(view_index);
}

Stack column_nodes(const MultiColumnConfig& config, int view_index) {
    Stack nodes;
    const std::string base = column_prefix(config, view_index);
    for (std::size_t k = 0; k < config.column_stack.size(); ++k) {
        const auto& spec = config.column_stack[k];
        nodes.push_back({spec, spec.has_params() ? base + ".l" + std::to_string(k) : ""});
    }
    return nodes;
}

Stack head_nodes(const MultiColumnConfig& config) {
    Stack nodes;
    nodes.push_back(
        {LayerSpec::fully_connected(4 * config.embedding_width, config.head_hidden), "head.fc1"});
    nodes.push_back({LayerSpec::relu(), ""});
    nodes.push_back({LayerSpec::fully_connected(config.head_hidden, config.output_classes), "head.out"});
    nodes.push_back({LayerSpec::softmax(), ""});
    return nodes;
}

ParamSet build_model(const MultiColumnConfig& config, Rng& rng) {
    config.validate();
    ParamSet params;
    const int columns = config.share_columns ? 1 : 4;
    for (int v = 0; v < columns; ++v) {
        for (const auto& node : column_nodes(config, v)) {
            for (const auto& [suffix, shape] : node.spec.param_shapes()) {
                if (suffix == "bias") {
                    params.add(node.prefix + "." + suffix, Tensor::zeros(shape));
                } else {
                    params.add(node.prefix + "." + suffix, numerics::glorot_init(shape, rng));
                }
            }
        }
    }
    for (const auto& node : head_nodes(config)) {
        for (const auto& [suffix, shape] : node.spec.param_shapes()) {
            if (suffix == "bias") {
                params.add(node.prefix + "." + suffix, Tensor::zeros(shape));
            } else {
                params.add(node.prefix + "." + suffix, numerics::glorot_init(shape, rng));
            }
        }
    }
    return params;
}

Tensor image_to_tensor(const corpus::ViewImage& image) {
    Tensor t({1, image.height, image.width});
    const double scale = 1.0 / 65535.0;
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        t[i] = static_cast<double>(image.pixels[i]) * scale;
    }
    return t;
}

evalkit::ProbVector forward_exam(const ParamSet& params, const MultiColumnConfig& config,
                                 const std::array<corpus::ViewImage, 4>& views) {
    Tensor concat({4 * config.embedding_width});
    for (corpus::ViewKind kind : corpus::kViewOrder) {
        const int v = static_cast<int>(kind);
        const auto& view = views[v];
        if (view.height != config.input_height || view.width != config.input_width) {
            throw Error(ErrorCategory::Shape,
                        "view " + std::string(corpus::view_name(kind)) + ": expected " +
                            std::to_string(config.input_height) + "x" + std::to_string(config.input_width) +
                            ", got " + std::to_string(view.height) + "x" + std::to_string(view.width));
        }
        Tensor embedding = numerics::forward_stack(column_nodes(config, v), params, image_to_tensor(view));
        std::copy(embedding.values().begin(), embedding.values().end(),
                  concat.values().begin() + static_cast<std::ptrdiff_t>(v) * config.embedding_width);
    }
    Tensor probs = numerics::forward_stack(head_nodes(config), params, concat);
    return evalkit::ProbVector(probs.values().begin(), probs.values().end());
}

double exam_loss_and_gradients(const ParamSet& params, const MultiColumnConfig& config,
                               const std::array<corpus::ViewImage, 4>& views, int label,
                               numerics::Gradients& grads, double scale) {
    const int embedding = config.embedding_width;

    std::array<numerics::Stack, 4> columns;
    std::array<std::vector<Tensor>, 4> column_acts;
    Tensor concat({4 * embedding});
    for (int v = 0; v < 4; ++v) {
        columns[v] = column_nodes(config, v);
        Tensor out = numerics::forward_stack(columns[v], params, image_to_tensor(views[v]), &column_acts[v]);
        std::copy(out.values().begin(), out.values().end(),
                  concat.values().begin() + static_cast<std::ptrdiff_t>(v) * embedding);
    }
    const numerics::Stack head = head_nodes(config);
    std::vector<Tensor> head_acts;
    Tensor probs = numerics::forward_stack(head, params, concat, &head_acts);
    const double loss = numerics::cross_entropy(probs, label);

    Tensor loss_grad = numerics::cross_entropy_backward(probs, label);
    Tensor dconcat = numerics::backward_stack(head, params, head_acts, loss_grad, grads, scale);
    for (int v = 0; v < 4; ++v) {
        Tensor slice({embedding});
        std::copy(dconcat.values().begin() + static_cast<std::ptrdiff_t>(v) * embedding,
                  dconcat.values().begin() + static_cast<std::ptrdiff_t>(v + 1) * embedding,
                  slice.values().begin());
        numerics::backward_stack(columns[v], params, column_acts[v], slice, grads, scale);
    }
    return loss;
}

}  // namespace density::cnn
