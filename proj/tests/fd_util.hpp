#pragma once

// Finite-difference checking helpers shared by the unit and acceptance
// suites. Central differences are only meaningful at differentiable points,
// so instances whose activations sit within `kKinkMargin` of a rectifier
// zero or a pooling tie are reported as unusable and the caller skips to
// the next seed. An epsilon-sized parameter probe shifts activations by at
// most ~1e-5 here, so 3e-5 keeps probes clear of every kink; biases are
// drawn slightly positive so few activations sit near the rectifier zero
// in the first place.

#include <cmath>
#include <limits>

#include "density/cnn/model.hpp"
#include "density/numerics/gradcheck.hpp"
#include "density/numerics/layers.hpp"
#include "testutil.hpp"

namespace fdcheck {

inline constexpr double kKinkMargin = 3e-5;

// Minimum distance to a relu kink or pool tie along a stack evaluation.
inline double stack_kink_margin(const density::numerics::Stack& stack,
                                const std::vector<density::numerics::Tensor>& activations) {
    using density::numerics::LayerSpec;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < stack.size(); ++i) {
        const auto& spec = stack[i].spec;
        const auto& input = activations[i];
        if (spec.kind == LayerSpec::Kind::Relu) {
            for (double v : input.values()) margin = std::min(margin, std::abs(v));
        } else if (spec.kind == LayerSpec::Kind::MaxPool) {
            const int c = input.dim(0), h = input.dim(1), w = input.dim(2);
            const int oh = (h - spec.window_h) / spec.stride + 1;
            const int ow = (w - spec.window_w) / spec.stride + 1;
            for (int ch = 0; ch < c; ++ch) {
                for (int y = 0; y < oh; ++y) {
                    for (int x = 0; x < ow; ++x) {
                        double top = -std::numeric_limits<double>::infinity();
                        double second = top;
                        for (int wy = 0; wy < spec.window_h; ++wy) {
                            for (int wx = 0; wx < spec.window_w; ++wx) {
                                const double v = input.at3(ch, y * spec.stride + wy, x * spec.stride + wx);
                                if (v > top) {
                                    second = top;
                                    top = v;
                                } else if (v > second) {
                                    second = v;
                                }
                            }
                        }
                        // A 0-0 tie is a pair of rectifier-clamped cells; they
                        // stay clamped under any probe the relu margin admits.
                        if (std::isfinite(second) && !(top == 0.0 && second == 0.0)) {
                            margin = std::min(margin, top - second);
                        }
                    }
                }
            }
        }
    }
    return margin;
}

struct MultiColumnFdResult {
    bool usable = false;  // false: probe point too close to a kink, skip seed
    density::numerics::GradCheckReport report;
};

// One randomized full-model instance: random parameters (biases included),
// i.i.d. random view images, random label.
inline MultiColumnFdResult run_multi_column_fd(const density::cnn::MultiColumnConfig& config,
                                               std::uint64_t seed, double tolerance,
                                               int probes_per_param) {
    using namespace density;
    using numerics::Gradients;
    using numerics::ParamSet;
    using numerics::Tensor;

    Rng rng(seed);
    ParamSet params = cnn::build_model(config, rng);
    for (const auto& name : params.names()) {
        if (name.size() >= 4 && name.substr(name.size() - 4) == "bias") {
            for (auto& v : params.at(name).values()) v = rng.uniform(0.1, 0.4);
        }
    }

    std::array<corpus::ViewImage, 4> views;
    for (corpus::ViewKind kind : corpus::kViewOrder) {
        auto& view = views[static_cast<int>(kind)];
        view.kind = kind;
        view.width = config.input_width;
        view.height = config.input_height;
        view.pixels.resize(static_cast<std::size_t>(view.width) * view.height);
        for (auto& p : view.pixels) p = static_cast<std::uint16_t>(rng.uniform_index(65536));
    }
    const int label = static_cast<int>(rng.uniform_index(config.output_classes));

    MultiColumnFdResult result;

    // Reject probe points adjacent to kinks.
    double margin = std::numeric_limits<double>::infinity();
    for (int v = 0; v < 4; ++v) {
        const auto stack = cnn::column_nodes(config, v);
        std::vector<Tensor> acts;
        numerics::forward_stack(stack, params, cnn::image_to_tensor(views[v]), &acts);
        margin = std::min(margin, stack_kink_margin(stack, acts));
    }
    {
        Tensor concat({4 * config.embedding_width});
        for (int v = 0; v < 4; ++v) {
            Tensor out = numerics::forward_stack(cnn::column_nodes(config, v), params,
                                                 cnn::image_to_tensor(views[v]));
            std::copy(out.values().begin(), out.values().end(),
                      concat.values().begin() + static_cast<std::ptrdiff_t>(v) * config.embedding_width);
        }
        const auto head = cnn::head_nodes(config);
        std::vector<Tensor> acts;
        numerics::forward_stack(head, params, concat, &acts);
        margin = std::min(margin, stack_kink_margin(head, acts));
    }
    if (margin < kKinkMargin) return result;

    auto loss = [&](const ParamSet& p) {
        auto probs = cnn::forward_exam(p, config, views);
        return numerics::cross_entropy(Tensor::from_values(std::vector<double>(probs.begin(), probs.end())),
                                       label);
    };
    auto analytic = [&](const ParamSet& p, Gradients& g) {
        cnn::exam_loss_and_gradients(p, config, views, label, g, 1.0);
    };

    numerics::GradCheckOptions options;
    options.max_probes_per_param = probes_per_param;
    options.probe_seed = density::derive_seed(seed, 0xFD, 1);
    result.usable = true;
    result.report = numerics::gradient_check(loss, analytic, params, tolerance, options);
    return result;
}

}  // namespace fdcheck
