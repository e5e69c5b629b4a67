#pragma once

#include <string>
#include <utility>
#include <vector>

#include "density/numerics/params.hpp"
#include "density/numerics/tensor.hpp"

namespace density::numerics {

// One layer of the supported set. Spatial activations are [channels, height,
// width]; fully connected layers treat their input as flattened.
struct LayerSpec {
    enum class Kind { Conv, MaxPool, Relu, FullyConnected, GlobalAvgPool, Softmax };

    Kind kind = Kind::Relu;

    // conv
    int in_channels = 0;
    int out_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    int stride = 1;
    bool same_padding = false;  // default is valid (no padding)

    // maxpool
    int window_h = 0;
    int window_w = 0;

    // fully connected
    int in_features = 0;
    int out_features = 0;

    static LayerSpec conv(int in_channels, int out_channels, int kernel_h, int kernel_w, int stride = 1,
                          bool same_padding = false);
    static LayerSpec maxpool(int window_h, int window_w, int stride = 0);  // stride 0 -> window
    static LayerSpec relu();
    static LayerSpec fully_connected(int in_features, int out_features);
    static LayerSpec global_avg_pool();
    static LayerSpec softmax();

    bool has_params() const { return kind == Kind::Conv || kind == Kind::FullyConnected; }
    const char* kind_name() const;

    // Parameter name suffixes and shapes ("weight", "bias") for this layer.
    std::vector<std::pair<std::string, std::vector<int>>> param_shapes() const;
};

// Output shape for a given input shape; throws a shape error naming the layer
// when the input is incompatible.
std::vector<int> infer_output_shape(const LayerSpec& layer, const std::vector<int>& input_shape);

struct LayerGradients {
    Tensor input;
    Tensor weight;  // empty for parameterless layers
    Tensor bias;
};

// `prefix` locates the layer's parameters inside `params` as
// "<prefix>.weight" / "<prefix>.bias"; parameterless layers ignore it.
Tensor forward(const LayerSpec& layer, const ParamSet& params, const std::string& prefix, const Tensor& input);
LayerGradients backward(const LayerSpec& layer, const ParamSet& params, const std::string& prefix,
                        const Tensor& input, const Tensor& output_gradient);

// loss = -log(max(probabilities[true_class], 1e-12))
double cross_entropy(const Tensor& probabilities, int true_class);
Tensor cross_entropy_backward(const Tensor& probabilities, int true_class);

inline constexpr double kProbabilityFloor = 1e-12;

// A stack is a sequence of layers with parameter prefixes.
struct LayerNode {
    LayerSpec spec;
    std::string prefix;  // empty for parameterless layers
};
using Stack = std::vector<LayerNode>;

// Runs the stack; when `activations` is given it receives the input of every
// layer plus the final output (size = stack size + 1), as needed by backward.
Tensor forward_stack(const Stack& stack, const ParamSet& params, const Tensor& input,
                     std::vector<Tensor>* activations = nullptr);

// Backpropagates through the stack, accumulating parameter gradients scaled
// by `scale`; returns the gradient with respect to the stack input.
Tensor backward_stack(const Stack& stack, const ParamSet& params, const std::vector<Tensor>& activations,
                      const Tensor& output_gradient, Gradients& grads, double scale = 1.0);

std::vector<int> infer_stack_output_shape(const Stack& stack, const std::vector<int>& input_shape);

}  // namespace density::numerics
