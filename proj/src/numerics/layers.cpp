#include "density/numerics/layers.hpp"

#include <algorithm>
#include <cmath>

#include "density/common/error.hpp"

namespace density::numerics {

namespace {

[[noreturn]] void shape_error(const LayerSpec& layer, const std::string& detail) {
    throw Error(ErrorCategory::Shape, std::string(layer.kind_name()) + ": " + detail);
}

void require_rank3(const LayerSpec& layer, const std::vector<int>& shape) {
    if (shape.size() != 3) {
        shape_error(layer, "expected [channels, height, width] input, got " + shape_to_string(shape));
    }
}

struct ConvDims {
    int in_c, in_h, in_w;
    int out_h, out_w;
    int pad_top, pad_left, pad_h, pad_w;  // pad_h/pad_w are padded input sizes
};

ConvDims conv_dims(const LayerSpec& layer, const std::vector<int>& in_shape) {
    ConvDims d{};
    d.in_c = in_shape[0];
    d.in_h = in_shape[1];
    d.in_w = in_shape[2];
    if (d.in_c != layer.in_channels) {
        shape_error(layer, "input has " + std::to_string(d.in_c) + " channels, layer expects " +
                               std::to_string(layer.in_channels));
    }
    if (layer.same_padding) {
        d.out_h = (d.in_h + layer.stride - 1) / layer.stride;
        d.out_w = (d.in_w + layer.stride - 1) / layer.stride;
        const int total_h = std::max((d.out_h - 1) * layer.stride + layer.kernel_h - d.in_h, 0);
        const int total_w = std::max((d.out_w - 1) * layer.stride + layer.kernel_w - d.in_w, 0);
        d.pad_top = total_h / 2;
        d.pad_left = total_w / 2;
        d.pad_h = d.in_h + total_h;
        d.pad_w = d.in_w + total_w;
    } else {
        if (d.in_h < layer.kernel_h || d.in_w < layer.kernel_w) {
            shape_error(layer, "kernel " + std::to_string(layer.kernel_h) + "x" + std::to_string(layer.kernel_w) +
                                   " does not fit input " + shape_to_string(in_shape));
        }
        d.out_h = (d.in_h - layer.kernel_h) / layer.stride + 1;
        d.out_w = (d.in_w - layer.kernel_w) / layer.stride + 1;
        d.pad_top = 0;
        d.pad_left = 0;
        d.pad_h = d.in_h;
        d.pad_w = d.in_w;
    }
    return d;
}

Tensor pad_input(const Tensor& in, const ConvDims& d) {
    Tensor padded({d.in_c, d.pad_h, d.pad_w});
    for (int c = 0; c < d.in_c; ++c) {
        for (int y = 0; y < d.in_h; ++y) {
            const double* src = &in.data()[(static_cast<std::size_t>(c) * d.in_h + y) * d.in_w];
            double* dst = &padded.data()[((static_cast<std::size_t>(c) * d.pad_h) + y + d.pad_top) * d.pad_w +
                                         d.pad_left];
            std::copy(src, src + d.in_w, dst);
        }
    }
    return padded;
}

const Tensor& maybe_pad(const Tensor& in, const ConvDims& d, Tensor& storage) {
    if (d.pad_top == 0 && d.pad_left == 0 && d.pad_h == d.in_h && d.pad_w == d.in_w) return in;
    storage = pad_input(in, d);
    return storage;
}

Tensor conv_forward(const LayerSpec& layer, const Tensor& weight, const Tensor& bias, const Tensor& in) {
    const ConvDims d = conv_dims(layer, in.shape());
    Tensor padded_storage;
    const Tensor& x = maybe_pad(in, d, padded_storage);

    Tensor out({layer.out_channels, d.out_h, d.out_w});
    const int stride = layer.stride;
    const std::size_t plane = static_cast<std::size_t>(d.out_h) * d.out_w;

    for (int oc = 0; oc < layer.out_channels; ++oc) {
        double* out_plane = &out.data()[oc * plane];
        std::fill(out_plane, out_plane + plane, bias[oc]);
        for (int ic = 0; ic < layer.in_channels; ++ic) {
            for (int kh = 0; kh < layer.kernel_h; ++kh) {
                for (int kw = 0; kw < layer.kernel_w; ++kw) {
                    const double wv =
                        weight[((static_cast<std::size_t>(oc) * layer.in_channels + ic) * layer.kernel_h + kh) *
                                   layer.kernel_w +
                               kw];
                    for (int oh = 0; oh < d.out_h; ++oh) {
                        const double* __restrict__ in_row =
                            &x.data()[(static_cast<std::size_t>(ic) * d.pad_h + oh * stride + kh) * d.pad_w + kw];
                        double* __restrict__ out_row = out_plane + static_cast<std::size_t>(oh) * d.out_w;
                        if (stride == 1) {
                            for (int ow = 0; ow < d.out_w; ++ow) out_row[ow] += wv * in_row[ow];
                        } else {
                            for (int ow = 0; ow < d.out_w; ++ow) out_row[ow] += wv * in_row[ow * stride];
                        }
                    }
                }
            }
        }
    }
    return out;
}

LayerGradients conv_backward(const LayerSpec& layer, const Tensor& weight, const Tensor& in,
                             const Tensor& output_gradient) {
    const ConvDims d = conv_dims(layer, in.shape());
    Tensor padded_storage;
    const Tensor& x = maybe_pad(in, d, padded_storage);

    LayerGradients g;
    g.weight = Tensor::zeros(weight.shape());
    g.bias = Tensor::zeros({layer.out_channels});
    Tensor dx_padded({d.in_c, d.pad_h, d.pad_w});

    const int stride = layer.stride;
    const std::size_t plane = static_cast<std::size_t>(d.out_h) * d.out_w;

    for (int oc = 0; oc < layer.out_channels; ++oc) {
        const double* dout_plane = &output_gradient.data()[oc * plane];
        double bias_acc = 0.0;
        for (std::size_t i = 0; i < plane; ++i) bias_acc += dout_plane[i];
        g.bias[oc] = bias_acc;

        // Two passes so both inner loops vectorize: dW rows are dot
        // products, dX rows are axpy updates.
        for (int ic = 0; ic < layer.in_channels; ++ic) {
            for (int kh = 0; kh < layer.kernel_h; ++kh) {
                for (int kw = 0; kw < layer.kernel_w; ++kw) {
                    const std::size_t widx =
                        ((static_cast<std::size_t>(oc) * layer.in_channels + ic) * layer.kernel_h + kh) *
                            layer.kernel_w +
                        kw;
                    double w_acc = 0.0;
                    for (int oh = 0; oh < d.out_h; ++oh) {
                        const std::size_t row_base =
                            (static_cast<std::size_t>(ic) * d.pad_h + oh * stride + kh) * d.pad_w + kw;
                        const double* __restrict__ in_row = &x.data()[row_base];
                        const double* __restrict__ dout_row = dout_plane + static_cast<std::size_t>(oh) * d.out_w;
                        if (stride == 1) {
                            for (int ow = 0; ow < d.out_w; ++ow) w_acc += in_row[ow] * dout_row[ow];
                        } else {
                            for (int ow = 0; ow < d.out_w; ++ow) w_acc += in_row[ow * stride] * dout_row[ow];
                        }
                    }
                    g.weight[widx] += w_acc;

                    const double wv = weight[widx];
                    for (int oh = 0; oh < d.out_h; ++oh) {
                        const std::size_t row_base =
                            (static_cast<std::size_t>(ic) * d.pad_h + oh * stride + kh) * d.pad_w + kw;
                        double* __restrict__ dx_row = &dx_padded.data()[row_base];
                        const double* __restrict__ dout_row = dout_plane + static_cast<std::size_t>(oh) * d.out_w;
                        if (stride == 1) {
                            for (int ow = 0; ow < d.out_w; ++ow) dx_row[ow] += wv * dout_row[ow];
                        } else {
                            for (int ow = 0; ow < d.out_w; ++ow) dx_row[ow * stride] += wv * dout_row[ow];
                        }
                    }
                }
            }
        }
    }

    if (d.pad_top == 0 && d.pad_left == 0 && d.pad_h == d.in_h && d.pad_w == d.in_w) {
        g.input = std::move(dx_padded);
    } else {
        g.input = Tensor::zeros(in.shape());
        for (int c = 0; c < d.in_c; ++c) {
            for (int y = 0; y < d.in_h; ++y) {
                const double* src =
                    &dx_padded.data()[((static_cast<std::size_t>(c) * d.pad_h) + y + d.pad_top) * d.pad_w +
                                      d.pad_left];
                double* dst = &g.input.data()[(static_cast<std::size_t>(c) * d.in_h + y) * d.in_w];
                std::copy(src, src + d.in_w, dst);
            }
        }
    }
    return g;
}

struct PoolDims {
    int c, in_h, in_w, out_h, out_w;
};

PoolDims pool_dims(const LayerSpec& layer, const std::vector<int>& in_shape) {
    PoolDims d{};
    d.c = in_shape[0];
    d.in_h = in_shape[1];
    d.in_w = in_shape[2];
    if (d.in_h < layer.window_h || d.in_w < layer.window_w) {
        shape_error(layer, "window " + std::to_string(layer.window_h) + "x" + std::to_string(layer.window_w) +
                               " does not fit input " + shape_to_string(in_shape));
    }
    d.out_h = (d.in_h - layer.window_h) / layer.stride + 1;
    d.out_w = (d.in_w - layer.window_w) / layer.stride + 1;
    return d;
}

// Ties keep the first maximum in row-major window order.
std::size_t window_argmax(const Tensor& in, const PoolDims& d, const LayerSpec& layer, int c, int oh, int ow) {
    std::size_t best_idx = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int wy = 0; wy < layer.window_h; ++wy) {
        const int y = oh * layer.stride + wy;
        const std::size_t row = (static_cast<std::size_t>(c) * d.in_h + y) * d.in_w;
        for (int wx = 0; wx < layer.window_w; ++wx) {
            const std::size_t idx = row + ow * layer.stride + wx;
            if (in[idx] > best) {
                best = in[idx];
                best_idx = idx;
            }
        }
    }
    return best_idx;
}

Tensor maxpool_forward(const LayerSpec& layer, const Tensor& in) {
    const PoolDims d = pool_dims(layer, in.shape());
    Tensor out({d.c, d.out_h, d.out_w});
    for (int c = 0; c < d.c; ++c) {
        for (int oh = 0; oh < d.out_h; ++oh) {
            for (int ow = 0; ow < d.out_w; ++ow) {
                out.at3(c, oh, ow) = in[window_argmax(in, d, layer, c, oh, ow)];
            }
        }
    }
    return out;
}

Tensor maxpool_backward(const LayerSpec& layer, const Tensor& in, const Tensor& dout) {
    const PoolDims d = pool_dims(layer, in.shape());
    Tensor dx = Tensor::zeros(in.shape());
    for (int c = 0; c < d.c; ++c) {
        for (int oh = 0; oh < d.out_h; ++oh) {
            for (int ow = 0; ow < d.out_w; ++ow) {
                dx[window_argmax(in, d, layer, c, oh, ow)] += dout.at3(c, oh, ow);
            }
        }
    }
    return dx;
}

Tensor fc_forward(const LayerSpec& layer, const Tensor& weight, const Tensor& bias, const Tensor& in) {
    Tensor out({layer.out_features});
    const double* __restrict__ x = in.data();
    const int nin = layer.in_features;
    for (int o = 0; o < layer.out_features; ++o) {
        const double* __restrict__ w_row = &weight.data()[static_cast<std::size_t>(o) * nin];
        double acc = bias[o];
        for (int i = 0; i < nin; ++i) acc += w_row[i] * x[i];
        out[o] = acc;
    }
    return out;
}

LayerGradients fc_backward(const LayerSpec& layer, const Tensor& weight, const Tensor& in, const Tensor& dout) {
    LayerGradients g;
    g.input = Tensor::zeros(in.shape());
    g.weight = Tensor::zeros(weight.shape());
    g.bias = Tensor(dout.shape(), dout.values());

    const double* __restrict__ x = in.data();
    double* __restrict__ dx = g.input.data();
    const int nin = layer.in_features;
    for (int o = 0; o < layer.out_features; ++o) {
        const double go = dout[o];
        const double* __restrict__ w_row = &weight.data()[static_cast<std::size_t>(o) * nin];
        double* __restrict__ dw_row = &g.weight.data()[static_cast<std::size_t>(o) * nin];
        for (int i = 0; i < nin; ++i) {
            dx[i] += go * w_row[i];
            dw_row[i] = go * x[i];
        }
    }
    return g;
}

Tensor softmax_forward(const Tensor& in) {
    Tensor out(in.shape());
    const double m = *std::max_element(in.values().begin(), in.values().end());
    double total = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = std::exp(in[i] - m);
        total += out[i];
    }
    for (auto& v : out.values()) v /= total;
    return out;
}

Tensor softmax_backward(const Tensor& in, const Tensor& dout) {
    const Tensor p = softmax_forward(in);
    double dot = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dot += dout[i] * p[i];
    Tensor dx(in.shape());
    for (std::size_t i = 0; i < p.size(); ++i) dx[i] = p[i] * (dout[i] - dot);
    return dx;
}

}  // namespace

LayerSpec LayerSpec::conv(int in_channels, int out_channels, int kernel_h, int kernel_w, int stride,
                          bool same_padding) {
    if (in_channels <= 0 || out_channels <= 0 || kernel_h <= 0 || kernel_w <= 0 || stride <= 0) {
        throw Error(ErrorCategory::Config, "conv: extents must be positive");
    }
    LayerSpec s;
    s.kind = Kind::Conv;
    s.in_channels = in_channels;
    s.out_channels = out_channels;
    s.kernel_h = kernel_h;
    s.kernel_w = kernel_w;
    s.stride = stride;
    s.same_padding = same_padding;
    return s;
}

LayerSpec LayerSpec::maxpool(int window_h, int window_w, int stride) {
    if (window_h <= 0 || window_w <= 0 || stride < 0) {
        throw Error(ErrorCategory::Config, "maxpool: extents must be positive");
    }
    LayerSpec s;
    s.kind = Kind::MaxPool;
    s.window_h = window_h;
    s.window_w = window_w;
    s.stride = stride == 0 ? window_h : stride;
    return s;
}

LayerSpec LayerSpec::relu() {
    LayerSpec s;
    s.kind = Kind::Relu;
    return s;
}

LayerSpec LayerSpec::fully_connected(int in_features, int out_features) {
    if (in_features <= 0 || out_features <= 0) {
        throw Error(ErrorCategory::Config, "fullyconnected: extents must be positive");
    }
    LayerSpec s;
    s.kind = Kind::FullyConnected;
    s.in_features = in_features;
    s.out_features = out_features;
    return s;
}

LayerSpec LayerSpec::global_avg_pool() {
    LayerSpec s;
    s.kind = Kind::GlobalAvgPool;
    return s;
}

LayerSpec LayerSpec::softmax() {
    LayerSpec s;
    s.kind = Kind::Softmax;
    return s;
}

const char* LayerSpec::kind_name() const {
    switch (kind) {
        case Kind::Conv: return "conv";
        case Kind::MaxPool: return "maxpool";
        case Kind::Relu: return "relu";
        case Kind::FullyConnected: return "fullyconnected";
        case Kind::GlobalAvgPool: return "globalavgpool";
        case Kind::Softmax: return "softmax";
    }
    return "unknown";
}

std::vector<std::pair<std::string, std::vector<int>>> LayerSpec::param_shapes() const {
    switch (kind) {
        case Kind::Conv:
            return {{"weight", {out_channels, in_channels, kernel_h, kernel_w}}, {"bias", {out_channels}}};
        case Kind::FullyConnected:
            return {{"weight", {out_features, in_features}}, {"bias", {out_features}}};
        default:
            return {};
    }
}

std::vector<int> infer_output_shape(const LayerSpec& layer, const std::vector<int>& input_shape) {
    switch (layer.kind) {
        case LayerSpec::Kind::Conv: {
            require_rank3(layer, input_shape);
            const ConvDims d = conv_dims(layer, input_shape);
            return {layer.out_channels, d.out_h, d.out_w};
        }
        case LayerSpec::Kind::MaxPool: {
            require_rank3(layer, input_shape);
            const PoolDims d = pool_dims(layer, input_shape);
            return {d.c, d.out_h, d.out_w};
        }
        case LayerSpec::Kind::Relu:
        case LayerSpec::Kind::Softmax:
            return input_shape;
        case LayerSpec::Kind::GlobalAvgPool:
            require_rank3(layer, input_shape);
            return {input_shape[0]};
        case LayerSpec::Kind::FullyConnected: {
            if (static_cast<int>(shape_product(input_shape)) != layer.in_features) {
                shape_error(layer, "input " + shape_to_string(input_shape) + " flattens to " +
                                       std::to_string(shape_product(input_shape)) + ", layer expects " +
                                       std::to_string(layer.in_features));
            }
            return {layer.out_features};
        }
    }
    throw Error(ErrorCategory::Config, "unknown layer kind");
}

namespace {

void fetch_params(const LayerSpec& layer, const ParamSet& params, const std::string& prefix,
                  const Tensor** weight, const Tensor** bias) {
    const auto shapes = layer.param_shapes();
    const std::string wname = prefix + ".weight";
    const std::string bname = prefix + ".bias";
    *weight = &params.at(wname);
    *bias = &params.at(bname);
    if ((*weight)->shape() != shapes[0].second) {
        shape_error(layer, "parameter " + wname + " has shape " + (*weight)->shape_string() + ", expected " +
                               shape_to_string(shapes[0].second));
    }
    if ((*bias)->shape() != shapes[1].second) {
        shape_error(layer, "parameter " + bname + " has shape " + (*bias)->shape_string() + ", expected " +
                               shape_to_string(shapes[1].second));
    }
}

}  // namespace

Tensor forward(const LayerSpec& layer, const ParamSet& params, const std::string& prefix, const Tensor& input) {
    infer_output_shape(layer, input.shape());  // validates
    switch (layer.kind) {
        case LayerSpec::Kind::Conv: {
            const Tensor *w, *b;
            fetch_params(layer, params, prefix, &w, &b);
            return conv_forward(layer, *w, *b, input);
        }
        case LayerSpec::Kind::MaxPool:
            return maxpool_forward(layer, input);
        case LayerSpec::Kind::Relu: {
            Tensor out(input.shape(), input.values());
            for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
            return out;
        }
        case LayerSpec::Kind::FullyConnected: {
            const Tensor *w, *b;
            fetch_params(layer, params, prefix, &w, &b);
            return fc_forward(layer, *w, *b, input);
        }
        case LayerSpec::Kind::GlobalAvgPool: {
            const int c = input.dim(0);
            const std::size_t plane = static_cast<std::size_t>(input.dim(1)) * input.dim(2);
            Tensor out({c});
            for (int ch = 0; ch < c; ++ch) {
                const double* p = &input.data()[ch * plane];
                double acc = 0.0;
                for (std::size_t i = 0; i < plane; ++i) acc += p[i];
                out[ch] = acc / static_cast<double>(plane);
            }
            return out;
        }
        case LayerSpec::Kind::Softmax:
            return softmax_forward(input);
    }
    throw Error(ErrorCategory::Config, "unknown layer kind");
}

LayerGradients backward(const LayerSpec& layer, const ParamSet& params, const std::string& prefix,
                        const Tensor& input, const Tensor& output_gradient) {
    const auto out_shape = infer_output_shape(layer, input.shape());
    if (output_gradient.shape() != out_shape) {
        shape_error(layer, "output gradient has shape " + output_gradient.shape_string() + ", expected " +
                               shape_to_string(out_shape));
    }
    switch (layer.kind) {
        case LayerSpec::Kind::Conv: {
            const Tensor *w, *b;
            fetch_params(layer, params, prefix, &w, &b);
            return conv_backward(layer, *w, input, output_gradient);
        }
        case LayerSpec::Kind::MaxPool: {
            LayerGradients g;
            g.input = maxpool_backward(layer, input, output_gradient);
            return g;
        }
        case LayerSpec::Kind::Relu: {
            LayerGradients g;
            g.input = Tensor::zeros(input.shape());
            for (std::size_t i = 0; i < input.size(); ++i) {
                g.input[i] = input[i] > 0.0 ? output_gradient[i] : 0.0;
            }
            return g;
        }
        case LayerSpec::Kind::FullyConnected: {
            const Tensor *w, *b;
            fetch_params(layer, params, prefix, &w, &b);
            return fc_backward(layer, *w, input, output_gradient);
        }
        case LayerSpec::Kind::GlobalAvgPool: {
            LayerGradients g;
            g.input = Tensor::zeros(input.shape());
            const int c = input.dim(0);
            const std::size_t plane = static_cast<std::size_t>(input.dim(1)) * input.dim(2);
            for (int ch = 0; ch < c; ++ch) {
                const double v = output_gradient[ch] / static_cast<double>(plane);
                double* p = &g.input.data()[ch * plane];
                for (std::size_t i = 0; i < plane; ++i) p[i] = v;
            }
            return g;
        }
        case LayerSpec::Kind::Softmax: {
            LayerGradients g;
            g.input = softmax_backward(input, output_gradient);
            return g;
        }
    }
    throw Error(ErrorCategory::Config, "unknown layer kind");
}

double cross_entropy(const Tensor& probabilities, int true_class) {
    if (true_class < 0 || true_class >= static_cast<int>(probabilities.size())) {
        throw Error(ErrorCategory::Data, "cross_entropy: class index " + std::to_string(true_class) +
                                             " out of range for " + std::to_string(probabilities.size()) +
                                             " classes");
    }
    return -std::log(std::max(probabilities[static_cast<std::size_t>(true_class)], kProbabilityFloor));
}

Tensor cross_entropy_backward(const Tensor& probabilities, int true_class) {
    if (true_class < 0 || true_class >= static_cast<int>(probabilities.size())) {
        throw Error(ErrorCategory::Data, "cross_entropy: class index " + std::to_string(true_class) +
                                             " out of range for " + std::to_string(probabilities.size()) +
                                             " classes");
    }
    Tensor g = Tensor::zeros(probabilities.shape());
    const double p = probabilities[static_cast<std::size_t>(true_class)];
    if (p > kProbabilityFloor) {
        g[static_cast<std::size_t>(true_class)] = -1.0 / p;
    }
    return g;
}

Tensor forward_stack(const Stack& stack, const ParamSet& params, const Tensor& input,
                     std::vector<Tensor>* activations) {
    Tensor current = input;
    if (activations) {
        activations->clear();
        activations->reserve(stack.size() + 1);
        activations->push_back(current);
    }
    for (const auto& node : stack) {
        current = forward(node.spec, params, node.prefix, current);
        if (activations) activations->push_back(current);
    }
    return current;
}

Tensor backward_stack(const Stack& stack, const ParamSet& params, const std::vector<Tensor>& activations,
                      const Tensor& output_gradient, Gradients& grads, double scale) {
    if (activations.size() != stack.size() + 1) {
        throw Error(ErrorCategory::Config, "backward_stack: activation cache size mismatch");
    }
    Tensor upstream = output_gradient;
    for (std::size_t i = stack.size(); i-- > 0;) {
        const auto& node = stack[i];
        LayerGradients g = backward(node.spec, params, node.prefix, activations[i], upstream);
        if (node.spec.has_params()) {
            grads.accumulate(node.prefix + ".weight", g.weight, scale);
            grads.accumulate(node.prefix + ".bias", g.bias, scale);
        }
        upstream = std::move(g.input);
    }
    return upstream;
}

std::vector<int> infer_stack_output_shape(const Stack& stack, const std::vector<int>& input_shape) {
    std::vector<int> shape = input_shape;
    for (const auto& node : stack) shape = infer_output_shape(node.spec, shape);
    return shape;
}

}  // namespace density::numerics
