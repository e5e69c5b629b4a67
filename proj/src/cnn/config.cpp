#include "density/cnn/config.hpp"

#include "density/common/error.hpp"

namespace density::cnn {

using numerics::LayerSpec;

void MultiColumnConfig::validate() const {
    if (input_height < 8 || input_width < 8) {
        throw Error(ErrorCategory::Config, "input dimensions too small");
    }
    if (embedding_width < 1 || head_hidden < 1 || output_classes < 2) {
        throw Error(ErrorCategory::Config, "invalid head dimensions");
    }
    if (column_stack.empty()) {
        throw Error(ErrorCategory::Config, "column stack is empty");
    }
    std::vector<int> shape = {1, input_height, input_width};
    for (const auto& layer : column_stack) shape = numerics::infer_output_shape(layer, shape);
    const auto flattened = numerics::shape_product(shape);
    if (flattened != static_cast<std::size_t>(embedding_width)) {
        throw Error(ErrorCategory::Config,
                    "column stack flattens to " + std::to_string(flattened) + ", expected embedding width " +
                        std::to_string(embedding_width));
    }
}

std::vector<LayerSpec> default_column_stack(int embedding_width) {
    return {
        LayerSpec::conv(1, 8, 3, 3),
        LayerSpec::relu(),
        LayerSpec::maxpool(2, 2),
        LayerSpec::conv(8, 16, 3, 3),
        LayerSpec::relu(),
        LayerSpec::maxpool(2, 2),
        LayerSpec::conv(16, 32, 3, 3),
        LayerSpec::relu(),
        LayerSpec::maxpool(2, 2),
        LayerSpec::global_avg_pool(),
        LayerSpec::fully_connected(32, embedding_width),
    };
}

MultiColumnConfig default_multi_column_config() {
    MultiColumnConfig config;
    config.column_stack = default_column_stack(config.embedding_width);
    return config;
}

namespace {

Json layer_to_json(const LayerSpec& layer) {
    Json doc;
    doc["kind"] = layer.kind_name();
    switch (layer.kind) {
        case LayerSpec::Kind::Conv:
            doc["in_channels"] = layer.in_channels;
            doc["out_channels"] = layer.out_channels;
            doc["kernel"] = {layer.kernel_h, layer.kernel_w};
            doc["stride"] = layer.stride;
            doc["same_padding"] = layer.same_padding;
            break;
        case LayerSpec::Kind::MaxPool:
            doc["window"] = {layer.window_h, layer.window_w};
            doc["stride"] = layer.stride;
            break;
        case LayerSpec::Kind::FullyConnected:
            doc["in_features"] = layer.in_features;
            doc["out_features"] = layer.out_features;
            break;
        default:
            break;
    }
    return doc;
}

LayerSpec layer_from_json(const Json& doc) {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "conv") {
        const auto kernel = doc.at("kernel").get<std::array<int, 2>>();
        return LayerSpec::conv(doc.at("in_channels").get<int>(), doc.at("out_channels").get<int>(), kernel[0],
                               kernel[1], doc.at("stride").get<int>(), doc.at("same_padding").get<bool>());
    }
    if (kind == "maxpool") {
        const auto window = doc.at("window").get<std::array<int, 2>>();
        return LayerSpec::maxpool(window[0], window[1], doc.at("stride").get<int>());
    }
    if (kind == "relu") return LayerSpec::relu();
    if (kind == "fullyconnected") {
        return LayerSpec::fully_connected(doc.at("in_features").get<int>(), doc.at("out_features").get<int>());
    }
    if (kind == "globalavgpool") return LayerSpec::global_avg_pool();
    if (kind == "softmax") return LayerSpec::softmax();
    throw Error(ErrorCategory::Config, "unknown layer kind in config: " + kind);
}

}  // namespace

Json config_to_json(const MultiColumnConfig& config) {
    Json doc;
    doc["input_height"] = config.input_height;
    doc["input_width"] = config.input_width;
    Json layers = Json::array();
    for (const auto& layer : config.column_stack) layers.push_back(layer_to_json(layer));
    doc["column_stack"] = std::move(layers);
    doc["embedding_width"] = config.embedding_width;
    doc["head_hidden"] = config.head_hidden;
    doc["output_classes"] = config.output_classes;
    doc["share_columns"] = config.share_columns;
    return doc;
}

MultiColumnConfig config_from_json(const Json& doc) {
    MultiColumnConfig config;
    config.input_height = doc.at("input_height").get<int>();
    config.input_width = doc.at("input_width").get<int>();
    for (const auto& layer : doc.at("column_stack")) {
        config.column_stack.push_back(layer_from_json(layer));
    }
    config.embedding_width = doc.at("embedding_width").get<int>();
    config.head_hidden = doc.at("head_hidden").get<int>();
    config.output_classes = doc.at("output_classes").get<int>();
    config.share_columns = doc.at("share_columns").get<bool>();
    return config;
}

bool same_architecture_except_output(const MultiColumnConfig& a, const MultiColumnConfig& b) {
    Json ja = config_to_json(a);
    Json jb = config_to_json(b);
    ja.erase("output_classes");
    jb.erase("output_classes");
    return ja == jb;
}

}  // namespace density::cnn
