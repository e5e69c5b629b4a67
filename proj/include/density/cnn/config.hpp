#pragma once

#include <vector>

#include "density/common/jsonio.hpp"
#include "density/numerics/layers.hpp"

namespace density::cnn {

// Multi-column architecture: one convolutional column per view producing an
// embedding, concatenation in fixed view order, a hidden fully connected
// layer, and a softmax classifier head.
struct MultiColumnConfig {
    int input_height = 128;
    int input_width = 96;
    std::vector<numerics::LayerSpec> column_stack;  // must flatten to embedding_width
    int embedding_width = 256;
    int head_hidden = 1024;
    int output_classes = 4;  // 3 for the overall BI-RADS pretraining task
    bool share_columns = true;

    // Throws a config error (reporting the actual flattened size) when the
    // column stack does not produce the embedding width.
    void validate() const;
};

// Desk-scale column stack: three conv/relu/maxpool blocks (8, 16, 32
// channels), global average pooling, then a fully connected embedding.
std::vector<numerics::LayerSpec> default_column_stack(int embedding_width);

MultiColumnConfig default_multi_column_config();

Json config_to_json(const MultiColumnConfig& config);
MultiColumnConfig config_from_json(const Json& doc);

bool same_architecture_except_output(const MultiColumnConfig& a, const MultiColumnConfig& b);

}  // namespace density::cnn
