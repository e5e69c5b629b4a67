#pragma once

#include "density/cnn/config.hpp"
#include "density/corpus/dataset.hpp"
#include "density/evalkit/metrics.hpp"

namespace density::cnn {

// Parameter prefixes: "column.l<k>" (shared) or "column<v>.l<k>" per view,
// plus "head.fc1" and "head.out". The final layer is always "head.out".
std::string column_prefix(const MultiColumnConfig& config, int view_index);
numerics::Stack column_nodes(const MultiColumnConfig& config, int view_index);
numerics::Stack head_nodes(const MultiColumnConfig& config);

// Glorot weights, zero biases; columns instantiated once when sharing is on.
numerics::ParamSet build_model(const MultiColumnConfig& config, Rng& rng);

numerics::Tensor image_to_tensor(const corpus::ViewImage& image);

// Columns in fixed view order, concatenation, head; a pure function of its
// inputs (no randomness on the evaluation path).
evalkit::ProbVector forward_exam(const numerics::ParamSet& params, const MultiColumnConfig& config,
                                 const std::array<corpus::ViewImage, 4>& views);

// One training example: forward, cross-entropy, backward through head and
// all four columns (fixed order). Parameter gradients accumulate into
// `grads` scaled by `scale`; returns the loss.
double exam_loss_and_gradients(const numerics::ParamSet& params, const MultiColumnConfig& config,
                               const std::array<corpus::ViewImage, 4>& views, int label,
                               numerics::Gradients& grads, double scale);

}  // namespace density::cnn
