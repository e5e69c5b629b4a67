#pragma once

#include "density/common/rng.hpp"
#include "density/corpus/types.hpp"

namespace density::cnn {

// Train-time augmentation only; evaluation paths construct it disabled.
struct AugmentationPolicy {
    int max_translation_px = 8;
    double intensity_jitter = 0.05;  // multiplicative, uniform in [1-j, 1+j]
    bool enabled = false;
};

// Integer translation with zero fill plus multiplicative intensity jitter,
// clamped to the 16-bit range. A disabled policy returns the image
// unchanged and consumes no randomness.
corpus::ViewImage augment(const corpus::ViewImage& image, const AugmentationPolicy& policy, Rng& rng);

}  // namespace density::cnn
