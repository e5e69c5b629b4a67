#include "density/cnn/augment.hpp"

#include <algorithm>
#include <cmath>

#include "density/common/error.hpp"

namespace density::cnn {

corpus::ViewImage augment(const corpus::ViewImage& image, const AugmentationPolicy& policy, Rng& rng) {
    if (!policy.enabled) return image;
    if (policy.max_translation_px < 0 || policy.intensity_jitter < 0.0 || policy.intensity_jitter >= 1.0) {
        throw Error(ErrorCategory::Config, "invalid augmentation policy");
    }

    const int dx = rng.uniform_int(-policy.max_translation_px, policy.max_translation_px);
    const int dy = rng.uniform_int(-policy.max_translation_px, policy.max_translation_px);
    const double gain = rng.uniform(1.0 - policy.intensity_jitter, 1.0 + policy.intensity_jitter);

    corpus::ViewImage out;
    out.kind = image.kind;
    out.width = image.width;
    out.height = image.height;
    out.pixels.assign(image.pixels.size(), 0);

    for (int y = 0; y < image.height; ++y) {
        const int src_y = y - dy;
        if (src_y < 0 || src_y >= image.height) continue;
        for (int x = 0; x < image.width; ++x) {
            const int src_x = x - dx;
            if (src_x < 0 || src_x >= image.width) continue;
            const double value = std::round(static_cast<double>(image.at(src_y, src_x)) * gain);
            out.at(y, x) = static_cast<std::uint16_t>(std::clamp(value, 0.0, 65535.0));
        }
    }
    return out;
}

}  // namespace density::cnn
