#include "density/baseline/features.hpp"

#include "density/common/error.hpp"

namespace density::baseline {

HistogramFeatures extract_features(const std::array<corpus::ViewImage, 4>& views, int bins) {
    if (bins < 2) {
        throw Error(ErrorCategory::Config, "histogram features need at least 2 bins");
    }
    HistogramFeatures features;
    features.bins = bins;
    features.values.assign(static_cast<std::size_t>(4) * bins, 0.0);

    for (corpus::ViewKind kind : corpus::kViewOrder) {
        const auto& view = views[static_cast<int>(kind)];
        if (view.pixels.empty()) {
            throw Error(ErrorCategory::Data,
                        "missing view " + std::string(corpus::view_name(kind)) + " in feature extraction");
        }
        double* segment = &features.values[static_cast<std::size_t>(static_cast<int>(kind)) * bins];
        for (std::uint16_t p : view.pixels) {
            // floor(p * bins / 65536): index of the equal-width interval
            // containing p, with 65535 landing in the last bin.
            const auto bin = static_cast<std::size_t>((static_cast<std::uint64_t>(p) * bins) >> 16);
            segment[bin] += 1.0;
        }
        const double scale = 1.0 / static_cast<double>(view.pixels.size());
        for (int b = 0; b < bins; ++b) segment[b] *= scale;
    }
    return features;
}

}  // namespace density::baseline
