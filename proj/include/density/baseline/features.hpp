#pragma once

#include <vector>

#include "density/corpus/types.hpp"

namespace density::baseline {

// Per-view pixel-intensity histogram features: B equal-width bins over
// [0, 65536) per view, each view normalized to sum 1, concatenated in the
// fixed view order (L-CC, R-CC, L-MLO, R-MLO).
struct HistogramFeatures {
    int bins = 0;
    std::vector<double> values;  // length 4 * bins
};

HistogramFeatures extract_features(const std::array<corpus::ViewImage, 4>& views, int bins);

}  // namespace density::baseline
