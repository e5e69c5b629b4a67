#pragma once

#include <filesystem>

#include "density/corpus/types.hpp"

namespace density::corpus {

// Binary PGM (P5), maxval 65535, big-endian 2-byte samples. Round trips
// are bit-exact. The view kind is not part of the format; callers tag the
// returned image from context.
void save_view(const ViewImage& image, const std::filesystem::path& path);
ViewImage load_view(const std::filesystem::path& path);

}  // namespace density::corpus
