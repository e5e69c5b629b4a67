#pragma once

#include <filesystem>

#include "density/numerics/params.hpp"

namespace density::numerics {

// NTW weight container: 8-byte magic "NTWEIGHT", 4-byte little-endian header
// length, a JSON header listing {name, shape, byte_offset} per tensor, then
// the concatenated little-endian float64 payload. Round-trips bit-exactly.
void save_ntw(const std::filesystem::path& path, const ParamSet& params);
ParamSet load_ntw(const std::filesystem::path& path);

}  // namespace density::numerics
