#pragma once

#include <optional>
#include <string>

#include "density/common/rng.hpp"

namespace density::synthgen {

// Templated screening-report prose embedding exactly one canonical density
// phrase, or none when `density_class` is empty (the deliberate
// missing-density case).
std::string compose_report(std::optional<int> density_class, Rng& rng);

}  // namespace density::synthgen
