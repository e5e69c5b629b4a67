#include "density/synthgen/report.hpp"

#include <array>

#include "density/common/error.hpp"
#include "density/corpus/types.hpp"

namespace density::synthgen {

namespace {

// Surrounding sentences avoid every word of the canonical phrases so a
// report can never match more than one class.
const std::array<std::string, 4> kOpeners = {
    "Screening mammogram, four standard views obtained.",
    "Bilateral digital screening mammography was performed.",
    "Four-view screening study acquired without complication.",
    "Screening examination of both sides, standard projections.",
};

const std::array<std::string, 4> kFindings = {
    "No suspicious masses, calcifications, or architectural distortion.",
    "No dominant mass or suspicious grouped calcifications identified.",
    "Skin and nipples appear unremarkable.",
    "Stable postsurgical changes, otherwise unremarkable survey.",
};

const std::array<std::string, 3> kClosers = {
    "Routine screening follow-up is recommended.",
    "Recommend continued annual screening.",
    "Results were communicated to the referring physician.",
};

std::string carrier_sentence(int density_class) {
    const auto& phrase = corpus::density_phrases()[density_class];
    switch (density_class) {
        case 0: return "The breasts are " + std::string(phrase) + ".";
        case 1: return "There are " + std::string(phrase) + ".";
        case 2: return "The breast tissue is " + std::string(phrase) + ", which may obscure small masses.";
        default: return "The breast tissue is " + std::string(phrase) + ".";
    }
}

}  // namespace

std::string compose_report(std::optional<int> density_class, Rng& rng) {
    if (density_class && (*density_class < 0 || *density_class >= corpus::kDensityClasses)) {
        throw Error(ErrorCategory::Data, "density class out of range: " + std::to_string(*density_class));
    }
    std::string report = kOpeners[rng.uniform_index(kOpeners.size())];
    report += " ";
    report += kFindings[rng.uniform_index(kFindings.size())];
    if (density_class) {
        report += " ";
        report += carrier_sentence(*density_class);
    }
    report += " ";
    report += kClosers[rng.uniform_index(kClosers.size())];
    return report;
}

}  // namespace density::synthgen
