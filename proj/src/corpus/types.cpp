#include "density/corpus/types.hpp"

namespace density::corpus {

std::string_view view_name(ViewKind kind) {
    switch (kind) {
        case ViewKind::LCC: return "L-CC";
        case ViewKind::RCC: return "R-CC";
        case ViewKind::LMLO: return "L-MLO";
        case ViewKind::RMLO: return "R-MLO";
    }
    return "?";
}

std::optional<ViewKind> view_from_name(std::string_view name) {
    for (ViewKind kind : kViewOrder) {
        if (view_name(kind) == name) return kind;
    }
    return std::nullopt;
}

const std::array<std::string_view, 4>& density_phrases() {
    static const std::array<std::string_view, 4> phrases = {
        "almost entirely fatty",
        "scattered areas of fibroglandular density",
        "heterogeneously dense",
        "extremely dense",
    };
    return phrases;
}

}  // namespace density::corpus
