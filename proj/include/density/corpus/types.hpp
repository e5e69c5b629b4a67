#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace density::corpus {

// The four standard screening views, in the fixed order used everywhere
// (feature concatenation, column wiring, manifest keys).
enum class ViewKind { LCC = 0, RCC = 1, LMLO = 2, RMLO = 3 };

inline constexpr int kViewCount = 4;
inline constexpr std::array<ViewKind, 4> kViewOrder = {ViewKind::LCC, ViewKind::RCC, ViewKind::LMLO,
                                                       ViewKind::RMLO};

std::string_view view_name(ViewKind kind);            // "L-CC", "R-CC", "L-MLO", "R-MLO"
std::optional<ViewKind> view_from_name(std::string_view name);

inline bool is_right_side(ViewKind kind) { return kind == ViewKind::RCC || kind == ViewKind::RMLO; }
inline bool is_mlo(ViewKind kind) { return kind == ViewKind::LMLO || kind == ViewKind::RMLO; }

// Single-channel 16-bit intensity grid.
struct ViewImage {
    ViewKind kind = ViewKind::LCC;
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> pixels;  // row-major

    std::uint16_t at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint16_t& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

inline constexpr int kDensityClasses = 4;
inline constexpr int kBiradsClasses = 3;
inline constexpr std::uint16_t kMaxIntensity = 65535;

// Canonical density phrases, index = class.
const std::array<std::string_view, 4>& density_phrases();

struct ExamRecord {
    std::string exam_id;
    std::string patient_id;
    std::string date;  // ISO-8601 "YYYY-MM-DD"; lexicographic order is chronological
    std::array<std::string, 4> view_paths;  // indexed by ViewKind, relative to the manifest
    std::string report;

    // Label cache, filled by extract_labels / sidecar loading.
    std::optional<int> density;
    std::optional<int> birads;
};

struct Manifest {
    std::vector<ExamRecord> records;
};

}  // namespace density::corpus
