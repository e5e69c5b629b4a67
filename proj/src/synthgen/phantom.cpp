#include "density/synthgen/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "density/common/error.hpp"

namespace density::synthgen {

using corpus::ViewImage;
using corpus::ViewKind;

void PhantomConfig::validate() const {
    if (image_height <= 8 || image_width <= 8) {
        throw Error(ErrorCategory::Config, "phantom image dimensions too small");
    }
    double total = 0.0;
    for (double m : class_marginals) {
        if (m < 0.0) throw Error(ErrorCategory::Config, "negative class marginal");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCategory::Config, "class marginals must sum to 1");
    }
    for (const auto& row : birads_given_density) {
        double row_total = 0.0;
        for (double p : row) {
            if (p < 0.0) throw Error(ErrorCategory::Config, "negative BI-RADS conditional");
            row_total += p;
        }
        if (std::abs(row_total - 1.0) > 1e-9) {
            throw Error(ErrorCategory::Config, "each BI-RADS conditional row must sum to 1");
        }
    }
    double prev_hi = -1.0;
    for (const auto& interval : tissue_fraction) {
        if (!(interval[0] < interval[1]) || interval[0] < 0.0 || interval[1] > 1.0) {
            throw Error(ErrorCategory::Config, "tissue-fraction intervals must be increasing within [0, 1]");
        }
        if (interval[0] < prev_hi) {
            throw Error(ErrorCategory::Config, "tissue-fraction intervals must be disjoint and increasing");
        }
        prev_hi = interval[1];
    }
    if (noise_sigma < 0.0) throw Error(ErrorCategory::Config, "noise sigma must be non-negative");
}

PhantomConfig default_phantom_config(std::uint64_t master_seed) {
    PhantomConfig config;
    config.master_seed = master_seed;

    // Published label counts: density marginals 19939/85665/83852/11723
    // (total 201179) and per-density BI-RADS columns of the same table.
    const std::array<double, 4> density_counts = {19939, 85665, 83852, 11723};
    const std::array<std::array<double, 3>, 4> joint = {{
        {1702, 9803, 8434},
        {9607, 40060, 35998},
        {12656, 37167, 34029},
        {1839, 5157, 4727},
    }};
    double total = 0.0;
    for (double c : density_counts) total += c;
    for (int d = 0; d < 4; ++d) {
        config.class_marginals[d] = density_counts[d] / total;
        for (int b = 0; b < 3; ++b) {
            config.birads_given_density[d][b] = joint[d][b] / density_counts[d];
        }
    }
    return config;
}

namespace {

struct Geometry {
    double center_y;
    double semi_a;   // horizontal
    double semi_b;   // vertical
    double wedge_w;  // MLO pectoral triangle legs, 0 when absent
    double wedge_h;
    double band_w;   // CC chest-wall band width, 0 when absent
};

Geometry sample_geometry(const PhantomConfig& config, ViewKind view, Rng& rng) {
    Geometry g{};
    g.center_y = 0.5 * config.image_height + rng.uniform(-0.05, 0.05) * config.image_height;
    g.semi_a = rng.uniform(config.breast_axis_lo, config.breast_axis_hi) * config.image_width;
    g.semi_b = rng.uniform(config.breast_vert_lo, config.breast_vert_hi) * config.image_height;
    if (corpus::is_mlo(view)) {
        g.wedge_w = rng.uniform(config.wedge_leg_lo, config.wedge_w_hi) * config.image_width;
        g.wedge_h = rng.uniform(config.wedge_leg_lo, config.wedge_h_hi) * config.image_height;
    } else {
        g.band_w = rng.uniform(config.cc_band_lo, config.cc_band_hi) * config.image_width;
    }
    return g;
}

// Distance from the chest-wall edge; breast anatomy is mirrored for
// right-side views.
inline double chest_x(int x, int width, bool right_side) {
    return right_side ? static_cast<double>(width - 1 - x) : static_cast<double>(x);
}

std::vector<Region> build_mask(const PhantomConfig& config, ViewKind view, const Geometry& g) {
    const int h = config.image_height;
    const int w = config.image_width;
    const bool right = corpus::is_right_side(view);
    std::vector<Region> mask(static_cast<std::size_t>(h) * w, Region::Background);

    for (int y = 0; y < h; ++y) {
        const double dy = (static_cast<double>(y) - g.center_y) / g.semi_b;
        for (int x = 0; x < w; ++x) {
            const double cx = chest_x(x, w, right);
            const double dx = cx / g.semi_a;
            if (dx * dx + dy * dy <= 1.0) {
                // Chest-wall band (CC): pectoral structures along the edge.
                mask[static_cast<std::size_t>(y) * w + x] =
                    cx <= g.band_w ? Region::Wedge : Region::Tissue;
            }
        }
    }
    if (g.wedge_w > 0.0) {
        // Right triangle from the top chest-wall corner: covers points with
        // cx / wedge_w + y / wedge_h <= 1.
        for (int y = 0; y < h && y < static_cast<int>(g.wedge_h) + 1; ++y) {
            for (int x = 0; x < w; ++x) {
                const double cx = chest_x(x, w, right);
                if (cx / g.wedge_w + static_cast<double>(y) / g.wedge_h <= 1.0) {
                    mask[static_cast<std::size_t>(y) * w + x] = Region::Wedge;
                }
            }
        }
    }
    return mask;
}

// Covers approximately `target` of the eligible pixels with random rotated
// elliptical blobs; `covered` is toggled per blob pixel. Returns covered count.
std::size_t place_blobs(const PhantomConfig& config, const std::vector<Region>& mask,
                        std::vector<std::uint8_t>& covered, std::size_t target, Rng& rng) {
    const int h = config.image_height;
    const int w = config.image_width;
    const double min_dim = std::min(h, w);

    std::vector<std::size_t> tissue;
    tissue.reserve(mask.size() / 2);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] == Region::Tissue) tissue.push_back(i);
    }

    std::size_t count = 0;
    int stall = 0;
    while (count < target) {
        // Pick a blob center on uncovered tissue; after repeated collisions,
        // scan for a free pixel so saturation terminates.
        std::size_t center = tissue[rng.uniform_index(tissue.size())];
        if (covered[center]) {
            if (++stall < 32) continue;
            std::size_t probe = rng.uniform_index(tissue.size());
            bool found = false;
            for (std::size_t k = 0; k < tissue.size(); ++k) {
                const std::size_t idx = tissue[(probe + k) % tissue.size()];
                if (!covered[idx]) {
                    center = idx;
                    found = true;
                    break;
                }
            }
            if (!found) break;  // tissue fully covered
        }
        stall = 0;

        const int cy = static_cast<int>(center) / w;
        const int cx = static_cast<int>(center) % w;
        const double rx = rng.uniform(0.025, 0.06) * min_dim;
        const double ry = rng.uniform(0.025, 0.06) * min_dim;
        const double theta = rng.uniform(0.0, M_PI);
        const double ct = std::cos(theta), st = std::sin(theta);
        const int reach = static_cast<int>(std::ceil(std::max(rx, ry))) + 1;

        for (int y = std::max(0, cy - reach); y <= std::min(h - 1, cy + reach); ++y) {
            for (int x = std::max(0, cx - reach); x <= std::min(w - 1, cx + reach); ++x) {
                const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                if (mask[idx] != Region::Tissue || covered[idx]) continue;
                const double px = x - cx, py = y - cy;
                const double u = (px * ct + py * st) / rx;
                const double v = (-px * st + py * ct) / ry;
                if (u * u + v * v <= 1.0) {
                    covered[idx] = 1;
                    ++count;
                }
            }
        }
    }
    return count;
}

}  // namespace

ViewImage render_view(int density_class, ViewKind view, const PhantomConfig& config, Rng& rng,
                      RenderDebug* debug) {
    config.validate();
    if (density_class < 0 || density_class >= corpus::kDensityClasses) {
        throw Error(ErrorCategory::Data, "density class out of range: " + std::to_string(density_class));
    }

    const Geometry g = sample_geometry(config, view, rng);
    const std::vector<Region> mask = build_mask(config, view, g);

    std::size_t tissue_pixels = 0;
    for (Region r : mask) tissue_pixels += r == Region::Tissue ? 1 : 0;

    const auto& interval = config.tissue_fraction[density_class];
    const double fraction = rng.uniform(interval[0], interval[1]);
    const double gain = rng.uniform(config.gain_lo, config.gain_hi);

    // For dense classes it is cheaper to carve fat out of a bright field.
    const bool invert = fraction > 0.5;
    const double blob_fraction = invert ? 1.0 - fraction : fraction;
    const auto target = static_cast<std::size_t>(std::llround(blob_fraction * static_cast<double>(tissue_pixels)));

    std::vector<std::uint8_t> covered(mask.size(), 0);
    const std::size_t blob_count = place_blobs(config, mask, covered, target, rng);
    const std::size_t bright_count = invert ? tissue_pixels - blob_count : blob_count;

    ViewImage image;
    image.kind = view;
    image.width = config.image_width;
    image.height = config.image_height;
    image.pixels.resize(mask.size());

    const double fat = config.fat_level * gain;
    const double gland = config.gland_level * gain;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        double level;
        switch (mask[i]) {
            case Region::Background: level = config.background_level; break;
            case Region::Wedge: level = gland; break;
            default: {
                const bool bright = invert ? !covered[i] : static_cast<bool>(covered[i]);
                level = bright ? gland : fat;
            }
        }
        const double value = level + rng.normal(0.0, config.noise_sigma);
        image.pixels[i] = static_cast<std::uint16_t>(std::clamp(value, 0.0, 65535.0));
    }

    if (debug) {
        debug->sampled_fraction = fraction;
        debug->bright_fraction =
            tissue_pixels ? static_cast<double>(bright_count) / static_cast<double>(tissue_pixels) : 0.0;
        debug->gain = gain;
        debug->mask = mask;
        debug->tissue_pixels = tissue_pixels;
    }
    return image;
}

}  // namespace density::synthgen
