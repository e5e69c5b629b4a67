#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "density/common/rng.hpp"
#include "density/corpus/types.hpp"

namespace density::synthgen {

// Configuration for the synthetic exam generator. The phantom is a
// half-ellipse breast anchored to the chest-wall edge; fibroglandular
// tissue renders as bright elliptical blobs over dark fat. MLO views add
// a bright pectoral wedge in the top chest corner and CC views a bright
// chest-wall band, both at gland intensity with randomized extent, so the
// per-view bright mass alone does not determine the tissue fraction;
// per-view size and gain jitter further decouple the class signal from
// the global histogram while leaving it spatially obvious.
struct PhantomConfig {
    int image_height = 128;
    int image_width = 96;

    // Per-class tissue-fraction intervals [lo, hi), disjoint and increasing.
    std::array<std::array<double, 2>, 4> tissue_fraction = {{{0.02, 0.10}, {0.10, 0.40}, {0.40, 0.75}, {0.75, 0.95}}};

    double noise_sigma = 2000.0;

    std::array<double, 4> class_marginals{};                    // P(density)
    std::array<std::array<double, 3>, 4> birads_given_density{};  // rows: density, cols: BI-RADS 0/1/2

    std::uint64_t master_seed = 0;

    // Intensity model (16-bit scale).
    double background_level = 300.0;
    double fat_level = 12000.0;
    double gland_level = 45000.0;
    double gain_lo = 0.90;  // per-view exposure gain
    double gain_hi = 1.10;

    // Geometry jitter, as fractions of image extent.
    double breast_axis_lo = 0.55;  // horizontal semi-axis / width
    double breast_axis_hi = 0.80;
    double breast_vert_lo = 0.32;  // vertical semi-axis / height
    double breast_vert_hi = 0.48;
    double wedge_leg_lo = 0.20;  // pectoral wedge legs (MLO views)
    double wedge_w_hi = 0.50;
    double wedge_h_hi = 0.45;
    double cc_band_lo = 0.02;  // chest-wall band width (CC views)
    double cc_band_hi = 0.15;

    void validate() const;
};

// Defaults: image geometry and noise above, class marginals and the
// BI-RADS-given-density conditionals from the published label counts.
PhantomConfig default_phantom_config(std::uint64_t master_seed);

// Region labels for one rendered view. Wedge covers both pectoral
// structures: the MLO triangle and the CC chest-wall band.
enum class Region : std::uint8_t { Background = 0, Tissue = 1, Wedge = 2 };

struct RenderDebug {
    double sampled_fraction = 0.0;  // target bright fraction of the tissue region
    double bright_fraction = 0.0;   // achieved fraction after blob placement
    double gain = 1.0;
    std::vector<Region> mask;  // row-major, image-sized
    std::size_t tissue_pixels = 0;
};

// Renders one view for a density class. Deterministic in (config, rng state);
// every random quantity (geometry, tissue fraction, blobs, noise) is drawn
// from `rng`.
corpus::ViewImage render_view(int density_class, corpus::ViewKind view, const PhantomConfig& config, Rng& rng,
                              RenderDebug* debug = nullptr);

}  // namespace density::synthgen
