#pragma once

#include <cstddef>
#include <vector>

#include "glme/image_stack.hpp"

namespace glme {

/// Multiband image-quality scores of an estimate against a reference.
struct FusionMetrics {
    /// Per-band peak signal-to-noise ratio in dB,
    /// 10*log10(max(x_i)^2 / (||x_i - xhat_i||^2 / P)); +infinity when the
    /// band is reproduced exactly.
    std::vector<double> psnr_per_band;

    /// Mean spectral angle over pixels, in radians:
    /// acos(x_j . xhat_j / (||x_j|| ||xhat_j||)).  Pixels where either
    /// spectral vector has zero norm are skipped and counted below.
    double sam = 0.0;
    std::size_t sam_skipped_pixels = 0;

    /// 100 * d * sqrt((1/B) sum_i mse_i / mean_i^2) with mse_i the per-band
    /// mean squared error and mean_i the reference band mean; d is the
    /// resolution ratio between the degraded and fused grids.
    double ergas = 0.0;

    /// Universal quality index Q = 4*cov*mx*my / ((varx+vary)*(mx^2+my^2)),
    /// evaluated on 8x8 windows with stride 4 (one full-image window when the
    /// image is smaller) and averaged over windows and bands.
    double q_index = 0.0;
};

/// Scores `estimate` against `reference`.  Both stacks must share shape.
/// `resolution_ratio` is the d of the ERGAS formula (e.g. the downsampling
/// factor of the observation model).  Throws DimensionError on shape
/// mismatch, ValueError for a non-positive ratio, and MetricError when a
/// reference band has zero mean (ERGAS undefined).
FusionMetrics compute_metrics(const ImageStack& reference, const ImageStack& estimate,
                              double resolution_ratio);

}  // namespace glme
