#include "glme/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glme/errors.hpp"

namespace glme {

namespace {

constexpr std::size_t kWindow = 8;
constexpr std::size_t kStride = 4;

/// Q of one window pair: mean/variance/covariance accumulated over the
/// window, population normalization (the shared 1/N factors cancel in the
/// ratio).  Identical windows score 1 even when the formula degenerates to
/// 0/0 (constant content); other degenerate windows score 0.
double window_q(const ImageStack& ref, const ImageStack& est, std::size_t band,
                std::size_t y0, std::size_t x0, std::size_t wh, std::size_t ww) {
    const double count = static_cast<double>(wh * ww);
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    bool identical = true;
    for (std::size_t y = y0; y < y0 + wh; ++y) {
        for (std::size_t x = x0; x < x0 + ww; ++x) {
            const double a = ref.at(band, y, x);
            const double b = est.at(band, y, x);
            identical = identical && a == b;
            sx += a;
            sy += b;
            sxx += a * a;
            syy += b * b;
            sxy += a * b;
        }
    }
    if (identical) return 1.0;
    const double mx = sx / count;
    const double my = sy / count;
    const double varx = sxx / count - mx * mx;
    const double vary = syy / count - my * my;
    const double cov = sxy / count - mx * my;
    const double denom = (varx + vary) * (mx * mx + my * my);
    if (denom == 0.0) return 0.0;
    return 4.0 * cov * mx * my / denom;
}

}  // namespace

FusionMetrics compute_metrics(const ImageStack& reference, const ImageStack& estimate,
                              double resolution_ratio) {
    validate_image_stack(reference);
    validate_image_stack(estimate);
    if (reference.bands != estimate.bands || reference.height != estimate.height ||
        reference.width != estimate.width) {
        throw DimensionError("compute_metrics: reference and estimate shapes differ");
    }
    if (!(resolution_ratio > 0.0)) {
        throw ValueError("compute_metrics: resolution ratio must be positive");
    }

    const std::size_t bands = reference.bands;
    const std::size_t pixels = reference.pixels();
    const double pixel_count = static_cast<double>(pixels);

    FusionMetrics out;
    out.psnr_per_band.resize(bands);

    // PSNR per band and the ERGAS accumulator.
    double ergas_sum = 0.0;
    for (std::size_t b = 0; b < bands; ++b) {
        double peak = reference.data(b, 0);
        double err2 = 0.0;
        double mean = 0.0;
        for (std::size_t p = 0; p < pixels; ++p) {
            const double r = reference.data(b, p);
            const double diff = r - estimate.data(b, p);
            peak = std::max(peak, r);
            err2 += diff * diff;
            mean += r;
        }
        mean /= pixel_count;
        const double mse = err2 / pixel_count;
        out.psnr_per_band[b] = mse == 0.0
                                   ? std::numeric_limits<double>::infinity()
                                   : 10.0 * std::log10(peak * peak / mse);
        if (mean == 0.0) {
            throw MetricError("compute_metrics: reference band has zero mean (ERGAS undefined)");
        }
        ergas_sum += mse / (mean * mean);
    }
    out.ergas = 100.0 * resolution_ratio * std::sqrt(ergas_sum / static_cast<double>(bands));

    // SAM: mean spectral angle over pixels with both vectors nonzero.
    double angle_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t p = 0; p < pixels; ++p) {
        double dot = 0.0, nr = 0.0, ne = 0.0;
        for (std::size_t b = 0; b < bands; ++b) {
            const double r = reference.data(b, p);
            const double e = estimate.data(b, p);
            dot += r * e;
            nr += r * r;
            ne += e * e;
        }
        if (nr == 0.0 || ne == 0.0) {
            ++out.sam_skipped_pixels;
            continue;
        }
        const double c = std::clamp(dot / std::sqrt(nr * ne), -1.0, 1.0);
        angle_sum += std::acos(c);
        ++counted;
    }
    out.sam = counted ? angle_sum / static_cast<double>(counted) : 0.0;

    // Q index: mean over bands of the mean over sliding windows.
    const std::size_t wh = std::min(kWindow, reference.height);
    const std::size_t ww = std::min(kWindow, reference.width);
    double q_band_sum = 0.0;
    for (std::size_t b = 0; b < bands; ++b) {
        double q_sum = 0.0;
        std::size_t windows = 0;
        for (std::size_t y0 = 0; y0 + wh <= reference.height; y0 += kStride) {
            for (std::size_t x0 = 0; x0 + ww <= reference.width; x0 += kStride) {
                q_sum += window_q(reference, estimate, b, y0, x0, wh, ww);
                ++windows;
            }
        }
        q_band_sum += q_sum / static_cast<double>(windows);
    }
    out.q_index = q_band_sum / static_cast<double>(bands);

    return out;
}

}  // namespace glme
