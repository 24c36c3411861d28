#pragma once

#include <cstddef>

#include "glme/dense_matrix.hpp"

namespace glme {

/// A multiband raster held as one matrix: row b is band b, column p is pixel
/// p under the row-major flattening p = y*width + x.
struct ImageStack {
    std::size_t bands = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    DenseMatrix data;  ///< bands x (height*width)

    std::size_t pixels() const noexcept { return height * width; }

    double& at(std::size_t band, std::size_t y, std::size_t x) {
        return data(band, y * width + x);
    }
    double at(std::size_t band, std::size_t y, std::size_t x) const {
        return data(band, y * width + x);
    }
};

/// Zero-filled stack of the given geometry.  Throws ValueError on a zero
/// dimension.
ImageStack make_image_stack(std::size_t bands, std::size_t height, std::size_t width);

/// Checks the geometry/data consistency invariants; throws DimensionError or
/// ValueError when violated.
void validate_image_stack(const ImageStack& stack);

}  // namespace glme
