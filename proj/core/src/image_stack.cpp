#include "glme/image_stack.hpp"

#include "glme/errors.hpp"

namespace glme {

ImageStack make_image_stack(std::size_t bands, std::size_t height, std::size_t width) {
    if (bands == 0 || height == 0 || width == 0) {
        throw ValueError("make_image_stack: bands, height, and width must be positive");
    }
    ImageStack stack;
    stack.bands = bands;
    stack.height = height;
    stack.width = width;
    stack.data = DenseMatrix(bands, height * width);
    return stack;
}

void validate_image_stack(const ImageStack& stack) {
    if (stack.bands == 0 || stack.height == 0 || stack.width == 0) {
        throw ValueError("ImageStack: bands, height, and width must be positive");
    }
    if (stack.data.rows() != stack.bands || stack.data.cols() != stack.pixels()) {
        throw DimensionError("ImageStack: data must be bands x (height*width)");
    }
    if (!stack.data.all_finite()) {
        throw ValueError("ImageStack: data must be finite");
    }
}

}  // namespace glme
