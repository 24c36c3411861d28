#pragma once

#include <cstddef>
#include <string>

#include "glme/image_stack.hpp"

namespace glme {

/// Writes the stack as consecutive little-endian IEEE-754 doubles in
/// band-major order (all of band 0's pixels row-major, then band 1, ...),
/// plus a JSON sidecar at data_path + ".json" holding bands/height/width.
/// Throws IoError on any filesystem failure.
void write_image_stack(const std::string& data_path, const ImageStack& stack);

/// Reads a stack written by write_image_stack; the sidecar is looked up at
/// data_path + ".json".  Throws IoError on missing/short files or malformed
/// sidecars and ValueError on non-finite payloads.
ImageStack read_image_stack(const std::string& data_path);

/// 8-bit grayscale PNG of one band, min-max normalized over that band
/// (a constant band maps to mid-gray).
void write_band_png(const std::string& path, const ImageStack& stack, std::size_t band);

/// 8-bit RGB PNG from three bands, each min-max normalized independently.
void write_rgb_png(const std::string& path, const ImageStack& stack, std::size_t r_band,
                   std::size_t g_band, std::size_t b_band);

}  // namespace glme
