#pragma once

#include <string>

#include "advmask/image.hpp"

namespace advmask {

/// Reads an 8-bit PNG into [0,1] doubles. Grayscale files load with
/// channels == 1, color files with channels == 3; alpha is dropped.
Image read_png(const std::string& path);

/// Writes a 3-channel image as 8-bit RGB PNG.
void write_png_rgb(const std::string& path, const Image& img);

/// Writes a 1-channel image as 8-bit grayscale PNG (used for mask supports,
/// where values quantize to exactly 0 or 255).
void write_png_gray(const std::string& path, const Image& img);

}  // namespace advmask
