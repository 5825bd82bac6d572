#pragma once

#include <string>
#include <vector>

#include "vgr/color.hpp"

namespace vgr {

// Linear-light image; row 0 is the bottom row (y-up, matching domain
// coordinates). Writers flip to top-down scan order and clamp.
struct Image {
    int width = 0, height = 0;
    std::vector<ColorRGB> pixels;

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h) {}

    ColorRGB& at(int i, int j) { return pixels[static_cast<size_t>(j) * width + i]; }
    const ColorRGB& at(int i, int j) const { return pixels[static_cast<size_t>(j) * width + i]; }
};

double linear_to_srgb(double c);

// 8-bit sRGB PNG; deterministic output (no timestamps).
void write_png(const Image& image, const std::string& path);
// Binary P6 PPM, same 8-bit sRGB encoding.
void write_ppm(const Image& image, const std::string& path);

// Writes .png or .ppm depending on the file extension.
void write_image(const Image& image, const std::string& path);

}  // namespace vgr
