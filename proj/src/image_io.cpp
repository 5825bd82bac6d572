#include "vgr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace vgr {

double linear_to_srgb(double c) {
    c = std::clamp(c, 0.0, 1.0);
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

namespace {

std::vector<unsigned char> to_srgb_rows(const Image& image) {
    std::vector<unsigned char> data(static_cast<size_t>(image.width) * image.height * 3);
    for (int j = 0; j < image.height; ++j) {
        // top-down scan order
        int row = image.height - 1 - j;
        for (int i = 0; i < image.width; ++i) {
            const ColorRGB& c = image.at(i, row);
            size_t o = (static_cast<size_t>(j) * image.width + i) * 3;
            data[o + 0] = static_cast<unsigned char>(std::lround(255.0 * linear_to_srgb(c.r)));
            data[o + 1] = static_cast<unsigned char>(std::lround(255.0 * linear_to_srgb(c.g)));
            data[o + 2] = static_cast<unsigned char>(std::lround(255.0 * linear_to_srgb(c.b)));
        }
    }
    return data;
}

}  // namespace

void write_png(const Image& image, const std::string& path) {
    std::vector<unsigned char> data = to_srgb_rows(image);

    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw std::runtime_error("png write failed for " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(image.height);
    for (int j = 0; j < image.height; ++j)
        rows[j] = data.data() + static_cast<size_t>(j) * image.width * 3;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

void write_ppm(const Image& image, const std::string& path) {
    std::vector<unsigned char> data = to_srgb_rows(image);
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(fp, "P6\n%d %d\n255\n", image.width, image.height);
    std::fwrite(data.data(), 1, data.size(), fp);
    std::fclose(fp);
}

void write_image(const Image& image, const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".ppm") write_ppm(image, path);
    else write_png(image, path);
}

}  // namespace vgr
