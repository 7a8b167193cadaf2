// SPDX-License-Identifier: Apache-2.0
#include "deshadow/imaging/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "deshadow/error.hpp"

namespace deshadow::imaging {

namespace {

struct Raster {
    int height = 0, width = 0;
    std::vector<std::uint8_t> bytes;
};

Raster read_raw(const std::filesystem::path& path, png_uint_32 format) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    const std::string name = path.string();
    if (!png_image_begin_read_from_file(&image, name.c_str()))
        throw DataError("cannot read PNG '" + name + "': " + image.message);
    image.format = format;
    Raster r;
    r.height = static_cast<int>(image.height);
    r.width = static_cast<int>(image.width);
    r.bytes.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, r.bytes.data(), 0, nullptr)) {
        png_image_free(&image);
        throw DataError("cannot decode PNG '" + name + "': " + image.message);
    }
    if (r.height < 1 || r.width < 1) throw DataError("PNG '" + name + "' has no pixels");
    return r;
}

void write_raw(const std::filesystem::path& path, int h, int w, png_uint_32 format, const std::vector<std::uint8_t>& bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = format;
    const std::string name = path.string();
    if (!png_image_write_to_file(&image, name.c_str(), 0, bytes.data(), 0, nullptr))
        throw DataError("cannot write PNG '" + name + "': " + image.message);
}

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
    const Raster r = read_raw(path, PNG_FORMAT_RGB);
    std::vector<double> values(r.bytes.size());
    std::transform(r.bytes.begin(), r.bytes.end(), values.begin(), [](std::uint8_t b) { return b / 255.0; });
    return Image::from_pixels(r.height, r.width, std::move(values));
}

ShadowMask read_png_gray(const std::filesystem::path& path) {
    const Raster r = read_raw(path, PNG_FORMAT_GRAY);
    ShadowMask m(r.height, r.width);
    std::transform(r.bytes.begin(), r.bytes.end(), m.values.begin(), [](std::uint8_t b) { return b / 255.0; });
    return m;
}

ShadowMask read_mask_png(const std::filesystem::path& path) { return binarize(read_png_gray(path), 0.5); }

void write_png(const std::filesystem::path& path, const Image& img) {
    std::vector<std::uint8_t> bytes(img.pixels.size());
    std::transform(img.pixels.begin(), img.pixels.end(), bytes.begin(), quantize);
    write_raw(path, img.height, img.width, PNG_FORMAT_RGB, bytes);
}

void write_png(const std::filesystem::path& path, const ShadowMask& mask) {
    std::vector<std::uint8_t> bytes(mask.values.size());
    std::transform(mask.values.begin(), mask.values.end(), bytes.begin(), quantize);
    write_raw(path, mask.height, mask.width, PNG_FORMAT_GRAY, bytes);
}

}  // namespace deshadow::imaging
