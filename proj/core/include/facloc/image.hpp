#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace facloc {

/// 8-bit single-channel raster, row-major, origin at the top-left.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int col, int row) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
    void set(int col, int row, std::uint8_t v) {
        pixels[static_cast<std::size_t>(row) * width + col] = v;
    }
    bool in_bounds(int col, int row) const {
        return col >= 0 && col < width && row >= 0 && row < height;
    }
};

/// 8-bit RGB raster, interleaved, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    void set(int col, int row, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
};

/// Reads a PGM file (P5 or P2, maxval <= 255).
GrayImage load_pgm(const std::string& path);

/// Writes binary P5; the canonical header is "P5\n<w> <h>\n255\n".
void save_pgm(const GrayImage& img, const std::string& path);

/// Writes binary P6.
void save_ppm(const RgbImage& img, const std::string& path);

}  // namespace facloc
