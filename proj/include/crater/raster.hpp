#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace crater {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major, origin top-left.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, Rgb fill = {0, 0, 0});

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return width_ == 0 || height_ == 0; }

    Rgb at(int x, int y) const noexcept;
    void set(int x, int y, Rgb c) noexcept;
    bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    const std::vector<std::uint8_t>& data() const noexcept { return data_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Reads any 8/16-bit PNG (gray, gray+alpha, RGB, RGBA, palette) as RGB.
/// Throws IoFailure.
RgbImage read_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Throws IoFailure.
void write_png(const std::filesystem::path& path, const RgbImage& image);

}  // namespace crater
