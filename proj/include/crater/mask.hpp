#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crater/error.hpp"

namespace crater {

struct PixelPoint {
    int x = 0;
    int y = 0;
    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// Axis-aligned pixel rectangle, half-open: [x, x+w) x [y, y+h).
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool empty() const noexcept { return w <= 0 || h <= 0; }
    bool contains(int px, int py) const noexcept {
        return px >= x && py >= y && px < x + w && py < y + h;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

Rect intersect(const Rect& lhs, const Rect& rhs) noexcept;

/// Binary raster, row-major, origin top-left, x = column, y = row.
class Mask {
public:
    Mask(int width, int height);
    Mask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    /// Out-of-range coordinates read as background.
    bool get(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && at(x, y);
    }
    void set(int x, int y, bool value = true) noexcept { bits_[index(x, y)] = value ? 1 : 0; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count() const noexcept;
    /// Tight bounding box of the foreground; empty Rect when there is none.
    Rect bbox() const noexcept;

    /// Copies the window `r` (clipped to the mask) into a new mask.
    Mask crop(const Rect& r) const;
    /// Adds `pad` background pixels on every side.
    Mask padded(int pad) const;
    /// Mask of the same size shifted by (dx, dy); pixels shifted off the edge are dropped.
    Mask shifted(int dx, int dy) const;

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Row-major run lengths, alternating background/foreground, starting with background.
using RleCounts = std::vector<std::uint64_t>;

Mask decode_rle(std::span<const std::uint64_t> counts, int width, int height);
RleCounts encode_rle(const Mask& mask);

/// Largest 8-connected foreground component with interior holes filled.
/// Ties go to the component whose first pixel in raster order comes first.
Mask normalize(const Mask& mask);

/// One segment as produced by a mask generator, with its metadata.
struct SegmentRecord {
    std::string source_id;
    Mask mask{1, 1};
    std::uint64_t area_px = 0;
    Rect bbox;
    double quality = 0.0;
    double stability = 0.0;
    std::optional<PixelPoint> prompt_point;
    std::optional<Rect> crop_box;

    /// Builds a record whose area and bbox are derived from the mask.
    static SegmentRecord from_mask(std::string id, Mask mask, double quality = 1.0,
                                   double stability = 1.0);

    friend bool operator==(const SegmentRecord&, const SegmentRecord&) = default;
};

}  // namespace crater
