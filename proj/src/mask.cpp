#include "crater/mask.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace crater {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SumMismatch: return "SumMismatch";
        case ErrorCode::EmptyDimensions: return "EmptyDimensions";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::DegenerateMask: return "DegenerateMask";
        case ErrorCode::EmptyEdges: return "EmptyEdges";
        case ErrorCode::InsufficientSupport: return "InsufficientSupport";
        case ErrorCode::SingularFit: return "SingularFit";
        case ErrorCode::NotAnEllipse: return "NotAnEllipse";
        case ErrorCode::BadStride: return "BadStride";
        case ErrorCode::BadThresholds: return "BadThresholds";
        case ErrorCode::ManifestMissing: return "ManifestMissing";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::RleError: return "RleError";
        case ErrorCode::ProcessFailure: return "ProcessFailure";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::InvalidOutput: return "InvalidOutput";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::BadBins: return "BadBins";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::PlacementOverflow: return "PlacementOverflow";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Rect intersect(const Rect& lhs, const Rect& rhs) noexcept {
    const int x0 = std::max(lhs.x, rhs.x);
    const int y0 = std::max(lhs.y, rhs.y);
    const int x1 = std::min(lhs.x + lhs.w, rhs.x + rhs.w);
    const int y1 = std::min(lhs.y + lhs.h, rhs.y + rhs.h);
    if (x1 <= x0 || y1 <= y0) return Rect{x0, y0, 0, 0};
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

Mask::Mask(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::EmptyDimensions,
                    "mask dimensions must be >= 1, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits) : Mask(width, height) {
    if (bits.size() != bits_.size()) {
        throw Error(ErrorCode::SumMismatch, "bit count does not match mask dimensions");
    }
    for (auto& b : bits) b = b ? 1 : 0;
    bits_ = std::move(bits);
}

std::size_t Mask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Rect Mask::bbox() const noexcept {
    int x0 = width_, y0 = height_, x1 = -1, y1 = -1;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (!at(x, y)) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) return Rect{};
    return Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Mask Mask::crop(const Rect& r) const {
    const Rect clipped = intersect(r, Rect{0, 0, width_, height_});
    if (clipped.empty()) {
        throw Error(ErrorCode::EmptyDimensions, "crop window does not intersect the mask");
    }
    Mask out(clipped.w, clipped.h);
    for (int y = 0; y < clipped.h; ++y) {
        for (int x = 0; x < clipped.w; ++x) {
            if (at(clipped.x + x, clipped.y + y)) out.set(x, y);
        }
    }
    return out;
}

Mask Mask::padded(int pad) const {
    Mask out(width_ + 2 * pad, height_ + 2 * pad);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (at(x, y)) out.set(x + pad, y + pad);
        }
    }
    return out;
}

Mask Mask::shifted(int dx, int dy) const {
    Mask out(width_, height_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (at(x, y) && nx >= 0 && ny >= 0 && nx < width_ && ny < height_) out.set(nx, ny);
        }
    }
    return out;
}

Mask decode_rle(std::span<const std::uint64_t> counts, int width, int height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::EmptyDimensions, "rle target dimensions must be >= 1");
    }
    const std::uint64_t total = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
    std::uint64_t sum = 0;
    for (const auto c : counts) {
        if (c > total || sum > total - c) {
            throw Error(ErrorCode::SumMismatch, "rle counts exceed " + std::to_string(total) + " pixels");
        }
        sum += c;
    }
    if (sum != total) {
        throw Error(ErrorCode::SumMismatch, "rle counts sum to " + std::to_string(sum) +
                                                ", expected " + std::to_string(total));
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(total);
    std::uint8_t value = 0;
    for (const auto c : counts) {
        bits.insert(bits.end(), c, value);
        value ^= 1;
    }
    return Mask(width, height, std::move(bits));
}

RleCounts encode_rle(const Mask& mask) {
    RleCounts counts;
    std::uint8_t current = 0;
    std::uint64_t run = 0;
    for (const auto b : mask.bits()) {
        if (b != current) {
            counts.push_back(run);
            run = 0;
            current = b;
        }
        ++run;
    }
    counts.push_back(run);
    return counts;
}

namespace {

constexpr std::array<PixelPoint, 8> kNeighbors8{{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};
constexpr std::array<PixelPoint, 4> kNeighbors4{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};

}  // namespace

Mask normalize(const Mask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<int> stack;

    int best_label = -1;
    std::size_t best_size = 0;
    int next_label = 0;
    // Raster order visits each component's top-left pixel first, so a strict
    // comparison keeps the earliest component on ties.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int seed = y * w + x;
            if (!mask.at(x, y) || label[seed] >= 0) continue;
            const int id = next_label++;
            std::size_t size = 0;
            label[seed] = id;
            stack.push_back(seed);
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                ++size;
                const int cx = cur % w;
                const int cy = cur / w;
                for (const auto& d : kNeighbors8) {
                    const int nx = cx + d.x;
                    const int ny = cy + d.y;
                    if (!mask.get(nx, ny)) continue;
                    const int ni = ny * w + nx;
                    if (label[ni] >= 0) continue;
                    label[ni] = id;
                    stack.push_back(ni);
                }
            }
            if (size > best_size) {
                best_size = size;
                best_label = id;
            }
        }
    }
    if (best_label < 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixels");

    // Flood the background from the border with 4-connectivity; whatever is
    // not reached is a hole and becomes foreground.
    std::vector<std::uint8_t> outside(label.size(), 0);
    auto is_bg = [&](int i) { return label[i] != best_label; };
    auto push_if = [&](int x, int y) {
        const int i = y * w + x;
        if (!outside[i] && is_bg(i)) {
            outside[i] = 1;
            stack.push_back(i);
        }
    };
    for (int x = 0; x < w; ++x) {
        push_if(x, 0);
        push_if(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push_if(0, y);
        push_if(w - 1, y);
    }
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cx = cur % w;
        const int cy = cur / w;
        for (const auto& d : kNeighbors4) {
            const int nx = cx + d.x;
            const int ny = cy + d.y;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            push_if(nx, ny);
        }
    }

    std::vector<std::uint8_t> bits(label.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = outside[i] ? 0 : 1;
    return Mask(w, h, std::move(bits));
}

SegmentRecord SegmentRecord::from_mask(std::string id, Mask mask, double quality,
                                       double stability) {
    SegmentRecord rec;
    rec.source_id = std::move(id);
    rec.area_px = mask.count();
    rec.bbox = mask.bbox();
    rec.mask = std::move(mask);
    rec.quality = quality;
    rec.stability = stability;
    return rec;
}

}  // namespace crater
