#include "crater/tiling.hpp"

#include <algorithm>
#include <charconv>
#include <string>

namespace crater {

namespace {

std::vector<int> axis_origins(int image, int tile, int overlap) {
    if (tile >= image) return {0};
    const int stride = tile - overlap;
    std::vector<int> origins;
    for (int pos = 0;; pos += stride) {
        const int clamped = std::min(pos, image - tile);
        if (origins.empty() || origins.back() != clamped) origins.push_back(clamped);
        if (clamped + tile >= image) break;
    }
    return origins;
}

}  // namespace

TilePlan plan_tiles(int image_w, int image_h, int tile_w, int tile_h, int overlap) {
    if (image_w < 1 || image_h < 1) throw Error(ErrorCode::EmptyDimensions, "image must be at least 1x1");
    if (overlap < 0 || tile_w <= overlap || tile_h <= overlap) {
        throw Error(ErrorCode::BadStride, "overlap " + std::to_string(overlap) +
                                              " must be in [0, tile) for tile " +
                                              std::to_string(tile_w) + "x" + std::to_string(tile_h));
    }
    TilePlan plan{image_w, image_h, tile_w, tile_h, overlap, {}};
    const auto xs = axis_origins(image_w, tile_w, overlap);
    const auto ys = axis_origins(image_h, tile_h, overlap);
    for (const int y : ys) {
        for (const int x : xs) {
            plan.tiles.push_back(Rect{x, y, std::min(tile_w, image_w), std::min(tile_h, image_h)});
        }
    }
    return plan;
}

CraterEllipse to_global(CraterEllipse e, TileOrigin origin) noexcept {
    e.cx += origin.x;
    e.cy += origin.y;
    return e;
}

std::vector<CraterEllipse> merge_tiled(std::span<const TileCatalog> catalogs, const FilterConfig& cfg) {
    std::vector<CraterEllipse> whole;
    std::vector<CraterEllipse> clipped;
    for (const auto& [origin, craters] : catalogs) {
        for (const auto& c : craters) (c.clipped ? clipped : whole).push_back(to_global(c, origin));
    }
    auto kept = dedup_concentric(whole, cfg);
    std::sort(clipped.begin(), clipped.end(), larger_first);
    const std::size_t n_whole = kept.size();
    for (auto& c : clipped) {
        const bool shadowed = std::any_of(kept.begin(), kept.end(), [&](const CraterEllipse& k) {
            return concentric(k, c, cfg.center_tol_frac) || ellipse_contains(k, c.cx, c.cy);
        });
        if (!shadowed) kept.push_back(std::move(c));
    }
    if (kept.size() != n_whole) std::sort(kept.begin(), kept.end(), larger_first);
    return kept;
}

bool touches_seam(const Rect& bbox, const Rect& tile, int image_w, int image_h) noexcept {
    if (bbox.empty()) return false;
    return (bbox.x == 0 && tile.x > 0) || (bbox.y == 0 && tile.y > 0) ||
           (bbox.x + bbox.w == tile.w && tile.x + tile.w < image_w) ||
           (bbox.y + bbox.h == tile.h && tile.y + tile.h < image_h);
}

std::vector<SegmentRecord> crop_records(std::span<const SegmentRecord> records, const Rect& tile) {
    std::vector<SegmentRecord> out;
    for (const auto& r : records) {
        const Rect overlap = intersect(r.bbox, tile);
        if (overlap.empty()) continue;
        Mask local = r.mask.crop(tile);
        if (local.count() == 0) continue;
        SegmentRecord rec = SegmentRecord::from_mask(r.source_id, std::move(local), r.quality, r.stability);
        if (r.prompt_point) rec.prompt_point = PixelPoint{r.prompt_point->x - tile.x, r.prompt_point->y - tile.y};
        rec.crop_box = tile;
        out.push_back(std::move(rec));
    }
    return out;
}

int TileSpec::resolved_overlap() const noexcept {
    return overlap >= 0 ? overlap : std::min(tile_w, tile_h) / 4;
}

TileSpec parse_tile_spec(std::string_view text) {
    auto fail = [&]() -> Error {
        return Error(ErrorCode::ConfigError, "tile spec must look like WxH or WxH+O, got '" +
                                                 std::string(text) + "'");
    };
    auto parse_int = [&](std::string_view s) {
        int value = 0;
        const auto* end = s.data() + s.size();
        const auto res = std::from_chars(s.data(), end, value);
        if (s.empty() || res.ec != std::errc{} || res.ptr != end) throw fail();
        return value;
    };
    const auto x = text.find('x');
    if (x == std::string_view::npos) throw fail();
    const auto plus = text.find('+', x);
    TileSpec spec;
    spec.tile_w = parse_int(text.substr(0, x));
    spec.tile_h = parse_int(text.substr(x + 1, plus == std::string_view::npos ? std::string_view::npos : plus - x - 1));
    if (plus != std::string_view::npos) spec.overlap = parse_int(text.substr(plus + 1));
    if (spec.tile_w < 1 || spec.tile_h < 1) throw fail();
    return spec;
}

}  // namespace crater
