#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "crater/geometry.hpp"
#include "crater/mask.hpp"
#include "crater/postprocess.hpp"

namespace crater {

struct TileOrigin {
    int x = 0;
    int y = 0;
    friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

struct TilePlan {
    int image_w = 0;
    int image_h = 0;
    int tile_w = 0;
    int tile_h = 0;
    int overlap = 0;
    std::vector<Rect> tiles;  // row-major
};

/// Row-major grid with stride (tile - overlap). The last row and column are
/// shifted back so they end exactly on the image border; a tile larger than
/// the image is clamped to the image. Throws BadStride if overlap >= tile.
TilePlan plan_tiles(int image_w, int image_h, int tile_w, int tile_h, int overlap);

CraterEllipse to_global(CraterEllipse e, TileOrigin origin) noexcept;

using TileCatalog = std::pair<TileOrigin, std::vector<CraterEllipse>>;

/// Maps every tile catalog to global coordinates and removes cross-tile
/// duplicates with the concentric predicate. Unclipped craters are resolved
/// first (dedup_concentric); a clipped crater is then kept only if it is
/// neither concentric with nor centred inside anything already kept, so seam
/// fragments of a crater seen whole elsewhere disappear. Without clipped input
/// this is exactly dedup_concentric. Independent of tile enumeration order.
std::vector<CraterEllipse> merge_tiled(std::span<const TileCatalog> catalogs, const FilterConfig& cfg);

/// Restricts global segment records to one tile, in tile-local coordinates.
/// Records with no foreground inside the tile are dropped. This is how a
/// per-tile segmenter is emulated when the masks are already known.
std::vector<SegmentRecord> crop_records(std::span<const SegmentRecord> records, const Rect& tile);

/// True when `bbox` (tile-local) touches a tile edge that is not an image edge.
bool touches_seam(const Rect& bbox, const Rect& tile, int image_w, int image_h) noexcept;

struct TileSpec {
    int tile_w = 0;
    int tile_h = 0;
    int overlap = -1;  // -1 selects the default of 25% of the smaller tile side
    int resolved_overlap() const noexcept;
};

/// Parses "WxH" or "WxH+O". Throws ConfigError on malformed input.
TileSpec parse_tile_spec(std::string_view text);

}  // namespace crater
