#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crater/config.hpp"
#include "crater/geometry.hpp"
#include "crater/mask.hpp"
#include "crater/shape_metrics.hpp"
#include "crater/tiling.hpp"

namespace crater {

/// Number of items surviving each stage. Tiled runs sum the per-tile counts;
/// `after_dedup` is the size of the merged catalog.
struct StageCounts {
    std::size_t segments = 0;
    std::size_t after_quality = 0;
    std::size_t after_normalize = 0;
    std::size_t after_shape = 0;
    std::size_t circles = 0;
    std::size_t ellipses = 0;
    std::size_t after_fit = 0;
    std::size_t after_elongation = 0;
    std::size_t after_dedup = 0;

    StageCounts& operator+=(const StageCounts& o) noexcept;
};

struct PipelineResult {
    std::vector<CraterEllipse> craters;  // deduplicated, sorted by larger_first
    StageCounts counts;
};

/// Normalize, classify and fit one segment. The crater carries the record's
/// quality and id; coordinates are those of the record's mask.
std::optional<CraterEllipse> detect_segment(const SegmentRecord& record, const PipelineConfig& cfg,
                                            ShapeReport* report = nullptr);

/// Quality gate, normalize, classify, fit and elongation filter, without dedup.
PipelineResult detect_candidates(std::span<const SegmentRecord> records, const PipelineConfig& cfg,
                                 unsigned jobs = 1);

/// Full per-image pipeline: detect_candidates followed by dedup_concentric.
PipelineResult run_pipeline(std::span<const SegmentRecord> records, const PipelineConfig& cfg,
                            unsigned jobs = 1);

/// Produces the segment records of one tile in tile-local coordinates.
using TileSegmenter = std::function<std::vector<SegmentRecord>(const Rect& tile)>;

/// Runs detect_candidates on every tile of `plan` (concurrently, up to
/// `jobs`) and merges the results with merge_tiled. The output does not
/// depend on `jobs` or on the order in which tiles complete.
PipelineResult run_tiled(const TilePlan& plan, const TileSegmenter& segment_tile,
                         const PipelineConfig& cfg, unsigned jobs = 1);

/// run_tiled with the per-tile segmenter emulated by cropping known global masks.
PipelineResult run_tiled_records(std::span<const SegmentRecord> records, int image_w, int image_h,
                                 const PipelineConfig& cfg, unsigned jobs = 1);

/// Invokes fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace crater
