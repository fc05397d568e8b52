#include "crater/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "crater/postprocess.hpp"

namespace crater {

StageCounts& StageCounts::operator+=(const StageCounts& o) noexcept {
    segments += o.segments;
    after_quality += o.after_quality;
    after_normalize += o.after_normalize;
    after_shape += o.after_shape;
    circles += o.circles;
    ellipses += o.ellipses;
    after_fit += o.after_fit;
    after_elongation += o.after_elongation;
    after_dedup += o.after_dedup;
    return *this;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1u), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

enum class Outcome { Empty, Degenerate, Rejected, Circle, Ellipse };

struct SegmentOutcome {
    Outcome outcome = Outcome::Empty;
    std::optional<CraterEllipse> crater;
};

SegmentOutcome process_segment(const SegmentRecord& record, const PipelineConfig& cfg, ShapeReport* out_report) {
    SegmentOutcome result;
    const Rect box = record.mask.bbox();
    if (box.empty()) return result;

    // Work on the bounding box; every stage is translation invariant.
    const Mask local = normalize(record.mask.crop(box));
    if (local.count() < kMinContourArea) {
        result.outcome = Outcome::Degenerate;
        return result;
    }
    ShapeReport report = classify(local, cfg.thresholds, cfg.canny);
    if (out_report) *out_report = report;
    if (report.label == ShapeLabel::Rejected || !report.fitted) {
        result.outcome = Outcome::Rejected;
        return result;
    }
    result.outcome = report.label == ShapeLabel::Circle ? Outcome::Circle : Outcome::Ellipse;
    CraterEllipse crater = *report.fitted;
    crater.cx += box.x;
    crater.cy += box.y;
    crater.quality = record.quality;
    crater.source_id = record.source_id;
    result.crater = std::move(crater);
    return result;
}

}  // namespace

std::optional<CraterEllipse> detect_segment(const SegmentRecord& record, const PipelineConfig& cfg,
                                            ShapeReport* report) {
    return process_segment(record, cfg, report).crater;
}

PipelineResult detect_candidates(std::span<const SegmentRecord> records, const PipelineConfig& cfg,
                                 unsigned jobs) {
    PipelineResult result;
    result.counts.segments = records.size();
    const auto gated = filter_quality(records, cfg.filters);
    result.counts.after_quality = gated.size();

    std::vector<SegmentOutcome> outcomes(gated.size());
    parallel_for(gated.size(), jobs, [&](std::size_t i) { outcomes[i] = process_segment(gated[i], cfg, nullptr); });

    std::vector<CraterEllipse> fitted;
    for (auto& o : outcomes) {
        if (o.outcome != Outcome::Empty) ++result.counts.after_normalize;
        if (o.outcome == Outcome::Circle) ++result.counts.circles;
        if (o.outcome == Outcome::Ellipse) ++result.counts.ellipses;
        if (o.crater) fitted.push_back(std::move(*o.crater));
    }
    result.counts.after_shape = result.counts.circles + result.counts.ellipses;
    result.counts.after_fit = fitted.size();
    result.craters = filter_elongation(fitted, cfg.filters);
    result.counts.after_elongation = result.craters.size();
    return result;
}

PipelineResult run_pipeline(std::span<const SegmentRecord> records, const PipelineConfig& cfg, unsigned jobs) {
    PipelineResult result = detect_candidates(records, cfg, jobs);
    result.craters = dedup_concentric(result.craters, cfg.filters);
    result.counts.after_dedup = result.craters.size();
    return result;
}

PipelineResult run_tiled(const TilePlan& plan, const TileSegmenter& segment_tile, const PipelineConfig& cfg,
                         unsigned jobs) {
    std::vector<PipelineResult> per_tile(plan.tiles.size());
    parallel_for(plan.tiles.size(), jobs, [&](std::size_t i) {
        const Rect& tile = plan.tiles[i];
        const auto records = segment_tile(tile);
        std::unordered_set<std::string> seam_ids;
        for (const auto& r : records) {
            if (touches_seam(r.mask.bbox(), tile, plan.image_w, plan.image_h)) seam_ids.insert(r.source_id);
        }
        per_tile[i] = detect_candidates(records, cfg, 1);
        for (auto& c : per_tile[i].craters) c.clipped = seam_ids.count(c.source_id) > 0;
    });

    PipelineResult merged;
    std::vector<TileCatalog> catalogs;
    for (std::size_t i = 0; i < per_tile.size(); ++i) {
        merged.counts += per_tile[i].counts;
        catalogs.emplace_back(TileOrigin{plan.tiles[i].x, plan.tiles[i].y}, std::move(per_tile[i].craters));
    }
    merged.craters = merge_tiled(catalogs, cfg.filters);
    merged.counts.after_dedup = merged.craters.size();
    return merged;
}

PipelineResult run_tiled_records(std::span<const SegmentRecord> records, int image_w, int image_h,
                                 const PipelineConfig& cfg, unsigned jobs) {
    const TilePlan plan = plan_tiles(image_w, image_h, cfg.tiling.tile_w, cfg.tiling.tile_h,
                                     cfg.tiling.resolved_overlap());
    return run_tiled(plan, [&](const Rect& tile) { return crop_records(records, tile); }, cfg, jobs);
}

}  // namespace crater
