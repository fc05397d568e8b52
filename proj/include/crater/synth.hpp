#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crater/catalog.hpp"
#include "crater/mask.hpp"
#include "crater/raster.hpp"

namespace crater {

struct FieldParams {
    std::uint64_t seed = 1;
    int n_craters = 100;
    int image_w = 1024;
    int image_h = 1024;
    double radius_min = 10.0;   // range of the semi-major axis, px
    double radius_max = 60.0;
    double axis_ratio_max = 2.0;
    double jitter_frac = 0.02;  // radial boundary perturbation amplitude as a fraction of a
};

/// Synthetic crater field with exact ground truth.
struct SynthField {
    RgbImage image;
    CraterCatalog truth;
    std::vector<SegmentRecord> truth_masks;  // one per truth crater, ids match source_id
    std::uint64_t seed = 0;
};

/// Places non-overlapping ellipses by rejection sampling (at most 10 * n
/// attempts in total) and rasterizes each with its boundary perturbed
/// radially. Deterministic per seed. Throws PlacementOverflow.
SynthField generate_field(const FieldParams& params);

/// Rasterizes an ellipse: pixel centres within the boundary. Non-empty
/// `radial_knots` are px offsets at evenly spaced polar angles (ellipse
/// frame), interpolated periodically and added to the boundary radius.
Mask rasterize_ellipse(const CraterEllipse& e, int width, int height,
                       const std::vector<double>& radial_knots = {});

enum class MatchCriterion { CenterAndSize, IoU };

struct MatchParams {
    double center_frac = 0.25;  // centre distance <= center_frac * a_truth
    double size_frac = 0.25;    // |a_det - a_truth| / a_truth <= size_frac
    double min_iou = 0.5;
};

struct MatchResult {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (detected index, truth index)
    std::vector<std::size_t> unmatched_detected;
    std::vector<std::size_t> unmatched_truth;
    MatchCriterion criterion = MatchCriterion::CenterAndSize;
    MatchParams params;
};

/// Greedy one-to-one matching in ascending centre distance (ties by truth
/// index, then detected index). Indices refer to catalog order. Throws
/// DimMismatch when both catalogs carry different dimensions.
MatchResult match_catalogs(const CraterCatalog& detected, const CraterCatalog& truth,
                           MatchCriterion criterion = MatchCriterion::CenterAndSize,
                           const MatchParams& params = {});

/// IoU of two rasterized ellipses on a common pixel grid.
double ellipse_iou(const CraterEllipse& lhs, const CraterEllipse& rhs);

struct Scores {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
};

/// Empty sides count as perfect: no detections gives precision 1.
Scores precision_recall(const MatchResult& m) noexcept;

}  // namespace crater
