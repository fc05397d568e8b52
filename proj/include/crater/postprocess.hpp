#pragma once

#include <span>
#include <vector>

#include "crater/geometry.hpp"
#include "crater/mask.hpp"

namespace crater {

enum class KeepPolicy { KeepLarger };

struct FilterConfig {
    double min_quality = 0.7;
    double min_stability = 0.8;
    double max_axis_ratio = 3.0;
    /// Fraction of the smaller semi-major axis under which two centres count as the same crater.
    double center_tol_frac = 0.5;
    KeepPolicy keep_policy = KeepPolicy::KeepLarger;

    void validate() const;
};

/// Keeps records with quality >= min_quality and stability >= min_stability.
std::vector<SegmentRecord> filter_quality(std::span<const SegmentRecord> records,
                                          const FilterConfig& cfg);

/// Keeps craters with a / b <= max_axis_ratio (inclusive).
std::vector<CraterEllipse> filter_elongation(std::span<const CraterEllipse> craters,
                                             const FilterConfig& cfg);

/// Total order used for deterministic output: descending a, then ascending
/// (cy, cx, source_id), then the remaining fields.
bool larger_first(const CraterEllipse& lhs, const CraterEllipse& rhs) noexcept;

/// True when the two centres are within center_tol_frac * min(a_i, a_j).
bool concentric(const CraterEllipse& lhs, const CraterEllipse& rhs, double center_tol_frac) noexcept;

/// Greedy concentric suppression keeping the larger crater; output sorted by larger_first.
std::vector<CraterEllipse> dedup_concentric(std::span<const CraterEllipse> craters,
                                            const FilterConfig& cfg);

}  // namespace crater
