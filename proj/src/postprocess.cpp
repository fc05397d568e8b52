#include "crater/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace crater {

void FilterConfig::validate() const {
    if (!(min_quality >= 0.0 && min_quality <= 1.0)) {
        throw Error(ErrorCode::BadThresholds, "filters.min_quality must be in [0, 1]");
    }
    if (!(min_stability >= 0.0 && min_stability <= 1.0)) {
        throw Error(ErrorCode::BadThresholds, "filters.min_stability must be in [0, 1]");
    }
    if (!(max_axis_ratio >= 1.0)) {
        throw Error(ErrorCode::BadThresholds, "filters.max_axis_ratio must be >= 1");
    }
    if (!(center_tol_frac > 0.0 && center_tol_frac <= 1.0)) {
        throw Error(ErrorCode::BadThresholds, "filters.center_tol_frac must be in (0, 1]");
    }
}

std::vector<SegmentRecord> filter_quality(std::span<const SegmentRecord> records,
                                          const FilterConfig& cfg) {
    std::vector<SegmentRecord> out;
    for (const auto& r : records) {
        if (r.quality >= cfg.min_quality && r.stability >= cfg.min_stability) out.push_back(r);
    }
    return out;
}

std::vector<CraterEllipse> filter_elongation(std::span<const CraterEllipse> craters,
                                             const FilterConfig& cfg) {
    std::vector<CraterEllipse> out;
    for (const auto& c : craters) {
        if (c.a / c.b <= cfg.max_axis_ratio) out.push_back(c);
    }
    return out;
}

bool larger_first(const CraterEllipse& lhs, const CraterEllipse& rhs) noexcept {
    if (lhs.a != rhs.a) return lhs.a > rhs.a;
    return std::tie(lhs.cy, lhs.cx, lhs.source_id, lhs.b, lhs.theta, lhs.shape, lhs.quality,
                    lhs.residual) <
           std::tie(rhs.cy, rhs.cx, rhs.source_id, rhs.b, rhs.theta, rhs.shape, rhs.quality,
                    rhs.residual);
}

bool concentric(const CraterEllipse& lhs, const CraterEllipse& rhs, double center_tol_frac) noexcept {
    const double dist = std::hypot(lhs.cx - rhs.cx, lhs.cy - rhs.cy);
    return dist <= center_tol_frac * std::min(lhs.a, rhs.a);
}

std::vector<CraterEllipse> dedup_concentric(std::span<const CraterEllipse> craters,
                                            const FilterConfig& cfg) {
    std::vector<CraterEllipse> sorted(craters.begin(), craters.end());
    std::sort(sorted.begin(), sorted.end(), larger_first);
    std::vector<CraterEllipse> kept;
    for (auto& c : sorted) {
        const bool shadowed = std::any_of(kept.begin(), kept.end(), [&](const CraterEllipse& k) {
            return concentric(k, c, cfg.center_tol_frac);
        });
        if (!shadowed) kept.push_back(std::move(c));
    }
    return kept;
}

}  // namespace crater
