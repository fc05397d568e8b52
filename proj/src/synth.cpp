#include "crater/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <tuple>

namespace crater {

namespace {

// Bit-exact across standard libraries, unlike std::uniform_real_distribution.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}
    double operator()(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

private:
    std::mt19937_64 engine_;
};

double interpolate_periodic(const std::vector<double>& knots, double phi) {
    if (knots.empty()) return 0.0;
    const double k = static_cast<double>(knots.size());
    double pos = phi / (2.0 * kPi) * k;
    pos = std::fmod(pos, k);
    if (pos < 0.0) pos += k;
    const auto i0 = static_cast<std::size_t>(pos) % knots.size();
    const auto i1 = (i0 + 1) % knots.size();
    const double t = pos - std::floor(pos);
    return knots[i0] * (1.0 - t) + knots[i1] * t;
}

}  // namespace

Mask rasterize_ellipse(const CraterEllipse& e, int width, int height, const std::vector<double>& radial_knots) {
    Mask mask(width, height);
    double slack = 0.0;
    for (const double k : radial_knots) slack = std::max(slack, std::abs(k));
    const double reach = e.a + slack + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(e.cx - reach)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(e.cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(e.cy - reach)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(e.cy + reach)));
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - e.cx;
            const double dy = y - e.cy;
            const double u = dx * c + dy * s;
            const double v = -dx * s + dy * c;
            bool inside = false;
            if (radial_knots.empty()) {
                inside = (u / e.a) * (u / e.a) + (v / e.b) * (v / e.b) <= 1.0;
            } else {
                const double phi = std::atan2(v, u);
                const double bc = e.b * std::cos(phi);
                const double as = e.a * std::sin(phi);
                const double boundary = e.a * e.b / std::sqrt(bc * bc + as * as);
                inside = std::hypot(u, v) <= boundary + interpolate_periodic(radial_knots, phi);
            }
            if (inside) mask.set(x, y);
        }
    }
    return mask;
}

SynthField generate_field(const FieldParams& p) {
    if (p.image_w < 1 || p.image_h < 1 || p.n_craters < 0) {
        throw Error(ErrorCode::EmptyDimensions, "field needs positive dimensions and n >= 0");
    }
    if (!(p.radius_min > 0.0 && p.radius_max >= p.radius_min && p.axis_ratio_max >= 1.0 &&
          p.jitter_frac >= 0.0 && p.jitter_frac < 1.0)) {
        throw Error(ErrorCode::ConfigError, "invalid synthetic field ranges");
    }
    constexpr int kKnots = 24;
    Uniform rng(p.seed);
    std::vector<CraterEllipse> placed;
    std::vector<std::vector<double>> knots;
    const long long cap = 10LL * p.n_craters;
    for (long long attempt = 0; attempt < cap && static_cast<int>(placed.size()) < p.n_craters; ++attempt) {
        CraterEllipse e;
        e.a = rng(p.radius_min, p.radius_max);
        const double ratio = rng(1.0, p.axis_ratio_max);
        e.b = e.a / ratio;
        e.theta = wrap_half_turn(rng(0.0, kPi));
        const double extent = e.a * (1.0 + p.jitter_frac) + 2.0;
        const double cx = rng(extent, p.image_w - extent);
        const double cy = rng(extent, p.image_h - extent);
        if (2.0 * extent >= p.image_w || 2.0 * extent >= p.image_h) continue;
        e.cx = cx;
        e.cy = cy;
        const bool clear = std::all_of(placed.begin(), placed.end(), [&](const CraterEllipse& o) {
            const double gap = e.a * (1.0 + p.jitter_frac) + o.a * (1.0 + p.jitter_frac) + 2.0;
            return std::hypot(e.cx - o.cx, e.cy - o.cy) >= gap;
        });
        if (!clear) continue;
        std::vector<double> k;
        if (p.jitter_frac > 0.0) {
            for (int i = 0; i < kKnots; ++i) k.push_back(rng(-p.jitter_frac * e.a, p.jitter_frac * e.a));
        }
        e.shape = ratio == 1.0 ? ShapeClass::Circle : ShapeClass::Ellipse;
        e.quality = 1.0;
        char id[32];
        std::snprintf(id, sizeof id, "t%04zu", placed.size());
        e.source_id = id;
        placed.push_back(e);
        knots.push_back(std::move(k));
    }
    if (static_cast<int>(placed.size()) < p.n_craters) {
        throw Error(ErrorCode::PlacementOverflow, "placed " + std::to_string(placed.size()) + " of " +
                                                      std::to_string(p.n_craters) + " craters in " +
                                                      std::to_string(cap) + " attempts");
    }

    SynthField field;
    field.seed = p.seed;
    field.image = RgbImage(p.image_w, p.image_h, {60, 60, 60});
    for (std::size_t i = 0; i < placed.size(); ++i) {
        Mask m = rasterize_ellipse(placed[i], p.image_w, p.image_h, knots[i]);
        const Rect box = m.bbox();
        for (int y = box.y; y < box.y + box.h; ++y) {
            for (int x = box.x; x < box.x + box.w; ++x) {
                if (m.at(x, y)) field.image.set(x, y, {180, 180, 180});
            }
        }
        SegmentRecord rec = SegmentRecord::from_mask(placed[i].source_id, std::move(m), 1.0, 1.0);
        rec.prompt_point = PixelPoint{static_cast<int>(std::lround(placed[i].cx)),
                                      static_cast<int>(std::lround(placed[i].cy))};
        field.truth_masks.push_back(std::move(rec));
    }
    char ref[64];
    std::snprintf(ref, sizeof ref, "synthetic:seed=%llu", static_cast<unsigned long long>(p.seed));
    field.truth = CraterCatalog(ref, p.image_w, p.image_h, std::move(placed));
    return field;
}

double ellipse_iou(const CraterEllipse& lhs, const CraterEllipse& rhs) {
    const double x0 = std::min(lhs.cx - lhs.a, rhs.cx - rhs.a);
    const double x1 = std::max(lhs.cx + lhs.a, rhs.cx + rhs.a);
    const double y0 = std::min(lhs.cy - lhs.a, rhs.cy - rhs.a);
    const double y1 = std::max(lhs.cy + lhs.a, rhs.cy + rhs.a);
    const double step = std::clamp(std::min(lhs.b, rhs.b) / 20.0, 0.05, 1.0);
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (double y = y0 + step / 2; y < y1; y += step) {
        for (double x = x0 + step / 2; x < x1; x += step) {
            const bool a = ellipse_contains(lhs, x, y);
            const bool b = ellipse_contains(rhs, x, y);
            inter += a && b;
            uni += a || b;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

MatchResult match_catalogs(const CraterCatalog& detected, const CraterCatalog& truth, MatchCriterion criterion,
                           const MatchParams& params) {
    if (detected.has_dims() && truth.has_dims() &&
        (detected.image_w() != truth.image_w() || detected.image_h() != truth.image_h())) {
        throw Error(ErrorCode::DimMismatch, "detected and truth catalogs describe different image sizes");
    }
    const auto& det = detected.craters();
    const auto& tru = truth.craters();

    struct Candidate {
        double dist;
        std::size_t truth;
        std::size_t det;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < det.size(); ++i) {
        for (std::size_t j = 0; j < tru.size(); ++j) {
            const double d = std::hypot(det[i].cx - tru[j].cx, det[i].cy - tru[j].cy);
            bool ok = false;
            if (criterion == MatchCriterion::CenterAndSize) {
                ok = d <= params.center_frac * tru[j].a &&
                     std::abs(det[i].a - tru[j].a) / tru[j].a <= params.size_frac;
            } else {
                ok = d < det[i].a + tru[j].a && ellipse_iou(det[i], tru[j]) >= params.min_iou;
            }
            if (ok) candidates.push_back({d, j, i});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
        return std::tie(l.dist, l.truth, l.det) < std::tie(r.dist, r.truth, r.det);
    });

    MatchResult result;
    result.criterion = criterion;
    result.params = params;
    std::vector<bool> det_used(det.size(), false);
    std::vector<bool> truth_used(tru.size(), false);
    for (const auto& c : candidates) {
        if (det_used[c.det] || truth_used[c.truth]) continue;
        det_used[c.det] = truth_used[c.truth] = true;
        result.pairs.emplace_back(c.det, c.truth);
    }
    for (std::size_t i = 0; i < det.size(); ++i) {
        if (!det_used[i]) result.unmatched_detected.push_back(i);
    }
    for (std::size_t j = 0; j < tru.size(); ++j) {
        if (!truth_used[j]) result.unmatched_truth.push_back(j);
    }
    return result;
}

Scores precision_recall(const MatchResult& m) noexcept {
    const double tp = static_cast<double>(m.pairs.size());
    const double fp = static_cast<double>(m.unmatched_detected.size());
    const double fn = static_cast<double>(m.unmatched_truth.size());
    Scores s;
    s.precision = tp + fp == 0.0 ? 1.0 : tp / (tp + fp);
    s.recall = tp + fn == 0.0 ? 1.0 : tp / (tp + fn);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

}  // namespace crater
