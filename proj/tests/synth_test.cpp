#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "crater/conic_fit.hpp"
#include "crater/edges.hpp"
#include "crater/synth.hpp"
#include "support.hpp"

using namespace crater;

namespace {

CraterEllipse circle(double cx, double cy, double a, std::string id) {
    CraterEllipse e;
    e.cx = cx;
    e.cy = cy;
    e.a = e.b = a;
    e.shape = ShapeClass::Circle;
    e.source_id = std::move(id);
    return e;
}

}  // namespace

TEST(GenerateField, EmptyField) {
    FieldParams p;
    p.n_craters = 0;
    p.image_w = 64;
    p.image_h = 48;
    const SynthField f = generate_field(p);
    EXPECT_TRUE(f.truth.empty());
    EXPECT_TRUE(f.truth_masks.empty());
    EXPECT_EQ(f.image, RgbImage(64, 48, f.image.at(0, 0)));
}

TEST(GenerateField, DeterministicPerSeed) {
    FieldParams p;
    p.n_craters = 30;
    p.image_w = p.image_h = 512;
    const SynthField a = generate_field(p);
    const SynthField b = generate_field(p);
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.truth.craters(), b.truth.craters());
    EXPECT_EQ(a.truth_masks, b.truth_masks);
    p.seed = 2;
    EXPECT_NE(generate_field(p).truth.craters(), a.truth.craters());
}

TEST(GenerateField, TruthInvariants) {
    FieldParams p;
    p.seed = 4;
    const SynthField f = generate_field(p);
    ASSERT_EQ(f.truth.size(), 100u);
    ASSERT_EQ(f.truth_masks.size(), 100u);
    std::map<std::string, CraterEllipse> by_id;
    for (const auto& c : f.truth.craters()) {
        EXPECT_GE(c.a, p.radius_min);
        EXPECT_LE(c.a, p.radius_max);
        EXPECT_LE(c.a / c.b, p.axis_ratio_max);
        EXPECT_GE(c.cx - c.a, 0.0);
        EXPECT_LE(c.cx + c.a, p.image_w);
        by_id[c.source_id] = c;
    }
    Mask occupied(p.image_w, p.image_h);
    for (const auto& r : f.truth_masks) {
        ASSERT_TRUE(by_id.count(r.source_id));
        const CraterEllipse& c = by_id[r.source_id];
        for (const auto& q : boundary_points(r.mask).points) {
            ASSERT_LE(distance_to_boundary(c, q.x, q.y), p.jitter_frac * c.a + 1.0) << r.source_id;
        }
        for (int y = r.bbox.y; y < r.bbox.y + r.bbox.h; ++y) {
            for (int x = r.bbox.x; x < r.bbox.x + r.bbox.w; ++x) {
                if (!r.mask.at(x, y)) continue;
                ASSERT_FALSE(occupied.at(x, y)) << "overlap at " << x << "," << y;
                occupied.set(x, y);
                ASSERT_NE(f.image.at(x, y), f.image.at(0, 0));
            }
        }
    }
}

TEST(GenerateField, ZeroJitterMasksRefitToTruth) {
    FieldParams p;
    p.seed = 3;
    p.n_craters = 50;
    p.jitter_frac = 0.0;
    const SynthField f = generate_field(p);
    std::map<std::string, CraterEllipse> by_id;
    for (const auto& c : f.truth.craters()) by_id[c.source_id] = c;
    for (const auto& r : f.truth_masks) {
        const Rect box = r.mask.bbox();
        CraterEllipse fit = fit_ellipse(canny_edges(r.mask.crop(box)).points);
        fit.cx += box.x;
        fit.cy += box.y;
        const CraterEllipse& t = by_id[r.source_id];
        EXPECT_LE(std::hypot(fit.cx - t.cx, fit.cy - t.cy), 0.5) << r.source_id;
        EXPECT_LE(std::abs(fit.a - t.a), 0.5) << r.source_id;
        EXPECT_LE(std::abs(fit.b - t.b), 0.5) << r.source_id;
        // Orientation is only defined away from a = b.
        if (t.a / t.b >= 1.5) EXPECT_LE(crater::testing::angle_diff(fit.theta, t.theta), 0.02) << r.source_id;
    }
}

TEST(GenerateField, PlacementOverflow) {
    FieldParams p;
    p.n_craters = 50;
    p.image_w = p.image_h = 100;
    try {
        generate_field(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PlacementOverflow);
    }
}

TEST(GenerateField, InvalidRanges) {
    FieldParams p;
    p.radius_min = 0.0;
    EXPECT_THROW(generate_field(p), Error);
    p = {};
    p.axis_ratio_max = 0.5;
    EXPECT_THROW(generate_field(p), Error);
    p = {};
    p.image_w = 0;
    EXPECT_THROW(generate_field(p), Error);
}

TEST(Match, IdentityAndEmpty) {
    FieldParams p;
    p.n_craters = 40;
    p.image_w = p.image_h = 600;
    const SynthField f = generate_field(p);
    const MatchResult same = match_catalogs(f.truth, f.truth);
    EXPECT_EQ(same.pairs.size(), 40u);
    EXPECT_TRUE(same.unmatched_detected.empty());
    EXPECT_TRUE(same.unmatched_truth.empty());
    const MatchResult none = match_catalogs(CraterCatalog("d", 600, 600, {}), f.truth);
    EXPECT_TRUE(none.pairs.empty());
    EXPECT_EQ(none.unmatched_truth.size(), 40u);
    const Scores s = precision_recall(none);
    EXPECT_EQ(s.precision, 1.0);
    EXPECT_EQ(s.recall, 0.0);
    EXPECT_EQ(s.f1, 0.0);
}

TEST(Match, EquidistantTieGoesToFirstTruth) {
    const CraterCatalog truth("t", 300, 300, {circle(104, 100, 50, "B"), circle(100, 100, 50, "A")});
    const CraterCatalog det("d", 300, 300, {circle(102, 100, 50, "D")});
    const MatchResult m = match_catalogs(det, truth);
    ASSERT_EQ(m.pairs.size(), 1u);
    EXPECT_EQ(truth.craters()[m.pairs[0].second].source_id, "A");
    ASSERT_EQ(m.unmatched_truth.size(), 1u);
    EXPECT_EQ(truth.craters()[m.unmatched_truth[0]].source_id, "B");
}

TEST(Match, CenterAndSizeTolerances) {
    const CraterCatalog truth("t", 300, 300, {circle(100, 100, 40, "t")});
    auto matched = [&](double dx, double a) {
        return match_catalogs(CraterCatalog("d", 300, 300, {circle(100 + dx, 100, a, "d")}), truth).pairs.size();
    };
    EXPECT_EQ(matched(10.0, 40), 1u);
    EXPECT_EQ(matched(10.5, 40), 0u);
    EXPECT_EQ(matched(0, 50), 1u);
    EXPECT_EQ(matched(0, 50.5), 0u);
    EXPECT_EQ(matched(0, 30), 1u);
    EXPECT_EQ(matched(0, 29.5), 0u);
}

TEST(Match, IouCriterion) {
    const CraterCatalog truth("t", 300, 300, {circle(100, 100, 40, "t")});
    const CraterCatalog near_det("d", 300, 300, {circle(105, 100, 38, "d")});
    const CraterCatalog far_det("d", 300, 300, {circle(150, 100, 40, "d")});
    EXPECT_EQ(match_catalogs(near_det, truth, MatchCriterion::IoU).pairs.size(), 1u);
    EXPECT_EQ(match_catalogs(far_det, truth, MatchCriterion::IoU).pairs.size(), 0u);
    EXPECT_NEAR(ellipse_iou(truth.craters()[0], truth.craters()[0]), 1.0, 1e-9);
    EXPECT_NEAR(ellipse_iou(circle(0, 0, 10, "a"), circle(100, 0, 10, "b")), 0.0, 1e-12);
}

TEST(Match, SymmetricInCountAndDeterministic) {
    FieldParams p;
    p.n_craters = 60;
    p.image_w = p.image_h = 800;
    const SynthField f = generate_field(p);
    p.seed = 9;
    const SynthField g = generate_field(p);
    // Half of g mixed with f, so some pairs match and some do not.
    std::vector<CraterEllipse> mixed(f.truth.craters().begin(), f.truth.craters().begin() + 30);
    for (std::size_t i = 0; i < 20; ++i) mixed.push_back(g.truth.craters()[i]);
    const CraterCatalog det("d", 800, 800, mixed);
    for (auto crit : {MatchCriterion::CenterAndSize, MatchCriterion::IoU}) {
        const MatchResult fwd = match_catalogs(det, f.truth, crit);
        const MatchResult back = match_catalogs(f.truth, det, crit);
        const Scores a = precision_recall(fwd);
        const Scores b = precision_recall(back);
        EXPECT_DOUBLE_EQ(a.precision, b.recall);
        EXPECT_DOUBLE_EQ(a.recall, b.precision);
        const MatchResult again = match_catalogs(det, f.truth, crit);
        EXPECT_EQ(again.pairs, fwd.pairs);
        EXPECT_EQ(again.unmatched_detected, fwd.unmatched_detected);
    }
}

TEST(Match, OneToOne) {
    const CraterCatalog truth("t", 300, 300, {circle(100, 100, 40, "a"), circle(101, 100, 40, "b")});
    const CraterCatalog det("d", 300, 300, {circle(100.5, 100, 40, "x"), circle(100.2, 100, 40, "y")});
    const MatchResult m = match_catalogs(det, truth);
    ASSERT_EQ(m.pairs.size(), 2u);
    EXPECT_NE(m.pairs[0].first, m.pairs[1].first);
    EXPECT_NE(m.pairs[0].second, m.pairs[1].second);
}

TEST(Match, DimMismatch) {
    try {
        match_catalogs(CraterCatalog("d", 100, 100, {}), CraterCatalog("t", 100, 90, {}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
    }
}

TEST(Scores, Arithmetic) {
    MatchResult m;
    EXPECT_EQ(precision_recall(m).f1, 1.0);
    for (std::size_t i = 0; i < 8; ++i) m.pairs.emplace_back(i, i);
    m.unmatched_detected = {8, 9};
    m.unmatched_truth = {8, 9};
    const Scores s = precision_recall(m);
    EXPECT_DOUBLE_EQ(s.precision, 0.8);
    EXPECT_DOUBLE_EQ(s.recall, 0.8);
    EXPECT_DOUBLE_EQ(s.f1, 0.8);
}
