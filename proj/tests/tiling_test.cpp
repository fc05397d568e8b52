#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "crater/tiling.hpp"

using namespace crater;

namespace {

CraterEllipse crater_at(double cx, double cy, double a, std::string id = {}) {
    CraterEllipse e;
    e.cx = cx;
    e.cy = cy;
    e.a = e.b = a;
    e.shape = ShapeClass::Circle;
    e.source_id = std::move(id);
    return e;
}

}  // namespace

TEST(PlanTiles, Examples) {
    const TilePlan one = plan_tiles(100, 100, 100, 100, 0);
    ASSERT_EQ(one.tiles.size(), 1u);
    EXPECT_EQ(one.tiles[0], (Rect{0, 0, 100, 100}));

    const TilePlan two = plan_tiles(150, 100, 100, 100, 50);
    ASSERT_EQ(two.tiles.size(), 2u);
    EXPECT_EQ(two.tiles[0].x, 0);
    EXPECT_EQ(two.tiles[1].x, 50);

    const TilePlan clamp = plan_tiles(10, 10, 100, 100, 0);
    ASSERT_EQ(clamp.tiles.size(), 1u);
    EXPECT_EQ(clamp.tiles[0], (Rect{0, 0, 10, 10}));
}

TEST(PlanTiles, LastTileShiftedToBorder) {
    const TilePlan p = plan_tiles(1024, 1000, 256, 256, 64);
    for (const auto& t : p.tiles) {
        EXPECT_LE(t.x + t.w, 1024);
        EXPECT_LE(t.y + t.h, 1000);
        EXPECT_EQ(t.w, 256);
    }
    EXPECT_EQ(p.tiles.back().x + p.tiles.back().w, 1024);
    EXPECT_EQ(p.tiles.back().y + p.tiles.back().h, 1000);
}

TEST(PlanTiles, BadStride) {
    for (int overlap : {16, 20}) {
        try {
            plan_tiles(100, 100, 16, 16, overlap);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::BadStride);
        }
    }
    EXPECT_THROW(plan_tiles(100, 100, 16, 16, -1), Error);
}

TEST(PlanTiles, CoverageAndOverlapExhaustive) {
    for (int overlap : {0, 4, 8}) {
        for (int w = 1; w <= 64; ++w) {
            for (int h = 1; h <= 64; ++h) {
                const TilePlan p = plan_tiles(w, h, 16, 16, overlap);
                std::vector<int> cover(static_cast<std::size_t>(w) * h, 0);
                for (const auto& t : p.tiles) {
                    ASSERT_GE(t.x, 0);
                    ASSERT_GE(t.y, 0);
                    ASSERT_LE(t.x + t.w, w);
                    ASSERT_LE(t.y + t.h, h);
                    for (int y = t.y; y < t.y + t.h; ++y) {
                        for (int x = t.x; x < t.x + t.w; ++x) ++cover[y * w + x];
                    }
                }
                ASSERT_TRUE(std::all_of(cover.begin(), cover.end(), [](int c) { return c > 0; }))
                    << w << "x" << h << " overlap " << overlap;
                // Horizontal neighbours in the same row share at least `overlap` columns.
                for (std::size_t i = 1; i < p.tiles.size(); ++i) {
                    const Rect& a = p.tiles[i - 1];
                    const Rect& b = p.tiles[i];
                    if (a.y != b.y) continue;
                    ASSERT_GE(a.x + a.w - b.x, std::min(overlap, a.w)) << w << "x" << h;
                }
            }
        }
    }
}

TEST(ToGlobal, Examples) {
    CraterEllipse e = crater_at(5, 5, 3);
    e.b = 2;
    e.theta = 0.4;
    EXPECT_EQ(to_global(e, {0, 0}), e);
    const CraterEllipse g = to_global(e, {100, 200});
    EXPECT_EQ(g.cx, 105);
    EXPECT_EQ(g.cy, 205);
    EXPECT_EQ(g.a, e.a);
    EXPECT_EQ(g.b, e.b);
    EXPECT_EQ(g.theta, e.theta);
    EXPECT_EQ(to_global(g, {-100, -200}), e);
}

TEST(MergeTiled, OneTileEqualsSelfDedup) {
    const std::vector<CraterEllipse> local{crater_at(5, 5, 3, "a"), crater_at(5.5, 5, 2, "b"), crater_at(40, 40, 4, "c")};
    const std::vector<TileCatalog> cats{{TileOrigin{10, 20}, local}};
    std::vector<CraterEllipse> expect;
    for (const auto& e : local) expect.push_back(to_global(e, {10, 20}));
    EXPECT_EQ(merge_tiled(cats, FilterConfig{}), dedup_concentric(expect, FilterConfig{}));
}

TEST(MergeTiled, TwinAcrossTilesCollapses) {
    const std::vector<TileCatalog> cats{{TileOrigin{0, 0}, {crater_at(90, 50, 20, "l")}},
                                        {TileOrigin{64, 0}, {crater_at(26.5, 50.5, 20, "r")}}};
    EXPECT_EQ(merge_tiled(cats, FilterConfig{}).size(), 1u);
}

TEST(MergeTiled, DisjointCountPreserved) {
    const std::vector<TileCatalog> cats{{TileOrigin{0, 0}, {crater_at(10, 10, 5), crater_at(30, 30, 5)}},
                                        {TileOrigin{200, 0}, {crater_at(10, 10, 5)}}};
    EXPECT_EQ(merge_tiled(cats, FilterConfig{}).size(), 3u);
}

TEST(MergeTiled, CompleteDetectionBeatsLargerClippedOne) {
    CraterEllipse fragment = crater_at(101, 50, 22, "frag");
    fragment.clipped = true;
    const std::vector<TileCatalog> cats{{TileOrigin{0, 0}, {fragment}},
                                        {TileOrigin{64, 0}, {crater_at(36, 50, 20, "whole")}}};
    const auto out = merge_tiled(cats, FilterConfig{});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].source_id, "whole");
}

TEST(MergeTiled, ClippedFragmentCentredInsideKeptCraterDropped) {
    CraterEllipse fragment = crater_at(115, 50, 8, "frag");
    fragment.clipped = true;
    const std::vector<TileCatalog> cats{{TileOrigin{0, 0}, {fragment}},
                                        {TileOrigin{64, 0}, {crater_at(36, 50, 20, "whole")}}};
    EXPECT_EQ(merge_tiled(cats, FilterConfig{}).size(), 1u);
}

TEST(MergeTiled, LoneClippedDetectionKept) {
    CraterEllipse fragment = crater_at(10, 10, 8, "frag");
    fragment.clipped = true;
    const std::vector<TileCatalog> cats{{TileOrigin{0, 0}, {fragment}}};
    EXPECT_EQ(merge_tiled(cats, FilterConfig{}).size(), 1u);
}

TEST(MergeTiled, PermutationInvariant) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> pos(0.0, 128.0);
    std::uniform_real_distribution<double> axis(2.0, 30.0);
    std::bernoulli_distribution clip(0.3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<TileCatalog> cats;
        for (int t = 0; t < 6; ++t) {
            std::vector<CraterEllipse> local;
            for (int i = 0; i < 8; ++i) {
                CraterEllipse e = crater_at(pos(rng), pos(rng), axis(rng), "t" + std::to_string(t) + "_" + std::to_string(i));
                e.clipped = clip(rng);
                local.push_back(e);
            }
            cats.emplace_back(TileOrigin{(t % 3) * 96, (t / 3) * 96}, local);
        }
        const auto base = merge_tiled(cats, FilterConfig{});
        std::shuffle(cats.begin(), cats.end(), rng);
        ASSERT_EQ(merge_tiled(cats, FilterConfig{}), base) << trial;
        for (std::size_t p = 0; p < base.size(); ++p) {
            for (std::size_t q = p + 1; q < base.size(); ++q) {
                ASSERT_FALSE(concentric(base[p], base[q], 0.5)) << trial;
            }
        }
    }
}

TEST(TouchesSeam, OnlyInteriorEdgesCount) {
    const Rect tile{64, 0, 128, 128};
    EXPECT_TRUE(touches_seam({0, 10, 5, 5}, tile, 512, 128));
    EXPECT_FALSE(touches_seam({10, 0, 5, 5}, tile, 512, 128));   // top edge is the image border
    EXPECT_TRUE(touches_seam({120, 10, 8, 5}, tile, 512, 128));
    EXPECT_FALSE(touches_seam({10, 120, 5, 8}, tile, 512, 128)); // bottom edge is the image border
    EXPECT_FALSE(touches_seam({10, 10, 5, 5}, tile, 512, 128));
}

TEST(TileSpec, Parse) {
    const TileSpec a = parse_tile_spec("256x128");
    EXPECT_EQ(a.tile_w, 256);
    EXPECT_EQ(a.tile_h, 128);
    EXPECT_EQ(a.resolved_overlap(), 32);
    const TileSpec b = parse_tile_spec("256x256+64");
    EXPECT_EQ(b.resolved_overlap(), 64);
    for (const char* bad : {"", "256", "x256", "256x", "256x256+", "axb", "0x10", "10x10+x", "12x12 "}) {
        EXPECT_THROW(parse_tile_spec(bad), Error) << bad;
    }
}

TEST(CropRecords, TileLocalAndDropsEmpty) {
    Mask m(20, 20);
    for (int y = 2; y < 8; ++y) {
        for (int x = 2; x < 8; ++x) m.set(x, y);
    }
    const std::vector<SegmentRecord> recs{SegmentRecord::from_mask("r", m, 0.9, 0.95)};
    const auto inside = crop_records(recs, {4, 4, 10, 10});
    ASSERT_EQ(inside.size(), 1u);
    EXPECT_EQ(inside[0].mask.width(), 10);
    EXPECT_EQ(inside[0].area_px, 16u);
    EXPECT_EQ(inside[0].bbox, (Rect{0, 0, 4, 4}));
    EXPECT_DOUBLE_EQ(inside[0].quality, 0.9);
    EXPECT_TRUE(crop_records(recs, {10, 10, 10, 10}).empty());
}
