#include <gtest/gtest.h>

#include <sys/stat.h>

#include <chrono>
#include <random>

#include "crater/segmenter.hpp"
#include "support.hpp"

using namespace crater;
using crater::testing::TempDir;
using crater::testing::write_text;

namespace {

std::string manifest(const std::string& segments, int w = 2, int h = 2) {
    return R"({"version": 1, "image": {"width": )" + std::to_string(w) + R"(, "height": )" + std::to_string(h) +
           R"(, "source": "x.png"}, "order": "row-major", "segments": [)" + segments + "]}";
}

std::string segment(const std::string& id, const std::string& rle, int area, const std::string& bbox) {
    return R"({"id": ")" + id + R"(", "rle": )" + rle + R"(, "area": )" + std::to_string(area) + R"(, "bbox": )" +
           bbox + R"(, "quality": 0.9, "stability": 0.95})";
}

ErrorCode ingest_error(const std::filesystem::path& dir, std::string* message = nullptr) {
    try {
        ingest_bundle(dir);
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::IoFailure;
}

std::filesystem::path script(const TempDir& dir, const std::string& name, const std::string& body) {
    const auto p = dir / name;
    write_text(p, "#!/bin/sh\n" + body);
    chmod(p.c_str(), 0755);
    return p;
}

}  // namespace

TEST(Ingest, EmptySegmentList) {
    TempDir dir;
    write_text(dir / "manifest.json", manifest(""));
    const LoadReport r = ingest_bundle(dir.path());
    EXPECT_TRUE(r.records.empty());
    EXPECT_EQ(r.skipped, 0u);
    EXPECT_EQ(r.image.width, 2);
    EXPECT_EQ(r.image.source, "x.png");
}

TEST(Ingest, SingleFullSegment) {
    TempDir dir;
    write_text(dir / "manifest.json", manifest(segment("s0", "[0, 4]", 4, "[0, 0, 2, 2]")));
    const LoadReport r = ingest_bundle(dir.path());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].area_px, 4u);
    EXPECT_EQ(r.records[0].source_id, "s0");
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Ingest, DeclaredAreaMismatchWarns) {
    TempDir dir;
    write_text(dir / "manifest.json", manifest(segment("s0", "[0, 4]", 3, "[0, 0, 2, 2]")));
    const LoadReport r = ingest_bundle(dir.path());
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].area_px, 4u);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("/segments/0/area"), std::string::npos);
    EXPECT_EQ(r.skipped, 0u);
}

TEST(Ingest, MalformedSegmentsSkippedAndCounted) {
    TempDir dir;
    const std::string segs = segment("ok", "[0, 4]", 4, "[0, 0, 2, 2]") + "," +
                             segment("short", "[1, 2]", 2, "[0, 0, 2, 2]") + "," +
                             R"({"id": "noarea", "rle": [4], "bbox": [0,0,0,0], "quality": 1, "stability": 1})" + "," +
                             segment("neg", "[1, -3]", 0, "[0, 0, 0, 0]") + "," +
                             R"("not an object")" + "," + segment("ok2", "[1, 1, 2]", 1, "[1, 0, 1, 1]");
    write_text(dir / "manifest.json", manifest(segs));
    const LoadReport r = ingest_bundle(dir.path());
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(r.records[1].source_id, "ok2");
    EXPECT_EQ(r.skipped, 4u);
}

TEST(Ingest, ManifestMissing) {
    TempDir dir;
    EXPECT_EQ(ingest_error(dir.path()), ErrorCode::ManifestMissing);
}

TEST(Ingest, SchemaViolationsNamePointer) {
    TempDir dir;
    std::string msg;
    write_text(dir / "manifest.json", "{not json");
    EXPECT_EQ(ingest_error(dir.path()), ErrorCode::SchemaViolation);

    write_text(dir / "manifest.json", R"({"version": 1, "order": "row-major", "segments": []})");
    EXPECT_EQ(ingest_error(dir.path(), &msg), ErrorCode::SchemaViolation);
    EXPECT_NE(msg.find("/image"), std::string::npos);

    write_text(dir / "manifest.json",
               R"({"version": 1, "image": {"width": "2", "height": 2}, "order": "row-major", "segments": []})");
    EXPECT_EQ(ingest_error(dir.path(), &msg), ErrorCode::SchemaViolation);
    EXPECT_NE(msg.find("/image/width"), std::string::npos);

    write_text(dir / "manifest.json",
               R"({"version": 1, "image": {"width": 2, "height": 2}, "order": "column-major", "segments": []})");
    EXPECT_EQ(ingest_error(dir.path(), &msg), ErrorCode::SchemaViolation);
    EXPECT_NE(msg.find("/order"), std::string::npos);
}

TEST(Ingest, RoundTripWithWriter) {
    std::mt19937_64 rng(21);
    std::vector<SegmentRecord> recs;
    for (int i = 0; i < 30; ++i) {
        SegmentRecord r = SegmentRecord::from_mask("seg\"" + std::to_string(i), crater::testing::random_mask(13, 9, rng, 0.3),
                                                   0.5 + 0.01 * i, 0.25 + 0.02 * i);
        if (i % 3 == 0) r.prompt_point = PixelPoint{i % 13, i % 9};
        if (i % 4 == 0) r.crop_box = Rect{0, 1, 12, 8};
        recs.push_back(std::move(r));
    }
    TempDir dir;
    write_bundle(dir.path(), {13, 9, "field.png"}, recs);
    const LoadReport r = ingest_bundle(dir.path());
    EXPECT_EQ(r.records, recs);
    EXPECT_EQ(r.skipped, 0u);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Ingest, WriterRejectsWrongSize) {
    TempDir dir;
    const std::vector<SegmentRecord> recs{SegmentRecord::from_mask("a", Mask(3, 3))};
    EXPECT_THROW(write_bundle(dir.path(), {4, 4, ""}, recs), Error);
}

TEST(RunSegmenter, StubCopiesFixture) {
    TempDir dir;
    const auto fixture = dir / "fixture";
    write_bundle(fixture, {2, 2, "in.png"}, std::vector<SegmentRecord>{SegmentRecord::from_mask("s", Mask(2, 2, {1, 1, 1, 1}))});
    const auto stub = script(dir, "copy.sh",
                             "while [ $# -gt 0 ]; do case \"$1\" in --out) out=\"$2\"; shift;; esac; shift; done\n"
                             "cp '" + (fixture / "manifest.json").string() + "' \"$out/manifest.json\"\n");
    SegmenterSpec spec;
    spec.kind = SegmenterKind::Subprocess;
    spec.path = stub;
    write_text(dir / "in.png", "");
    const auto bundle = run_segmenter(spec, dir / "in.png", dir / "work");
    EXPECT_EQ(bundle, dir / "work" / "bundle");
    const LoadReport r = ingest_bundle(bundle);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].area_px, 4u);
}

TEST(RunSegmenter, ArgsAreSubstituted) {
    TempDir dir;
    const auto stub = script(dir, "args.sh",
                             "printf '%s\\n' \"$@\" > \"$2/args.txt\"\n"
                             "printf '{\"version\":1,\"image\":{\"width\":1,\"height\":1},\"order\":\"row-major\","
                             "\"segments\":[]}' > \"$2/manifest.json\"\n");
    SegmenterSpec spec;
    spec.kind = SegmenterKind::Subprocess;
    spec.path = stub;
    spec.args_template = {"{input}", "{output}", "--tag=in:{input}"};
    const auto bundle = run_segmenter(spec, dir / "img.png", dir / "w");
    const std::string args = crater::testing::read_text(bundle / "args.txt");
    EXPECT_EQ(args, (dir / "img.png").string() + "\n" + bundle.string() + "\n--tag=in:" + (dir / "img.png").string() + "\n");
}

TEST(RunSegmenter, NonZeroExitCarriesStderr) {
    TempDir dir;
    const auto stub = script(dir, "fail.sh", "echo 'model weights not found' >&2\nexit 1\n");
    SegmenterSpec spec;
    spec.kind = SegmenterKind::Subprocess;
    spec.path = stub;
    try {
        run_segmenter(spec, dir / "in.png", dir / "work");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ProcessFailure);
        EXPECT_NE(std::string(e.what()).find("model weights not found"), std::string::npos);
    }
}

TEST(RunSegmenter, TimeoutKillsProcess) {
    TempDir dir;
    const auto stub = script(dir, "sleep.sh", "sleep 30\n");
    SegmenterSpec spec;
    spec.kind = SegmenterKind::Subprocess;
    spec.path = stub;
    spec.timeout_s = 0.3;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        run_segmenter(spec, dir / "in.png", dir / "work");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Timeout);
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

TEST(RunSegmenter, MissingManifestIsInvalidOutput) {
    TempDir dir;
    const auto stub = script(dir, "quiet.sh", "exit 0\n");
    SegmenterSpec spec;
    spec.kind = SegmenterKind::Subprocess;
    spec.path = stub;
    try {
        run_segmenter(spec, dir / "in.png", dir / "work");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidOutput);
    }
}

TEST(RunSegmenter, MissingExecutableIsProcessFailure) {
    TempDir dir;
    SegmenterSpec spec;
    spec.kind = SegmenterKind::Subprocess;
    spec.path = dir / "does-not-exist";
    try {
        run_segmenter(spec, dir / "in.png", dir / "work");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ProcessFailure);
    }
}

TEST(SegmenterSpec, Validation) {
    SegmenterSpec spec;
    EXPECT_NO_THROW(spec.validate());
    spec.kind = SegmenterKind::Subprocess;
    EXPECT_THROW(spec.validate(), Error);
    spec.path = "/bin/true";
    EXPECT_NO_THROW(spec.validate());
    spec.args_template = {"{input}"};
    EXPECT_THROW(spec.validate(), Error);
}
