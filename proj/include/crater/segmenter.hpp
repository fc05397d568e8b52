#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "crater/mask.hpp"

namespace crater {

struct ImageInfo {
    int width = 0;
    int height = 0;
    std::string source;
};

/// Result of reading a mask bundle. Malformed segments are skipped and
/// reported rather than aborting the whole load.
struct LoadReport {
    ImageInfo image;
    std::vector<SegmentRecord> records;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;  // one line per skipped segment or corrected field
};

inline constexpr const char* kManifestName = "manifest.json";

/// Reads `dir/manifest.json`. Throws ManifestMissing when the file is absent
/// and SchemaViolation (message starts with a JSON pointer) for top-level
/// problems. Declared area/bbox that disagree with the decoded mask produce a
/// warning and the decoded value is used.
LoadReport ingest_bundle(const std::filesystem::path& dir);

/// Writes `dir/manifest.json` (creating `dir`) for the given records.
void write_bundle(const std::filesystem::path& dir, const ImageInfo& image,
                  std::span<const SegmentRecord> records);

enum class SegmenterKind { BundleDir, Subprocess };

struct SegmenterSpec {
    SegmenterKind kind = SegmenterKind::BundleDir;
    std::filesystem::path path;
    /// Arguments passed to the executable; `{input}` and `{output}` are substituted.
    std::vector<std::string> args_template{"--image", "{input}", "--out", "{output}"};
    double timeout_s = 600.0;

    /// Throws ConfigError if a Subprocess spec lacks an executable or either placeholder.
    void validate() const;
};

/// Runs the external segmenter on `image`, writing its bundle into
/// `workdir/bundle`. For BundleDir specs `path` is returned unchanged.
/// Throws ProcessFailure (non-zero exit, with captured stderr), Timeout, or
/// InvalidOutput when no readable manifest was produced.
std::filesystem::path run_segmenter(const SegmenterSpec& spec, const std::filesystem::path& image,
                                    const std::filesystem::path& workdir);

}  // namespace crater
