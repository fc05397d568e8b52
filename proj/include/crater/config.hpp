#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "crater/edges.hpp"
#include "crater/postprocess.hpp"
#include "crater/segmenter.hpp"
#include "crater/shape_metrics.hpp"
#include "crater/tiling.hpp"

namespace crater {

struct PipelineConfig {
    ShapeThresholds thresholds;
    CannyParams canny;
    FilterConfig filters;
    /// tile_w == 0 disables tiling.
    TileSpec tiling;
    SegmenterSpec segmenter;

    /// Throws ConfigError naming the first invalid setting.
    void validate() const;

    /// One `key=value` line per setting, sorted by key, including defaults.
    std::string canonical() const;

    /// Hex SHA-256 of canonical().
    std::string hash() const;
};

/// Parses flat `key=value` lines with dotted sections (`canny.sigma=1.0`).
/// Blank lines and `#` comments are skipped. Unknown keys, malformed values
/// and invalid combinations throw ConfigError naming the key.
PipelineConfig parse_config(std::string_view text);

/// Reads and parses a config file. Throws ConfigError if it cannot be read.
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace crater
