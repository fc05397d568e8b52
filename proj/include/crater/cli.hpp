#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "crater/error.hpp"
#include "crater/synth.hpp"

namespace crater {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSegmenter = 2;
inline constexpr int kExitIo = 3;

/// Process exit status for a library error.
int exit_code_for(ErrorCode code) noexcept;

struct DetectOptions {
    std::filesystem::path image;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> bundle;  // bypasses the segmenter
    std::optional<std::string> tiles;             // "WxH" or "WxH+O", overrides the config
    unsigned jobs = 0;                            // 0 = hardware concurrency
};

/// Writes catalog.csv, overlay.png and report.txt into out_dir.
int cmd_detect(const DetectOptions& opts, std::ostream& err);

struct EvalOptions {
    FieldParams field;
    std::optional<std::filesystem::path> config;
    std::optional<std::string> tiles;
    unsigned jobs = 0;
};

/// Synthetic field through the pipeline; prints a table then key=value lines.
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);

int cmd_render(const std::filesystem::path& catalog, const std::filesystem::path& image,
               const std::filesystem::path& out, std::ostream& err);

/// Full command line, argv[0] included.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crater
