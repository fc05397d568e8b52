#include "crater/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace crater {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw Error(ErrorCode::ConfigError, key + ": " + what);
}

double to_double(const std::string& key, std::string_view v) {
    const std::string s(v);
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(d)) bad(key, "expected a number, got '" + s + "'");
    return d;
}

long long to_int(const std::string& key, std::string_view v) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        bad(key, "expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_ws(std::string_view v) {
    std::vector<std::string> out;
    std::istringstream in{std::string(v)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

void PipelineConfig::validate() const {
    auto wrap = [](const char* prefix, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, std::string(prefix) + ": " + e.what());
        }
    };
    wrap("thresholds", [&] { thresholds.validate(); });
    wrap("canny", [&] { canny.validate(); });
    wrap("filters", [&] { filters.validate(); });
    if (tiling.tile_w != 0 || tiling.tile_h != 0) {
        if (tiling.tile_w < 1 || tiling.tile_h < 1) bad("tiling.tile", "tile dimensions must be >= 1");
        const int o = tiling.resolved_overlap();
        if (o < 0 || o >= tiling.tile_w || o >= tiling.tile_h) bad("tiling.overlap", "must be in [0, tile)");
    }
    if (!(segmenter.timeout_s > 0.0)) bad("segmenter.timeout", "must be > 0");
    wrap("segmenter", [&] { segmenter.validate(); });
}

std::string PipelineConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["t_circ"] = num(thresholds.t_circ);
    kv["t_ell"] = num(thresholds.t_ell);
    kv["max_axis_ratio"] = num(thresholds.max_axis_ratio);
    kv["min_area_px"] = std::to_string(thresholds.min_area_px);
    kv["canny.sigma"] = num(canny.sigma);
    kv["canny.low"] = num(canny.low);
    kv["canny.high"] = num(canny.high);
    kv["filters.min_quality"] = num(filters.min_quality);
    kv["filters.min_stability"] = num(filters.min_stability);
    kv["filters.max_axis_ratio"] = num(filters.max_axis_ratio);
    kv["filters.center_tol_frac"] = num(filters.center_tol_frac);
    kv["filters.keep_policy"] = "KeepLarger";
    kv["tiling.tile"] = tiling.tile_w == 0 ? "none" : std::to_string(tiling.tile_w) + "x" + std::to_string(tiling.tile_h);
    kv["tiling.overlap"] = tiling.tile_w == 0 ? "none" : std::to_string(tiling.resolved_overlap());
    kv["segmenter.kind"] = segmenter.kind == SegmenterKind::BundleDir ? "bundle" : "subprocess";
    kv["segmenter.path"] = segmenter.path.string();
    std::string args;
    for (const auto& a : segmenter.args_template) args += (args.empty() ? "" : " ") + a;
    kv["segmenter.args"] = args;
    kv["segmenter.timeout"] = num(segmenter.timeout_s);
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string PipelineConfig::hash() const {
    const std::string text = canonical();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xF];
    }
    return hex;
}

PipelineConfig parse_config(std::string_view text) {
    PipelineConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "t_circ") {
            cfg.thresholds.t_circ = to_double(key, value);
        } else if (key == "t_ell") {
            cfg.thresholds.t_ell = to_double(key, value);
        } else if (key == "max_axis_ratio") {
            cfg.thresholds.max_axis_ratio = to_double(key, value);
        } else if (key == "min_area_px") {
            const auto v = to_int(key, value);
            if (v < 0) bad(key, "must be non-negative");
            cfg.thresholds.min_area_px = static_cast<std::size_t>(v);
        } else if (key == "canny.sigma") {
            cfg.canny.sigma = to_double(key, value);
        } else if (key == "canny.low") {
            cfg.canny.low = to_double(key, value);
        } else if (key == "canny.high") {
            cfg.canny.high = to_double(key, value);
        } else if (key == "filters.min_quality") {
            cfg.filters.min_quality = to_double(key, value);
        } else if (key == "filters.min_stability") {
            cfg.filters.min_stability = to_double(key, value);
        } else if (key == "filters.max_axis_ratio") {
            cfg.filters.max_axis_ratio = to_double(key, value);
        } else if (key == "filters.center_tol_frac") {
            cfg.filters.center_tol_frac = to_double(key, value);
        } else if (key == "filters.keep_policy") {
            if (value != "KeepLarger") bad(key, "only KeepLarger is supported");
        } else if (key == "tiling.tile") {
            if (value == "none") {
                cfg.tiling.tile_w = cfg.tiling.tile_h = 0;
            } else if (value.find('x') == std::string_view::npos) {
                cfg.tiling.tile_w = cfg.tiling.tile_h = static_cast<int>(to_int(key, value));
            } else {
                try {
                    const TileSpec t = parse_tile_spec(value);
                    cfg.tiling.tile_w = t.tile_w;
                    cfg.tiling.tile_h = t.tile_h;
                    if (t.overlap >= 0) cfg.tiling.overlap = t.overlap;
                } catch (const Error& e) {
                    bad(key, e.what());
                }
            }
        } else if (key == "tiling.overlap") {
            cfg.tiling.overlap = static_cast<int>(to_int(key, value));
            if (cfg.tiling.overlap < 0) bad(key, "must be non-negative");
        } else if (key == "segmenter.kind") {
            if (value == "bundle") {
                cfg.segmenter.kind = SegmenterKind::BundleDir;
            } else if (value == "subprocess") {
                cfg.segmenter.kind = SegmenterKind::Subprocess;
            } else {
                bad(key, "expected 'bundle' or 'subprocess'");
            }
        } else if (key == "segmenter.path") {
            cfg.segmenter.path = std::string(value);
        } else if (key == "segmenter.args") {
            cfg.segmenter.args_template = split_ws(value);
        } else if (key == "segmenter.timeout") {
            cfg.segmenter.timeout_s = to_double(key, value);
        } else {
            bad(key, "unknown config key");
        }
    }
    if (cfg.segmenter.kind == SegmenterKind::Subprocess && cfg.segmenter.path.empty()) {
        if (const char* env = std::getenv("CRATER_SEGMENTER"); env != nullptr && *env != '\0') {
            cfg.segmenter.path = env;
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace crater
