#include "crater/segmenter.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace crater {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what) {
    throw Error(ErrorCode::SchemaViolation, pointer + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& base) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(base + "/" + key, "missing required key");
    return *it;
}

int require_int(const json& obj, const char* key, const std::string& base) {
    const json& v = require(obj, key, base);
    if (!v.is_number_integer()) schema_error(base + "/" + key, "expected integer");
    return v.get<int>();
}

double require_unit(const json& obj, const char* key, const std::string& base) {
    const json& v = require(obj, key, base);
    if (!v.is_number()) schema_error(base + "/" + key, "expected number");
    const double d = v.get<double>();
    if (!(d >= 0.0 && d <= 1.0)) schema_error(base + "/" + key, "expected value in [0, 1]");
    return d;
}

std::vector<int> int_array(const json& v, std::size_t n, const std::string& pointer) {
    if (!v.is_array() || v.size() != n) {
        schema_error(pointer, "expected array of " + std::to_string(n) + " integers");
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!v[i].is_number_integer()) schema_error(pointer + "/" + std::to_string(i), "expected integer");
        out.push_back(v[i].get<int>());
    }
    return out;
}

std::optional<std::vector<int>> optional_array(const json& seg, const char* key, std::size_t n,
                                               const std::string& base) {
    const auto it = seg.find(key);
    if (it == seg.end() || it->is_null()) return std::nullopt;
    return int_array(*it, n, base + "/" + key);
}

SegmentRecord parse_segment(const json& seg, const ImageInfo& image, const std::string& base,
                            std::vector<std::string>& warnings) {
    if (!seg.is_object()) schema_error(base, "expected object");
    SegmentRecord rec;
    const json& id = require(seg, "id", base);
    if (!id.is_string()) schema_error(base + "/id", "expected string");
    rec.source_id = id.get<std::string>();

    const json& rle = require(seg, "rle", base);
    if (!rle.is_array()) schema_error(base + "/rle", "expected array");
    RleCounts counts;
    counts.reserve(rle.size());
    for (std::size_t i = 0; i < rle.size(); ++i) {
        if (!rle[i].is_number_unsigned() && !(rle[i].is_number_integer() && rle[i].get<long long>() >= 0)) {
            schema_error(base + "/rle/" + std::to_string(i), "expected non-negative integer");
        }
        counts.push_back(rle[i].get<std::uint64_t>());
    }
    try {
        rec.mask = decode_rle(counts, image.width, image.height);
    } catch (const Error& e) {
        throw Error(ErrorCode::RleError, base + "/rle: " + e.what());
    }

    const int area = require_int(seg, "area", base);
    const auto bbox = int_array(require(seg, "bbox", base), 4, base + "/bbox");
    rec.quality = require_unit(seg, "quality", base);
    rec.stability = require_unit(seg, "stability", base);
    if (const auto p = optional_array(seg, "point", 2, base)) rec.prompt_point = PixelPoint{(*p)[0], (*p)[1]};
    if (const auto c = optional_array(seg, "crop_box", 4, base)) {
        rec.crop_box = Rect{(*c)[0], (*c)[1], (*c)[2], (*c)[3]};
    }

    rec.area_px = rec.mask.count();
    rec.bbox = rec.mask.bbox();
    if (area < 0 || static_cast<std::uint64_t>(area) != rec.area_px) {
        warnings.push_back(base + "/area: declared " + std::to_string(area) + ", decoded " +
                           std::to_string(rec.area_px) + " (decoded value used)");
    }
    if (Rect{bbox[0], bbox[1], bbox[2], bbox[3]} != rec.bbox) {
        warnings.push_back(base + "/bbox: declared bbox disagrees with decoded mask (decoded value used)");
    }
    return rec;
}

}  // namespace

LoadReport ingest_bundle(const fs::path& dir) {
    const fs::path manifest = dir / kManifestName;
    std::ifstream in(manifest, std::ios::binary);
    if (!in) throw Error(ErrorCode::ManifestMissing, "no readable " + manifest.string());

    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        schema_error("", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) schema_error("", "expected object at top level");
    const json& version = require(doc, "version", "");
    if (!version.is_number_integer() || version.get<int>() != 1) schema_error("/version", "expected 1");
    const json& image = require(doc, "image", "");
    if (!image.is_object()) schema_error("/image", "expected object");

    LoadReport report;
    report.image.width = require_int(image, "width", "/image");
    report.image.height = require_int(image, "height", "/image");
    if (report.image.width < 1) schema_error("/image/width", "must be >= 1");
    if (report.image.height < 1) schema_error("/image/height", "must be >= 1");
    if (const auto it = image.find("source"); it != image.end() && !it->is_null()) {
        if (!it->is_string()) schema_error("/image/source", "expected string");
        report.image.source = it->get<std::string>();
    }
    const json& order = require(doc, "order", "");
    if (!order.is_string() || order.get<std::string>() != "row-major") {
        schema_error("/order", "only \"row-major\" is supported");
    }
    const json& segments = require(doc, "segments", "");
    if (!segments.is_array()) schema_error("/segments", "expected array");

    for (std::size_t i = 0; i < segments.size(); ++i) {
        const std::string base = "/segments/" + std::to_string(i);
        try {
            report.records.push_back(parse_segment(segments[i], report.image, base, report.warnings));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SchemaViolation && e.code() != ErrorCode::RleError) throw;
            ++report.skipped;
            report.warnings.push_back(std::string("skipped: ") + e.what());
        }
    }
    return report;
}

void write_bundle(const fs::path& dir, const ImageInfo& image, std::span<const SegmentRecord> records) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["image"] = {{"width", image.width}, {"height", image.height}, {"source", image.source}};
    doc["order"] = "row-major";
    doc["segments"] = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        if (r.mask.width() != image.width || r.mask.height() != image.height) {
            throw Error(ErrorCode::DimMismatch, "segment " + r.source_id + " does not match image size");
        }
        nlohmann::ordered_json seg;
        seg["id"] = r.source_id;
        seg["rle"] = encode_rle(r.mask);
        seg["area"] = r.area_px;
        seg["bbox"] = {r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h};
        seg["quality"] = r.quality;
        seg["stability"] = r.stability;
        seg["point"] = r.prompt_point ? nlohmann::ordered_json{r.prompt_point->x, r.prompt_point->y}
                                      : nlohmann::ordered_json(nullptr);
        seg["crop_box"] = r.crop_box ? nlohmann::ordered_json{r.crop_box->x, r.crop_box->y,
                                                             r.crop_box->w, r.crop_box->h}
                                     : nlohmann::ordered_json(nullptr);
        doc["segments"].push_back(std::move(seg));
    }
    std::ofstream out(dir / kManifestName, std::ios::binary | std::ios::trunc);
    out << doc.dump() << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + (dir / kManifestName).string());
}

void SegmenterSpec::validate() const {
    if (kind == SegmenterKind::BundleDir) return;
    if (path.empty()) throw Error(ErrorCode::ConfigError, "segmenter.path is required for a subprocess segmenter");
    bool has_input = false;
    bool has_output = false;
    for (const auto& a : args_template) {
        has_input = has_input || a.find("{input}") != std::string::npos;
        has_output = has_output || a.find("{output}") != std::string::npos;
    }
    if (!has_input || !has_output) {
        throw Error(ErrorCode::ConfigError, "segmenter.args must contain {input} and {output}");
    }
}

namespace {

std::string substitute(std::string arg, const std::string& key, const std::string& value) {
    for (auto pos = arg.find(key); pos != std::string::npos; pos = arg.find(key, pos + value.size())) {
        arg.replace(pos, key.size(), value);
    }
    return arg;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

fs::path run_segmenter(const SegmenterSpec& spec, const fs::path& image, const fs::path& workdir) {
    spec.validate();
    if (spec.kind == SegmenterKind::BundleDir) return spec.path;

    const fs::path out_dir = workdir / "bundle";
    const fs::path err_log = workdir / "segmenter.stderr";
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + out_dir.string());

    std::vector<std::string> args{spec.path.string()};
    for (const auto& a : spec.args_template) {
        args.push_back(substitute(substitute(a, "{input}", image.string()), "{output}", out_dir.string()));
    }
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) throw Error(ErrorCode::ProcessFailure, "fork failed");
    if (pid == 0) {
        ::setpgid(0, 0);
        const int err = ::open(err_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        const int null = ::open("/dev/null", O_WRONLY);
        if (err >= 0) ::dup2(err, STDERR_FILENO);
        if (null >= 0) ::dup2(null, STDOUT_FILENO);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }

    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::duration<double>(spec.timeout_s);
    int status = 0;
    while (true) {
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw Error(ErrorCode::ProcessFailure, "waitpid failed");
        if (clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            throw Error(ErrorCode::Timeout, spec.path.string() + " exceeded " +
                                                std::to_string(spec.timeout_s) + " s");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        throw Error(ErrorCode::ProcessFailure, spec.path.string() + " exited with status " +
                                                   std::to_string(code) + "; stderr: " + read_file(err_log));
    }
    try {
        ingest_bundle(out_dir);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidOutput, e.what());
    }
    return out_dir;
}

}  // namespace crater
