#include "crater/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "crater/catalog.hpp"
#include "crater/config.hpp"
#include "crater/pipeline.hpp"
#include "crater/raster.hpp"
#include "crater/segmenter.hpp"
#include "crater/tiling.hpp"

namespace crater {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ProcessFailure:
        case ErrorCode::Timeout:
        case ErrorCode::InvalidOutput:
        case ErrorCode::ManifestMissing:
        case ErrorCode::SchemaViolation:
        case ErrorCode::RleError:
        case ErrorCode::SumMismatch:
            return kExitSegmenter;
        case ErrorCode::IoFailure:
        case ErrorCode::ParseError:
            return kExitIo;
        default:
            return kExitConfig;
    }
}

namespace {

unsigned resolve_jobs(unsigned jobs) {
    if (jobs > 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

PipelineConfig resolve_config(const std::optional<fs::path>& path, const std::optional<std::string>& tiles) {
    PipelineConfig cfg = path ? load_config(*path) : parse_config("");
    if (tiles) {
        const TileSpec t = parse_tile_spec(*tiles);
        cfg.tiling.tile_w = t.tile_w;
        cfg.tiling.tile_h = t.tile_h;
        if (t.overlap >= 0) cfg.tiling.overlap = t.overlap;
    }
    cfg.validate();
    return cfg;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RgbImage crop_image(const RgbImage& image, const Rect& r) {
    RgbImage out(r.w, r.h);
    for (int y = 0; y < r.h; ++y) {
        for (int x = 0; x < r.w; ++x) out.set(x, y, image.at(r.x + x, r.y + y));
    }
    return out;
}

std::string describe(const TileSpec& t) {
    if (t.tile_w == 0) return "none";
    return std::to_string(t.tile_w) + "x" + std::to_string(t.tile_h) + "+" + std::to_string(t.resolved_overlap());
}

LoadReport ingest_checked(const fs::path& dir, int w, int h) {
    LoadReport load = ingest_bundle(dir);
    if (load.image.width != w || load.image.height != h) {
        throw Error(ErrorCode::DimMismatch, "bundle " + dir.string() + " describes a " +
                                                std::to_string(load.image.width) + "x" +
                                                std::to_string(load.image.height) + " image, expected " +
                                                std::to_string(w) + "x" + std::to_string(h));
    }
    return load;
}

struct DetectRun {
    PipelineResult result;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
    std::string source;
};

DetectRun segment_and_detect(const RgbImage& image, const fs::path& image_path, const DetectOptions& opts,
                             const PipelineConfig& cfg, unsigned jobs) {
    DetectRun run;
    const int w = image.width();
    const int h = image.height();
    const bool tiled = cfg.tiling.tile_w > 0;

    std::optional<fs::path> bundle = opts.bundle;
    if (!bundle && cfg.segmenter.kind == SegmenterKind::BundleDir) {
        if (cfg.segmenter.path.empty()) {
            throw Error(ErrorCode::ConfigError, "no segmenter configured; pass --bundle or set segmenter.kind");
        }
        bundle = cfg.segmenter.path;
    }

    if (bundle) {
        LoadReport load = ingest_checked(*bundle, w, h);
        run.skipped = load.skipped;
        run.warnings = std::move(load.warnings);
        run.source = "bundle:" + bundle->string();
        run.result = tiled ? run_tiled_records(load.records, w, h, cfg, jobs) : run_pipeline(load.records, cfg, jobs);
        return run;
    }

    run.source = "subprocess:" + cfg.segmenter.path.string();
    const fs::path work = opts.out_dir / "segmenter";
    if (!tiled) {
        LoadReport load = ingest_checked(run_segmenter(cfg.segmenter, image_path, work), w, h);
        run.skipped = load.skipped;
        run.warnings = std::move(load.warnings);
        run.result = run_pipeline(load.records, cfg, jobs);
        return run;
    }

    const TilePlan plan = plan_tiles(w, h, cfg.tiling.tile_w, cfg.tiling.tile_h, cfg.tiling.resolved_overlap());
    std::vector<LoadReport> loads(plan.tiles.size());
    auto segment_tile = [&](const Rect& tile) {
        const auto idx = static_cast<std::size_t>(
            std::find_if(plan.tiles.begin(), plan.tiles.end(), [&](const Rect& t) { return t == tile; }) -
            plan.tiles.begin());
        char name[32];
        std::snprintf(name, sizeof name, "tile_%04zu", idx);
        const fs::path dir = work / name;
        fs::create_directories(dir);
        const fs::path png = dir / "tile.png";
        write_png(png, crop_image(image, tile));
        loads[idx] = ingest_checked(run_segmenter(cfg.segmenter, png, dir), tile.w, tile.h);
        return loads[idx].records;
    };
    run.result = run_tiled(plan, segment_tile, cfg, jobs);
    for (auto& load : loads) {
        run.skipped += load.skipped;
        for (auto& wline : load.warnings) run.warnings.push_back(std::move(wline));
    }
    return run;
}

void write_report(const fs::path& path, const DetectOptions& opts, const RgbImage& image, const PipelineConfig& cfg,
                  unsigned jobs, const DetectRun& run, std::size_t dropped, const CraterCatalog& catalog) {
    std::ostringstream os;
    const auto& c = run.result.counts;
    os << "image=" << opts.image.string() << "\n"
       << "image_size=" << image.width() << "x" << image.height() << "\n"
       << "created_at=" << catalog.created_at() << "\n"
       << "config_hash=" << catalog.pipeline_config_hash() << "\n"
       << "segmenter=" << run.source << "\n"
       << "tiles=" << describe(cfg.tiling) << "\n"
       << "jobs=" << jobs << "\n"
       << "skipped_segments=" << run.skipped << "\n";
    for (const auto& w : run.warnings) os << "warning=" << w << "\n";
    os << "stage.segments=" << c.segments << "\n"
       << "stage.quality_gate=" << c.after_quality << "\n"
       << "stage.normalize=" << c.after_normalize << "\n"
       << "stage.classify=" << c.after_shape << "\n"
       << "stage.fit=" << c.after_fit << "\n"
       << "stage.elongation=" << c.after_elongation << "\n"
       << "stage.dedup=" << c.after_dedup << "\n"
       << "stage.in_image=" << catalog.size() << "\n"
       << "dropped_outside_image=" << dropped << "\n";

    std::size_t circles = 0;
    double max_d = 0.0;
    for (const auto& e : catalog.craters()) {
        if (e.shape == ShapeClass::Circle) ++circles;
        max_d = std::max(max_d, 2.0 * e.a);
    }
    os << "craters=" << catalog.size() << "\n"
       << "circles=" << circles << "\n"
       << "ellipses=" << catalog.size() - circles << "\n";
    if (!catalog.empty()) {
        const auto edges = geometric_edges(4.0, std::max(max_d * 1.0001, 8.0));
        const auto sfd = size_frequency(catalog, edges);
        char line[96];
        for (std::size_t i = 0; i < sfd.counts.size(); ++i) {
            std::snprintf(line, sizeof line, "csfd[%.3f,%.3f)=%zu\n", edges[i], edges[i + 1], sfd.counts[i]);
            os << line;
        }
        os << "csfd_out_of_range=" << sfd.out_of_range << "\n";
    }

    std::ofstream f(path, std::ios::binary);
    f << os.str();
    if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

template <class Fn>
int guarded(std::ostream& err, const char* command, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "crater " << command << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        err << "crater " << command << ": " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "crater " << command << ": " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int cmd_detect(const DetectOptions& opts, std::ostream& err) {
    return guarded(err, "detect", [&] {
        const PipelineConfig cfg = resolve_config(opts.config, opts.tiles);
        const unsigned jobs = resolve_jobs(opts.jobs);
        const RgbImage image = read_png(opts.image);
        std::error_code ec;
        fs::create_directories(opts.out_dir, ec);
        if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + opts.out_dir.string() + ": " + ec.message());

        DetectRun run = segment_and_detect(image, opts.image, opts, cfg, jobs);

        // Fits of truncated segments can land just outside the frame.
        std::vector<CraterEllipse> kept;
        for (auto& e : run.result.craters) {
            if (e.cx >= 0.0 && e.cy >= 0.0 && e.cx < image.width() && e.cy < image.height()) kept.push_back(e);
        }
        const std::size_t dropped = run.result.craters.size() - kept.size();
        const CraterCatalog catalog(opts.image.string(), image.width(), image.height(), std::move(kept),
                                    cfg.hash(), utc_timestamp());

        write_csv(catalog, opts.out_dir / "catalog.csv");
        render_overlay(image, catalog, opts.out_dir / "overlay.png");
        write_report(opts.out_dir / "report.txt", opts, image, cfg, jobs, run, dropped, catalog);
        return kExitOk;
    });
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, "eval", [&] {
        const PipelineConfig cfg = resolve_config(opts.config, opts.tiles);
        const unsigned jobs = resolve_jobs(opts.jobs);
        const FieldParams& fp = opts.field;
        const SynthField field = generate_field(fp);
        const PipelineResult result =
            cfg.tiling.tile_w > 0 ? run_tiled_records(field.truth_masks, fp.image_w, fp.image_h, cfg, jobs)
                                  : run_pipeline(field.truth_masks, cfg, jobs);
        const CraterCatalog detected("synthetic", fp.image_w, fp.image_h, result.craters, cfg.hash());
        const MatchResult match = match_catalogs(detected, field.truth);
        const Scores s = precision_recall(match);

        char buf[256];
        std::snprintf(buf, sizeof buf, "%-6s %-8s %-8s %-8s %-9s %-9s %-9s\n", "seed", "truth", "detected",
                      "matched", "precision", "recall", "f1");
        out << buf;
        std::snprintf(buf, sizeof buf, "%-6llu %-8zu %-8zu %-8zu %-9.4f %-9.4f %-9.4f\n",
                      static_cast<unsigned long long>(fp.seed), field.truth.size(), detected.size(),
                      match.pairs.size(), s.precision, s.recall, s.f1);
        out << buf << "\n";
        out << "seed=" << fp.seed << "\n"
            << "n_truth=" << field.truth.size() << "\n"
            << "n_detected=" << detected.size() << "\n"
            << "matched=" << match.pairs.size() << "\n"
            << "unmatched_detected=" << match.unmatched_detected.size() << "\n"
            << "unmatched_truth=" << match.unmatched_truth.size() << "\n";
        std::snprintf(buf, sizeof buf, "precision=%.6f\nrecall=%.6f\nf1=%.6f\n", s.precision, s.recall, s.f1);
        out << buf << "config_hash=" << cfg.hash() << "\n";
        return kExitOk;
    });
}

int cmd_render(const fs::path& catalog, const fs::path& image, const fs::path& out, std::ostream& err) {
    return guarded(err, "render", [&] {
        const CraterCatalog cat = read_csv(catalog);
        const RgbImage img = read_png(image);
        const RgbImage drawn = draw_overlay(img, cat);
        write_png(out, drawn);
        return kExitOk;
    });
}

namespace {

std::pair<int, int> parse_dims(const std::string& text) {
    auto fail = [&] { return Error(ErrorCode::ConfigError, "dims must look like WxH, got '" + text + "'"); };
    if (text.find('+') != std::string::npos) throw fail();
    try {
        const TileSpec t = parse_tile_spec(text);
        return {t.tile_w, t.tile_h};
    } catch (const Error&) {
        throw fail();
    }
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument(text);
        std::size_t used_lo = 0;
        std::size_t used_hi = 0;
        const double lo = std::stod(text.substr(0, colon), &used_lo);
        const double hi = std::stod(text.substr(colon + 1), &used_hi);
        if (used_lo != colon || used_hi != text.size() - colon - 1) throw std::invalid_argument(text);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::ConfigError, "radius must look like MIN:MAX, got '" + text + "'");
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Crater detection from segmentation masks"};
    app.name("crater");
    app.require_subcommand(1);

    DetectOptions detect;
    std::string detect_config;
    std::string detect_bundle;
    std::string detect_tiles;
    auto* d = app.add_subcommand("detect", "Detect craters in an image and write catalog, overlay and report");
    d->add_option("image", detect.image, "Input PNG")->required();
    d->add_option("--out", detect.out_dir, "Output directory")->required();
    d->add_option("--config", detect_config, "Pipeline config file (key = value)");
    d->add_option("--bundle", detect_bundle, "Use an existing mask bundle instead of running the segmenter");
    d->add_option("--tiles", detect_tiles, "Tile the image: WxH or WxH+OVERLAP");
    d->add_option("--jobs", detect.jobs, "Worker threads (default: logical processors)");

    EvalOptions eval;
    std::string eval_config;
    std::string eval_tiles;
    std::string eval_dims = "1024x1024";
    std::string eval_radius = "10:60";
    auto* e = app.add_subcommand("eval", "Score the pipeline on a synthetic crater field");
    e->add_option("--seed", eval.field.seed, "Field seed")->capture_default_str();
    e->add_option("--n", eval.field.n_craters, "Number of craters")->capture_default_str();
    e->add_option("--dims", eval_dims, "Image size WxH")->capture_default_str();
    e->add_option("--radius", eval_radius, "Semi-major axis range MIN:MAX in px")->capture_default_str();
    e->add_option("--axis-ratio", eval.field.axis_ratio_max, "Largest a/b")->capture_default_str();
    e->add_option("--jitter", eval.field.jitter_frac, "Boundary jitter as a fraction of a")->capture_default_str();
    e->add_option("--config", eval_config, "Pipeline config file");
    e->add_option("--tiles", eval_tiles, "Run tiled: WxH or WxH+OVERLAP");
    e->add_option("--jobs", eval.jobs, "Worker threads");

    fs::path render_catalog;
    fs::path render_image;
    fs::path render_out;
    auto* r = app.add_subcommand("render", "Draw a catalog over an image");
    r->add_option("catalog", render_catalog, "catalog.csv")->required();
    r->add_option("image", render_image, "Input PNG")->required();
    r->add_option("--out", render_out, "Output PNG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        err << "crater: " << ex.what() << "\n" << "Run with --help for usage.\n";
        return kExitConfig;
    }

    if (d->parsed()) {
        if (!detect_config.empty()) detect.config = detect_config;
        if (!detect_bundle.empty()) detect.bundle = detect_bundle;
        if (!detect_tiles.empty()) detect.tiles = detect_tiles;
        return cmd_detect(detect, err);
    }
    if (e->parsed()) {
        if (!eval_config.empty()) eval.config = eval_config;
        if (!eval_tiles.empty()) eval.tiles = eval_tiles;
        return guarded(err, "eval", [&] {
            std::tie(eval.field.image_w, eval.field.image_h) = parse_dims(eval_dims);
            std::tie(eval.field.radius_min, eval.field.radius_max) = parse_range(eval_radius);
            return cmd_eval(eval, out, err);
        });
    }
    return cmd_render(render_catalog, render_image, render_out, err);
}

}  // namespace crater
