#include "crater/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "crater/error.hpp"
#include "crater/postprocess.hpp"

namespace crater {

CraterCatalog::CraterCatalog(std::string image_ref, int image_w, int image_h,
                             std::vector<CraterEllipse> craters, std::string pipeline_config_hash,
                             std::string created_at)
    : image_ref_(std::move(image_ref)),
      image_w_(image_w),
      image_h_(image_h),
      craters_(std::move(craters)),
      config_hash_(std::move(pipeline_config_hash)),
      created_at_(std::move(created_at)) {
    if (has_dims()) {
        for (const auto& c : craters_) {
            if (!(c.cx >= 0.0 && c.cy >= 0.0 && c.cx < image_w_ && c.cy < image_h_)) {
                throw Error(ErrorCode::OutOfBounds, "crater " + c.source_id + " centre outside " +
                                                        std::to_string(image_w_) + "x" +
                                                        std::to_string(image_h_));
            }
        }
    }
    std::sort(craters_.begin(), craters_.end(), larger_first);
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

double parse_double(const std::string& s, std::size_t line_no, const char* column) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad " + column +
                                               " value '" + s + "'");
    }
    return v;
}

}  // namespace

std::string to_csv(const CraterCatalog& catalog) {
    std::string out = kCatalogHeader;
    out += '\n';
    std::size_t id = 0;
    for (const auto& c : catalog.craters()) {
        out += std::to_string(id++);
        for (const double v : {c.cx, c.cy, c.a, c.b, c.theta}) {
            out += ',';
            out += fixed6(v);
        }
        out += ',';
        out += to_string(c.shape);
        out += ',';
        out += fixed6(c.quality);
        out += ',';
        out += csv_field(c.source_id);
        out += '\n';
    }
    return out;
}

void write_csv(const CraterCatalog& catalog, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << to_csv(catalog);
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

CraterCatalog parse_csv(std::string_view text, std::string image_ref) {
    std::vector<CraterEllipse> craters;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!header_seen) {
            const auto cols = split_csv_line(line, line_no);
            const auto expected = split_csv_line(kCatalogHeader, 0);
            if (cols.size() < expected.size() || !std::equal(expected.begin(), expected.end(), cols.begin())) {
                throw Error(ErrorCode::ParseError, "line 1: expected header '" + std::string(kCatalogHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_csv_line(line, line_no);
        if (f.size() < 9) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 9 columns, got " +
                                                   std::to_string(f.size()));
        }
        CraterEllipse c;
        c.cx = parse_double(f[1], line_no, "cx");
        c.cy = parse_double(f[2], line_no, "cy");
        c.a = parse_double(f[3], line_no, "a");
        c.b = parse_double(f[4], line_no, "b");
        c.theta = parse_double(f[5], line_no, "theta");
        if (f[6] == "Circle") {
            c.shape = ShapeClass::Circle;
        } else if (f[6] == "Ellipse") {
            c.shape = ShapeClass::Ellipse;
        } else {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad class '" + f[6] + "'");
        }
        c.quality = parse_double(f[7], line_no, "quality");
        c.source_id = f[8];
        if (!(c.a >= c.b && c.b > 0.0)) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": axes must satisfy a >= b > 0");
        }
        craters.push_back(std::move(c));
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, "line 1: missing header");
    return CraterCatalog(std::move(image_ref), 0, 0, std::move(craters));
}

CraterCatalog read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path.string());
}

SizeFrequency size_frequency(const CraterCatalog& catalog, std::span<const double> edges) {
    if (edges.size() < 2) throw Error(ErrorCode::BadBins, "need at least two bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw Error(ErrorCode::BadBins, "bin edges must be strictly increasing");
    }
    SizeFrequency h;
    h.edges.assign(edges.begin(), edges.end());
    h.counts.assign(edges.size() - 1, 0);
    for (const auto& c : catalog.craters()) {
        const double d = 2.0 * c.a;
        const auto it = std::upper_bound(edges.begin(), edges.end(), d);
        if (it == edges.begin() || it == edges.end()) {
            ++h.out_of_range;
            continue;
        }
        ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
    return h;
}

std::vector<double> geometric_edges(double lo, double hi, double factor) {
    if (!(lo > 0.0) || !(hi > lo) || !(factor > 1.0)) {
        throw Error(ErrorCode::BadBins, "geometric bins need 0 < lo < hi and factor > 1");
    }
    std::vector<double> edges{lo};
    while (edges.back() < hi) edges.push_back(edges.back() * factor);
    return edges;
}

namespace {

void plot(RgbImage& img, int x, int y, Rgb c) {
    if (img.in_bounds(x, y)) img.set(x, y, c);
}

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0);
    const int sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0);
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        plot(img, x0, y0, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

}  // namespace

RgbImage draw_overlay(const RgbImage& image, const CraterCatalog& catalog) {
    if (catalog.has_dims()) {
        if (catalog.image_w() != image.width() || catalog.image_h() != image.height()) {
            throw Error(ErrorCode::DimMismatch, "catalog is " + std::to_string(catalog.image_w()) + "x" +
                                                    std::to_string(catalog.image_h()) + ", image is " +
                                                    std::to_string(image.width()) + "x" +
                                                    std::to_string(image.height()));
        }
    } else {
        for (const auto& c : catalog.craters()) {
            if (!(c.cx >= 0.0 && c.cy >= 0.0 && c.cx < image.width() && c.cy < image.height())) {
                throw Error(ErrorCode::DimMismatch, "crater " + c.source_id + " lies outside the image");
            }
        }
    }
    RgbImage out = image;
    for (const auto& c : catalog.craters()) {
        const Rgb color = c.shape == ShapeClass::Circle ? kCircleColor : kEllipseColor;
        const int samples = std::max(64, static_cast<int>(std::ceil(4.0 * kPi * c.a)));
        const auto pts = sample_boundary(c, samples);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            const auto& q = pts[(i + 1) % pts.size()];
            draw_line(out, static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)),
                      static_cast<int>(std::lround(q.x)), static_cast<int>(std::lround(q.y)), color);
        }
    }
    return out;
}

void render_overlay(const RgbImage& image, const CraterCatalog& catalog, const std::filesystem::path& path) {
    write_png(path, draw_overlay(image, catalog));
}

}  // namespace crater
