#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "crater/geometry.hpp"
#include "crater/raster.hpp"

namespace crater {

/// Craters of one image in global pixel coordinates, ordered by descending a
/// then (cy, cx). Image dimensions of 0 mean "unknown" (e.g. a catalog read
/// back from CSV, which does not carry them); bounds are only enforced when
/// the dimensions are known.
class CraterCatalog {
public:
    CraterCatalog() = default;
    /// Throws OutOfBounds if a centre lies outside [0, w) x [0, h).
    CraterCatalog(std::string image_ref, int image_w, int image_h, std::vector<CraterEllipse> craters,
                  std::string pipeline_config_hash = {}, std::string created_at = {});

    const std::string& image_ref() const noexcept { return image_ref_; }
    int image_w() const noexcept { return image_w_; }
    int image_h() const noexcept { return image_h_; }
    bool has_dims() const noexcept { return image_w_ > 0 && image_h_ > 0; }
    const std::vector<CraterEllipse>& craters() const noexcept { return craters_; }
    std::size_t size() const noexcept { return craters_.size(); }
    bool empty() const noexcept { return craters_.empty(); }
    const std::string& pipeline_config_hash() const noexcept { return config_hash_; }
    const std::string& created_at() const noexcept { return created_at_; }

private:
    std::string image_ref_;
    int image_w_ = 0;
    int image_h_ = 0;
    std::vector<CraterEllipse> craters_;
    std::string config_hash_;
    std::string created_at_;
};

inline constexpr const char* kCatalogHeader = "id,cx,cy,a,b,theta,class,quality,source_id";

/// Serializes to CSV text: header line, then one row per crater with six
/// decimals, LF line endings.
std::string to_csv(const CraterCatalog& catalog);
void write_csv(const CraterCatalog& catalog, const std::filesystem::path& path);

/// Parses CSV text produced by to_csv. Extra trailing columns are ignored.
/// Throws ParseError naming the offending line.
CraterCatalog parse_csv(std::string_view text, std::string image_ref = {});
CraterCatalog read_csv(const std::filesystem::path& path);

struct SizeFrequency {
    std::vector<double> edges;        // diameter bin edges in pixels
    std::vector<std::size_t> counts;  // counts[i] for [edges[i], edges[i+1])
    std::size_t out_of_range = 0;
};

/// Histogram of diameters D = 2a over half-open bins. Throws BadBins unless
/// there are >= 2 strictly increasing edges.
SizeFrequency size_frequency(const CraterCatalog& catalog, std::span<const double> edges);

/// Geometric edges lo, lo*factor, ... up to the first edge >= hi.
std::vector<double> geometric_edges(double lo, double hi, double factor = 1.4142135623730951);

inline constexpr Rgb kCircleColor{0, 255, 0};
inline constexpr Rgb kEllipseColor{255, 0, 255};

/// Copy of `image` with every crater outline drawn as a 1-px polyline.
/// Throws DimMismatch when the catalog dims differ from the image or, for
/// catalogs without dims, when a centre falls outside the image.
RgbImage draw_overlay(const RgbImage& image, const CraterCatalog& catalog);

void render_overlay(const RgbImage& image, const CraterCatalog& catalog,
                    const std::filesystem::path& path);

}  // namespace crater
