#pragma once

#include <cstddef>
#include <optional>

#include "crater/edges.hpp"
#include "crater/geometry.hpp"
#include "crater/mask.hpp"

namespace crater {

/// Smallest area for which a contour is meaningful for fitting.
inline constexpr std::size_t kMinContourArea = 5;

struct ShapeThresholds {
    double t_circ = 0.25;        // tolerance on n and m
    double t_ell = 0.25;         // tolerance on q
    double max_axis_ratio = 3.0; // cap on a/b for the ellipse class
    std::size_t min_area_px = 25;

    void validate() const;
};

enum class ShapeLabel { Circle, Ellipse, Rejected };

std::string_view to_string(ShapeLabel label) noexcept;

struct ShapeReport {
    double area = 0.0;                 // A, foreground pixel count
    double perimeter = 0.0;            // P, weighted chain length
    double ideal_circumference = 0.0;  // d = 2 pi sqrt(A / pi)
    double n = 0.0;                    // d / P
    double m = 0.0;                    // a / b of the ellipse fit
    double q = 0.0;                    // pi a b / A
    /// Ellipse fit to the edge points; drives m and q.
    std::optional<CraterEllipse> ellipse_fit;
    /// Final geometry for the label: a circle fit for Circle, the ellipse fit otherwise.
    std::optional<CraterEllipse> fitted;
    std::size_t edge_points = 0;
    ShapeLabel label = ShapeLabel::Rejected;
};

/// Length of the Moore contour with unit axial and sqrt(2) diagonal steps.
/// Throws DegenerateMask below kMinContourArea pixels.
double perimeter(const Mask& mask);

/// n = 2 pi sqrt(A / pi) / P.
double circularity_n(const Mask& mask);

/// Circle iff |n-1| <= t_circ and |m-1| <= t_circ; otherwise Ellipse iff
/// |q-1| <= t_ell and m <= max_axis_ratio; otherwise Rejected. Masks below
/// min_area_px or whose ellipse fit fails are Rejected without a fit.
/// `mask` must already be normalized.
ShapeReport classify(const Mask& mask, const ShapeThresholds& thresholds,
                     const CannyParams& canny = {});

}  // namespace crater
