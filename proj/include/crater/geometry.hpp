#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace crater {

inline constexpr double kPi = 3.14159265358979323846;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

enum class ShapeClass { Circle, Ellipse };

std::string_view to_string(ShapeClass c) noexcept;

/// A fitted crater rim. Semi-axes satisfy a >= b > 0; theta is the orientation
/// of the major axis in [0, pi), measured from +x towards +y (image rows grow down).
struct CraterEllipse {
    double cx = 0.0;
    double cy = 0.0;
    double a = 0.0;
    double b = 0.0;
    double theta = 0.0;
    ShapeClass shape = ShapeClass::Ellipse;
    double quality = 1.0;
    std::string source_id;
    /// RMS algebraic residual of the fit in normalized coordinates; 0 when not fitted.
    double residual = 0.0;
    /// Set for tiled detections whose segment touched a seam between tiles.
    bool clipped = false;

    friend bool operator==(const CraterEllipse&, const CraterEllipse&) = default;
};

double eccentricity(const CraterEllipse& e) noexcept;

inline double axis_ratio(const CraterEllipse& e) noexcept { return e.a / e.b; }

/// Wraps an angle into [0, pi).
double wrap_half_turn(double theta) noexcept;

/// `count` points on the ellipse boundary, evenly spaced in the parametric angle.
std::vector<Point2> sample_boundary(const CraterEllipse& e, int count);

/// True when the point lies inside or on the ellipse.
bool ellipse_contains(const CraterEllipse& e, double x, double y) noexcept;

/// Distance from a point to the ellipse boundary (numerical, accurate to ~1e-9 px).
double distance_to_boundary(const CraterEllipse& e, double x, double y);

}  // namespace crater
