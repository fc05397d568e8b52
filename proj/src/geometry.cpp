#include "crater/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace crater {

std::string_view to_string(ShapeClass c) noexcept {
    return c == ShapeClass::Circle ? "Circle" : "Ellipse";
}

double eccentricity(const CraterEllipse& e) noexcept {
    const double r = e.b / e.a;
    return std::sqrt(std::max(0.0, 1.0 - r * r));
}

double wrap_half_turn(double theta) noexcept {
    double t = std::fmod(theta, kPi);
    if (t < 0.0) t += kPi;
    if (t >= kPi) t -= kPi;
    return t == 0.0 ? 0.0 : t;  // folds -0.0
}

std::vector<Point2> sample_boundary(const CraterEllipse& e, int count) {
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);
    for (int i = 0; i < count; ++i) {
        const double t = 2.0 * kPi * i / count;
        const double u = e.a * std::cos(t);
        const double v = e.b * std::sin(t);
        out.push_back({e.cx + u * c - v * s, e.cy + u * s + v * c});
    }
    return out;
}

namespace {

Point2 to_frame(const CraterEllipse& e, double x, double y) noexcept {
    const double dx = x - e.cx;
    const double dy = y - e.cy;
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);
    return {dx * c + dy * s, -dx * s + dy * c};
}

// Root of the bisection function for the closest-point problem on an ellipse
// with axes e0 >= e1, point in the first quadrant (z = y / e).
double closest_point_root(double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
    double s = 0.0;
    for (int i = 0; i < 256; ++i) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        const double ratio0 = n0 / (s + r0);
        const double ratio1 = z1 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (g > 0.0) {
            s0 = s;
        } else if (g < 0.0) {
            s1 = s;
        } else {
            break;
        }
    }
    return s;
}

}  // namespace

bool ellipse_contains(const CraterEllipse& e, double x, double y) noexcept {
    const Point2 p = to_frame(e, x, y);
    const double u = p.x / e.a;
    const double v = p.y / e.b;
    return u * u + v * v <= 1.0;
}

double distance_to_boundary(const CraterEllipse& e, double x, double y) {
    const Point2 p = to_frame(e, x, y);
    const double e0 = e.a;
    const double e1 = e.b;
    const double y0 = std::abs(p.x);
    const double y1 = std::abs(p.y);
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return 0.0;
            const double r0 = (e0 / e1) * (e0 / e1);
            const double sbar = closest_point_root(r0, z0, z1, g);
            const double x0 = r0 * y0 / (sbar + r0);
            const double x1 = y1 / (sbar + 1.0);
            return std::hypot(x0 - y0, x1 - y1);
        }
        return std::abs(y1 - e1);
    }
    const double numer0 = e0 * y0;
    const double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        const double xde0 = numer0 / denom0;
        const double x0 = e0 * xde0;
        const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
        return std::hypot(x0 - y0, x1);
    }
    return std::abs(y0 - e0);
}

}  // namespace crater
