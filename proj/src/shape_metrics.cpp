#include "crater/shape_metrics.hpp"

#include <cmath>

#include "crater/conic_fit.hpp"

namespace crater {

void ShapeThresholds::validate() const {
    if (!(t_circ > 0.0 && t_circ <= 1.0)) throw Error(ErrorCode::BadThresholds, "t_circ must be in (0, 1]");
    if (!(t_ell > 0.0 && t_ell <= 1.0)) throw Error(ErrorCode::BadThresholds, "t_ell must be in (0, 1]");
    if (!(max_axis_ratio >= 1.0)) throw Error(ErrorCode::BadThresholds, "max_axis_ratio must be >= 1");
    if (min_area_px < kMinContourArea) {
        throw Error(ErrorCode::BadThresholds,
                    "min_area_px must be >= " + std::to_string(kMinContourArea));
    }
}

std::string_view to_string(ShapeLabel label) noexcept {
    switch (label) {
        case ShapeLabel::Circle: return "Circle";
        case ShapeLabel::Ellipse: return "Ellipse";
        case ShapeLabel::Rejected: return "Rejected";
    }
    return "Rejected";
}

double perimeter(const Mask& mask) {
    const std::size_t area = mask.count();
    if (area < kMinContourArea) {
        throw Error(ErrorCode::DegenerateMask,
                    "contour undefined for area " + std::to_string(area) + " px");
    }
    const auto chain = moore_trace(mask);
    double length = 0.0;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const bool diagonal = chain[i].x != chain[i - 1].x && chain[i].y != chain[i - 1].y;
        length += diagonal ? std::sqrt(2.0) : 1.0;
    }
    return length;
}

double circularity_n(const Mask& mask) {
    const double p = perimeter(mask);
    const double area = static_cast<double>(mask.count());
    return 2.0 * kPi * std::sqrt(area / kPi) / p;
}

ShapeReport classify(const Mask& mask, const ShapeThresholds& thresholds, const CannyParams& canny) {
    ShapeReport report;
    report.area = static_cast<double>(mask.count());
    report.perimeter = perimeter(mask);
    report.ideal_circumference = 2.0 * kPi * std::sqrt(report.area / kPi);
    report.n = report.ideal_circumference / report.perimeter;
    if (report.area < static_cast<double>(thresholds.min_area_px)) return report;

    EdgePointSet edges;
    try {
        edges = canny_edges(mask, canny);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyEdges) throw;
        edges = boundary_points(mask);
    }
    report.edge_points = edges.points.size();

    try {
        report.ellipse_fit = fit_ellipse(edges.points);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InsufficientSupport || e.code() == ErrorCode::NotAnEllipse ||
            e.code() == ErrorCode::SingularFit) {
            return report;
        }
        throw;
    }
    const CraterEllipse& fit = *report.ellipse_fit;
    report.m = fit.a / fit.b;
    report.q = kPi * fit.a * fit.b / report.area;

    if (std::abs(report.n - 1.0) <= thresholds.t_circ && std::abs(report.m - 1.0) <= thresholds.t_circ) {
        report.label = ShapeLabel::Circle;
        try {
            report.fitted = fit_circle(edges.points);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularFit) throw;
            report.label = ShapeLabel::Rejected;
        }
        return report;
    }
    if (std::abs(report.q - 1.0) <= thresholds.t_ell && report.m <= thresholds.max_axis_ratio) {
        report.label = ShapeLabel::Ellipse;
        report.fitted = fit;
    }
    return report;
}

}  // namespace crater
