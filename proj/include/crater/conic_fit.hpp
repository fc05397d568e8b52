#pragma once

#include <array>
#include <span>

#include "crater/geometry.hpp"

namespace crater {

/// Algebraic least-squares circle (Kasa form) on normalized coordinates.
/// Throws InsufficientSupport below 3 points, SingularFit for collinear input.
CraterEllipse fit_circle(std::span<const Point2> points);

/// Direct least-squares ellipse under the constraint 4AC - B^2 = 1, solved in
/// the numerically stable block form. Input is centered and scaled to RMS
/// radius sqrt(2) before solving. Throws InsufficientSupport below 5 points and
/// NotAnEllipse when no eigenvector yields a positive-definite quadratic part.
CraterEllipse fit_ellipse(std::span<const Point2> points);

/// Conic coefficients (A, B, C, D, E, F) of Ax^2 + Bxy + Cy^2 + Dx + Ey + F = 0
/// for the ellipse, scaled so that 4AC - B^2 = 1.
std::array<double, 6> conic_coefficients(const CraterEllipse& e) noexcept;

/// Sum of squared conic values over the points.
double algebraic_residual(const std::array<double, 6>& conic, std::span<const Point2> points) noexcept;

}  // namespace crater
