#pragma once

#include <string>
#include <vector>

#include "crater/geometry.hpp"
#include "crater/mask.hpp"

namespace crater {

struct EdgePointSet {
    std::vector<Point2> points;
    std::string source_id;
};

struct CannyParams {
    double sigma = 1.0;
    double low = 0.1;   // fraction of the per-image maximum gradient magnitude
    double high = 0.3;

    /// Throws BadThresholds unless sigma > 0 and 0 < low < high <= 1.
    void validate() const;
};

/// Closed outer contour of the first foreground component (raster order),
/// traced with the Moore neighbourhood and Jacob's stopping criterion. The
/// start pixel appears at both ends, so a chain of k moves has k + 1 entries.
/// A single isolated pixel yields a one-element chain.
std::vector<PixelPoint> moore_trace(const Mask& mask);

/// Distinct pixels of the Moore contour, in trace order.
EdgePointSet boundary_points(const Mask& mask);

/// Canny on the mask treated as a 0/1 intensity image: Gaussian smoothing,
/// Sobel gradients, non-maximum suppression, hysteresis relative to the
/// maximum magnitude. Returns pixel-centre coordinates in the mask frame.
/// Throws EmptyEdges when nothing survives.
EdgePointSet canny_edges(const Mask& mask, const CannyParams& params = {});

}  // namespace crater
