#include "crater/edges.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace crater {

void CannyParams::validate() const {
    if (!(sigma > 0.0)) throw Error(ErrorCode::BadThresholds, "canny.sigma must be > 0");
    if (!(low > 0.0) || !(low < high) || !(high <= 1.0)) {
        throw Error(ErrorCode::BadThresholds, "canny thresholds must satisfy 0 < low < high <= 1");
    }
}

namespace {

// Clockwise with y pointing down, starting west.
constexpr std::array<PixelPoint, 8> kRing{{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

int ring_index(int dx, int dy) noexcept {
    for (int i = 0; i < 8; ++i) {
        if (kRing[i].x == dx && kRing[i].y == dy) return i;
    }
    return -1;
}

}  // namespace

std::vector<PixelPoint> moore_trace(const Mask& mask) {
    PixelPoint start{-1, -1};
    for (int y = 0; y < mask.height() && start.x < 0; ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                start = {x, y};
                break;
            }
        }
    }
    if (start.x < 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixels");

    std::vector<PixelPoint> chain{start};
    PixelPoint cur = start;
    int back = 0;  // west of the first raster pixel is always background
    bool have_first = false;
    PixelPoint first_step{};
    const std::size_t limit = 4 * mask.count() + 16;

    for (std::size_t iter = 0; iter < limit; ++iter) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int d = (back + k) % 8;
            if (mask.get(cur.x + kRing[d].x, cur.y + kRing[d].y)) {
                found = d;
                break;
            }
        }
        if (found < 0) break;  // isolated pixel
        const PixelPoint next{cur.x + kRing[found].x, cur.y + kRing[found].y};
        if (have_first && cur == start && next == first_step) break;
        if (!have_first) {
            have_first = true;
            first_step = next;
        }
        chain.push_back(next);
        const int prev = (found + 7) % 8;
        const PixelPoint bpos{cur.x + kRing[prev].x, cur.y + kRing[prev].y};
        back = ring_index(bpos.x - next.x, bpos.y - next.y);
        cur = next;
    }
    return chain;
}

EdgePointSet boundary_points(const Mask& mask) {
    const auto chain = moore_trace(mask);
    const Rect box = mask.bbox();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(box.w) * box.h, 0);
    EdgePointSet out;
    for (const auto& p : chain) {
        auto& s = seen[static_cast<std::size_t>(p.y - box.y) * box.w + (p.x - box.x)];
        if (s) continue;
        s = 1;
        out.points.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    }
    return out;
}

namespace {

class Grid {
public:
    Grid(int w, int h) : w_(w), h_(h), v_(static_cast<std::size_t>(w) * h, 0.0) {}
    int width() const noexcept { return w_; }
    int height() const noexcept { return h_; }
    double& operator()(int x, int y) noexcept { return v_[static_cast<std::size_t>(y) * w_ + x]; }
    double operator()(int x, int y) const noexcept {
        return v_[static_cast<std::size_t>(y) * w_ + x];
    }
    double get(int x, int y) const noexcept {
        return (x < 0 || y < 0 || x >= w_ || y >= h_) ? 0.0 : (*this)(x, y);
    }

private:
    int w_;
    int h_;
    std::vector<double> v_;
};

Grid gaussian_smooth(const Grid& in, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (auto& k : kernel) k /= sum;

    Grid tmp(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * in.get(x + i, y);
            tmp(x, y) = acc;
        }
    }
    Grid out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.get(x, y + i);
            out(x, y) = acc;
        }
    }
    return out;
}

}  // namespace

EdgePointSet canny_edges(const Mask& mask, const CannyParams& params) {
    params.validate();
    const Rect box = mask.bbox();
    if (box.empty()) throw Error(ErrorCode::EmptyEdges, "mask has no foreground pixels");

    const int pad = static_cast<int>(std::ceil(3.0 * params.sigma)) + 2;
    const int w = box.w + 2 * pad;
    const int h = box.h + 2 * pad;
    Grid image(w, h);
    for (int y = 0; y < box.h; ++y) {
        for (int x = 0; x < box.w; ++x) {
            if (mask.at(box.x + x, box.y + y)) image(x + pad, y + pad) = 1.0;
        }
    }
    const Grid smooth = gaussian_smooth(image, params.sigma);

    Grid gx(w, h), gy(w, h), mag(w, h);
    double max_mag = 0.0;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double dx = (smooth(x + 1, y - 1) + 2.0 * smooth(x + 1, y) + smooth(x + 1, y + 1)) -
                              (smooth(x - 1, y - 1) + 2.0 * smooth(x - 1, y) + smooth(x - 1, y + 1));
            const double dy = (smooth(x - 1, y + 1) + 2.0 * smooth(x, y + 1) + smooth(x + 1, y + 1)) -
                              (smooth(x - 1, y - 1) + 2.0 * smooth(x, y - 1) + smooth(x + 1, y - 1));
            gx(x, y) = dx;
            gy(x, y) = dy;
            mag(x, y) = std::hypot(dx, dy);
            max_mag = std::max(max_mag, mag(x, y));
        }
    }
    if (!(max_mag > 0.0)) throw Error(ErrorCode::EmptyEdges, "no gradient in mask");

    const double low = params.low * max_mag;
    const double high = params.high * max_mag;

    // 0 = suppressed, 1 = weak, 2 = strong
    std::vector<std::uint8_t> state(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> stack;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double m = mag(x, y);
            if (m < low) continue;
            double angle = std::atan2(gy(x, y), gx(x, y)) * 180.0 / kPi;
            if (angle < 0.0) angle += 180.0;
            int ox = 0, oy = 0;
            if (angle < 22.5 || angle >= 157.5) {
                ox = 1;
            } else if (angle < 67.5) {
                ox = 1;
                oy = 1;
            } else if (angle < 112.5) {
                oy = 1;
            } else {
                ox = -1;
                oy = 1;
            }
            // Plateaus across the edge keep the pixel on the -gradient side.
            if (m < mag(x + ox, y + oy) || m <= mag(x - ox, y - oy)) continue;
            const int idx = y * w + x;
            state[idx] = m >= high ? 2 : 1;
            if (state[idx] == 2) stack.push_back(idx);
        }
    }

    std::vector<std::uint8_t> keep(state.size(), 0);
    for (const int s : stack) keep[s] = 1;
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cx = cur % w;
        const int cy = cur / w;
        for (const auto& d : kRing) {
            const int nx = cx + d.x;
            const int ny = cy + d.y;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int ni = ny * w + nx;
            if (state[ni] == 0 || keep[ni]) continue;
            keep[ni] = 1;
            stack.push_back(ni);
        }
    }

    EdgePointSet out;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!keep[static_cast<std::size_t>(y) * w + x]) continue;
            out.points.push_back({static_cast<double>(x - pad + box.x),
                                  static_cast<double>(y - pad + box.y)});
        }
    }
    if (out.points.empty()) throw Error(ErrorCode::EmptyEdges, "no pixel survived hysteresis");
    return out;
}

}  // namespace crater
