#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "crater/geometry.hpp"
#include "crater/mask.hpp"

namespace crater::testing {

// Pixel centres with (x-c)^2 + (y-c)^2 <= r^2, centre at an integer pixel.
inline Mask disk(int r, int pad = 4) {
    const int c = r + pad;
    Mask m(2 * c + 1, 2 * c + 1);
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if ((x - c) * (x - c) + (y - c) * (y - c) <= r * r) m.set(x, y);
        }
    }
    return m;
}

// Axis-aligned ellipse centred in the mask.
inline Mask ellipse_mask(double a, double b, int pad = 4) {
    const int cx = static_cast<int>(std::ceil(a)) + pad;
    const int cy = static_cast<int>(std::ceil(b)) + pad;
    Mask m(2 * cx + 1, 2 * cy + 1);
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            const double u = (x - cx) / a;
            const double v = (y - cy) / b;
            if (u * u + v * v <= 1.0) m.set(x, y);
        }
    }
    return m;
}

inline Mask rect_mask(int w, int h, int pad = 4) {
    Mask m(w + 2 * pad, h + 2 * pad);
    for (int y = pad; y < pad + h; ++y) {
        for (int x = pad; x < pad + w; ++x) m.set(x, y);
    }
    return m;
}

inline Mask random_mask(int w, int h, std::mt19937_64& rng, double density = 0.5) {
    std::bernoulli_distribution bit(density);
    Mask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) m.set(x, y, bit(rng));
    }
    return m;
}

inline Mask rotate90(const Mask& m) {
    Mask out(m.height(), m.width());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.at(x, y)) out.set(m.height() - 1 - y, x);
        }
    }
    return out;
}

inline std::vector<Point2> ellipse_points(double cx, double cy, double a, double b, double theta, int count) {
    std::vector<Point2> pts;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int i = 0; i < count; ++i) {
        const double t = 2.0 * kPi * i / count;
        const double u = a * std::cos(t);
        const double v = b * std::sin(t);
        pts.push_back({cx + u * c - v * s, cy + u * s + v * c});
    }
    return pts;
}

inline double angle_diff(double t1, double t2) {
    double d = std::fmod(std::abs(t1 - t2), kPi);
    return std::min(d, kPi - d);
}

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "crater-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace crater::testing
