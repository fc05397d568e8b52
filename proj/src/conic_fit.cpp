#include "crater/conic_fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "crater/error.hpp"

namespace crater {

namespace {

struct Normalization {
    double mx = 0.0;
    double my = 0.0;
    double scale = 1.0;
};

Normalization normalization_for(std::span<const Point2> pts) {
    Normalization n;
    for (const auto& p : pts) {
        n.mx += p.x;
        n.my += p.y;
    }
    n.mx /= static_cast<double>(pts.size());
    n.my /= static_cast<double>(pts.size());
    double sq = 0.0;
    for (const auto& p : pts) {
        const double dx = p.x - n.mx;
        const double dy = p.y - n.my;
        sq += dx * dx + dy * dy;
    }
    const double rms = std::sqrt(sq / static_cast<double>(pts.size()));
    n.scale = rms > 0.0 ? rms / std::sqrt(2.0) : 1.0;
    return n;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> normalized(std::span<const Point2> pts,
                                                    const Normalization& n) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> out(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out(static_cast<Eigen::Index>(i), 0) = (pts[i].x - n.mx) / n.scale;
        out(static_cast<Eigen::Index>(i), 1) = (pts[i].y - n.my) / n.scale;
    }
    return out;
}

double conic_value(const std::array<double, 6>& c, double x, double y) noexcept {
    return c[0] * x * x + c[1] * x * y + c[2] * y * y + c[3] * x + c[4] * y + c[5];
}

constexpr double kSingularRcond = 1e-12;

}  // namespace

CraterEllipse fit_circle(std::span<const Point2> points) {
    if (points.size() < 3) {
        throw Error(ErrorCode::InsufficientSupport,
                    "circle fit needs >= 3 points, got " + std::to_string(points.size()));
    }
    const Normalization norm = normalization_for(points);
    if (norm.scale <= 0.0) throw Error(ErrorCode::SingularFit, "all points coincide");
    const auto p = normalized(points, norm);
    const Eigen::Index n = p.rows();

    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = p(i, 0);
        design(i, 1) = p(i, 1);
        design(i, 2) = 1.0;
        rhs(i) = -(p(i, 0) * p(i, 0) + p(i, 1) * p(i, 1));
    }
    const Eigen::Matrix3d normal = design.transpose() * design;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> spectrum(normal);
    const auto ev = spectrum.eigenvalues();
    if (ev(0) <= kSingularRcond * ev(2)) {
        throw Error(ErrorCode::SingularFit, "points are collinear");
    }
    const Eigen::Vector3d sol = normal.ldlt().solve(design.transpose() * rhs);

    const double ux = -0.5 * sol(0);
    const double uy = -0.5 * sol(1);
    const double r2 = ux * ux + uy * uy - sol(2);
    if (!(r2 > 0.0)) throw Error(ErrorCode::SingularFit, "degenerate circle");

    CraterEllipse e;
    e.cx = ux * norm.scale + norm.mx;
    e.cy = uy * norm.scale + norm.my;
    e.a = e.b = std::sqrt(r2) * norm.scale;
    e.theta = 0.0;
    e.shape = ShapeClass::Circle;
    e.residual = std::sqrt((design * sol - rhs).squaredNorm() / static_cast<double>(n));
    return e;
}

CraterEllipse fit_ellipse(std::span<const Point2> points) {
    if (points.size() < 5) {
        throw Error(ErrorCode::InsufficientSupport,
                    "ellipse fit needs >= 5 points, got " + std::to_string(points.size()));
    }
    const Normalization norm = normalization_for(points);
    const auto p = normalized(points, norm);
    const Eigen::Index n = p.rows();

    Eigen::MatrixXd quad(n, 3);
    Eigen::MatrixXd lin(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = p(i, 0);
        const double y = p(i, 1);
        quad.row(i) << x * x, x * y, y * y;
        lin.row(i) << x, y, 1.0;
    }
    const Eigen::Matrix3d s1 = quad.transpose() * quad;
    const Eigen::Matrix3d s2 = quad.transpose() * lin;
    const Eigen::Matrix3d s3 = lin.transpose() * lin;

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> s3_spectrum(s3);
    if (s3_spectrum.eigenvalues()(0) <= kSingularRcond * s3_spectrum.eigenvalues()(2)) {
        throw Error(ErrorCode::NotAnEllipse, "points are collinear");
    }
    // Linear part as a function of the quadratic part: lin_coeffs = t * quad_coeffs.
    const Eigen::Matrix3d t = -s3.ldlt().solve(s2.transpose());
    const Eigen::Matrix3d reduced = s1 + s2 * t;
    // Premultiply by the inverse of the constraint matrix [[0,0,2],[0,-1,0],[2,0,0]].
    Eigen::Matrix3d system;
    system.row(0) = reduced.row(2) / 2.0;
    system.row(1) = -reduced.row(1);
    system.row(2) = reduced.row(0) / 2.0;

    const Eigen::EigenSolver<Eigen::Matrix3d> solver(system);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NotAnEllipse, "eigen decomposition failed");
    }

    std::array<double, 6> best{};
    double best_residual = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3cd vc = solver.eigenvectors().col(k);
        if (vc.imag().norm() > 1e-9 * std::max(1.0, vc.real().norm())) continue;
        Eigen::Vector3d v = vc.real();
        const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        if (!(cond > 0.0)) continue;
        v /= std::sqrt(cond);
        const Eigen::Vector3d w = t * v;
        const std::array<double, 6> conic{v(0), v(1), v(2), w(0), w(1), w(2)};
        double res = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double c = conic_value(conic, p(i, 0), p(i, 1));
            res += c * c;
        }
        if (res < best_residual) {
            best_residual = res;
            best = conic;
            found = true;
        }
    }
    if (!found) throw Error(ErrorCode::NotAnEllipse, "no eigenvector satisfies 4AC - B^2 > 0");

    auto [ca, cb, cc, cd, ce, cf] = best;
    if (ca < 0.0) {
        ca = -ca;
        cb = -cb;
        cc = -cc;
        cd = -cd;
        ce = -ce;
        cf = -cf;
    }
    Eigen::Matrix2d q;
    q << ca, cb / 2.0, cb / 2.0, cc;
    const Eigen::Vector2d center = -0.5 * q.inverse() * Eigen::Vector2d(cd, ce);
    const double f_center = cf + 0.5 * (cd * center(0) + ce * center(1));
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qs(q);
    const double l_min = qs.eigenvalues()(0);
    const double l_max = qs.eigenvalues()(1);
    if (!(l_min > 0.0) || !(f_center < 0.0)) {
        throw Error(ErrorCode::NotAnEllipse, "conic is not a real ellipse");
    }
    const Eigen::Vector2d major = qs.eigenvectors().col(0);

    CraterEllipse e;
    e.cx = center(0) * norm.scale + norm.mx;
    e.cy = center(1) * norm.scale + norm.my;
    e.a = std::sqrt(-f_center / l_min) * norm.scale;
    e.b = std::sqrt(-f_center / l_max) * norm.scale;
    e.theta = wrap_half_turn(std::atan2(major(1), major(0)));
    e.shape = ShapeClass::Ellipse;
    e.residual = std::sqrt(best_residual / static_cast<double>(n));
    return e;
}

std::array<double, 6> conic_coefficients(const CraterEllipse& e) noexcept {
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);
    const double ia2 = 1.0 / (e.a * e.a);
    const double ib2 = 1.0 / (e.b * e.b);
    double qa = c * c * ia2 + s * s * ib2;
    double qb = 2.0 * c * s * (ia2 - ib2);
    double qc = s * s * ia2 + c * c * ib2;
    double qd = -2.0 * qa * e.cx - qb * e.cy;
    double qe = -qb * e.cx - 2.0 * qc * e.cy;
    double qf = qa * e.cx * e.cx + qb * e.cx * e.cy + qc * e.cy * e.cy - 1.0;
    const double k = 1.0 / std::sqrt(4.0 * qa * qc - qb * qb);
    return {qa * k, qb * k, qc * k, qd * k, qe * k, qf * k};
}

double algebraic_residual(const std::array<double, 6>& conic,
                          std::span<const Point2> points) noexcept {
    double sum = 0.0;
    for (const auto& p : points) {
        const double v = conic_value(conic, p.x, p.y);
        sum += v * v;
    }
    return sum;
}

}  // namespace crater
