#include "morphkit/ellipse.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace morphkit {

namespace {

Point2 to_local(const Ellipse& e, Point2 p) {
    const Point2 d = p - e.center;
    const double c = std::cos(e.angle);
    const double s = std::sin(e.angle);
    return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

// Root of the distance equation for a point in the open first quadrant
// (Eberly, "Distance from a point to an ellipse").
double distance_root(double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
    double s = 0.0;
    for (int it = 0; it < 160; ++it) {
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

double first_quadrant_distance(double e0, double e1, double y0, double y1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return 0.0;
            const double r0 = (e0 / e1) * (e0 / e1);
            const double sbar = distance_root(r0, z0, z1, g);
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
        const double x1 = e1 * std::sqrt(1.0 - xde0 * xde0);
        return std::hypot(x0 - y0, x1);
    }
    return std::abs(y0 - e0);
}

}  // namespace

bool Ellipse::contains(Point2 p) const {
    const Point2 l = to_local(*this, p);
    return (l.x / semi_major) * (l.x / semi_major) + (l.y / semi_minor) * (l.y / semi_minor) <= 1.0;
}

Point2 Ellipse::point_at(double t) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double u = semi_major * std::cos(t);
    const double v = semi_minor * std::sin(t);
    return {center.x + c * u - s * v, center.y + s * u + c * v};
}

double distance_to_ellipse(const Ellipse& e, Point2 p) {
    const Point2 l = to_local(e, p);
    return first_quadrant_distance(e.semi_major, e.semi_minor, std::abs(l.x), std::abs(l.y));
}

double signed_distance_to_ellipse(const Ellipse& e, Point2 p) {
    const double d = distance_to_ellipse(e, p);
    return e.contains(p) ? -d : d;
}

std::optional<Ellipse> fit_ellipse(std::span<const Point2> points) {
    const std::size_t n = points.size();
    if (n < 6) return std::nullopt;

    // normalize for conditioning
    Point2 mean{};
    for (const Point2& p : points) mean = mean + p;
    mean = (1.0 / static_cast<double>(n)) * mean;
    double spread = 0.0;
    for (const Point2& p : points) spread += dot(p - mean, p - mean);
    spread = std::sqrt(spread / static_cast<double>(n));
    if (spread <= 0.0) return std::nullopt;

    Eigen::MatrixXd d1(n, 3);
    Eigen::MatrixXd d2(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (points[i].x - mean.x) / spread;
        const double y = (points[i].y - mean.y) / spread;
        d1.row(static_cast<Eigen::Index>(i)) << x * x, x * y, y * y;
        d2.row(static_cast<Eigen::Index>(i)) << x, y, 1.0;
    }
    const Eigen::Matrix3d s1 = d1.transpose() * d1;
    const Eigen::Matrix3d s2 = d1.transpose() * d2;
    const Eigen::Matrix3d s3 = d2.transpose() * d2;
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::Matrix3d t = -lu.inverse() * s2.transpose();
    const Eigen::Matrix3d m = s1 + s2 * t;
    Eigen::Matrix3d reduced;
    reduced.row(0) = m.row(2) / 2.0;
    reduced.row(1) = -m.row(1);
    reduced.row(2) = m.row(0) / 2.0;

    const Eigen::EigenSolver<Eigen::Matrix3d> solver(reduced);
    const auto vecs = solver.eigenvectors();
    int pick = -1;
    double best = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d v = vecs.col(k).real();
        const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        if (cond > best) {
            best = cond;
            pick = k;
        }
    }
    if (pick < 0) return std::nullopt;
    const Eigen::Vector3d a1 = vecs.col(pick).real();
    const Eigen::Vector3d a2 = t * a1;
    const double A = a1(0), B = a1(1), C = a1(2), D = a2(0), E = a2(1), F = a2(2);

    const double det = 4.0 * A * C - B * B;
    if (det <= 0.0) return std::nullopt;
    const double x0 = (B * E - 2.0 * C * D) / det;
    const double y0 = (B * D - 2.0 * A * E) / det;
    const double f0 = A * x0 * x0 + B * x0 * y0 + C * y0 * y0 + D * x0 + E * y0 + F;

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> quad(
        (Eigen::Matrix2d() << A, B / 2.0, B / 2.0, C).finished());
    const Eigen::Vector2d lambdas = quad.eigenvalues();
    double r_major = -f0 / lambdas(0);
    double r_minor = -f0 / lambdas(1);
    if (!(r_major > 0.0 && r_minor > 0.0)) return std::nullopt;
    // the conic's overall sign is arbitrary, so either eigenvalue may be the major one
    int major_col = 0;
    if (r_minor > r_major) {
        std::swap(r_major, r_minor);
        major_col = 1;
    }

    const Eigen::Vector2d major_dir = quad.eigenvectors().col(major_col);
    Ellipse e;
    e.center = {mean.x + spread * x0, mean.y + spread * y0};
    e.semi_major = spread * std::sqrt(r_major);
    e.semi_minor = spread * std::sqrt(r_minor);
    e.angle = std::atan2(major_dir(1), major_dir(0));
    if (!std::isfinite(e.semi_major) || !std::isfinite(e.semi_minor)) return std::nullopt;
    return e;
}

}  // namespace morphkit
