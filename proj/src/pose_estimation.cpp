#include "samkit/pose_estimation.hpp"

#include <fmt/format.h>

#include <Eigen/Geometry>
#include <algorithm>
#include <random>

namespace samkit {

namespace {

constexpr double kDegenerate = 1e-9;

// Center of the sphere through four points; nullopt when they are coplanar.
std::optional<Vector3> circumcenter(const Vector3& a, const Vector3& b, const Vector3& c, const Vector3& d) {
    Matrix3 A;
    A.row(0) = (b - a).transpose();
    A.row(1) = (c - a).transpose();
    A.row(2) = (d - a).transpose();
    const Vector3 rhs(0.5 * (b.squaredNorm() - a.squaredNorm()), 0.5 * (c.squaredNorm() - a.squaredNorm()),
                      0.5 * (d.squaredNorm() - a.squaredNorm()));
    const double scale = A.rowwise().norm().prod();
    if (scale == 0.0 || std::abs(A.determinant()) < 1e-9 * scale) return std::nullopt;
    return A.partialPivLu().solve(rhs);
}

int count_inliers(const std::vector<Vector3>& pts, const Vector3& c, double r, double tol) {
    int n = 0;
    for (const auto& p : pts)
        if (std::abs((p - c).norm() - r) <= tol) ++n;
    return n;
}

// Gauss-Newton on sum (|p - c| - r)^2 over the inliers of c.
Vector3 refine_center(const std::vector<Vector3>& pts, Vector3 c, double r, double tol) {
    for (int it = 0; it < 20; ++it) {
        Matrix3 JtJ = Matrix3::Zero();
        Vector3 Jtr = Vector3::Zero();
        for (const auto& p : pts) {
            const Vector3 d = c - p;
            const double dist = d.norm();
            if (dist < kDegenerate || std::abs(dist - r) > tol) continue;
            const Vector3 J = d / dist;
            JtJ += J * J.transpose();
            Jtr += J * (dist - r);
        }
        if (JtJ.determinant() < kDegenerate) break;
        const Vector3 step = JtJ.ldlt().solve(Jtr);
        c -= step;
        if (step.norm() < 1e-12) break;
    }
    return c;
}

}  // namespace

SphereFit fit_sphere_ransac(const MarkerCloud& cloud, const RansacOptions& opts) {
    const auto& pts = cloud.points;
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw DomainError(fmt::format("sphere fit '{}': need at least 4 points, got {}", cloud.label, n));
    if (!(opts.radius > 0.0) || !(opts.inlier_tol > 0.0) || opts.iterations < 1)
        throw DomainError("sphere fit: radius, inlier_tol and iterations must be positive");

    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    int best = -1;
    Vector3 best_center = Vector3::Zero();
    for (int it = 0; it < opts.iterations; ++it) {
        int idx[4];
        for (int k = 0; k < 4; ++k) {
            bool fresh;
            do {
                idx[k] = pick(rng);
                fresh = std::find(idx, idx + k, idx[k]) == idx + k;
            } while (!fresh);
        }
        const auto c = circumcenter(pts[idx[0]], pts[idx[1]], pts[idx[2]], pts[idx[3]]);
        if (!c) continue;
        // Hypotheses far from the known radius cannot be the marker.
        const double r = (pts[idx[0]] - *c).norm();
        if (std::abs(r - opts.radius) > 0.5 * opts.radius) continue;
        const int inl = count_inliers(pts, *c, opts.radius, opts.inlier_tol);
        if (inl > best) {
            best = inl;
            best_center = *c;
        }
    }
    if (best < 0) throw DomainError(fmt::format("sphere fit '{}': degenerate point set", cloud.label));

    SphereFit fit;
    fit.center = best_center;
    for (int round = 0; round < 3; ++round) fit.center = refine_center(pts, fit.center, opts.radius, opts.inlier_tol);
    fit.inliers = count_inliers(pts, fit.center, opts.radius, opts.inlier_tol);
    fit.inlier_fraction = static_cast<double>(fit.inliers) / n;
    if (fit.inlier_fraction < opts.min_inlier_fraction)
        throw DomainError(fmt::format("sphere fit '{}': inlier fraction {:.3f} below {:.3f}", cloud.label,
                                      fit.inlier_fraction, opts.min_inlier_fraction));
    return fit;
}

std::map<std::string, SphereFit> fit_markers(const std::vector<MarkerCloud>& clouds, const RansacOptions& opts) {
    std::map<std::string, SphereFit> out;
    for (const auto& c : clouds) out[c.label] = fit_sphere_ransac(c, opts);
    return out;
}

Matrix3 frame_from_axes(const Vector3& y_axis, const Vector3& z_axis) {
    const double ny = y_axis.norm(), nz = z_axis.norm();
    if (ny < kDegenerate || nz < kDegenerate) throw DomainError("frame: coincident marker centers");
    const Vector3 z = z_axis / nz;
    Vector3 y = y_axis / ny;
    if (y.cross(z).norm() < 1e-6) throw DomainError("frame: collinear marker centers");
    y = (y - y.dot(z) * z).normalized();
    Matrix3 R;
    R.col(0) = y.cross(z);
    R.col(1) = y;
    R.col(2) = z;
    return R;
}

FrameEstimate base_frame(const Vector3& p_r0, const Vector3& p_r1, const Vector3& p_b0, const Vector3& p_offset) {
    FrameEstimate f;
    const Matrix3 R = frame_from_axes(p_r0 - p_r1, p_r1 - p_b0);
    f.transform.linear() = R;
    f.transform.translation() = 0.5 * (p_r0 + p_b0) + R * p_offset;
    f.markers_used = 3;
    return f;
}

FrameEstimate box_frame(const Vector3& p_r, const Vector3& p_g, const Vector3& p_b, const Vector3& x_offset) {
    FrameEstimate f;
    const Matrix3 R = frame_from_axes(p_r - p_g, p_r - p_b);
    f.transform.linear() = R;
    f.transform.translation() = 0.5 * (p_g + p_b) + R * x_offset;
    f.markers_used = 3;
    return f;
}

EeMarkerLayout EeMarkerLayout::standard() {
    EeMarkerLayout l;
    const double z[5] = {-4.0, 2.0, -1.0, 3.0, -2.5};
    for (int i = 0; i < 5; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 5.0;
        l.positions[i] = Vector3(15.0 * std::cos(a), 15.0 * std::sin(a), z[i]);
    }
    return l;
}

FrameEstimate ee_frame(const std::array<std::optional<Vector3>, 5>& centers, const EeMarkerLayout& layout) {
    std::vector<int> present;
    for (int i = 0; i < 5; ++i)
        if (centers[i]) present.push_back(i);
    if (present.size() < 3)
        throw DomainError(fmt::format("ee_frame: need at least 3 markers, got {}", present.size()));
    Eigen::Matrix3Xd src(3, present.size()), dst(3, present.size());
    for (std::size_t k = 0; k < present.size(); ++k) {
        src.col(k) = layout.positions[present[k]];
        dst.col(k) = *centers[present[k]];
    }
    FrameEstimate f;
    f.transform.matrix() = Eigen::umeyama(src, dst, false);
    f.markers_used = static_cast<int>(present.size());
    return f;
}

IkResult physical_joints(const RigidTransform& cam_T_base, const RigidTransform& cam_T_ee,
                         const SegmentParams& geom, const JointConfig& q_guess, const IkOptions& opts) {
    const RigidTransform base_T_ee = cam_T_base.inverse() * cam_T_ee;
    return inverse_kinematics(base_T_ee, geom, q_guess, opts);
}

}  // namespace samkit
