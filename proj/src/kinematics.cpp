#include "samkit/kinematics.hpp"

#include <cmath>
#include <fmt/format.h>

namespace samkit {

namespace {

RigidTransform translation_z(double dz) {
    RigidTransform T = RigidTransform::Identity();
    T.translation().z() = dz;
    return T;
}

// Solver variables: q1 in mm, q2..q6 in radians.
JointConfig perturbed(const JointConfig& q, int j, double delta) {
    JointConfig out = q;
    out[j] += (j == 0) ? delta : rad2deg(delta);
    return out;
}

}  // namespace

void SegmentParams::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(fmt::format("geometry: {} must be strictly positive (got {})", name, v));
    };
    check(l1, "l1");
    check(s2, "s2");
    check(connector, "connector");
    check(a3, "a3");
    check(d4, "d4");
}

ArcParams segment_arc(double pitch_deg, double yaw_deg, double s) {
    if (!(s > 0.0)) throw DomainError(fmt::format("segment_arc: arc length must be positive (got {})", s));
    ArcParams arc;
    const double pitch = deg2rad(pitch_deg);
    const double yaw = deg2rad(yaw_deg);
    arc.s = s;
    arc.kappa_x = pitch / s;
    arc.kappa_y = yaw / s;
    arc.kappa = std::hypot(arc.kappa_x, arc.kappa_y);
    arc.phi = std::atan2(arc.kappa_x, arc.kappa_y);
    arc.theta = std::hypot(pitch, yaw);
    return arc;
}

// The end position is the printed constant-curvature vector
//   P = [cos(phi)(1-cos t)/k, sin(phi)(1-cos t)/k, sin(t)/k].
// The end rotation is the one that keeps the arc tangent continuous with P:
// a rotation by theta about (-sin phi, cos phi, 0), i.e. Rz(phi) Ry(theta) Rz(-phi).
RigidTransform segment_fk(const ArcParams& arc) {
    RigidTransform T = RigidTransform::Identity();
    const double t = arc.theta;
    if (std::abs(t) < kStraightThreshold) {
        T.translation() = Vector3(0.0, 0.0, arc.s);
        return T;
    }
    // 1/kappa = s/theta; avoids dividing by a tiny curvature.
    const double radius = arc.s / t;
    const double c = std::cos(arc.phi), s = std::sin(arc.phi);
    T.translation() = Vector3(c * radius * (1.0 - std::cos(t)), s * radius * (1.0 - std::cos(t)),
                              radius * std::sin(t));
    T.linear() = Eigen::AngleAxisd(t, Vector3(-s, c, 0.0)).toRotationMatrix();
    return T;
}

RigidTransform planar_arc_fk(double angle, double s) {
    RigidTransform T = RigidTransform::Identity();
    if (std::abs(angle) < kStraightThreshold) {
        T.translation() = Vector3(0.0, 0.0, s);
        return T;
    }
    T.translation() = Vector3(s / angle * (1.0 - std::cos(angle)), 0.0, s / angle * std::sin(angle));
    T.linear() = Eigen::AngleAxisd(angle, Vector3::UnitY()).toRotationMatrix();
    return T;
}

RigidTransform chain_fk(const JointConfig& q, const SegmentParams& geom) {
    RigidTransform base_roll = RigidTransform::Identity();
    base_roll.linear() = Eigen::AngleAxisd(deg2rad(q[1]), Vector3::UnitZ()).toRotationMatrix();

    const RigidTransform seg1 = segment_fk(segment_arc(q[2], q[3], q[0] + geom.l1));
    const RigidTransform seg2 = planar_arc_fk(deg2rad(q[4]), geom.s2);

    const double yaw = deg2rad(q[5]);
    RigidTransform forceps = RigidTransform::Identity();
    forceps.linear() = Eigen::AngleAxisd(yaw, Vector3::UnitX()).toRotationMatrix();
    forceps.translation() = Vector3(0.0, -std::sin(yaw) * geom.d4, std::cos(yaw) * geom.d4);

    return base_roll * seg1 * translation_z(geom.connector) * seg2 * translation_z(geom.a3) * forceps;
}

RigidTransform manipulator_fk(const JointConfig& q, const SegmentParams& geom) {
    for (int i = 0; i < kNumJoints; ++i) {
        if (!std::isfinite(q[i]) || q[i] < geom.limits.lower[i] || q[i] > geom.limits.upper[i])
            throw DomainError(fmt::format("manipulator_fk: joint {} = {} outside [{}, {}]", kJointNames[i],
                                          q[i], geom.limits.lower[i], geom.limits.upper[i]));
    }
    return chain_fk(q, geom);
}

Vector6 pose_residual(const RigidTransform& T, const RigidTransform& target, double lambda) {
    Vector6 r;
    r.head<3>() = T.translation() - target.translation();
    const Eigen::AngleAxisd aa(target.linear().transpose() * T.linear());
    r.tail<3>() = lambda * aa.angle() * aa.axis();
    return r;
}

double pose_error(const RigidTransform& T, const RigidTransform& target, double lambda) {
    const Vector6 r = pose_residual(T, target, lambda);
    return r.head<3>().norm() + r.tail<3>().norm();
}

Matrix6 numeric_jacobian(const JointConfig& q, const SegmentParams& geom, const RigidTransform& target,
                         double lambda, double h) {
    Matrix6 J;
    for (int j = 0; j < 6; ++j) {
        const Vector6 fp = pose_residual(chain_fk(perturbed(q, j, h), geom), target, lambda);
        const Vector6 fm = pose_residual(chain_fk(perturbed(q, j, -h), geom), target, lambda);
        J.col(j) = (fp - fm) / (2.0 * h);
    }
    return J;
}

bool is_rotation(const Matrix3& R, double tol) {
    return (R.transpose() * R - Matrix3::Identity()).cwiseAbs().maxCoeff() < tol &&
           std::abs(R.determinant() - 1.0) < tol;
}

}  // namespace samkit
