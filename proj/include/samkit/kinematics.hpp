#pragma once

#include "samkit/types.hpp"

namespace samkit {

/// Chain geometry of the manipulator. Lengths in mm.
struct SegmentParams {
    double l1 = 40.0;         ///< central length of the semi-active segment at q1 = 0
    double s2 = 15.0;         ///< arc length of segment 2
    double connector = 5.0;   ///< segment-1 end to segment-2 base, along z
    double a3 = 8.0;          ///< segment-2 end to forceps base, along z
    double d4 = 15.0;         ///< forceps length
    Vector3 p_offset = Vector3::Zero();  ///< base-marker frame to manipulator base
    JointLimits limits;

    /// Throws DomainError if any length is not strictly positive.
    void validate() const;
};

/// Constant-curvature arc parameters of one segment.
struct ArcParams {
    double kappa = 0.0;    ///< curvature (1/mm)
    double kappa_x = 0.0;  ///< curvature component (1/mm)
    double kappa_y = 0.0;  ///< curvature component (1/mm)
    double phi = 0.0;      ///< bending-plane angle (rad)
    double theta = 0.0;    ///< total bending angle (rad)
    double s = 0.0;        ///< arc length (mm)
};

/// Below this bending angle a segment is treated as straight.
inline constexpr double kStraightThreshold = 1e-7;

ArcParams segment_arc(double pitch_deg, double yaw_deg, double s);

RigidTransform segment_fk(const ArcParams& arc);

/// Planar arc of length s bent by angle (rad) about the local y axis.
RigidTransform planar_arc_fk(double angle, double s);

/// Base to end-effector transform. Throws DomainError naming the first joint
/// outside geom.limits.
RigidTransform manipulator_fk(const JointConfig& q, const SegmentParams& geom);

/// Same chain without the limit check. Used inside solvers and for physical
/// joint values that may leave the commanded range.
RigidTransform chain_fk(const JointConfig& q, const SegmentParams& geom);

/// 6-vector pose residual [p - p_d; lambda * log(R_d^T R)].
Vector6 pose_residual(const RigidTransform& T, const RigidTransform& target, double lambda);

/// Scalar pose error ||p - p_d|| + lambda * ||log(R_d^T R)||.
double pose_error(const RigidTransform& T, const RigidTransform& target, double lambda);

/// Central-difference Jacobian of pose_residual with respect to (q1..q6).
///
/// Columns are per unit of the solver variables: mm for q1, radians for q2..q6.
Matrix6 numeric_jacobian(const JointConfig& q, const SegmentParams& geom,
                         const RigidTransform& target, double lambda = 10.0,
                         double h = 1e-5);

/// Rotation-validity check used in tests and assertions.
bool is_rotation(const Matrix3& R, double tol = 1e-9);

}  // namespace samkit
