#pragma once

#include "samkit/inverse_kinematics.hpp"
#include "samkit/kinematics.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace samkit {

/// Labeled point cloud of one spherical marker (camera frame, mm).
struct MarkerCloud {
    std::string label;
    std::vector<Vector3> points;
};

struct FrameEstimate {
    RigidTransform transform = RigidTransform::Identity();  ///< camera -> frame
    double inlier_fraction = 1.0;
    int markers_used = 0;
};

struct SphereFit {
    Vector3 center = Vector3::Zero();
    double inlier_fraction = 0.0;
    int inliers = 0;
};

struct RansacOptions {
    double radius = 2.0;         ///< known marker radius (mm)
    int iterations = 200;
    double inlier_tol = 0.5;     ///< |distance - radius| bound for inliers (mm)
    double min_inlier_fraction = 0.6;
    std::uint64_t seed = 11;
};

/// Known-radius sphere fit: 4-point circumsphere hypotheses, best by inlier
/// count (ties keep the earliest), then Gauss-Newton refinement over inliers.
/// Throws DomainError for fewer than 4 points, all-coplanar data or an inlier
/// fraction below the minimum.
SphereFit fit_sphere_ransac(const MarkerCloud& cloud, const RansacOptions& opts = {});

/// Fits every cloud; result keyed by label.
std::map<std::string, SphereFit> fit_markers(const std::vector<MarkerCloud>& clouds, const RansacOptions& opts = {});

/// Frame from three marker centers: y along (a - b), z along (b - c) (or the
/// given pair for box frames), x = y cross z, re-orthonormalized with z kept.
/// The offset is expressed in the resulting frame.
///
/// base_frame: y = r0 - r1, z = r1 - b0, origin = (r0 + b0) / 2 + R p_offset.
FrameEstimate base_frame(const Vector3& p_r0, const Vector3& p_r1, const Vector3& p_b0, const Vector3& p_offset);

/// box_frame: y = r - g, z = r - b, origin = (g + b) / 2 + R x_offset.
FrameEstimate box_frame(const Vector3& p_r, const Vector3& p_g, const Vector3& p_b, const Vector3& x_offset);

/// Marker centers in the end-effector frame.
struct EeMarkerLayout {
    std::array<Vector3, 5> positions;
    /// Pentagon of radius 15 mm around the tip, staggered along z.
    static EeMarkerLayout standard();
};

/// Rigid least-squares registration of the detected markers (index 0..4, any
/// subset of at least 3) onto the layout. Throws DomainError with fewer than 3.
FrameEstimate ee_frame(const std::array<std::optional<Vector3>, 5>& centers, const EeMarkerLayout& layout);

/// base_T_ee = cam_T_base^-1 cam_T_ee, then IK seeded at q_guess.
IkResult physical_joints(const RigidTransform& cam_T_base, const RigidTransform& cam_T_ee,
                         const SegmentParams& geom, const JointConfig& q_guess, const IkOptions& opts = {});

/// Orthonormal rotation from two approximate axes, z kept and y projected.
/// Throws DomainError when the axes are (near) parallel.
Matrix3 frame_from_axes(const Vector3& y_axis, const Vector3& z_axis);

}  // namespace samkit
