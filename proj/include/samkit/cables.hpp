#pragma once

#include "samkit/types.hpp"

namespace samkit {

/// Cable offsets (diameters, mm) used by the joint-to-cable map.
struct CableGeometry {
    double d_e = 4.8;    ///< extensible segment
    double d_w = 3.6;    ///< segment-2 cables inside segment 2
    double d_we = 3.6;   ///< segment-2 cables through the extensible segment
    double d_jep = 2.4;  ///< forceps cables through extensible pitch
    double d_jey = 2.4;  ///< forceps cables through extensible yaw
    double d_jwp = 2.4;  ///< forceps cables through segment-2 pitch
    double d_j = 2.0;    ///< forceps pulley

    void validate() const;
};

using CableMatrix = Eigen::Matrix<double, 12, 7>;
using Vector12 = Eigen::Matrix<double, 12, 1>;

/// Motor and cable displacement changes.
///
/// values[0] = dm1 (q1 gear, mm), values[1] = dm2 (q2 gear, deg),
/// values[2..11] = dc3..dc12 (mm). Pairs (dc3,dc4), (dc5,dc6), ... are antagonistic.
struct CableDeltas {
    Vector12 values = Vector12::Zero();

    double dm1() const { return values[0]; }
    double dm2() const { return values[1]; }
    /// Cable k in 3..12.
    double dc(int k) const { return values[k - 1]; }
};

/// Cable length change of one bent section: (d/2) * theta.
inline double cable_delta_single(double theta_rad, double d) { return 0.5 * d * theta_rad; }

/// The 12x7 decoupled actuation matrix acting on (q1 mm, q2 deg, q3..q7 rad).
CableMatrix cable_matrix(const CableGeometry& cg);

/// Bending joints are converted to radians before the product; dm2 stays in degrees.
CableDeltas joints_to_cables(const JointConfig& q, const CableGeometry& cg);

/// Least-squares left inverse of joints_to_cables.
///
/// Throws DomainError if an antagonistic pair does not sum to zero within tol.
JointConfig cables_to_joints(const CableDeltas& c, const CableGeometry& cg, double tol = 1e-9);

}  // namespace samkit
