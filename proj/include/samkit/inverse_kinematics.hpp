#pragma once

#include "samkit/kinematics.hpp"

#include <cstdint>

namespace samkit {

struct IkOptions {
    double lambda = 10.0;        ///< mm per rad weighting of the orientation error
    double tol = 1e-9;           ///< stop when the pose error falls below this
    double gtol = 1e-14;         ///< stop when the gradient norm falls below this
    double accept_tol = 1e-6;    ///< pose error at or below which a solve counts as converged
    int max_iterations = 500;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    int restarts = 8;            ///< extra attempts from pseudo-random seeds after a failure
    std::uint64_t seed = 0x5a3c;
    double fd_step = 1e-5;       ///< central-difference step (mm / rad)
    double max_step_angle = 0.5;        ///< cap on one step of q2..q6 (rad)
    double max_step_translation = 25.0; ///< cap on one step of q1 (mm)
};

struct IkResult {
    JointConfig q;
    double error = 0.0;   ///< pose_error at q
    int iterations = 0;   ///< BFGS iterations over all attempts
    int attempts = 0;
    bool converged = false;
};

/// BFGS minimisation of 0.5 * ||pose_residual||^2 over (q1..q6).
///
/// q1 is kept inside geom.limits by projection after every step, and each
/// step is capped at max_step_angle / max_step_translation. q7 is copied from q_init. A run that ends above accept_tol is reported with
/// converged = false and carries the best configuration found.
/// Throws NumericalError when the objective becomes non-finite.
IkResult inverse_kinematics(const RigidTransform& target, const SegmentParams& geom,
                            const JointConfig& q_init, const IkOptions& opts = {});

}  // namespace samkit
