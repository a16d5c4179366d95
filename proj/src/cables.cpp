#include "samkit/cables.hpp"

#include <cmath>
#include <fmt/format.h>

namespace samkit {

namespace {

// Converts a joint vector to the units the actuation matrix acts on.
Vector7 matrix_units(const JointConfig& q) {
    Vector7 x = q.values;
    for (int i = 2; i < kNumJoints; ++i) x[i] = deg2rad(x[i]);
    return x;
}

}  // namespace

void CableGeometry::validate() const {
    const double offsets[] = {d_e, d_w, d_we, d_jep, d_jey, d_jwp, d_j};
    for (double d : offsets)
        if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("cable geometry: offsets must be strictly positive");
}

CableMatrix cable_matrix(const CableGeometry& cg) {
    const double e = cg.d_e / 2, w = cg.d_w / 2, we = cg.d_we / 2;
    const double jep = cg.d_jep / 2, jey = cg.d_jey / 2, jwp = cg.d_jwp / 2, j = cg.d_j / 2;
    CableMatrix M;
    // clang-format off
    M << 1, 0,    0,    0,    0,  0,  0,
         0, 1,    0,    0,    0,  0,  0,
         0, 0,    e,   -e,    0,  0,  0,
         0, 0,   -e,    e,    0,  0,  0,
         0, 0,    e,    e,    0,  0,  0,
         0, 0,   -e,   -e,    0,  0,  0,
         0, 0,    w,    0,   we,  0,  0,
         0, 0,   -w,    0,  -we,  0,  0,
         0, 0,  jep,  jey,  jwp,  j, -j,
         0, 0, -jep, -jey, -jwp, -j,  j,
         0, 0, -jep, -jey, -jwp,  j,  j,
         0, 0,  jep,  jey,  jwp, -j, -j;
    // clang-format on
    return M;
}

CableDeltas joints_to_cables(const JointConfig& q, const CableGeometry& cg) {
    CableDeltas out;
    out.values = cable_matrix(cg) * matrix_units(q);
    return out;
}

JointConfig cables_to_joints(const CableDeltas& c, const CableGeometry& cg, double tol) {
    for (int k = 3; k <= 11; k += 2) {
        const double sum = c.dc(k) + c.dc(k + 1);
        if (std::abs(sum) > tol)
            throw DomainError(fmt::format("cables_to_joints: dc{} + dc{} = {} violates the antagonistic pairing",
                                          k, k + 1, sum));
    }
    const CableMatrix M = cable_matrix(cg);
    const Vector7 x = M.colPivHouseholderQr().solve(c.values);
    JointConfig q(x);
    for (int i = 2; i < kNumJoints; ++i) q[i] = rad2deg(q[i]);
    return q;
}

}  // namespace samkit
