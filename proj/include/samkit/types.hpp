#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <numbers>
#include <stdexcept>
#include <string>

namespace samkit {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector7 = Eigen::Matrix<double, 7, 1>;

// Homogeneous rigid transform (rotation + translation in mm).
using RigidTransform = Eigen::Isometry3d;

constexpr int kNumJoints = 7;

/// Input outside an operation's domain (limits, degenerate geometry, bad shapes).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-finite values encountered during a numerical routine.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (config files, model sets).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Joint-space coordinate of the manipulator.
///
/// Index 0 is the translation q1 in mm; indices 1..6 are q2..q7 in degrees.
/// Degrees are used at every module boundary; kinematics converts internally.
struct JointConfig {
    Vector7 values = Vector7::Zero();

    JointConfig() = default;
    explicit JointConfig(const Vector7& v) : values(v) {}
    JointConfig(double q1, double q2, double q3, double q4, double q5, double q6, double q7) {
        values << q1, q2, q3, q4, q5, q6, q7;
    }

    static JointConfig zero() { return {}; }

    /// Build from the individual forceps jaw angles: q6 = (qf1+qf2)/2, q7 = (qf1-qf2)/2.
    static JointConfig with_forceps(JointConfig q, double qf1, double qf2) {
        q.values[5] = 0.5 * (qf1 + qf2);
        q.values[6] = 0.5 * (qf1 - qf2);
        return q;
    }

    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }

    double translation() const { return values[0]; }
    double roll() const { return values[1]; }
    double pitch1() const { return values[2]; }
    double yaw1() const { return values[3]; }
    double pitch2() const { return values[4]; }
    double forceps_yaw() const { return values[5]; }
    double grasp() const { return values[6]; }
    double forceps1() const { return values[5] + values[6]; }
    double forceps2() const { return values[5] - values[6]; }

    bool operator==(const JointConfig& o) const { return values == o.values; }
};

/// Closed interval per joint; index matches JointConfig.
struct JointLimits {
    Vector7 lower = (Vector7() << 0, -30, -60, -60, -60, -90, -60).finished();
    Vector7 upper = (Vector7() << 125, 30, 60, 60, 60, 90, 60).finished();

    bool contains(const JointConfig& q) const {
        for (int i = 0; i < kNumJoints; ++i)
            if (!(q[i] >= lower[i] && q[i] <= upper[i])) return false;
        return true;
    }
    double center(int i) const { return 0.5 * (lower[i] + upper[i]); }
    double half_range(int i) const { return 0.5 * (upper[i] - lower[i]); }
};

inline const std::array<const char*, kNumJoints> kJointNames = {"q1", "q2", "q3", "q4",
                                                                 "q5", "q6", "q7"};

}  // namespace samkit
