#include "samkit/inverse_kinematics.hpp"

#include <cmath>
#include <algorithm>
#include <random>

namespace samkit {

namespace {

using Vec = Vector6;

JointConfig to_joints(const Vec& x, double q7) {
    JointConfig q;
    q[0] = x[0];
    for (int i = 1; i < 6; ++i) q[i] = rad2deg(x[i]);
    q[6] = q7;
    return q;
}

Vec to_solver(const JointConfig& q) {
    Vec x;
    x[0] = q[0];
    for (int i = 1; i < 6; ++i) x[i] = deg2rad(q[i]);
    return x;
}

class PoseObjective {
public:
    PoseObjective(const RigidTransform& target, const SegmentParams& geom, const IkOptions& opts, double q7)
        : target_(target), geom_(geom), opts_(opts), q7_(q7) {}

    Vec residual(const Vec& x) const {
        return pose_residual(chain_fk(to_joints(x, q7_), geom_), target_, opts_.lambda);
    }

    double value(const Vec& r) const { return 0.5 * r.squaredNorm(); }

    Vec gradient(const Vec& x, const Vec& r) const {
        const Matrix6 J = numeric_jacobian(to_joints(x, q7_), geom_, target_, opts_.lambda, opts_.fd_step);
        return J.transpose() * r;
    }

    Vec project(Vec x) const {
        x[0] = std::clamp(x[0], geom_.limits.lower[0], geom_.limits.upper[0]);
        return x;
    }

    static double metric(const Vec& r) { return r.head<3>().norm() + r.tail<3>().norm(); }

private:
    const RigidTransform& target_;
    const SegmentParams& geom_;
    const IkOptions& opts_;
    double q7_;
};

struct Attempt {
    Vec x;
    double error;
    int iterations;
};

Attempt run_bfgs(const PoseObjective& obj, Vec x, const IkOptions& opts) {
    x = obj.project(x);
    Vec r = obj.residual(x);
    double f = obj.value(r);
    if (!std::isfinite(f)) throw NumericalError("inverse_kinematics: non-finite objective at start point");

    Matrix6 H = Matrix6::Identity();
    bool scaled = false;
    Vec g = obj.gradient(x, r);
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (PoseObjective::metric(r) < opts.tol || g.norm() < opts.gtol) break;

        Vec p = -H * g;
        if (g.dot(p) >= 0.0) {
            H.setIdentity();
            p = -g;
        }
        const double ratio = std::max(std::abs(p[0]) / opts.max_step_translation,
                                      p.tail<5>().cwiseAbs().maxCoeff() / opts.max_step_angle);
        if (ratio > 1.0) p /= ratio;

        // Armijo backtracking on the projected path.
        double alpha = 1.0;
        Vec x_new, r_new;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = obj.project(x + alpha * p);
            r_new = obj.residual(x_new);
            f_new = obj.value(r_new);
            if (!std::isfinite(f_new)) throw NumericalError("inverse_kinematics: non-finite objective");
            if (f_new <= f + opts.armijo_c * g.dot(x_new - x)) {
                accepted = true;
                break;
            }
            alpha *= opts.shrink;
        }
        if (!accepted) break;

        const Vec g_new = obj.gradient(x_new, r_new);
        const Vec s = x_new - x;
        const Vec y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-16 * s.norm() * y.norm()) {
            if (!scaled) {
                H = Matrix6::Identity() * (sy / y.squaredNorm());
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Matrix6 V = Matrix6::Identity() - rho * y * s.transpose();
            H = V.transpose() * H * V + rho * s * s.transpose();
        }
        x = x_new;
        r = r_new;
        f = f_new;
        g = g_new;
    }
    return {x, PoseObjective::metric(r), it};
}

}  // namespace

IkResult inverse_kinematics(const RigidTransform& target, const SegmentParams& geom, const JointConfig& q_init,
                            const IkOptions& opts) {
    for (int i = 0; i < kNumJoints; ++i)
        if (!std::isfinite(q_init[i])) throw NumericalError("inverse_kinematics: non-finite initial guess");

    const PoseObjective obj(target, geom, opts, q_init[6]);
    IkResult result;

    // Several poses have mirrored solutions (roll flipped, bends negated). A solve
    // that lands outside the joint box keeps restarting from in-limit seeds.
    const auto finish = [&](const Attempt& a) {
        JointConfig q = to_joints(a.x, q_init[6]);
        for (int i : {1, 5}) q[i] = -std::remainder(-q[i], 360.0);
        return q;
    };
    // Degrees (or mm) outside the joint box; a noisy target near a limit may only be
    // reachable slightly outside it.
    const auto violation = [&](const Attempt& a) {
        const JointConfig q = finish(a);
        double v = 0.0;
        for (int i = 0; i < 6; ++i)
            v += std::max(0.0, geom.limits.lower[i] - q[i]) + std::max(0.0, q[i] - geom.limits.upper[i]);
        return v;
    };
    const auto good = [&](const Attempt& a) { return a.error <= opts.accept_tol && violation(a) <= 1e-9; };
    const auto better = [&](const Attempt& a, const Attempt& b) {
        const bool ca = a.error <= opts.accept_tol, cb = b.error <= opts.accept_tol;
        if (ca != cb) return ca;
        if (!ca) return a.error < b.error;
        return violation(a) < violation(b);
    };

    Attempt best = run_bfgs(obj, to_solver(q_init), opts);
    result.iterations = best.iterations;
    result.attempts = 1;

    if (!good(best)) {
        // Cautious local retry: long early steps are what carry a solve onto a mirrored branch.
        IkOptions local = opts;
        local.max_step_angle *= 0.1;
        local.max_step_translation *= 0.1;
        local.max_iterations *= 2;
        const Attempt a = run_bfgs(obj, to_solver(q_init), local);
        result.iterations += a.iterations;
        ++result.attempts;
        if (better(a, best)) best = a;
    }

    std::mt19937_64 rng(opts.seed);
    for (int k = 0; k < opts.restarts && !good(best); ++k) {
        Vec x0;
        for (int i = 0; i < 6; ++i) {
            std::uniform_real_distribution<double> u(geom.limits.lower[i], geom.limits.upper[i]);
            x0[i] = (i == 0) ? u(rng) : deg2rad(u(rng));
        }
        const Attempt a = run_bfgs(obj, x0, opts);
        result.iterations += a.iterations;
        ++result.attempts;
        if (better(a, best)) best = a;
    }

    // Roll and forceps yaw are pure rotations: report them in (-180, 180].
    result.q = finish(best);
    result.error = best.error;
    result.converged = best.error <= opts.accept_tol;
    return result;
}

}  // namespace samkit
