#include "samkit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace samkit {

namespace {

Vector7 improvement_ratio(const Vector7& uncal, const Vector7& cal) {
    Vector7 r = Vector7::Zero();
    for (int j = 0; j < kNumJoints; ++j)
        if (uncal[j] > 1e-12) r[j] = 1.0 - cal[j] / uncal[j];
    return r;
}

std::vector<JointConfig> run_plant(HysteresisPlant& plant, CompensationController* ctrl,
                                   const std::vector<JointConfig>& desired) {
    plant.reset();
    if (ctrl) ctrl->reset();
    std::vector<JointConfig> out;
    out.reserve(desired.size());
    for (const auto& q : desired) out.push_back(plant.step(ctrl ? ctrl->compensate(q) : uncalibrated_pass(q)));
    return out;
}

RigidTransform translate_z(double dz) {
    RigidTransform t = RigidTransform::Identity();
    t.translation().z() = dz;
    return t;
}

}  // namespace

TrackingReport run_tracking_eval(CompensationController* controller, double q1, const PlantParams& plant,
                                 std::uint64_t seed, const TrackingOptions& opts) {
    if (controller) {
        for (double t : controller->trained_q1())
            if (std::abs(t - q1) < 1e-9)
                throw DomainError(fmt::format("tracking eval: q1 = {} mm was part of the training data", q1));
    }
    if (opts.n_points == 0) throw DomainError("tracking eval: n_points must be positive");
    auto desired = gen_random_trajectory(opts.ranges, static_cast<int>(opts.n_points), opts.interp_step, q1, seed);
    desired.resize(std::min(desired.size(), opts.n_points));

    HysteresisPlant sim(plant);
    TrackingReport rep;
    rep.q1 = q1;
    rep.seed = seed;
    rep.uncalibrated = error_stats(desired, run_plant(sim, nullptr, desired));
    if (controller) {
        rep.calibrated = error_stats(desired, run_plant(sim, controller, desired));
        rep.improvement = improvement_ratio(rep.uncalibrated.mae, rep.calibrated->mae);
    }
    return rep;
}

double BoxReport::improvement() const {
    if (!calibrated || uncalibrated.euclid_mean <= 1e-12) return 0.0;
    return 1.0 - calibrated->euclid_mean / uncalibrated.euclid_mean;
}

PositionStats position_stats(const std::vector<Vector3>& errors) {
    if (errors.empty()) throw DomainError("position_stats: no samples");
    PositionStats s;
    s.count = errors.size();
    const double n = static_cast<double>(errors.size());
    for (const auto& e : errors) {
        s.mae += e.cwiseAbs();
        s.euclid_mean += e.norm();
    }
    s.mae /= n;
    s.euclid_mean /= n;
    for (const auto& e : errors) {
        s.sd += (e.cwiseAbs() - s.mae).cwiseAbs2();
        s.euclid_sd += std::pow(e.norm() - s.euclid_mean, 2);
    }
    s.sd = (s.sd / n).cwiseSqrt();
    s.euclid_sd = std::sqrt(s.euclid_sd / n);
    return s;
}

BoxReport run_box_pointing(CompensationController* controller, const PlantParams& plant, const SegmentParams& geom,
                           std::uint64_t seed, const BoxOptions& opts) {
    if (opts.n_trials <= 0) throw DomainError("box pointing: n_trials must be positive");
    if (opts.heights.empty()) throw DomainError("box pointing: no box heights");
    std::vector<double> heights = opts.heights;
    std::sort(heights.begin(), heights.end());

    BoxReport rep;
    std::vector<Vector3> err_uncal, err_cal;
    HysteresisPlant sim(plant);

    for (int trial = 0; trial < opts.n_trials; ++trial) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
        std::uniform_real_distribution<double> u01(0.0, 1.0);

        // Camera above the robot looking down, with a small random tilt.
        RigidTransform cam_T_base = RigidTransform::Identity();
        cam_T_base.linear() = (Eigen::AngleAxisd(std::numbers::pi, Vector3::UnitX()) *
                               Eigen::AngleAxisd(0.2 * (u01(rng) - 0.5), Vector3::UnitY()) *
                               Eigen::AngleAxisd(0.2 * (u01(rng) - 0.5), Vector3::UnitX()))
                                  .toRotationMatrix();
        cam_T_base.translation() = Vector3(40.0 * (u01(rng) - 0.5), 40.0 * (u01(rng) - 0.5), 300.0);

        // Boxes: rejection-sample configurations whose end effector sits at each height.
        std::vector<RigidTransform> base_T_target;
        for (double h : heights) {
            bool placed = false;
            for (int tries = 0; tries < opts.max_placement_tries && !placed; ++tries) {
                JointConfig q;
                q[0] = opts.q1_max * u01(rng);
                for (int j = 1; j < kNumJoints; ++j)
                    q[j] = opts.ranges.lower[j] + (opts.ranges.upper[j] - opts.ranges.lower[j]) * u01(rng);
                if (!geom.limits.contains(q)) continue;
                const RigidTransform T = manipulator_fk(q, geom);
                if (std::abs(T.translation().z() - h) <= opts.height_tol) {
                    base_T_target.push_back(T);
                    placed = true;
                }
            }
            if (!placed) throw DomainError(fmt::format("box pointing: no reachable placement at height {} mm", h));
        }

        // Perception: base and box frames from noisy clouds.
        std::vector<MarkerCloud> clouds = synth_base_clouds(cam_T_base, opts.cloud, rng);
        for (std::size_t b = 0; b < base_T_target.size(); ++b) {
            const RigidTransform cam_T_box = cam_T_base * base_T_target[b] * translate_z(-opts.top_offset);
            auto bc = synth_box_clouds(cam_T_box, fmt::format("box{}_", b), opts.cloud, rng);
            clouds.insert(clouds.end(), bc.begin(), bc.end());
        }
        RansacOptions ro = opts.ransac;
        ro.seed = derive_seed(opts.ransac.seed, static_cast<std::uint64_t>(trial));
        const auto fits = fit_markers(clouds, ro);
        const RigidTransform est_cam_T_base = estimate_base_frame(fits, geom.p_offset).transform;

        std::vector<JointConfig> q_box;
        JointConfig q_seed;
        bool ok = true;
        for (std::size_t b = 0; b < base_T_target.size() && ok; ++b) {
            const RigidTransform est_cam_T_box =
                estimate_box_frame(fits, fmt::format("box{}_", b), opts.box_x_offset).transform;
            const RigidTransform target = est_cam_T_base.inverse() * est_cam_T_box * translate_z(opts.top_offset);
            const IkResult ik = inverse_kinematics(target, geom, q_seed, opts.ik);
            if (!ik.converged) {
                rep.log.push_back(fmt::format("trial {}: IK failed for box {} (error {:.3g})", trial, b, ik.error));
                ok = false;
                break;
            }
            q_box.push_back(ik.q);
            q_seed = ik.q;
        }
        if (!ok) {
            ++rep.trials_skipped;
            continue;
        }

        // Desired stream: home, then each box in turn with a hold.
        std::vector<JointConfig> desired;
        std::vector<std::size_t> measure_at;
        JointConfig current;
        for (const auto& qb : q_box) {
            const auto seg = interpolate(current, qb, opts.interp_step);
            desired.insert(desired.end(), seg.begin(), seg.end());
            for (int s = 0; s < opts.settle_steps; ++s) desired.push_back(qb);
            measure_at.push_back(desired.size() - 1);
            current = qb;
        }

        auto collect = [&](CompensationController* ctrl, std::vector<Vector3>& sink) {
            const auto phy = run_plant(sim, ctrl, desired);
            for (std::size_t b = 0; b < measure_at.size(); ++b) {
                const Vector3 p = chain_fk(phy[measure_at[b]], geom).translation();
                sink.push_back(p - base_T_target[b].translation());
            }
        };
        collect(nullptr, err_uncal);
        if (controller) collect(controller, err_cal);
        ++rep.trials_run;
    }
    if (err_uncal.empty()) throw DomainError("box pointing: every trial was skipped");
    rep.uncalibrated = position_stats(err_uncal);
    if (controller) rep.calibrated = position_stats(err_cal);
    return rep;
}

}  // namespace samkit
