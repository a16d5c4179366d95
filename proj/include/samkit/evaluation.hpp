#pragma once

#include "samkit/controller.hpp"
#include "samkit/datagen.hpp"
#include "samkit/synthetic_markers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace samkit {

struct TrackingOptions {
    std::size_t n_points = 950;
    JointLimits ranges = default_data_ranges();
    double interp_step = 3.0;
};

/// Random-trajectory tracking at one translation.
struct TrackingReport {
    double q1 = 0.0;
    std::uint64_t seed = 0;
    ErrorStats uncalibrated;
    std::optional<ErrorStats> calibrated;
    /// 1 - MAE_cal / MAE_uncal per joint; 0 where the uncalibrated MAE is ~0.
    Vector7 improvement = Vector7::Zero();
};

/// Drives a random trajectory at q1 through the plant, once directly and once
/// (if controller is given) through the controller first. Both runs start from
/// a reset plant. Throws DomainError if q1 is among the controller's training
/// translations.
TrackingReport run_tracking_eval(CompensationController* controller, double q1, const PlantParams& plant,
                                 std::uint64_t seed, const TrackingOptions& opts = {});

struct BoxOptions {
    int n_trials = 15;
    std::vector<double> heights{20, 35, 50, 65, 80};  ///< box-top target heights in the base frame (mm)
    double height_tol = 2.5;
    double top_offset = 6.0;    ///< box frame origin to box-top target along box z (mm)
    double q1_max = 50.0;       ///< boxes are placed with q1 in [0, q1_max]
    JointLimits ranges = default_data_ranges();
    double interp_step = 3.0;
    int settle_steps = 12;      ///< hold steps at each box before measuring
    CloudOptions cloud{2.0, 200, 0.2, 0.3, 3.0};
    RansacOptions ransac;
    IkOptions ik;
    Vector3 box_x_offset = Vector3::Zero();
    int max_placement_tries = 200000;
};

/// Position error statistics over all box visits (mm).
struct PositionStats {
    Vector3 mae = Vector3::Zero();
    Vector3 sd = Vector3::Zero();
    double euclid_mean = 0.0;
    double euclid_sd = 0.0;
    std::size_t count = 0;
};

struct BoxReport {
    PositionStats uncalibrated;
    std::optional<PositionStats> calibrated;
    int trials_run = 0;
    int trials_skipped = 0;
    std::vector<std::string> log;
    /// 1 - euclid_cal / euclid_uncal, 0 when undefined.
    double improvement() const;
};

/// Box-pointing task: per trial, place boxes at random reachable poses at the
/// configured heights, estimate their frames from synthetic marker clouds,
/// solve IK for each target and visit them lowest to highest, measuring the
/// physical end-effector position after each settle. Trials with an IK failure
/// are skipped and counted.
BoxReport run_box_pointing(CompensationController* controller, const PlantParams& plant, const SegmentParams& geom,
                           std::uint64_t seed, const BoxOptions& opts = {});

PositionStats position_stats(const std::vector<Vector3>& errors);

}  // namespace samkit
