#pragma once

#include "samkit/pose_estimation.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace samkit {

/// Point-cloud generator standing in for the depth camera.
struct CloudOptions {
    double radius = 2.0;
    int n_points = 200;
    double noise_sd = 0.0;          ///< isotropic Gaussian noise (mm)
    double outlier_fraction = 0.0;  ///< share of points replaced by uniform clutter
    double outlier_extent = 3.0;    ///< clutter cube half-width, in radii
};

/// Uniform surface samples of a sphere plus noise and outliers.
MarkerCloud synth_sphere_cloud(const Vector3& center, const std::string& label, const CloudOptions& opts,
                               std::mt19937_64& rng);

/// Base marker centers in the base frame (labels r0, r1, b0) for a zero p_offset.
std::array<Vector3, 3> base_marker_positions();

/// Box marker centers in the box frame (labels r, g, b) for a zero x_offset.
std::array<Vector3, 3> box_marker_positions();

std::vector<MarkerCloud> synth_base_clouds(const RigidTransform& cam_T_base, const CloudOptions& opts,
                                           std::mt19937_64& rng);

/// Clouds for the EE markers whose bit is set in mask (bit i -> label "ee<i>").
std::vector<MarkerCloud> synth_ee_clouds(const RigidTransform& cam_T_ee, const EeMarkerLayout& layout,
                                         unsigned mask, const CloudOptions& opts, std::mt19937_64& rng);

/// Labels "<prefix>r", "<prefix>g", "<prefix>b".
std::vector<MarkerCloud> synth_box_clouds(const RigidTransform& cam_T_box, const std::string& prefix,
                                          const CloudOptions& opts, std::mt19937_64& rng);

/// All EE marker masks with at least three markers visible (16 of them).
std::vector<unsigned> ee_subset_masks();

/// Frame of the base from fitted clouds labelled r0, r1, b0.
FrameEstimate estimate_base_frame(const std::map<std::string, SphereFit>& fits, const Vector3& p_offset);

/// EE frame from whichever of ee0..ee4 were fitted.
FrameEstimate estimate_ee_frame(const std::map<std::string, SphereFit>& fits, const EeMarkerLayout& layout);

/// Box frame from "<prefix>r", "<prefix>g", "<prefix>b".
FrameEstimate estimate_box_frame(const std::map<std::string, SphereFit>& fits, const std::string& prefix,
                                 const Vector3& x_offset);

}  // namespace samkit
