#include "samkit/synthetic_markers.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>

namespace samkit {

MarkerCloud synth_sphere_cloud(const Vector3& center, const std::string& label, const CloudOptions& opts,
                               std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> clutter(-opts.outlier_extent * opts.radius,
                                                   opts.outlier_extent * opts.radius);
    MarkerCloud cloud;
    cloud.label = label;
    cloud.points.reserve(opts.n_points);
    const int n_out = static_cast<int>(std::lround(opts.outlier_fraction * opts.n_points));
    for (int i = 0; i < opts.n_points; ++i) {
        if (i < n_out) {
            cloud.points.push_back(center + Vector3(clutter(rng), clutter(rng), clutter(rng)));
            continue;
        }
        Vector3 dir(gauss(rng), gauss(rng), gauss(rng));
        dir.normalize();
        Vector3 p = center + opts.radius * dir;
        if (opts.noise_sd > 0.0) p += opts.noise_sd * Vector3(gauss(rng), gauss(rng), gauss(rng));
        cloud.points.push_back(p);
    }
    // Shuffle so outliers are not grouped at the front.
    std::shuffle(cloud.points.begin(), cloud.points.end(), rng);
    return cloud;
}

std::array<Vector3, 3> base_marker_positions() {
    return {Vector3(0.0, 15.0, 15.0), Vector3(0.0, -15.0, 15.0), Vector3(0.0, -15.0, -15.0)};
}

std::array<Vector3, 3> box_marker_positions() {
    return {Vector3(0.0, 5.0, 5.0), Vector3(0.0, -5.0, 5.0), Vector3(0.0, 5.0, -5.0)};
}

std::vector<MarkerCloud> synth_base_clouds(const RigidTransform& cam_T_base, const CloudOptions& opts,
                                           std::mt19937_64& rng) {
    const auto pos = base_marker_positions();
    const char* labels[3] = {"r0", "r1", "b0"};
    std::vector<MarkerCloud> out;
    for (int i = 0; i < 3; ++i) out.push_back(synth_sphere_cloud(cam_T_base * pos[i], labels[i], opts, rng));
    return out;
}

std::vector<MarkerCloud> synth_ee_clouds(const RigidTransform& cam_T_ee, const EeMarkerLayout& layout,
                                         unsigned mask, const CloudOptions& opts, std::mt19937_64& rng) {
    std::vector<MarkerCloud> out;
    for (int i = 0; i < 5; ++i)
        if (mask & (1u << i))
            out.push_back(synth_sphere_cloud(cam_T_ee * layout.positions[i], fmt::format("ee{}", i), opts, rng));
    return out;
}

std::vector<MarkerCloud> synth_box_clouds(const RigidTransform& cam_T_box, const std::string& prefix,
                                          const CloudOptions& opts, std::mt19937_64& rng) {
    const auto pos = box_marker_positions();
    const char* colors[3] = {"r", "g", "b"};
    std::vector<MarkerCloud> out;
    for (int i = 0; i < 3; ++i) out.push_back(synth_sphere_cloud(cam_T_box * pos[i], prefix + colors[i], opts, rng));
    return out;
}

std::vector<unsigned> ee_subset_masks() {
    std::vector<unsigned> masks;
    for (unsigned m = 31; m > 0; --m)
        if (std::popcount(m) >= 3) masks.push_back(m);
    return masks;
}

namespace {

const SphereFit& require(const std::map<std::string, SphereFit>& fits, const std::string& label) {
    auto it = fits.find(label);
    if (it == fits.end()) throw DomainError(fmt::format("marker '{}' missing", label));
    return it->second;
}

}  // namespace

FrameEstimate estimate_base_frame(const std::map<std::string, SphereFit>& fits, const Vector3& p_offset) {
    const auto& r0 = require(fits, "r0");
    const auto& r1 = require(fits, "r1");
    const auto& b0 = require(fits, "b0");
    FrameEstimate f = base_frame(r0.center, r1.center, b0.center, p_offset);
    f.inlier_fraction = std::min({r0.inlier_fraction, r1.inlier_fraction, b0.inlier_fraction});
    return f;
}

FrameEstimate estimate_ee_frame(const std::map<std::string, SphereFit>& fits, const EeMarkerLayout& layout) {
    std::array<std::optional<Vector3>, 5> centers;
    double frac = 1.0;
    for (int i = 0; i < 5; ++i) {
        auto it = fits.find(fmt::format("ee{}", i));
        if (it == fits.end()) continue;
        centers[i] = it->second.center;
        frac = std::min(frac, it->second.inlier_fraction);
    }
    FrameEstimate f = ee_frame(centers, layout);
    f.inlier_fraction = frac;
    return f;
}

FrameEstimate estimate_box_frame(const std::map<std::string, SphereFit>& fits, const std::string& prefix,
                                 const Vector3& x_offset) {
    const auto& r = require(fits, prefix + "r");
    const auto& g = require(fits, prefix + "g");
    const auto& b = require(fits, prefix + "b");
    FrameEstimate f = box_frame(r.center, g.center, b.center, x_offset);
    f.inlier_fraction = std::min({r.inlier_fraction, g.inlier_fraction, b.inlier_fraction});
    return f;
}

}  // namespace samkit
