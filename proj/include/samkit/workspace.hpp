#pragma once

#include "samkit/kinematics.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace samkit {

enum class WorkspaceMode { semi_active, general };

WorkspaceMode parse_workspace_mode(const std::string& name);
const char* to_string(WorkspaceMode mode);

/// Axis-aligned occupancy grid. Voxel (i, j, k) covers
/// [lo + (i, j, k) * voxel, lo + (i + 1, j + 1, k + 1) * voxel).
struct WorkspaceGrid {
    double voxel = 1.0;
    Vector3 lo = Vector3::Zero();
    Eigen::Vector3i dims = Eigen::Vector3i::Zero();
    std::vector<std::uint8_t> occupancy;

    WorkspaceGrid() = default;
    /// Grid covering [lo, hi] (grown to whole voxels). Throws on voxel <= 0.
    WorkspaceGrid(const Vector3& lo, const Vector3& hi, double voxel);

    Vector3 hi() const { return lo + voxel * dims.cast<double>(); }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * dims.y() + j) * dims.x() + i;
    }
    bool occupied(int i, int j, int k) const { return occupancy[index(i, j, k)] != 0; }
    /// Marks the voxel containing p; points outside the grid are ignored and reported false.
    bool mark(const Vector3& p);
    std::size_t count() const;
    bool empty() const { return count() == 0; }
};

/// Composite Simpson integral of the occupied cross-section area along z.
/// Returns 0 for a grid with no occupied voxel.
double simpson_volume(const WorkspaceGrid& grid);

/// Copy of the grid with every empty region that is not 6-connected to the grid
/// boundary marked occupied: the reachable set plus the voids it encloses.
WorkspaceGrid fill_enclosed(const WorkspaceGrid& grid);

/// Voxel-center rasterization of an implicit solid, for volume oracles.
WorkspaceGrid rasterize(const std::function<bool(const Vector3&)>& inside, const Vector3& lo, const Vector3& hi,
                        double voxel);

struct WorkspaceOptions {
    std::size_t n_samples = 1'000'000;  ///< outer samples over (q1, q2..q5)
    double voxel = 1.0;
    std::uint64_t seed = 1;
    std::size_t batch = 65'536;
};

/// Marks every voxel touched by the end-effector position.
///
/// semi_active: q1 in [0, q1_max], arc length q1 + l1. general: q1 = 0 and the
/// whole chain is shifted along base z by t in [0, q1_max]. Outer samples are a
/// randomly shifted Halton sequence over the joint box; q6 is swept densely
/// (at most half a voxel of travel per step) for each outer sample.
WorkspaceGrid sample_workspace(const SegmentParams& geom, double q1_max, WorkspaceMode mode,
                               const WorkspaceOptions& opts = {});

struct WorkspaceRow;
/// Samples one volume and measures both the reachable and the void-filled total.
WorkspaceRow workspace_row(const SegmentParams& geom, double q1_max, WorkspaceMode mode,
                           const WorkspaceOptions& opts = {});

struct WorkspaceRow {
    double q1_max = 0.0;
    double volume = 0.0;  ///< reachable, mm^3
    double total = 0.0;   ///< reachable plus enclosed voids, mm^3
    WorkspaceMode mode = WorkspaceMode::semi_active;
};

struct WorkspaceReport {
    std::vector<WorkspaceRow> rows;
    double general_reachable = 0.0;  ///< general mode swept over the largest q1_max
    double semi_total = 0.0;         ///< semi-active total at the largest q1_max
    /// Total semi-active volume over the reachable general volume at the largest q1_max.
    double ratio() const { return semi_total / general_reachable; }
};

/// Semi-active volumes for each q1_max, the general volume at q1 = 0 and the
/// general translated volume at the largest q1_max.
WorkspaceReport workspace_report(const SegmentParams& geom, const std::vector<double>& q1_values,
                                 const WorkspaceOptions& opts = {});

/// Van der Corput radical inverse of index in the given prime base.
double radical_inverse(std::uint64_t index, int base);

}  // namespace samkit
