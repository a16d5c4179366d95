#include "samkit/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <random>

namespace samkit {

WorkspaceMode parse_workspace_mode(const std::string& name) {
    if (name == "semi_active" || name == "semi-active") return WorkspaceMode::semi_active;
    if (name == "general") return WorkspaceMode::general;
    throw DomainError(fmt::format("unknown workspace mode '{}'", name));
}

const char* to_string(WorkspaceMode mode) {
    return mode == WorkspaceMode::semi_active ? "semi_active" : "general";
}

WorkspaceGrid::WorkspaceGrid(const Vector3& lo_, const Vector3& hi_, double voxel_) : voxel(voxel_), lo(lo_) {
    if (!(voxel > 0.0)) throw DomainError("workspace grid: voxel size must be positive");
    for (int a = 0; a < 3; ++a) dims[a] = std::max(1, static_cast<int>(std::ceil((hi_[a] - lo_[a]) / voxel)));
    occupancy.assign(static_cast<std::size_t>(dims.x()) * dims.y() * dims.z(), 0);
}

bool WorkspaceGrid::mark(const Vector3& p) {
    const Vector3 f = (p - lo) / voxel;
    const int i = static_cast<int>(std::floor(f.x()));
    const int j = static_cast<int>(std::floor(f.y()));
    const int k = static_cast<int>(std::floor(f.z()));
    if (i < 0 || j < 0 || k < 0 || i >= dims.x() || j >= dims.y() || k >= dims.z()) return false;
    occupancy[index(i, j, k)] = 1;
    return true;
}

std::size_t WorkspaceGrid::count() const {
    return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), std::uint8_t{1}));
}

double simpson_volume(const WorkspaceGrid& grid) {
    const std::size_t slice = static_cast<std::size_t>(grid.dims.x()) * grid.dims.y();
    // Empty slices on both ends, plus one more if needed for an even interval count.
    std::vector<double> area(grid.dims.z() + 2, 0.0);
    for (int k = 0; k < grid.dims.z(); ++k) {
        const auto first = grid.occupancy.begin() + k * slice;
        area[k + 1] = std::count(first, first + slice, std::uint8_t{1}) * grid.voxel * grid.voxel;
    }
    if (area.size() % 2 == 0) area.push_back(0.0);
    double sum = area.front() + area.back();
    for (std::size_t k = 1; k + 1 < area.size(); ++k) sum += (k % 2 ? 4.0 : 2.0) * area[k];
    return sum * grid.voxel / 3.0;
}

WorkspaceGrid fill_enclosed(const WorkspaceGrid& grid) {
    const int nx = grid.dims.x(), ny = grid.dims.y(), nz = grid.dims.z();
    // 0 empty, 1 occupied, 2 empty and connected to the outside.
    std::vector<std::uint8_t> state = grid.occupancy;
    std::vector<std::size_t> stack;
    const auto seed = [&](int i, int j, int k) {
        const std::size_t idx = grid.index(i, j, k);
        if (state[idx] == 0) {
            state[idx] = 2;
            stack.push_back(idx);
        }
    };
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (i == 0 || j == 0 || k == 0 || i == nx - 1 || j == ny - 1 || k == nz - 1) seed(i, j, k);
    const std::size_t sy = static_cast<std::size_t>(nx), sz = sy * ny;
    while (!stack.empty()) {
        const std::size_t idx = stack.back();
        stack.pop_back();
        const int i = static_cast<int>(idx % sy), j = static_cast<int>(idx / sy % ny),
                  k = static_cast<int>(idx / sz);
        if (i > 0) seed(i - 1, j, k);
        if (i + 1 < nx) seed(i + 1, j, k);
        if (j > 0) seed(i, j - 1, k);
        if (j + 1 < ny) seed(i, j + 1, k);
        if (k > 0) seed(i, j, k - 1);
        if (k + 1 < nz) seed(i, j, k + 1);
    }
    WorkspaceGrid out = grid;
    for (std::size_t n = 0; n < state.size(); ++n) out.occupancy[n] = state[n] == 2 ? 0 : 1;
    return out;
}

WorkspaceGrid rasterize(const std::function<bool(const Vector3&)>& inside, const Vector3& lo, const Vector3& hi,
                        double voxel) {
    WorkspaceGrid g(lo, hi, voxel);
    for (int k = 0; k < g.dims.z(); ++k)
        for (int j = 0; j < g.dims.y(); ++j)
            for (int i = 0; i < g.dims.x(); ++i) {
                const Vector3 c = g.lo + voxel * Vector3(i + 0.5, j + 0.5, k + 0.5);
                if (inside(c)) g.occupancy[g.index(i, j, k)] = 1;
            }
    return g;
}

double radical_inverse(std::uint64_t index, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

WorkspaceGrid sample_workspace(const SegmentParams& geom, double q1_max, WorkspaceMode mode,
                               const WorkspaceOptions& opts) {
    geom.validate();
    if (opts.n_samples == 0) throw DomainError("sample_workspace: n_samples must be positive");
    if (q1_max < 0.0 || q1_max > geom.limits.upper[0])
        throw DomainError(fmt::format("sample_workspace: q1_max {} outside [0, {}]", q1_max, geom.limits.upper[0]));

    const double reach0 = geom.l1 + geom.connector + geom.s2 + geom.a3 + geom.d4;
    const double reach = reach0 + (mode == WorkspaceMode::semi_active ? q1_max : 0.0);
    const double shift = mode == WorkspaceMode::general ? q1_max : 0.0;
    WorkspaceGrid grid(Vector3(-reach, -reach, -reach), Vector3(reach, reach, reach + shift), opts.voxel);

    const auto& lim = geom.limits;
    const double q6_lo = deg2rad(lim.lower[5]), q6_hi = deg2rad(lim.upper[5]);
    const int q6_steps =
        std::max(1, static_cast<int>(std::ceil((q6_hi - q6_lo) * geom.d4 / (0.5 * opts.voxel))));

    // Cranley-Patterson rotation of the Halton points keeps runs seedable.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double offset[5];
    for (double& o : offset) o = u01(rng);
    constexpr int primes[5] = {2, 3, 5, 7, 11};

    std::vector<Vector3> q6_points(q6_steps + 1);
    for (int m = 0; m <= q6_steps; ++m) {
        const double a = q6_lo + (q6_hi - q6_lo) * m / q6_steps;
        q6_points[m] = Vector3(0.0, -std::sin(a) * geom.d4, std::cos(a) * geom.d4);
    }

    // Pose of the forceps base: full chain with zero forceps length.
    SegmentParams base = geom;
    base.d4 = 0.0;
    const double s0 = geom.l1, s1 = geom.l1 + q1_max;

    for (std::size_t start = 0; start < opts.n_samples; start += opts.batch) {
        const std::size_t end = std::min(opts.n_samples, start + opts.batch);
        for (std::size_t n = start; n < end; ++n) {
            double u[5];
            for (int d = 0; d < 5; ++d) {
                u[d] = radical_inverse(n + 1, primes[d]) + offset[d];
                if (u[d] >= 1.0) u[d] -= 1.0;
            }
            JointConfig q;
            double t = u[0] * q1_max;
            if (mode == WorkspaceMode::semi_active) {
                // Arc length drawn with density proportional to s^2, which evens out
                // the spatial density of the swept shells.
                const double s = std::cbrt(s0 * s0 * s0 + u[0] * (s1 * s1 * s1 - s0 * s0 * s0));
                q[0] = std::clamp(s - geom.l1, 0.0, q1_max);
                t = 0.0;
            }
            for (int j = 1; j < 5; ++j) q[j] = lim.lower[j] + u[j] * (lim.upper[j] - lim.lower[j]);
            const RigidTransform T = chain_fk(q, base);
            const Vector3 origin = T.translation() + Vector3(0.0, 0.0, t);
            const Matrix3 R = T.linear();
            for (const auto& p : q6_points) grid.mark(origin + R * p);
        }
    }
    return grid;
}

WorkspaceRow workspace_row(const SegmentParams& geom, double q1_max, WorkspaceMode mode,
                           const WorkspaceOptions& opts) {
    const WorkspaceGrid g = sample_workspace(geom, q1_max, mode, opts);
    return {q1_max, simpson_volume(g), simpson_volume(fill_enclosed(g)), mode};
}

WorkspaceReport workspace_report(const SegmentParams& geom, const std::vector<double>& q1_values,
                                 const WorkspaceOptions& opts) {
    if (q1_values.empty()) throw DomainError("workspace_report: no q1 values");
    WorkspaceReport rep;
    for (double q1 : q1_values) rep.rows.push_back(workspace_row(geom, q1, WorkspaceMode::semi_active, opts));
    const double q1_top = *std::max_element(q1_values.begin(), q1_values.end());
    rep.rows.push_back(workspace_row(geom, 0.0, WorkspaceMode::general, opts));
    rep.rows.push_back(workspace_row(geom, q1_top, WorkspaceMode::general, opts));
    rep.general_reachable = rep.rows.back().volume;
    for (const auto& r : rep.rows)
        if (r.mode == WorkspaceMode::semi_active && r.q1_max == q1_top) rep.semi_total = r.total;
    return rep;
}

}  // namespace samkit
