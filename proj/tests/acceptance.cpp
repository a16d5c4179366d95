// Acceptance checks. Run as `acceptance <n>` for one criterion or with no
// argument for all of them. Each check prints one PASS/FAIL line and the
// process exits non-zero if any selected check fails.

#include "samkit/cables.hpp"
#include "samkit/config.hpp"
#include "samkit/controller.hpp"
#include "samkit/evaluation.hpp"
#include "samkit/inverse_kinematics.hpp"
#include "samkit/synthetic_markers.hpp"
#include "samkit/workspace.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <future>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace samkit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

constexpr std::uint64_t kSeed = 20240601;

JointConfig random_in_limits(const JointLimits& lim, std::mt19937_64& rng) {
    JointConfig q;
    for (int i = 0; i < 6; ++i) q[i] = std::uniform_real_distribution<double>(lim.lower[i], lim.upper[i])(rng);
    return q;
}

// ---------------------------------------------------------------------------

Outcome ik_round_trip() {
    const SegmentParams geom;
    std::mt19937_64 rng(kSeed);
    int converged = 0, accurate = 0;
    double worst = 0.0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        const JointConfig q = random_in_limits(geom.limits, rng);
        const RigidTransform T = manipulator_fk(q, geom);
        const IkResult r = inverse_kinematics(T, geom, JointConfig::zero());
        if (!r.converged) continue;
        ++converged;
        const double err = pose_error(chain_fk(r.q, geom), T, IkOptions{}.lambda);
        worst = std::max(worst, err);
        if (err < 1e-6) ++accurate;
    }
    const bool pass = converged >= 990 && accurate == converged;
    return {pass, fmt::format("converged {}/{}, worst pose error among converged {:.2e} (need >= 990 and < 1e-6)",
                              converged, n, worst)};
}

Outcome block_counts() {
    const int L[] = {10, 50, 100, 150};
    const int expected[] = {3, 5, 6, 7};
    bool pass = true;
    std::string got;
    for (int i = 0; i < 4; ++i) {
        const int n = num_blocks(L[i], 3);
        const int direct = static_cast<int>(std::ceil(std::log2((L[i] - 1.0) / 4.0) + 1.0));
        pass = pass && n == expected[i] && n == direct;
        got += fmt::format("{}L={}:{}", i ? ", " : "", L[i], n);
    }
    return {pass, got + " (expected 3, 5, 6, 7)"};
}

Outcome cable_matrix_audit() {
    const CableGeometry cg;
    const double e = cg.d_e / 2, w = cg.d_w / 2, we = cg.d_we / 2, jep = cg.d_jep / 2, jey = cg.d_jey / 2,
                 jwp = cg.d_jwp / 2, j = cg.d_j / 2;
    // Independent transcription of the printed actuation matrix.
    const double printed[12][7] = {
        {1, 0, 0, 0, 0, 0, 0},          {0, 1, 0, 0, 0, 0, 0},
        {0, 0, e, -e, 0, 0, 0},         {0, 0, -e, e, 0, 0, 0},
        {0, 0, e, e, 0, 0, 0},          {0, 0, -e, -e, 0, 0, 0},
        {0, 0, w, 0, we, 0, 0},         {0, 0, -w, 0, -we, 0, 0},
        {0, 0, jep, jey, jwp, j, -j},   {0, 0, -jep, -jey, -jwp, -j, j},
        {0, 0, -jep, -jey, -jwp, j, j}, {0, 0, jep, jey, jwp, -j, -j},
    };
    const CableMatrix M = cable_matrix(cg);
    int mismatches = 0;
    for (int r = 0; r < 12; ++r)
        for (int c = 0; c < 7; ++c)
            if (M(r, c) != printed[r][c]) ++mismatches;

    std::mt19937_64 rng(kSeed);
    const JointLimits lim;
    double worst_pair = 0.0, worst_q1 = 0.0;
    for (int i = 0; i < 10000; ++i) {
        JointConfig q;
        for (int k = 0; k < kNumJoints; ++k)
            q[k] = std::uniform_real_distribution<double>(lim.lower[k], lim.upper[k])(rng);
        const CableDeltas c = joints_to_cables(q, cg);
        for (int k = 3; k <= 11; k += 2) worst_pair = std::max(worst_pair, std::abs(c.dc(k) + c.dc(k + 1)));
        JointConfig shifted = q;
        shifted[0] = std::uniform_real_distribution<double>(lim.lower[0], lim.upper[0])(rng);
        const CableDeltas cs = joints_to_cables(shifted, cg);
        worst_q1 = std::max(worst_q1, (cs.values.tail<11>() - c.values.tail<11>()).cwiseAbs().maxCoeff());
    }
    const bool pass = mismatches == 0 && worst_pair < 1e-12 && worst_q1 == 0.0;
    return {pass, fmt::format("{} entry mismatches, worst pair sum {:.1e} mm, worst q1 leak {:.1e} over 10000 inputs",
                              mismatches, worst_pair, worst_q1)};
}

Outcome workspace_growth() {
    const SegmentParams geom;
    WorkspaceOptions opts;  // 10^6 samples, 1 mm voxels
    opts.seed = kSeed;
    const std::vector<double> q1s{0, 25, 50, 75, 100, 125};
    const WorkspaceReport rep = workspace_report(geom, q1s, opts);
    std::vector<double> semi, semi_total;
    double general0 = -1.0;
    for (const auto& r : rep.rows) {
        if (r.mode == WorkspaceMode::semi_active) {
            semi.push_back(r.volume);
            semi_total.push_back(r.total);
        }
        if (r.mode == WorkspaceMode::general && r.q1_max == 0.0) general0 = r.volume;
    }
    bool increasing = semi.size() == q1s.size();
    for (std::size_t i = 1; i < semi.size(); ++i)
        increasing = increasing && semi[i] > semi[i - 1] && semi_total[i] > semi_total[i - 1];
    const bool equal0 = !semi.empty() && semi.front() == general0;
    const double ratio = rep.ratio();
    const bool in_band = ratio >= 4.0 && ratio <= 7.0;
    std::string vols;
    for (std::size_t i = 0; i < semi.size(); ++i) vols += fmt::format("{}{:.3g}", i ? "/" : "", semi[i]);
    return {increasing && equal0 && in_band,
            fmt::format("semi-active {} mm^3 increasing={}, q1=0 semi==general {}, semi total {:.3g} / general "
                        "reachable {:.3g} = {:.3f} (band [4, 7]) {}",
                        vols, increasing, equal0, rep.semi_total, rep.general_reachable, ratio,
                        in_band ? "in band" : "OUT OF BAND")};
}

Outcome simpson_oracle() {
    using std::numbers::pi;
    const auto sphere = rasterize([](const Vector3& p) { return p.norm() <= 20.0; }, Vector3::Constant(-21),
                                  Vector3::Constant(21), 0.5);
    const auto cyl = rasterize([](const Vector3& p) { return p.head<2>().norm() <= 10.0 && p.z() >= 0 && p.z() <= 30; },
                               Vector3(-11, -11, -1), Vector3(11, 11, 31), 0.5);
    const double vs = simpson_volume(sphere), vc = simpson_volume(cyl);
    const double es = std::abs(vs / (4.0 / 3.0 * pi * 8000.0) - 1.0);
    const double ec = std::abs(vc / (3000.0 * pi) - 1.0);
    return {es < 0.03 && ec < 0.03,
            fmt::format("sphere {:.0f} mm^3 ({:.2f}% off), cylinder {:.0f} mm^3 ({:.2f}% off), limit 3%", vs, 100 * es,
                        vc, 100 * ec)};
}

Outcome plant_calibration() {
    const PlantParams plant = PlantParams::calibrated_default();
    const double q1s[] = {0, 20, 50};
    const double targets[] = {18.1, 28.4, 46.4};
    const Dataset ds = collect_dataset({0, 20, 50}, 4955, plant, derive_seed(kSeed, 0x66));
    bool pass = true;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
        const ErrorStats s = error_stats(ds.parts[i].records);
        const double mae = s.mae[2], ratio = s.mse[2] / s.mae[2];
        const bool ok = std::abs(mae - targets[i]) <= 0.25 * targets[i] && ratio >= 0.85;
        pass = pass && ok;
        detail += fmt::format("q1={}: q3 MAE {:.2f} (target {} +-25%), MSE/MAE {:.3f}; ", q1s[i], mae, targets[i], ratio);
    }
    const double loop = loop_repeatability(plant, 2, 60.0, 5, 0.0);
    pass = pass && loop <= 0.25;
    detail += fmt::format("q3 loop repeatability MAE {:.2e} deg (limit 0.25)", loop);
    return {pass, detail};
}

Outcome tcn_gradient_check() {
    TcnConfig cfg;
    cfg.L = 4;
    cfg.k = 2;
    cfg.channels_in = 2;
    cfg.channels_hidden = 3;
    cfg.channels_out = 2;
    cfg.seed = kSeed;
    TcnModel<double> m(cfg);
    std::mt19937_64 rng(kSeed);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto* p : m.parameters())
        for (Eigen::Index i = 0; i < p->size(); ++i) p->data()[i] += 0.3 * n(rng);
    const int batch = 4;
    Eigen::MatrixXd x(2, cfg.L * batch), y(2, batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = n(rng);

    TcnModel<double> grad = m.zeros_like();
    loss_and_gradient(m, x, y, batch, grad);
    auto params = m.parameters();
    auto grads = grad.parameters();
    const auto names = m.parameter_names();
    std::map<std::string, double> per_class;
    const double h = 1e-6;
    for (std::size_t p = 0; p < params.size(); ++p) {
        const std::string cls = names[p].substr(names[p].find('.') + 1);
        double& worst = per_class[cls];
        for (Eigen::Index i = 0; i < params[p]->size(); ++i) {
            double& w = params[p]->data()[i];
            const double saved = w;
            TcnModel<double> scratch = m.zeros_like();
            w = saved + h;
            const double up = loss_and_gradient(m, x, y, batch, scratch);
            w = saved - h;
            const double down = loss_and_gradient(m, x, y, batch, scratch);
            w = saved;
            const double numeric = (up - down) / (2 * h);
            const double analytic = grads[p]->data()[i];
            const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
            worst = std::max(worst, std::abs(numeric - analytic) / scale);
        }
    }
    double overall = 0.0;
    std::string detail;
    for (const auto& [cls, err] : per_class) {
        overall = std::max(overall, err);
        detail += fmt::format("{} {:.1e}, ", cls, err);
    }
    return {overall < 1e-4 && per_class.size() >= 8,
            fmt::format("max relative error by class: {}overall {:.1e} (limit 1e-4)", detail, overall)};
}

// Desk-scale training protocol shared by the compensation and sequence-length checks.
struct DeskData {
    Dataset train, valid, test;
    Normalizer norm = Normalizer::from_limits(JointLimits{});
};

DeskData desk_data(const PlantParams& plant) {
    const std::vector<double> q1s{0, 10, 20, 30, 40, 50};
    DeskData d;
    d.train = collect_dataset(q1s, 1000, plant, derive_seed(kSeed, 0x100));
    d.valid = collect_dataset(q1s, 300, plant, derive_seed(kSeed, 0x200));
    d.test = collect_dataset(q1s, 500, plant, derive_seed(kSeed, 0x300));
    return d;
}

TrainOptions desk_train_options() {
    TrainOptions o;
    o.epochs = 1500;
    o.patience = 100;
    return o;
}

std::vector<TcnModel<float>> train_models(const DeskData& d, int L, int count) {
    const WindowSet wt = make_windows(d.train, L, d.norm);
    const WindowSet wv = make_windows(d.valid, L, d.norm);
    std::vector<double> q1s;
    for (const auto& p : d.train.parts) q1s.push_back(p.q1);
    std::vector<std::future<TrainResult>> jobs;
    for (int m = 0; m < count; ++m) {
        TcnConfig cfg;
        cfg.L = L;
        cfg.seed = derive_seed(kSeed, 0x7000 + m);
        jobs.push_back(std::async(std::launch::async, [&, cfg] { return train_tcn(cfg, d.norm, wt, wv, desk_train_options()); }));
    }
    std::vector<TcnModel<float>> out;
    for (auto& j : jobs) {
        TrainResult r = j.get();
        fmt::print("  L={} model: best valid {:.5f} at epoch {} ({} epochs run)\n", L, r.best_valid, r.best_epoch,
                   r.epochs.empty() ? 0 : r.epochs.back());
        r.best.set_trained_q1(q1s);
        out.push_back(std::move(r.best));
    }
    return out;
}

Outcome compensation_efficacy() {
    const Config cfg = default_config();
    const DeskData d = desk_data(cfg.plant);
    auto models = train_models(d, 10, 3);

    bool pass = true;
    std::string detail;
    CompensationController ctrl(models);
    for (double q1 : {5.0, 25.0, 45.0}) {
        const TrackingReport r = run_tracking_eval(&ctrl, q1, cfg.plant, derive_seed(kSeed, 0x500 + q1));
        const Vector7 imp = r.improvement;
        const bool q3_ok = imp[2] >= 0.5;
        const bool all_ok = (imp.segment<5>(1).array() > 0.0).all();
        pass = pass && q3_ok && all_ok;
        detail += fmt::format("q1={}: q3 MAE {:.1f}->{:.1f} ({:.0f}%), q2..q6 reduction {:.0f}/{:.0f}/{:.0f}/{:.0f}/{:.0f}%; ",
                              q1, r.uncalibrated.mae[2], r.calibrated->mae[2], 100 * imp[2], 100 * imp[1],
                              100 * imp[2], 100 * imp[3], 100 * imp[4], 100 * imp[5]);
    }
    CompensationController boxed(models, true, cfg.geometry.limits);
    const BoxReport box = run_box_pointing(&boxed, cfg.plant, cfg.geometry, derive_seed(kSeed, 0x600));
    const double bi = box.improvement();
    pass = pass && bi >= 0.15;
    detail += fmt::format("box pointing euclid {:.2f}->{:.2f} mm ({:.0f}%, need >= 15%, {} trials, {} skipped)",
                          box.uncalibrated.euclid_mean, box.calibrated->euclid_mean, 100 * bi, box.trials_run,
                          box.trials_skipped);
    return {pass, detail};
}

double test_mae(const TcnModel<float>& m, const Dataset& test, const Normalizer& norm) {
    const WindowSet w = make_windows(test, m.config().L, norm);
    const Eigen::MatrixXd est = predict(m, w);
    const auto flat = test.flatten();
    double sum = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i)
        sum += (est.col(static_cast<Eigen::Index>(i)) - flat[i].q_cmd.values).segment<5>(1).cwiseAbs().sum();
    return sum / (5.0 * static_cast<double>(flat.size()));
}

Outcome sequence_length_ordering() {
    const DeskData d = desk_data(PlantParams::calibrated_default());
    const auto m10 = train_models(d, 10, 1);
    const auto m50 = train_models(d, 50, 1);
    const double a = test_mae(m10.front(), d.test, d.norm);
    const double b = test_mae(m50.front(), d.test, d.norm);
    return {a <= b, fmt::format("test-set MAE over q2..q6: L=10 {:.3f} deg, L=50 {:.3f} deg (need L=10 <= L=50)", a, b)};
}

Outcome latency() {
    // Cost of compensate() depends on the architecture only, not on the weight values.
    std::vector<TcnModel<float>> models;
    for (int m = 0; m < 3; ++m) {
        TcnConfig cfg;
        cfg.seed = derive_seed(kSeed, 0x7000 + m);
        models.emplace_back(cfg, Normalizer::from_limits(JointLimits{}));
    }
    CompensationController ctrl(models);
    const LatencyStats s = ctrl.latency_probe(10000, kSeed);
    return {s.p99_us < 1000.0, fmt::format("3 x (L=10, 64 channels): p50 {:.1f} us, p99 {:.1f} us, max {:.1f} us over {} "
                                           "calls (p99 limit 1000 us)",
                                           s.p50_us, s.p99_us, s.max_us, s.samples)};
}

Outcome pose_estimation_loop() {
    const SegmentParams geom;
    const EeMarkerLayout layout = EeMarkerLayout::standard();
    const CloudOptions cloud{2.0, 200, 0.2, 0.3, 3.0};
    std::mt19937_64 rng(kSeed);
    const JointLimits ranges = default_data_ranges();
    std::uniform_real_distribution<double> tilt(-0.35, 0.35), jitter(-5.0, 5.0);
    const int poses_per_subset = 3;
    double worst_angle = 0.0, worst_q1 = 0.0;
    int failures = 0, subsets = 0;
    for (unsigned mask : ee_subset_masks()) {
        ++subsets;
        for (int k = 0; k < poses_per_subset; ++k) {
            JointConfig q;
            q[0] = std::uniform_real_distribution<double>(0, 50)(rng);
            for (int i = 1; i < 5; ++i) q[i] = std::uniform_real_distribution<double>(ranges.lower[i], ranges.upper[i])(rng);
            q[5] = std::uniform_real_distribution<double>(-30, 30)(rng);
            RigidTransform cam_T_base = RigidTransform::Identity();
            cam_T_base.linear() = (Eigen::AngleAxisd(std::numbers::pi, Vector3::UnitX()) *
                                   Eigen::AngleAxisd(tilt(rng), Vector3::UnitX()) *
                                   Eigen::AngleAxisd(tilt(rng), Vector3::UnitY()))
                                      .toRotationMatrix();
            cam_T_base.translation() = Vector3(0, 0, 300);
            const RigidTransform cam_T_ee = cam_T_base * manipulator_fk(q, geom);
            auto clouds = synth_base_clouds(cam_T_base, cloud, rng);
            const auto ee = synth_ee_clouds(cam_T_ee, layout, mask, cloud, rng);
            clouds.insert(clouds.end(), ee.begin(), ee.end());
            const auto fits = fit_markers(clouds);
            const FrameEstimate fb = estimate_base_frame(fits, geom.p_offset);
            const FrameEstimate fe = estimate_ee_frame(fits, layout);
            // The commanded configuration seeds the solve; here it is the truth plus a few degrees.
            JointConfig guess = q;
            for (int i = 1; i < 6; ++i) guess[i] += jitter(rng);
            const IkResult r = physical_joints(fb.transform, fe.transform, geom, guess);
            const double da = (r.q.values - q.values).segment<5>(1).cwiseAbs().maxCoeff();
            const double dq1 = std::abs(r.q[0] - q[0]);
            worst_angle = std::max(worst_angle, da);
            worst_q1 = std::max(worst_q1, dq1);
            if (da > 0.5 || dq1 > 0.5) ++failures;
        }
    }
    return {failures == 0,
            fmt::format("{} marker subsets x {} poses at sigma 0.2 mm, 30% outliers: worst angle error {:.3f} deg, "
                        "worst q1 error {:.3f} mm, {} over 0.5",
                        subsets, poses_per_subset, worst_angle, worst_q1, failures)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "kinematics round trip", 30, ik_round_trip},
        {2, "residual block counts", 1, block_counts},
        {3, "cable matrix audit", 5, cable_matrix_audit},
        {4, "workspace growth", 120, workspace_growth},
        {5, "simpson volume oracle", 30, simpson_oracle},
        {6, "plant calibration", 120, plant_calibration},
        {7, "tcn gradient check", 10, tcn_gradient_check},
        {8, "compensation efficacy", 1800, compensation_efficacy},
        {9, "sequence length ordering", 1200, sequence_length_ordering},
        {10, "compensation latency", 60, latency},
        {11, "pose estimation loop", 60, pose_estimation_loop},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    int failed = 0;
    for (const auto& c : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        fmt::print("{} criterion {} {}: {} [{:.1f} s of {:.0f} s budget{}]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                   o.detail, secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
        if (!pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
