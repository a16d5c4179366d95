#include "samkit/config.hpp"
#include "samkit/controller.hpp"
#include "samkit/evaluation.hpp"
#include "samkit/io.hpp"
#include "samkit/tcn_io.hpp"
#include "samkit/workspace.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>

#ifndef SAMKIT_VERSION
#define SAMKIT_VERSION "0.0.0"
#endif

using namespace samkit;
namespace fs = std::filesystem;

namespace {

// Raised for flag values that parse but make no sense together; exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_path = "samkit.conf";
    std::string out_dir;
    std::optional<std::uint64_t> seed_flag;
};

struct Context {
    Config cfg;
    std::uint64_t seed = 0;
    std::string out;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw UsageError(fmt::format("'{}' is not a number list", text));
        }
    }
    if (out.empty()) throw UsageError("empty number list");
    return out;
}

JointConfig parse_joints(const std::string& text) {
    const auto v = parse_list(text);
    if (v.size() != kNumJoints) throw UsageError("--q needs 7 comma-separated values (q1 mm, q2..q7 deg)");
    return JointConfig(Eigen::Map<const Vector7>(v.data()));
}

Context make_context(const Common& c, const std::string& sub) {
    Context ctx;
    const bool explicit_path = c.config_path != "samkit.conf";
    if (fs::exists(c.config_path) || explicit_path) {
        ctx.cfg = load_config(c.config_path);
    } else {
        ctx.cfg = default_config();
    }
    ctx.seed = ctx.cfg.seed;
    if (c.seed_flag) ctx.seed = *c.seed_flag;
    if (const char* env = std::getenv("SAMKIT_SEED")) {
        try {
            std::size_t used = 0;
            ctx.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            throw UsageError(fmt::format("SAMKIT_SEED='{}' is not an unsigned integer", env));
        }
    }
    ctx.out = c.out_dir.empty() ? (fs::path("out") / sub).string() : c.out_dir;
    fs::create_directories(ctx.out);
    return ctx;
}

void write_manifest(const Context& ctx, const std::string& sub, const CLI::App& app) {
    json params = json::object();
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->get_name() == "--help" || opt->count() == 0) continue;
        params[opt->get_name()] = opt->as<std::vector<std::string>>();
    }
    const auto now = std::chrono::system_clock::now();
    const json manifest = {{"tool", "samkit"},
                           {"version", SAMKIT_VERSION},
                           {"subcommand", sub},
                           {"config", ctx.cfg.source.empty() ? std::string("<built-in defaults>") : ctx.cfg.source},
                           {"seed", ctx.seed},
                           {"parameters", params},
                           {"output_dir", ctx.out},
                           {"created_unix", std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()}};
    write_json(manifest, (fs::path(ctx.out) / "manifest.json").string());
}

std::string out_file(const Context& ctx, const std::string& name) { return (fs::path(ctx.out) / name).string(); }

std::vector<TcnModel<float>> load_models(const std::vector<std::string>& paths) {
    if (paths.empty()) throw UsageError("--models needs at least one checkpoint");
    std::vector<TcnModel<float>> models;
    for (const auto& p : paths) models.push_back(load_checkpoint(p));
    return models;
}

void print_matrix(const RigidTransform& T) {
    const Eigen::Matrix4d M = T.matrix();
    for (int r = 0; r < 4; ++r) fmt::print("{:12.6f} {:12.6f} {:12.6f} {:12.6f}\n", M(r, 0), M(r, 1), M(r, 2), M(r, 3));
}

constexpr std::uint64_t kSplitStream[] = {0x100, 0x200, 0x300};

std::uint64_t split_seed(std::uint64_t seed, const std::string& split) {
    if (split == "train") return derive_seed(seed, kSplitStream[0]);
    if (split == "valid") return derive_seed(seed, kSplitStream[1]);
    if (split == "test") return derive_seed(seed, kSplitStream[2]);
    throw UsageError("--split must be train, valid or test");
}

void print_stats_row(const char* label, const Vector7& v) {
    fmt::print("{:<14}", label);
    for (int j = 0; j < kNumJoints; ++j) fmt::print(" {:8.2f}", v[j]);
    fmt::print("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"samkit: extensible continuum manipulator toolkit"};
    app.set_version_flag("--version", SAMKIT_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--config", common.config_path, "INI config file (default ./samkit.conf, built-ins if absent)");
    app.add_option("--out", common.out_dir, "output directory (default out/<subcommand>)");
    app.add_option("--seed", common.seed_flag, "top-level seed (SAMKIT_SEED overrides)");

    std::map<std::string, std::function<int(const Context&)>> handlers;
    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        return sub;
    };

    // fk
    std::string fk_q;
    add("fk", "forward kinematics of one configuration")->add_option("--q", fk_q, "q1..q7")->required();
    handlers["fk"] = [&](const Context& ctx) {
        const JointConfig q = parse_joints(fk_q);
        const RigidTransform T = manipulator_fk(q, ctx.cfg.geometry);
        print_matrix(T);
        write_json({{"q", joints_to_json(q)}, {"transform", transform_to_json(T)}}, out_file(ctx, "fk.json"));
        return 0;
    };

    // ik
    std::string ik_target, ik_init = "0,0,0,0,0,0,0", ik_from_q;
    auto* ik = add("ik", "inverse kinematics for a base-frame pose");
    auto* ik_t = ik->add_option("--target", ik_target, "16 row-major transform values");
    auto* ik_q = ik->add_option("--from-q", ik_from_q, "use FK of this configuration as the target");
    ik_t->excludes(ik_q);
    ik->add_option("--init", ik_init, "initial guess q1..q7");
    handlers["ik"] = [&](const Context& ctx) {
        RigidTransform target;
        if (!ik_target.empty()) {
            const auto v = parse_list(ik_target);
            target = transform_from_json(json(v));
        } else if (!ik_from_q.empty()) {
            target = manipulator_fk(parse_joints(ik_from_q), ctx.cfg.geometry);
        } else {
            throw UsageError("ik needs --target or --from-q");
        }
        const IkResult r = inverse_kinematics(target, ctx.cfg.geometry, parse_joints(ik_init));
        fmt::print("q = [{}]\nerror = {:.3e}, converged = {}, iterations = {}\n",
                   fmt::join(r.q.values.data(), r.q.values.data() + 7, ", "), r.error, r.converged, r.iterations);
        write_json({{"q", joints_to_json(r.q)},
                    {"error", r.error},
                    {"converged", r.converged},
                    {"iterations", r.iterations},
                    {"target", transform_to_json(target)}},
                   out_file(ctx, "ik.json"));
        if (!r.converged) {
            fmt::print(stderr, "ik: did not converge\n");
            return 1;
        }
        return 0;
    };

    // cables
    std::string cab_q, cab_inverse;
    auto* cab = add("cables", "joint to cable displacement map (or its inverse)");
    auto* cab_qo = cab->add_option("--q", cab_q, "q1..q7");
    auto* cab_io = cab->add_option("--inverse", cab_inverse, "12 cable values: dm1, dm2, dc3..dc12");
    cab_qo->excludes(cab_io);
    handlers["cables"] = [&](const Context& ctx) {
        if (!cab_q.empty()) {
            const CableDeltas c = joints_to_cables(parse_joints(cab_q), ctx.cfg.cables);
            fmt::print("{}\n", fmt::join(c.values.data(), c.values.data() + 12, ", "));
            write_json({{"cables", cables_to_json(c)}}, out_file(ctx, "cables.json"));
        } else if (!cab_inverse.empty()) {
            const auto v = parse_list(cab_inverse);
            if (v.size() != 12) throw UsageError("--inverse needs 12 values");
            CableDeltas c;
            c.values = Eigen::Map<const Vector12>(v.data());
            const JointConfig q = cables_to_joints(c, ctx.cfg.cables);
            fmt::print("{}\n", fmt::join(q.values.data(), q.values.data() + 7, ", "));
            write_json({{"q", joints_to_json(q)}}, out_file(ctx, "joints.json"));
        } else {
            throw UsageError("cables needs --q or --inverse");
        }
        return 0;
    };

    // workspace
    double ws_q1_max = 125.0, ws_voxel = 1.0, ws_step = 25.0;
    std::size_t ws_samples = 1'000'000;
    std::string ws_mode = "both";
    bool ws_dump = false;
    auto* ws = add("workspace", "reachable workspace volumes");
    ws->add_option("--q1-max", ws_q1_max, "largest translation (mm)");
    ws->add_option("--q1-step", ws_step, "translation step of the table (mm)");
    ws->add_option("--mode", ws_mode, "semi-active, general or both")
        ->check(CLI::IsMember({"semi-active", "semi_active", "general", "both"}));
    ws->add_option("--samples", ws_samples, "outer samples per volume");
    ws->add_option("--voxel", ws_voxel, "voxel edge (mm)");
    ws->add_flag("--voxel-dump", ws_dump, "also write the occupancy grid(s) at q1-max");
    handlers["workspace"] = [&](const Context& ctx) {
        WorkspaceOptions opts;
        opts.n_samples = ws_samples;
        opts.voxel = ws_voxel;
        opts.seed = ctx.seed;
        if (!(ws_step > 0.0)) throw UsageError("--q1-step must be positive");
        std::vector<double> q1s;
        for (double q = 0.0; q <= ws_q1_max + 1e-9; q += ws_step) q1s.push_back(q);
        if (q1s.back() < ws_q1_max - 1e-9) q1s.push_back(ws_q1_max);
        WorkspaceReport rep;
        if (ws_mode == "both") {
            rep = workspace_report(ctx.cfg.geometry, q1s, opts);
        } else {
            const WorkspaceMode mode = parse_workspace_mode(ws_mode);
            for (double q : q1s) rep.rows.push_back(workspace_row(ctx.cfg.geometry, q, mode, opts));
        }
        fmt::print("{:>8} {:>16} {:>16} {}\n", "q1_max", "reachable_mm3", "total_mm3", "mode");
        for (const auto& r : rep.rows)
            fmt::print("{:8.1f} {:16.0f} {:16.0f} {}\n", r.q1_max, r.volume, r.total, to_string(r.mode));
        if (ws_mode == "both")
            fmt::print("ratio semi-active total / general reachable at {} mm: {:.3f}\n", ws_q1_max, rep.ratio());
        write_workspace_csv(rep, out_file(ctx, "workspace.csv"));
        if (ws_dump) {
            for (auto mode : {WorkspaceMode::semi_active, WorkspaceMode::general}) {
                if (ws_mode != "both" && parse_workspace_mode(ws_mode) != mode) continue;
                write_json(voxel_dump(sample_workspace(ctx.cfg.geometry, ws_q1_max, mode, opts)),
                           out_file(ctx, fmt::format("voxels_{}.json", to_string(mode))));
            }
        }
        return 0;
    };

    // gen-data
    std::string gd_q1 = "0,10,20,30,40,50", gd_split = "train";
    std::size_t gd_n = 1000;
    bool gd_paper = false;
    auto* gd = add("gen-data", "collect (q_cmd, q_phy) trajectories from the plant");
    gd->add_option("--q1", gd_q1, "translations (mm)");
    gd->add_option("--n-per", gd_n, "samples per translation");
    gd->add_option("--split", gd_split, "train, valid or test (selects an independent seed stream)");
    gd->add_flag("--paper-scale", gd_paper, "4955 samples per translation");
    handlers["gen-data"] = [&](const Context& ctx) {
        const std::size_t n = gd_paper ? 4955 : gd_n;
        Dataset ds = collect_dataset(parse_list(gd_q1), n, ctx.cfg.plant, split_seed(ctx.seed, gd_split));
        ds.split = gd_split;
        write_dataset(ds, ctx.out);
        const ErrorStats s = error_stats(ds.flatten());
        fmt::print("{} records, plant {}\n", ds.size(), ds.plant_hash);
        print_stats_row("MAE", s.mae);
        return 0;
    };

    // calibrate-plant
    std::size_t cp_n = 5000;
    auto* cp = add("calibrate-plant", "hysteresis statistics of the configured plant");
    cp->add_option("--n-per", cp_n, "samples per translation");
    handlers["calibrate-plant"] = [&](const Context& ctx) {
        const std::vector<double> q1s{0, 20, 50};
        const Dataset ds = collect_dataset(q1s, cp_n, ctx.cfg.plant, split_seed(ctx.seed, "test"));
        std::vector<TrackingReport> rows;
        json parts = json::array();
        for (const auto& part : ds.parts) {
            TrackingReport r;
            r.q1 = part.q1;
            r.uncalibrated = error_stats(part.records);
            rows.push_back(r);
            fmt::print("q1 = {} mm\n", part.q1);
            print_stats_row("  MAE", r.uncalibrated.mae);
            print_stats_row("  SD", r.uncalibrated.mae_sd);
            print_stats_row("  MSE", r.uncalibrated.mse);
            print_stats_row("  SD", r.uncalibrated.mse_sd);
            parts.push_back(tracking_to_json(r));
        }
        json rep_j = {{"translations", parts}, {"plant_hash", ds.plant_hash}};
        json rep_loop = json::object();
        for (int j = 1; j <= 5; ++j)
            rep_loop[kJointNames[j]] = loop_repeatability(ctx.cfg.plant, j, 60.0 * (j == 1 ? 0.5 : 1.0), 5, 0.0);
        rep_j["loop_repeatability_mae"] = rep_loop;
        fmt::print("loop repeatability MAE (deg): {}\n", rep_loop.dump());
        write_tracking_csv(rows, out_file(ctx, "plant_statistics.csv"));
        write_json(rep_j, out_file(ctx, "plant_statistics.json"));
        return 0;
    };

    // train
    std::string tr_data, tr_valid;
    int tr_L = 10, tr_hidden = 64, tr_epochs = 1500, tr_patience = 100, tr_batch = 256, tr_ensemble = 1;
    double tr_lr = 1e-3;
    bool tr_paper = false;
    auto* tr = add("train", "train TCN inverse model(s)");
    tr->add_option("--data", tr_data, "training dataset directory")->required();
    tr->add_option("--valid", tr_valid, "validation dataset directory")->required();
    tr->add_option("--L", tr_L, "sequence length");
    tr->add_option("--hidden", tr_hidden, "hidden channels");
    tr->add_option("--epochs", tr_epochs, "epochs");
    tr->add_option("--patience", tr_patience, "early stop after this many epochs without improvement (0: off)");
    tr->add_option("--batch", tr_batch, "mini-batch size");
    tr->add_option("--lr", tr_lr, "Adam learning rate");
    tr->add_option("--ensemble", tr_ensemble, "number of models (seeds derived from the run seed)");
    tr->add_flag("--paper-scale", tr_paper, "10000 epochs without early stopping");
    handlers["train"] = [&](const Context& ctx) {
        const Dataset train = read_dataset(tr_data);
        const Dataset valid = read_dataset(tr_valid);
        if (train.split == valid.split && train.seed == valid.seed)
            throw DomainError("train: training and validation data come from the same seed stream");
        const Normalizer norm = Normalizer::from_limits(ctx.cfg.geometry.limits);
        const WindowSet wt = make_windows(train, tr_L, norm);
        const WindowSet wv = make_windows(valid, tr_L, norm);
        std::vector<double> q1s;
        for (const auto& p : train.parts) q1s.push_back(p.q1);
        TrainOptions opts;
        opts.lr = tr_lr;
        opts.epochs = tr_paper ? 10000 : tr_epochs;
        opts.patience = tr_paper ? 0 : tr_patience;
        opts.batch = tr_batch;
        if (tr_ensemble < 1) throw UsageError("--ensemble must be at least 1");
        std::vector<std::future<TrainResult>> jobs;
        for (int m = 0; m < tr_ensemble; ++m) {
            TcnConfig cfg;
            cfg.L = tr_L;
            cfg.channels_hidden = tr_hidden;
            cfg.seed = derive_seed(ctx.seed, 0x7000 + m);
            jobs.push_back(std::async(std::launch::async, [=] { return train_tcn(cfg, norm, wt, wv, opts); }));
        }
        for (int m = 0; m < tr_ensemble; ++m) {
            TrainResult r = jobs[m].get();
            r.best.set_trained_q1(q1s);
            save_checkpoint(r.best, out_file(ctx, fmt::format("model_{}.json", m)));
            std::ofstream log(out_file(ctx, fmt::format("train_log_{}.csv", m)));
            log << "epoch,train_mse,valid_mse\n";
            for (std::size_t i = 0; i < r.epochs.size(); ++i)
                log << r.epochs[i] << ',' << fmt::format("{:.8g},{:.8g}", r.train_curve[i], r.valid_curve[i]) << '\n';
            fmt::print("model {}: best valid mse {:.6f} at epoch {} of {}{}\n", m, r.best_valid, r.best_epoch,
                       r.epochs.empty() ? 0 : r.epochs.back(), r.stopped_early ? " (early stop)" : "");
        }
        return 0;
    };

    // evaluate-tracking
    std::string et_q1 = "5,25,45";
    std::vector<std::string> et_models;
    std::size_t et_points = 950;
    auto* et = add("evaluate-tracking", "random trajectory tracking, calibrated vs uncalibrated");
    et->add_option("--q1", et_q1, "unseen translations (mm)");
    et->add_option("--models", et_models, "checkpoints (omit for uncalibrated only)");
    et->add_option("--n-points", et_points, "trajectory length");
    handlers["evaluate-tracking"] = [&](const Context& ctx) {
        std::optional<CompensationController> ctrl;
        if (!et_models.empty()) ctrl.emplace(load_models(et_models));
        TrackingOptions opts;
        opts.n_points = et_points;
        std::vector<TrackingReport> reps;
        json all = json::array();
        for (double q1 : parse_list(et_q1)) {
            const auto r = run_tracking_eval(ctrl ? &*ctrl : nullptr, q1, ctx.cfg.plant,
                                             derive_seed(ctx.seed, 0x500 + static_cast<std::uint64_t>(q1 * 1000)), opts);
            fmt::print("q1 = {} mm ({} points)\n", q1, r.uncalibrated.count);
            print_stats_row("  uncal MAE", r.uncalibrated.mae);
            if (r.calibrated) {
                print_stats_row("  cal MAE", r.calibrated->mae);
                print_stats_row("  reduction %", 100.0 * r.improvement);
            }
            reps.push_back(r);
            all.push_back(tracking_to_json(r));
        }
        write_tracking_csv(reps, out_file(ctx, "tracking.csv"));
        write_json(all, out_file(ctx, "tracking.json"));
        return 0;
    };

    // evaluate-box
    std::vector<std::string> eb_models;
    int eb_trials = 15;
    auto* eb = add("evaluate-box", "box pointing task");
    eb->add_option("--models", eb_models, "checkpoints (omit for uncalibrated only)");
    eb->add_option("--trials", eb_trials, "number of trials");
    handlers["evaluate-box"] = [&](const Context& ctx) {
        std::optional<CompensationController> ctrl;
        if (!eb_models.empty()) ctrl.emplace(load_models(eb_models), true, ctx.cfg.geometry.limits);
        BoxOptions opts;
        opts.n_trials = eb_trials;
        opts.box_x_offset = ctx.cfg.box_x_offset;
        const BoxReport r = run_box_pointing(ctrl ? &*ctrl : nullptr, ctx.cfg.plant, ctx.cfg.geometry,
                                             derive_seed(ctx.seed, 0x600), opts);
        auto row = [](const char* who, const PositionStats& s) {
            fmt::print("{:<13} x {:6.2f}  y {:6.2f}  z {:6.2f}  euclid {:6.2f} +- {:5.2f} mm\n", who, s.mae.x(), s.mae.y(),
                       s.mae.z(), s.euclid_mean, s.euclid_sd);
        };
        row("uncalibrated", r.uncalibrated);
        if (r.calibrated) {
            row("calibrated", *r.calibrated);
            fmt::print("euclidean reduction {:.1f}%\n", 100.0 * r.improvement());
        }
        fmt::print("trials run {}, skipped {}\n", r.trials_run, r.trials_skipped);
        for (const auto& line : r.log) fmt::print(stderr, "{}\n", line);
        write_box_csv(r, out_file(ctx, "box.csv"));
        write_json(box_to_json(r), out_file(ctx, "box.json"));
        return 0;
    };

    // compensate
    std::vector<std::string> cm_models;
    std::string cm_input, cm_output = "calibrated.csv";
    std::size_t cm_probe = 0;
    bool cm_clamp = false;
    auto* cm = add("compensate", "calibrated commands for a desired trajectory CSV");
    cm->add_option("--models", cm_models, "checkpoints")->required();
    cm->add_option("--input", cm_input, "desired trajectory CSV (t,q1..q7)")->required();
    cm->add_option("--output", cm_output, "file name inside the output directory");
    cm->add_option("--latency-probe", cm_probe, "also time this many compensate() calls");
    cm->add_flag("--clamp", cm_clamp, "clamp calibrated commands to the joint limits");
    handlers["compensate"] = [&](const Context& ctx) {
        CompensationController ctrl(load_models(cm_models), cm_clamp, ctx.cfg.geometry.limits);
        std::vector<JointConfig> out;
        for (const auto& q : read_joint_csv(cm_input)) out.push_back(ctrl.compensate(q));
        write_joint_csv(out, out_file(ctx, cm_output));
        fmt::print("{} steps written to {}\n", out.size(), out_file(ctx, cm_output));
        if (cm_probe > 0) {
            const LatencyStats s = ctrl.latency_probe(cm_probe);
            fmt::print("latency p50 {:.1f} us, p99 {:.1f} us\n", s.p50_us, s.p99_us);
            write_json({{"p50_us", s.p50_us}, {"p99_us", s.p99_us}, {"max_us", s.max_us}, {"samples", s.samples}},
                       out_file(ctx, "latency.json"));
        }
        return 0;
    };

    // latency
    std::vector<std::string> lt_models;
    std::size_t lt_n = 10000;
    auto* lt = add("latency", "compensate() latency of an ensemble");
    lt->add_option("--models", lt_models, "checkpoints")->required();
    lt->add_option("--n", lt_n, "number of timed calls");
    handlers["latency"] = [&](const Context& ctx) {
        CompensationController ctrl(load_models(lt_models), false, ctx.cfg.geometry.limits);
        const LatencyStats s = ctrl.latency_probe(lt_n, ctx.seed);
        fmt::print("n = {}  p50 = {:.1f} us  p99 = {:.1f} us  max = {:.1f} us\n", s.samples, s.p50_us, s.p99_us,
                   s.max_us);
        write_json({{"p50_us", s.p50_us}, {"p99_us", s.p99_us}, {"max_us", s.max_us}, {"samples", s.samples}},
                   out_file(ctx, "latency.json"));
        return 0;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        const Context ctx = make_context(common, name);
        const int rc = handlers.at(name)(ctx);
        write_manifest(ctx, name, *sub);
        return rc;
    } catch (const UsageError& e) {
        fmt::print(stderr, "usage error: {}\n\n{}", e.what(), sub->help());
        return 2;
    } catch (const DomainError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 1;
    } catch (const NumericalError& e) {
        fmt::print(stderr, "numerical error: {}\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
