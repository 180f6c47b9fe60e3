// SPDX-License-Identifier: Apache-2.0
//
// coba CLI: replay recorded loss trajectories, train the synthetic
// multi-task suite, benchmark scheduler overhead, and run self-tests.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coba/errors.hpp"
#include "coba/replay.hpp"
#include "coba/scheduler.hpp"
#include "coba/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct ReplayArgs {
    std::string input;
    std::string output;
    std::string scheduler = "coba";
    int m = 32;
    int n = -1; // default 2*m
    int w = -1; // default m
    double tau = 5.0;
    double b = 0.5;
};

int cmd_replay(const ReplayArgs& args) {
    const coba::LossTrajectory traj = coba::load_trajectory_csv(args.input);

    coba::CobaConfig config;
    config.num_tasks = static_cast<int>(traj.num_tasks());
    config.val_batches = args.m;
    config.window = args.n > 0 ? args.n : 2 * args.m;
    config.warmup = args.w >= 0 ? args.w : args.m;
    config.tau = args.tau;
    const coba::SchedulerKind kind = coba::SchedulerKind::from_name(args.scheduler, args.b);

    const coba::WeightTrace trace = coba::run_replay(traj, kind, config);
    coba::write_trace_csv(trace, args.output);

    std::cout << "replay: steps=" << trace.records.size() << " tasks=" << traj.num_tasks()
              << " scheduler=" << kind.name() << " final_w=[";
    const auto& w = trace.records.back().weights;
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::cout << (i ? "," : "") << w[i];
    }
    std::cout << "] -> " << args.output << "\n";
    return kExitOk;
}

struct TrainArgs {
    std::string config_path;
    std::string output_dir;
    // overrides, applied only when the flag was given
    double lr = 0.0;
    std::int64_t t_max = 0;
    std::int64_t seed = -1;
    std::string scheduler;
    int n = 0;
    int w = -1;
    double tau = 0.0;
    double b = 0.0;
    bool has_lr = false, has_t_max = false, has_seed = false, has_scheduler = false;
    bool has_n = false, has_w = false, has_tau = false, has_b = false;
};

int cmd_train(const TrainArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) {
        throw coba::IoError("cannot open config '" + args.config_path + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    coba::ExperimentConfig config = coba::experiment_config_from_json(text);

    // flag > file > default
    if (args.has_lr) {
        config.lr = args.lr;
    }
    if (args.has_t_max) {
        config.t_max = args.t_max;
    }
    if (args.has_seed) {
        config.seed = static_cast<std::uint64_t>(args.seed);
    }
    if (args.has_scheduler) {
        config.kind = coba::SchedulerKind::from_name(args.scheduler, config.kind.lbtw_b);
    }
    if (args.has_n) {
        config.scheduler.window = args.n;
    }
    if (args.has_w) {
        config.scheduler.warmup = args.w;
    }
    if (args.has_tau) {
        config.scheduler.tau = args.tau;
    }
    if (args.has_b) {
        config.kind.lbtw_b = args.b;
    }
    config.validate();

    const coba::SyntheticSuite suite = coba::SyntheticSuite::make(config.suite);
    const coba::TrainReport report =
        coba::run_experiment(suite, config.kind, config.scheduler, config.lr, config.t_max,
                             config.seed, config.batch_size);

    namespace fs = std::filesystem;
    fs::create_directories(args.output_dir);
    const fs::path dir(args.output_dir);
    coba::write_trace_csv(report.trace, (dir / "trace.csv").string());
    {
        std::ofstream out(dir / "summary.json");
        if (!out) {
            throw coba::IoError("cannot write summary under '" + args.output_dir + "'");
        }
        out << coba::train_summary_json(report) << "\n";
    }

    std::cout << "train: steps=" << report.trace.records.size()
              << " best_step=" << report.best_step << " runtime_ms=" << report.runtime_ms
              << " -> " << args.output_dir << "\n";
    if (report.diverged) {
        std::cerr << "training diverged at step " << report.diverged_at << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

struct BenchArgs {
    std::vector<int> k_values{2, 8, 32, 64};
    int n = 64;
    std::int64_t t = 10000;
};

double measure_ns_per_step(int k, int n, std::int64_t t) {
    coba::CobaConfig config;
    config.num_tasks = k;
    config.window = n;
    config.warmup = n / 2;
    config.val_batches = std::max(1, n / 2);

    // Pre-generate the loss stream so only scheduler work is timed.
    std::vector<std::vector<double>> losses(static_cast<std::size_t>(t));
    for (std::int64_t s = 0; s < t; ++s) {
        auto& row = losses[static_cast<std::size_t>(s)];
        row.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            row[static_cast<std::size_t>(i)] =
                1.0 / (1.0 + 0.001 * static_cast<double>(s) * (1.0 + 0.1 * i)) + 0.1;
        }
    }

    coba::Scheduler scheduler(coba::SchedulerKind::coba(), config);
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& row : losses) {
        scheduler.step(row);
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double ns = std::chrono::duration_cast<std::chrono::duration<double, std::nano>>(
                          t1 - t0)
                          .count();
    return ns / static_cast<double>(t);
}

int cmd_bench(const BenchArgs& args) {
    if (args.k_values.empty()) {
        throw coba::ArgumentError("bench: need at least one K value");
    }
    std::vector<int> ks = args.k_values;
    std::sort(ks.begin(), ks.end());
    for (int k : ks) {
        if (k < 2) {
            throw coba::ArgumentError("bench: K values must be at least 2");
        }
    }

    std::cout << "scheduler step cost (N=" << args.n << ", T=" << args.t << ")\n";
    std::cout << "  K    ns/step\n";
    std::vector<double> cost(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        cost[i] = measure_ns_per_step(ks[i], args.n, args.t);
        std::printf("%4d %10.1f\n", ks[i], cost[i]);
    }

    if (ks.size() >= 3) {
        // Linear fit through the two smallest K, extrapolated to the largest.
        const double slope =
            (cost[1] - cost[0]) / static_cast<double>(ks[1] - ks[0]);
        const double predicted = cost[0] + slope * static_cast<double>(ks.back() - ks[0]);
        const double ratio = cost.back() / predicted;
        std::printf("linearity: measured(K=%d) / linear-fit = %.2f (limit 2.00)\n", ks.back(),
                    ratio);
        if (!(ratio <= 2.0)) {
            std::cerr << "bench: per-step cost grows superlinearly in K\n";
            return kExitRuntime;
        }
    } else if (ks.size() == 2) {
        std::printf("cost ratio K=%d vs K=%d: %.2f (K ratio %.2f)\n", ks[1], ks[0],
                    cost[1] / cost[0], static_cast<double>(ks[1]) / ks[0]);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// selftest

struct CheckList {
    bool all_ok = true;

    void check(const std::string& name, bool ok) {
        std::cout << (ok ? "PASS  " : "FAIL  ") << name << "\n";
        all_ok = all_ok && ok;
    }
};

int cmd_selftest() {
    CheckList list;
    const bool inject_fault = std::getenv("COBA_SELFTEST_INJECT_FAULT") != nullptr;

    {
        const auto s = coba::stable_softmax(std::vector<double>{0.0, 0.0, 0.0});
        list.check("softmax.equal_inputs_uniform",
                   std::abs(s[0] - 1.0 / 3) < 1e-15 && std::abs(s[2] - 1.0 / 3) < 1e-15);
        const auto big = coba::stable_softmax(std::vector<double>{1000.0, 1000.0});
        list.check("softmax.no_overflow", std::abs(big[0] - 0.5) < 1e-15);
        const auto pair = coba::stable_softmax(std::vector<double>{1.0, -1.0});
        list.check("softmax.two_sided", std::abs(pair[0] - 0.88080) < 1e-4);
    }

    {
        bool ok = true;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int rep = 0; rep < 200 && ok; ++rep) {
            const int k = 2 + static_cast<int>(rng() % 15);
            std::vector<double> slopes(static_cast<std::size_t>(k));
            for (double& s : slopes) {
                s = u(rng) * 0.01;
            }
            const auto rcs = coba::relative_convergence_scores(slopes);
            double sum = 0.0;
            for (double v : rcs) {
                ok = ok && v >= 0.0;
                sum += v;
            }
            ok = ok && std::abs(sum - 1.0) < 1e-9;
        }
        list.check("rcs.simplex_closure", ok);
    }

    {
        bool ok = true;
        double alpha = -0.01;
        coba::DivergenceState df(5.0, 1e-12);
        for (int s = 0; s < 1000; ++s) {
            double a = alpha;
            if (inject_fault && s == 500) {
                a = -a; // corrupt the stream: identity must now fail
            }
            if (df.step(a) != 1.0) {
                ok = false;
                break;
            }
        }
        list.check("df.constant_slope_identity", ok);
    }

    {
        coba::LossRatioWindow win(16);
        for (int s = 0; s < 10; ++s) {
            win.push(s, 1.0 - 0.01 * s);
        }
        const auto est = win.fit();
        list.check("ols.exact_line",
                   std::abs(est.alpha + 0.01) < 1e-12 && std::abs(est.beta - 1.0) < 1e-12);

        coba::LossRatioWindow small(8);
        small.push(0, 1.0);
        small.push(1, 0.9);
        small.push(2, 0.86);
        const auto e2 = small.fit();
        list.check("ols.three_point_case",
                   std::abs(e2.alpha + 0.07) < 1e-9 && std::abs(e2.beta - 0.99) < 1e-9);
    }

    {
        coba::CobaConfig config = coba::CobaConfig::for_tasks(3, 4);
        coba::Scheduler sched(coba::SchedulerKind::coba(), config);
        bool ok = true;
        const std::vector<double> losses{2.0, 1.0, 0.5};
        for (int s = 0; s < config.warmup; ++s) {
            const auto rec = sched.step(losses);
            for (double w : rec.weights) {
                ok = ok && w == 1.0 / 3.0;
            }
        }
        list.check("scheduler.warmup_uniform", ok);
    }

    {
        const std::vector<double> current{0.81, 0.25};
        const std::vector<double> initial{1.0, 1.0};
        const auto w = coba::lbtw_weights(current, initial, 0.5);
        list.check("lbtw.example",
                   std::abs(w[0] - 0.9 / 1.4) < 1e-12 && std::abs(w[1] - 0.5 / 1.4) < 1e-12);
    }

    {
        coba::SlopeHistory conv(8), div(8);
        for (int i = 0; i < 8; ++i) {
            conv.push(-0.01);
            div.push(0.01);
        }
        std::vector<coba::SlopeHistory> hist{conv, div};
        const auto acs = coba::absolute_convergence_scores(hist);
        list.check("acs.sign_rule", std::abs(acs[0] - 0.88080) < 1e-4);
    }

    if (!list.all_ok) {
        std::cerr << "selftest failed\n";
        return kExitRuntime;
    }
    std::cout << "selftest: all checks passed\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"convergence-balancing weight scheduler for multi-task training"};
    app.require_subcommand(1);

    ReplayArgs replay_args;
    CLI::App* replay = app.add_subcommand(
        "replay", "run a scheduler over a recorded loss-trajectory CSV");
    replay->add_option("--input", replay_args.input, "trajectory CSV (step,loss_<name>,...)")
        ->required();
    replay->add_option("--output", replay_args.output, "weight/diagnostic trace CSV")
        ->required();
    replay->add_option("--scheduler", replay_args.scheduler, "coba | uniform | lbtw")
        ->check(CLI::IsMember({"coba", "uniform", "lbtw"}));
    replay->add_option("--m", replay_args.m, "validation batch count M (default 32)");
    replay->add_option("--n", replay_args.n, "slope window N (default 2M)");
    replay->add_option("--w", replay_args.w, "warm-up steps W (default M)");
    replay->add_option("--tau", replay_args.tau, "divergence temperature (default 5)");
    replay->add_option("--b", replay_args.b, "LBTW exponent in (0,1] (default 0.5)");

    TrainArgs train_args;
    CLI::App* train =
        app.add_subcommand("train", "train the synthetic multi-task suite from a JSON config");
    train->add_option("--config", train_args.config_path, "experiment config JSON")->required();
    train->add_option("--output-dir", train_args.output_dir,
                      "directory for trace.csv and summary.json")
        ->required();
    auto* lr_opt = train->add_option("--lr", train_args.lr, "override learning rate");
    auto* tmax_opt = train->add_option("--t-max", train_args.t_max, "override iteration count");
    auto* seed_opt = train->add_option("--seed", train_args.seed, "override seed");
    auto* sched_opt = train->add_option("--scheduler", train_args.scheduler,
                                        "override scheduler kind")
                          ->check(CLI::IsMember({"coba", "uniform", "lbtw"}));
    auto* n_opt = train->add_option("--n", train_args.n, "override slope window N");
    auto* w_opt = train->add_option("--w", train_args.w, "override warm-up W");
    auto* tau_opt = train->add_option("--tau", train_args.tau, "override tau");
    auto* b_opt = train->add_option("--b", train_args.b, "override LBTW exponent");

    BenchArgs bench_args;
    CLI::App* bench =
        app.add_subcommand("bench", "measure scheduler per-step cost as K grows");
    bench->add_option("--k", bench_args.k_values, "task counts to time (default 2 8 32 64)");
    bench->add_option("--n", bench_args.n, "slope window N (default 64)");
    bench->add_option("--t", bench_args.t, "steps per measurement (default 10000)");

    CLI::App* selftest =
        app.add_subcommand("selftest", "run embedded invariant checks, exit 0 iff all pass");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (replay->parsed()) {
            return cmd_replay(replay_args);
        }
        if (train->parsed()) {
            train_args.has_lr = lr_opt->count() > 0;
            train_args.has_t_max = tmax_opt->count() > 0;
            train_args.has_seed = seed_opt->count() > 0;
            train_args.has_scheduler = sched_opt->count() > 0;
            train_args.has_n = n_opt->count() > 0;
            train_args.has_w = w_opt->count() > 0;
            train_args.has_tau = tau_opt->count() > 0;
            train_args.has_b = b_opt->count() > 0;
            return cmd_train(train_args);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_args);
        }
        if (selftest->parsed()) {
            return cmd_selftest();
        }
    } catch (const coba::TrainingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const coba::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
