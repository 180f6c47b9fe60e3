// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "coba/errors.hpp"
#include "coba/scheduler.hpp"
#include "oracles.hpp"

using coba::CobaConfig;
using coba::lbtw_weights;
using coba::Scheduler;
using coba::SchedulerKind;
using coba::uniform_weights;
using coba::WeightRecord;

namespace {

// Deterministic two-regime loss streams for exercising the full engine.
std::vector<std::vector<double>> make_stream(int k, int steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
        auto& row = out[static_cast<std::size_t>(t)];
        row.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const double rate = 0.002 * (1.0 + 0.5 * i);
            row[static_cast<std::size_t>(i)] =
                (1.5 + 0.2 * i) * std::exp(-rate * t) + 0.3 + jitter(rng);
        }
    }
    return out;
}

} // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(Scheduler(SchedulerKind::coba(), CobaConfig{1, 4, 2, 2, 5.0, 1e-12, 0}),
                    coba::ConfigError);
    CHECK_THROWS_AS(Scheduler(SchedulerKind::coba(), CobaConfig{2, 1, 2, 2, 5.0, 1e-12, 0}),
                    coba::ConfigError);
    CHECK_THROWS_AS(Scheduler(SchedulerKind::coba(), CobaConfig{2, 4, -1, 2, 5.0, 1e-12, 0}),
                    coba::ConfigError);
    CHECK_THROWS_AS(Scheduler(SchedulerKind::coba(), CobaConfig{2, 4, 2, 0, 5.0, 1e-12, 0}),
                    coba::ConfigError);
    CHECK_THROWS_AS(Scheduler(SchedulerKind::coba(), CobaConfig{2, 4, 2, 2, 1.0, 1e-12, 0}),
                    coba::ConfigError);
    CHECK_THROWS_AS(Scheduler(SchedulerKind::lbtw(0.0), CobaConfig::for_tasks(2, 2)),
                    coba::ConfigError);
    CHECK_THROWS_AS(Scheduler(SchedulerKind::lbtw(1.5), CobaConfig::for_tasks(2, 2)),
                    coba::ConfigError);
    CHECK_NOTHROW(Scheduler(SchedulerKind::lbtw(0.5), CobaConfig::for_tasks(2, 2)));

    const CobaConfig c = CobaConfig::for_tasks(3, 8);
    CHECK(c.window == 16);
    CHECK(c.warmup == 8);
    CHECK(c.tau == 5.0);
}

TEST_CASE("fresh scheduler starts uniform") {
    Scheduler s(SchedulerKind::coba(), CobaConfig::for_tasks(3, 4));
    REQUIRE(s.current_weights().size() == 3);
    for (double w : s.current_weights()) {
        CHECK(w == 1.0 / 3.0);
    }
    CHECK(s.steps_taken() == 0);
}

TEST_CASE("warm-up weights are bitwise 1/K for every kind") {
    const auto stream = make_stream(4, 12, 99);
    for (const auto kind :
         {SchedulerKind::coba(), SchedulerKind::uniform(), SchedulerKind::lbtw(0.5)}) {
        CobaConfig config = CobaConfig::for_tasks(4, 16);
        config.warmup = 12;
        Scheduler s(kind, config);
        for (const auto& row : stream) {
            const auto rec = s.step(row);
            for (double w : rec.weights) {
                CHECK(w == 0.25);
            }
            // diagnostics are computed during warm-up too
            CHECK(rec.rcs.size() == 4);
            CHECK(rec.acs.size() == 4);
            CHECK(rec.df >= 0.0);
            CHECK(rec.df <= 1.0);
        }
    }
}

TEST_CASE("identical task streams keep weights uniform for coba and lbtw") {
    for (const auto kind : {SchedulerKind::coba(), SchedulerKind::lbtw(0.5)}) {
        CobaConfig config = CobaConfig::for_tasks(3, 4);
        Scheduler s(kind, config);
        for (int t = 0; t < 150; ++t) {
            const double loss = 2.0 * std::exp(-0.01 * t) + 0.5 + 0.05 * std::sin(0.3 * t);
            const auto rec = s.step(std::vector<double>(3, loss));
            for (double w : rec.weights) {
                CHECK(std::abs(w - 1.0 / 3.0) < 1e-9);
            }
        }
    }
}

TEST_CASE("step validates arity and finiteness") {
    Scheduler s(SchedulerKind::coba(), CobaConfig::for_tasks(2, 2));
    CHECK_THROWS_AS(s.step(std::vector<double>{1.0}), coba::ArgumentError);
    CHECK_THROWS_AS(s.step(std::vector<double>{1.0, std::nan("")}), coba::DataError);
}

TEST_CASE("uniform_weights") {
    const auto w4 = uniform_weights(4);
    for (double w : w4) {
        CHECK(w == 0.25);
    }
    CHECK(uniform_weights(1) == std::vector<double>{1.0});
    const auto w5 = uniform_weights(5);
    CHECK(std::abs(std::accumulate(w5.begin(), w5.end(), 0.0) - 1.0) < 1e-15);
    CHECK_THROWS_AS(uniform_weights(0), coba::ArgumentError);
}

TEST_CASE("lbtw_weights") {
    {
        const auto w = lbtw_weights(std::vector<double>{1.0, 1.0, 1.0},
                                    std::vector<double>{1.0, 1.0, 1.0}, 0.5);
        for (double v : w) {
            CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        }
    }
    {
        // ratios (0.81, 0.25), b = 0.5 -> raw (0.9, 0.5) -> (9/14, 5/14)
        const auto w = lbtw_weights(std::vector<double>{0.81, 0.25},
                                    std::vector<double>{1.0, 1.0}, 0.5);
        CHECK(w[0] == doctest::Approx(0.642857142857143).epsilon(1e-12));
        CHECK(w[1] == doctest::Approx(0.357142857142857).epsilon(1e-12));
    }
    {
        const auto w =
            lbtw_weights(std::vector<double>{0.81}, std::vector<double>{1.0}, 0.5);
        CHECK(w == std::vector<double>{1.0});
    }
    {
        // negative current losses clamp to zero before normalization
        const auto w = lbtw_weights(std::vector<double>{-1.0, 1.0},
                                    std::vector<double>{1.0, 1.0}, 0.5);
        CHECK(w[0] == 0.0);
        CHECK(w[1] == 1.0);
    }
    CHECK_THROWS_AS(lbtw_weights(std::vector<double>{1.0}, std::vector<double>{0.0}, 0.5),
                    coba::DataError);
    CHECK_THROWS_AS(lbtw_weights(std::vector<double>{1.0}, std::vector<double>{1.0}, 0.0),
                    coba::ArgumentError);
    CHECK_THROWS_AS(lbtw_weights(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}, 0.5),
                    coba::ArgumentError);
}

TEST_CASE("full engine trace matches the from-scratch oracle") {
    const int k = 3;
    const int steps = 200;
    CobaConfig config = CobaConfig::for_tasks(k, 8); // N=16, W=8
    const auto stream = make_stream(k, steps, 4242);

    Scheduler s(SchedulerKind::coba(), config);
    std::vector<WeightRecord> records;
    for (const auto& row : stream) {
        records.push_back(s.step(row));
    }

    const auto ref = oracle::coba_rescore_reference(stream, config.window, config.warmup,
                                                    static_cast<long double>(config.tau));
    for (int t = 0; t < steps; ++t) {
        const auto& rec = records[static_cast<std::size_t>(t)];
        for (int i = 0; i < k; ++i) {
            const auto ti = static_cast<std::size_t>(t);
            const auto ii = static_cast<std::size_t>(i);
            CHECK(std::abs(rec.slopes[ii] - static_cast<double>(ref.slopes[ti][ii])) < 1e-10);
            CHECK(std::abs(rec.loss_ratios[ii] - static_cast<double>(ref.ratios[ti][ii])) <
                  1e-12);
            CHECK(std::abs(rec.rcs[ii] - static_cast<double>(ref.rcs[ti][ii])) < 1e-9);
            CHECK(std::abs(rec.acs[ii] - static_cast<double>(ref.acs[ti][ii])) < 1e-9);
            CHECK(std::abs(rec.weights[ii] - static_cast<double>(ref.weights[ti][ii])) < 1e-9);
        }
        CHECK(std::abs(rec.df - static_cast<double>(ref.df[static_cast<std::size_t>(t)])) <
              1e-9);
    }
}

TEST_CASE("coba weights stay inside the rcs/acs hull after warm-up") {
    CobaConfig config = CobaConfig::for_tasks(4, 4);
    Scheduler s(SchedulerKind::coba(), config);
    const auto stream = make_stream(4, 120, 7);
    for (int t = 0; t < 120; ++t) {
        const auto rec = s.step(stream[static_cast<std::size_t>(t)]);
        if (t < config.warmup) {
            continue;
        }
        for (std::size_t i = 0; i < 4; ++i) {
            const double lo = std::min(rec.rcs[i], rec.acs[i]);
            const double hi = std::max(rec.rcs[i], rec.acs[i]);
            CHECK(rec.weights[i] >= lo - 1e-12);
            CHECK(rec.weights[i] <= hi + 1e-12);
        }
        const double sum = std::accumulate(rec.weights.begin(), rec.weights.end(), 0.0);
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("weights stay on the simplex for every kind") {
    const auto stream = make_stream(3, 120, 555);
    for (const auto kind :
         {SchedulerKind::coba(), SchedulerKind::uniform(), SchedulerKind::lbtw(0.5)}) {
        Scheduler s(kind, CobaConfig::for_tasks(3, 4));
        for (const auto& row : stream) {
            const auto rec = s.step(row);
            const double sum =
                std::accumulate(rec.weights.begin(), rec.weights.end(), 0.0);
            CHECK(std::abs(sum - 1.0) < 1e-9);
            for (double w : rec.weights) {
                CHECK(w >= 0.0);
            }
        }
    }
}

TEST_CASE("identical schedulers replay identical record sequences") {
    const auto stream = make_stream(3, 80, 321);
    CobaConfig config = CobaConfig::for_tasks(3, 4);
    Scheduler a(SchedulerKind::coba(), config);
    Scheduler b(SchedulerKind::coba(), config);
    for (const auto& row : stream) {
        const auto ra = a.step(row);
        const auto rb = b.step(row);
        CHECK(ra.weights == rb.weights);
        CHECK(ra.rcs == rb.rcs);
        CHECK(ra.acs == rb.acs);
        CHECK(ra.slopes == rb.slopes);
        CHECK(ra.df == rb.df);
    }
}

TEST_CASE("a task turning upward loses weight and drags df below 1") {
    // task 0 bottoms out quickly and turns upward at step 120; task 1
    // keeps converging.
    const int turn = 120;
    const int n = 32;
    CobaConfig config = CobaConfig::for_tasks(2, n / 2); // N=32, W=16
    Scheduler s(SchedulerKind::coba(), config);

    bool df_dropped = false;
    WeightRecord last;
    for (int t = 0; t < turn + n + 20; ++t) {
        const double rise = t > turn ? 0.004 * (t - turn) : 0.0;
        const std::vector<double> losses{
            0.35 * std::exp(-0.05 * t) + 0.65 + rise,
            0.5 * std::exp(-0.002 * t) + 0.5,
        };
        last = s.step(losses);
        if (t > turn && last.df < 1.0) {
            df_dropped = true;
        }
    }
    CHECK(df_dropped);
    CHECK(last.df < 1.0);
    CHECK(last.weights[0] < 0.5);
}

TEST_CASE("scheduler config json round trip") {
    CobaConfig config = CobaConfig::for_tasks(5, 12);
    config.tau = 7.5;
    const auto text = coba::scheduler_config_to_json(SchedulerKind::lbtw(0.25), config);
    const auto [kind, parsed] = coba::scheduler_config_from_json(text);
    CHECK(kind.type == SchedulerKind::Type::kLbtw);
    CHECK(kind.lbtw_b == 0.25);
    CHECK(parsed.num_tasks == 5);
    CHECK(parsed.window == 24);
    CHECK(parsed.warmup == 12);
    CHECK(parsed.val_batches == 12);
    CHECK(parsed.tau == 7.5);
    CHECK(parsed.eps_den == 1e-12);

    // N and W default from M when missing
    const auto [k2, c2] = coba::scheduler_config_from_json(R"({"kind":"coba","K":3,"M":10})");
    CHECK(k2.type == SchedulerKind::Type::kCoba);
    CHECK(c2.window == 20);
    CHECK(c2.warmup == 10);

    CHECK_THROWS_AS(coba::scheduler_config_from_json("{not json"), coba::ConfigError);
    CHECK_THROWS_AS(coba::scheduler_config_from_json(R"({"kind":"coba"})"), coba::ConfigError);
    CHECK_THROWS_AS(coba::scheduler_config_from_json(R"({"kind":"nope","K":2})"),
                    coba::ConfigError);
}
