// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coba/loss_window.hpp"
#include "coba/scores.hpp"

namespace coba {

/// Which weighting rule a Scheduler applies once warm-up is over.
struct SchedulerKind {
    enum class Type { kCoba, kUniform, kLbtw };

    Type type = Type::kCoba;
    double lbtw_b = 0.5; ///< LBTW exponent, only meaningful for kLbtw

    static SchedulerKind coba() { return {Type::kCoba, 0.5}; }
    static SchedulerKind uniform() { return {Type::kUniform, 0.5}; }
    static SchedulerKind lbtw(double b) { return {Type::kLbtw, b}; }

    void validate() const;
    std::string name() const;
    /// Parses "coba" | "uniform" | "lbtw"; throws ConfigError otherwise.
    static SchedulerKind from_name(const std::string& name, double b = 0.5);
};

/// Scheduler hyperparameters.
///
/// window defaults to 2 * val_batches and warmup to val_batches; use
/// for_tasks() to get those defaults, or set the fields explicitly.
struct CobaConfig {
    int num_tasks = 2;    ///< K, at least 2
    int window = 2;       ///< N, slope-fit window length, at least 2
    int warmup = 1;       ///< W, steps with forced-uniform weights
    int val_batches = 1;  ///< M, number of validation mini-batches
    double tau = 5.0;     ///< divergence-factor temperature, > 1
    double eps_den = 1e-12;
    std::size_t df_history_cap = 0; ///< 0 = softmax over the full history

    static CobaConfig for_tasks(int num_tasks, int val_batches);

    void validate() const; ///< throws ConfigError
};

/// One step's diagnostics: the blended weights plus everything that went
/// into them.
struct WeightRecord {
    std::int64_t step = -1;
    std::vector<double> weights;
    std::vector<double> rcs;
    std::vector<double> acs;
    std::vector<double> slopes;
    std::vector<double> loss_ratios;
    double df = 1.0;
};

/// Uniform baseline weights [1/k, ..., 1/k].
std::vector<double> uniform_weights(int k);

/// LBTW baseline: w_i proportional to (current_i / initial_i)^b,
/// normalized to the simplex. Negative ratios clamp to 0; if every raw
/// weight vanishes the result is uniform.
///
/// Throws DataError for non-positive initial losses, ArgumentError for
/// arity mismatch or b outside (0, 1].
std::vector<double> lbtw_weights(std::span<const double> current_losses,
                                 std::span<const double> initial_losses, double b,
                                 double eps_den = 1e-12);

/// The per-iteration weight engine.
///
/// Feed one validation loss per task per step. Every step updates the
/// loss-ratio windows, slope fits, slope histories, and the divergence
/// tracker, and records full diagnostics regardless of kind — the kind
/// only decides which weight formula fills WeightRecord::weights. During
/// warm-up (step < warmup) weights are pinned to exactly 1/K for every
/// kind.
///
/// A Scheduler is a single-threaded state machine: one step() at a time.
/// Distinct instances are independent.
class Scheduler {
  public:
    Scheduler(SchedulerKind kind, CobaConfig config);

    /// Advance one iteration. val_losses must hold one finite value per task.
    WeightRecord step(std::span<const double> val_losses);

    const WeightRecord& last_record() const noexcept { return last_; }
    std::span<const double> current_weights() const noexcept { return last_.weights; }
    std::int64_t steps_taken() const noexcept { return t_; }
    const CobaConfig& config() const noexcept { return config_; }
    const SchedulerKind& kind() const noexcept { return kind_; }

  private:
    SchedulerKind kind_;
    CobaConfig config_;
    std::int64_t t_ = 0;
    std::vector<LossRatioWindow> windows_;
    std::vector<SlopeHistory> histories_;
    DivergenceState divergence_;
    WeightRecord last_;
};

/// Flat JSON round-trip for (kind, config):
/// {"kind": "coba", "K": 3, "N": 64, "W": 32, "M": 32,
///  "tau": 5.0, "b": 0.5, "eps_den": 1e-12}
/// Missing N/W default to 2M/M. Throws ConfigError on malformed input.
std::string scheduler_config_to_json(const SchedulerKind& kind, const CobaConfig& config);
std::pair<SchedulerKind, CobaConfig> scheduler_config_from_json(const std::string& text);

} // namespace coba
