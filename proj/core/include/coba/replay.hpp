// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "coba/scheduler.hpp"

namespace coba {

/// A rectangular matrix of per-step, per-task validation losses.
struct LossTrajectory {
    std::vector<std::string> task_names;
    std::vector<std::int64_t> steps;          // strictly increasing
    std::vector<std::vector<double>> losses;  // one row per step, K columns

    std::size_t num_tasks() const noexcept { return task_names.size(); }
    std::size_t num_steps() const noexcept { return steps.size(); }
};

/// Parse the wide CSV trajectory format:
///
///   step,loss_<name1>,...,loss_<nameK>
///   0,2.0,1.5
///   1,1.8,1.4
///
/// Steps are non-negative and strictly increasing; losses are positive
/// finite decimals. Structural problems throw FormatError (naming the
/// row), bad values throw DataError, step regressions throw OrderingError.
LossTrajectory parse_trajectory_csv(std::istream& in);
LossTrajectory load_trajectory_csv(const std::string& path);

/// Full diagnostic trace of one scheduler run over a trajectory.
struct WeightTrace {
    SchedulerKind kind;
    CobaConfig config;
    std::vector<std::string> task_names;
    std::vector<WeightRecord> records; // one per trajectory row
};

/// Run a scheduler over a recorded trajectory, one step per row in order.
/// config.num_tasks must match the trajectory. Identical to feeding the
/// rows to a live Scheduler by hand.
WeightTrace run_replay(const LossTrajectory& traj, SchedulerKind kind,
                       const CobaConfig& config);

/// Write a trace as CSV: header "step,df" then per task
/// w_<name>,rcs_<name>,acs_<name>,alpha_<name>,ratio_<name>. Floats are
/// printed with 17 significant digits so a round-trip is value-exact.
void write_trace_csv(const WeightTrace& trace, std::ostream& out);
void write_trace_csv(const WeightTrace& trace, const std::string& path);

/// Min-Max normalization to [0,1]: (x - min) / (max - min). A constant
/// series maps to all zeros. Order-preserving.
std::vector<double> minmax_normalize(std::span<const double> series);

/// Parametric validation-loss curve: amplitude * exp(-decay_rate * s)
/// + offset, plus an optional linear upturn of slope turn_gain starting
/// at turn_step (for modelling a task that starts to overfit).
struct SyntheticCurve {
    std::string name;
    double amplitude = 1.0;
    double decay_rate = 0.01;
    double offset = 0.0;
    std::int64_t turn_step = -1; // -1 = no upturn
    double turn_gain = 0.0;

    double value_at(std::int64_t s) const;
};

/// Sample the curves at steps 0..num_steps-1, optionally adding Gaussian
/// noise (sigma, deterministic in seed). Losses are floored at 1e-9 to
/// stay positive.
LossTrajectory synthetic_trajectory(std::span<const SyntheticCurve> curves,
                                    std::int64_t num_steps, double noise_sigma = 0.0,
                                    std::uint64_t seed = 0);

} // namespace coba
