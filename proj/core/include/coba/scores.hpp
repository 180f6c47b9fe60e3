// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coba/numeric.hpp"

namespace coba {

/// Numerically stable softmax (max subtraction). Output is on the
/// probability simplex: all entries positive, summing to 1.
///
/// Throws ArgumentError on empty or non-finite input.
std::vector<double> stable_softmax(std::span<const double> values);

/// Relative convergence scores across tasks.
///
/// Computes softmax over i of K * a_i / sum_j |a_j|. The normalized
/// argument is homogeneous of degree zero in the slopes, so the result is
/// invariant under positive rescaling of all slopes; the K factor keeps
/// the argument magnitude independent of the task count. A task converging
/// faster (more negative slope) receives a lower score.
///
/// When sum_j |a_j| < eps_den (all slopes effectively zero) the result is
/// the uniform vector 1/K.
std::vector<double> relative_convergence_scores(std::span<const double> slopes,
                                                double eps_den = 1e-12);

/// Bounded history of one task's fitted convergence slopes, most recent
/// last. Capacity-bounded like LossRatioWindow.
class SlopeHistory {
  public:
    explicit SlopeHistory(std::size_t capacity, std::string task_id = {});

    void push(double alpha);

    std::span<const double> values() const noexcept { return vals_; }
    double latest() const;

    bool empty() const noexcept { return vals_.empty(); }
    std::size_t size() const noexcept { return vals_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    const std::string& task_id() const noexcept { return task_id_; }

  private:
    std::size_t capacity_;
    std::string task_id_;
    std::vector<double> vals_;
};

/// Absolute convergence scores across tasks.
///
/// For each task, u_i = -n_i * latest_i / sum_over_history |alpha_i(j)|,
/// where n_i is that task's history length. The per-task normalization
/// means a task is judged only against its own recent trajectory: a task
/// holding a constant negative slope scores exactly +1, a constant
/// positive (diverging) slope exactly -1, and a slope collapsing toward
/// zero scores near 0. The scores are then softmaxed across tasks.
///
/// A per-task denominator below eps_den yields u_i = 0 for that task.
/// Throws ArgumentError if any history is empty or non-finite.
std::vector<double> absolute_convergence_scores(std::span<const SlopeHistory> histories,
                                                double eps_den = 1e-12);

/// Divergence-trend tracker.
///
/// Feed it alpha_max(t), the signed maximum of the current per-task
/// slopes, once per step. Each step caches one value
///
///   z_t = -tau * t * alpha_max(t) / sum_{i=1..t} alpha_max(i)
///
/// (z_t = 0 when the prefix sum magnitude is below eps_den), and the
/// divergence factor is
///
///   df(t) = min(t * softmax(z_1..z_t)[t], 1).
///
/// While every task keeps converging the latest z stays maximal and the
/// factor is exactly 1; once some task's slope turns upward the prefix sum
/// decays through zero, the cached z spikes, and the factor collapses
/// toward 0. Cached z values are frozen: they are never recomputed with
/// later prefix sums.
///
/// The softmax normally runs over the full scored history (O(1) per step
/// via streaming accumulators). A nonzero history_cap truncates it to the
/// most recent history_cap entries, with the leading factor t replaced by
/// the effective window length so the all-converging identity survives
/// truncation.
class DivergenceState {
  public:
    explicit DivergenceState(double tau = 5.0, double eps_den = 1e-12,
                             std::size_t history_cap = 0);

    /// Advance one step; alpha_max_t must be finite. Returns df in [0, 1].
    double step(double alpha_max_t);

    std::span<const double> z_sequence() const noexcept { return z_; }
    std::int64_t scored_steps() const noexcept { return t_; }
    double prefix_sum() const noexcept { return prefix_.value(); }
    double tau() const noexcept { return tau_; }

  private:
    double tau_;
    double eps_den_;
    std::size_t history_cap_;
    std::int64_t t_ = 0;
    NeumaierSum prefix_;
    std::vector<double> z_;
    // streaming softmax state (used when history_cap_ == 0)
    double max_z_ = 0.0;
    double sum_exp_ = 0.0;
};

/// Final weight blend: w = df * rcs + (1 - df) * acs.
///
/// Both inputs must be equal-length simplex vectors and df must lie in
/// [0, 1]; the output is their convex combination and stays on the
/// simplex. df = 1 returns rcs exactly, df = 0 returns acs exactly.
std::vector<double> combine_weights(std::span<const double> rcs,
                                    std::span<const double> acs, double df);

} // namespace coba
