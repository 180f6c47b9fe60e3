// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coba/replay.hpp"
#include "coba/scheduler.hpp"

namespace coba {

/// One mini-batch of regression data: rows x input_dim inputs (row-major)
/// and rows scalar targets.
struct Batch {
    std::size_t rows = 0;
    std::size_t input_dim = 0;
    std::vector<double> x; // rows * input_dim
    std::vector<double> y; // rows
};

/// Parameters of the synthetic multi-task regression suite.
struct SuiteSpec {
    int num_tasks = 2;       ///< K, at least 2
    int input_dim = 4;       ///< d
    int hidden_dim = 8;      ///< h (also the teacher width)
    int n_train = 256;       ///< per-task training samples, at least 10*d
    int val_batches = 4;     ///< M; validation set has M equal batches
    std::vector<double> noise;        ///< per-task label noise sigma, size K
    std::vector<double> target_scale; ///< per-task teacher output scale; empty = all 1
    std::vector<std::uint64_t> task_seeds; ///< optional per-task data seeds
    std::uint64_t seed = 0;
    int val_batch_size = 16;
    int n_test = 128;

    void validate() const; ///< throws ConfigError
};

/// Deterministic synthetic multi-task regression data.
///
/// Targets come from a shared-trunk teacher (one tanh trunk shared by all
/// tasks, one linear head per task) plus per-task Gaussian label noise, so
/// tasks genuinely share structure while their irreducible validation
/// losses (~= sigma_i^2) and convergence speeds differ.
class SyntheticSuite {
  public:
    static SyntheticSuite make(const SuiteSpec& spec);

    const SuiteSpec& spec() const noexcept { return spec_; }
    int num_tasks() const noexcept { return spec_.num_tasks; }
    const std::vector<std::string>& task_names() const noexcept { return task_names_; }

    const Batch& train_data(int task) const { return train_.at(task); }
    const Batch& val_batch(int task, int index) const {
        return val_.at(task).at(index);
    }
    int num_val_batches() const noexcept { return spec_.val_batches; }
    const Batch& test_data(int task) const { return test_.at(task); }

    /// Mean squared residual of the generating teacher on the validation
    /// set; the loss floor no student can beat in expectation.
    double irreducible_validation_loss(int task) const { return floor_.at(task); }

    /// The seed that generated this task's data. Tasks constructed with
    /// equal seeds (and equal noise/scale) carry identical data.
    std::uint64_t task_data_seed(int task) const { return data_seeds_.at(task); }

  private:
    SuiteSpec spec_;
    std::vector<std::string> task_names_;
    std::vector<Batch> train_;
    std::vector<std::vector<Batch>> val_;
    std::vector<Batch> test_;
    std::vector<double> floor_;
    std::vector<std::uint64_t> data_seeds_;
};

/// One shared tanh trunk (input_dim -> hidden_dim) plus per-task scalar
/// linear heads. Heads are initialized identically so all tasks start
/// from the same point.
struct SharedTrunkModel {
    int input_dim = 0;
    int hidden_dim = 0;
    int num_tasks = 0;
    std::vector<double> trunk_w; // hidden_dim * input_dim, row-major
    std::vector<double> trunk_b; // hidden_dim
    std::vector<std::vector<double>> head_w; // num_tasks x hidden_dim
    std::vector<double> head_b;              // num_tasks

    static SharedTrunkModel init(int input_dim, int hidden_dim, int num_tasks,
                                 std::uint64_t seed, double scale = 0.5);

    std::size_t parameter_count() const noexcept;
    std::vector<double> to_flat() const;
    void from_flat(std::span<const double> flat);
    bool all_parameters_finite() const noexcept;
};

/// Gradient of the weighted objective, same layout as the model.
struct Gradients {
    std::vector<double> trunk_w;
    std::vector<double> trunk_b;
    std::vector<std::vector<double>> head_w;
    std::vector<double> head_b;

    static Gradients zeros_like(const SharedTrunkModel& model);
    std::vector<double> to_flat() const;
    bool all_finite() const noexcept;
};

/// Mean squared error of the model on one task's batch.
double forward_loss(const SharedTrunkModel& model, const Batch& batch, int task);

/// Exact analytic gradient of sum_i weights[i] * mse_i(model, batches[i]).
/// Head i's gradient scales linearly with weights[i]; the trunk gradient
/// is the weighted sum of per-task trunk gradients.
Gradients weighted_backward(const SharedTrunkModel& model, std::span<const Batch> batches,
                            std::span<const double> weights);

/// Plain gradient descent update, params -= lr * grad. Throws
/// TrainingError if the gradients are non-finite.
void sgd_step(SharedTrunkModel& model, const Gradients& grads, double lr);

/// Outcome of one training run.
struct TrainReport {
    std::vector<double> train_losses; ///< weighted training loss per step
    WeightTrace trace;                ///< scheduler diagnostics per step
    std::int64_t best_step = -1;      ///< step minimizing mean validation loss ratio
    double best_mean_val_ratio = 0.0;
    std::vector<double> best_val_ratios; ///< per-task ratios at the best step
    std::vector<double> test_losses;     ///< per-task test MSE at the best checkpoint
    double runtime_ms = 0.0;
    bool diverged = false;
    std::int64_t diverged_at = -1;
};

/// Train for t_max iterations under the given scheduler.
///
/// Each iteration draws one training mini-batch per task (independent
/// per-task per-epoch shuffling), takes one SGD step on the weighted
/// objective using the scheduler's current weights, then evaluates the
/// round-robin validation mini-batch (index t mod M) per task and feeds
/// those losses to the scheduler. The best checkpoint minimizes the mean
/// validation loss ratio over tasks (earliest step on ties). Divergence
/// to non-finite values aborts with a partial report (diverged flag set).
TrainReport run_experiment(const SyntheticSuite& suite, SchedulerKind kind,
                           const CobaConfig& config, double lr, std::int64_t t_max,
                           std::uint64_t seed, int batch_size = 32);

/// Experiment description, loadable from JSON:
/// {"suite": {"K","d","h","n_train","M","noise",["target_scale"],["task_seeds"],
///            "seed",["val_batch_size"],["n_test"]},
///  "scheduler": {flat scheduler object}, "lr", "T_max", "seed", "batch_size"}
struct ExperimentConfig {
    SuiteSpec suite;
    SchedulerKind kind;
    CobaConfig scheduler;
    double lr = 1e-2;
    std::int64_t t_max = 100;
    std::uint64_t seed = 0;
    int batch_size = 32;

    void validate() const;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

/// Summary JSON: {"best_step", "test_losses", "runtime_ms", ...}.
std::string train_summary_json(const TrainReport& report);

} // namespace coba
