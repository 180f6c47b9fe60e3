// SPDX-License-Identifier: Apache-2.0
#include "coba/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "coba/errors.hpp"
#include "coba/numeric.hpp"

namespace coba {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

// y_hat for one input row; fills the activation buffer (size hidden_dim).
double predict_row(const SharedTrunkModel& m, const double* x, int task,
                   std::vector<double>& act) {
    const int h = m.hidden_dim;
    const int d = m.input_dim;
    for (int j = 0; j < h; ++j) {
        double z = m.trunk_b[j];
        const double* wrow = m.trunk_w.data() + static_cast<std::size_t>(j) * d;
        for (int c = 0; c < d; ++c) {
            z += wrow[c] * x[c];
        }
        act[static_cast<std::size_t>(j)] = std::tanh(z);
    }
    double out = m.head_b[static_cast<std::size_t>(task)];
    const auto& hw = m.head_w[static_cast<std::size_t>(task)];
    for (int j = 0; j < h; ++j) {
        out += hw[static_cast<std::size_t>(j)] * act[static_cast<std::size_t>(j)];
    }
    return out;
}

} // namespace

void SuiteSpec::validate() const {
    if (num_tasks < 2) {
        throw ConfigError("SuiteSpec: num_tasks must be at least 2");
    }
    if (input_dim < 1 || hidden_dim < 1) {
        throw ConfigError("SuiteSpec: dimensions must be positive");
    }
    if (val_batches < 1) {
        throw ConfigError("SuiteSpec: val_batches must be at least 1");
    }
    if (n_train < 10 * input_dim) {
        throw ConfigError("SuiteSpec: n_train must be at least 10 * input_dim");
    }
    if (noise.size() != static_cast<std::size_t>(num_tasks)) {
        throw ConfigError("SuiteSpec: noise must list one sigma per task");
    }
    for (double s : noise) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw ConfigError("SuiteSpec: noise sigmas must be finite and non-negative");
        }
    }
    if (!target_scale.empty() && target_scale.size() != static_cast<std::size_t>(num_tasks)) {
        throw ConfigError("SuiteSpec: target_scale must be empty or one value per task");
    }
    if (!task_seeds.empty() && task_seeds.size() != static_cast<std::size_t>(num_tasks)) {
        throw ConfigError("SuiteSpec: task_seeds must be empty or one seed per task");
    }
    if (val_batch_size < 1 || n_test < 1) {
        throw ConfigError("SuiteSpec: val_batch_size and n_test must be positive");
    }
}

SyntheticSuite SyntheticSuite::make(const SuiteSpec& spec) {
    spec.validate();
    SyntheticSuite suite;
    suite.spec_ = spec;

    const int d = spec.input_dim;
    const int h = spec.hidden_dim;
    const int k = spec.num_tasks;

    // Shared teacher trunk, drawn from the suite-level seed.
    std::mt19937_64 trunk_rng(mix_seed(spec.seed, 0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> teacher_w(static_cast<std::size_t>(h) * d);
    std::vector<double> teacher_b(static_cast<std::size_t>(h));
    const double wscale = 1.0 / std::sqrt(static_cast<double>(d));
    for (double& v : teacher_w) {
        v = gauss(trunk_rng) * wscale;
    }
    for (double& v : teacher_b) {
        v = 0.25 * gauss(trunk_rng);
    }

    std::vector<double> act(static_cast<std::size_t>(h));
    auto teacher_value = [&](const double* x, const std::vector<double>& head_w,
                             double head_b) {
        for (int j = 0; j < h; ++j) {
            double z = teacher_b[static_cast<std::size_t>(j)];
            for (int c = 0; c < d; ++c) {
                z += teacher_w[static_cast<std::size_t>(j) * d + c] * x[c];
            }
            act[static_cast<std::size_t>(j)] = std::tanh(z);
        }
        double out = head_b;
        for (int j = 0; j < h; ++j) {
            out += head_w[static_cast<std::size_t>(j)] * act[static_cast<std::size_t>(j)];
        }
        return out;
    };

    const int n_val = spec.val_batches * spec.val_batch_size;
    const double hscale = 1.0 / std::sqrt(static_cast<double>(h));

    for (int task = 0; task < k; ++task) {
        const std::uint64_t task_seed = spec.task_seeds.empty()
                                            ? mix_seed(spec.seed, 1 + static_cast<std::uint64_t>(task))
                                            : spec.task_seeds[static_cast<std::size_t>(task)];
        suite.data_seeds_.push_back(task_seed);
        std::mt19937_64 rng(task_seed);
        // Fresh distribution per task: normal_distribution caches a spare
        // variate, and shared state would break the identical-seed guarantee.
        std::normal_distribution<double> task_gauss(0.0, 1.0);
        const double scale =
            spec.target_scale.empty() ? 1.0 : spec.target_scale[static_cast<std::size_t>(task)];
        const double sigma = spec.noise[static_cast<std::size_t>(task)];

        std::vector<double> head_w(static_cast<std::size_t>(h));
        for (double& v : head_w) {
            v = task_gauss(rng) * hscale * scale;
        }
        const double head_b = 0.1 * scale * task_gauss(rng);

        auto sample = [&](int rows) {
            Batch b;
            b.rows = static_cast<std::size_t>(rows);
            b.input_dim = static_cast<std::size_t>(d);
            b.x.resize(b.rows * b.input_dim);
            b.y.resize(b.rows);
            for (double& v : b.x) {
                v = task_gauss(rng);
            }
            for (int r = 0; r < rows; ++r) {
                const double* x = b.x.data() + static_cast<std::size_t>(r) * d;
                b.y[static_cast<std::size_t>(r)] =
                    teacher_value(x, head_w, head_b) + sigma * task_gauss(rng);
            }
            return b;
        };

        suite.train_.push_back(sample(spec.n_train));
        Batch val_all = sample(n_val);
        std::vector<Batch> val_split;
        for (int bi = 0; bi < spec.val_batches; ++bi) {
            Batch b;
            b.rows = static_cast<std::size_t>(spec.val_batch_size);
            b.input_dim = static_cast<std::size_t>(d);
            const std::size_t row0 = static_cast<std::size_t>(bi) * spec.val_batch_size;
            b.x.assign(val_all.x.begin() + static_cast<std::ptrdiff_t>(row0 * d),
                       val_all.x.begin() +
                           static_cast<std::ptrdiff_t>((row0 + b.rows) * d));
            b.y.assign(val_all.y.begin() + static_cast<std::ptrdiff_t>(row0),
                       val_all.y.begin() + static_cast<std::ptrdiff_t>(row0 + b.rows));
            val_split.push_back(std::move(b));
        }
        suite.val_.push_back(std::move(val_split));
        suite.test_.push_back(sample(spec.n_test));

        // Teacher residual on the validation set = the irreducible floor.
        double floor = 0.0;
        for (int bi = 0; bi < spec.val_batches; ++bi) {
            const Batch& b = suite.val_.back()[static_cast<std::size_t>(bi)];
            for (std::size_t r = 0; r < b.rows; ++r) {
                const double* x = b.x.data() + r * b.input_dim;
                const double resid = b.y[r] - teacher_value(x, head_w, head_b);
                floor += resid * resid;
            }
        }
        suite.floor_.push_back(floor / static_cast<double>(n_val));
        suite.task_names_.push_back("task" + std::to_string(task));
    }
    return suite;
}

SharedTrunkModel SharedTrunkModel::init(int input_dim, int hidden_dim, int num_tasks,
                                        std::uint64_t seed, double scale) {
    if (input_dim < 1 || hidden_dim < 1 || num_tasks < 1) {
        throw ConfigError("SharedTrunkModel: dimensions must be positive");
    }
    SharedTrunkModel m;
    m.input_dim = input_dim;
    m.hidden_dim = hidden_dim;
    m.num_tasks = num_tasks;
    std::mt19937_64 rng(mix_seed(seed, 0xC0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    m.trunk_w.resize(static_cast<std::size_t>(hidden_dim) * input_dim);
    m.trunk_b.assign(static_cast<std::size_t>(hidden_dim), 0.0);
    const double wscale = scale / std::sqrt(static_cast<double>(input_dim));
    for (double& v : m.trunk_w) {
        v = gauss(rng) * wscale;
    }
    // One head drawn, copied to every task: a symmetric starting point to
    // match the uniform initial weights.
    std::vector<double> head(static_cast<std::size_t>(hidden_dim));
    const double hscale = scale / std::sqrt(static_cast<double>(hidden_dim));
    for (double& v : head) {
        v = gauss(rng) * hscale;
    }
    m.head_w.assign(static_cast<std::size_t>(num_tasks), head);
    m.head_b.assign(static_cast<std::size_t>(num_tasks), 0.0);
    return m;
}

std::size_t SharedTrunkModel::parameter_count() const noexcept {
    return trunk_w.size() + trunk_b.size() +
           static_cast<std::size_t>(num_tasks) * static_cast<std::size_t>(hidden_dim) +
           head_b.size();
}

std::vector<double> SharedTrunkModel::to_flat() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    flat.insert(flat.end(), trunk_w.begin(), trunk_w.end());
    flat.insert(flat.end(), trunk_b.begin(), trunk_b.end());
    for (const auto& hw : head_w) {
        flat.insert(flat.end(), hw.begin(), hw.end());
    }
    flat.insert(flat.end(), head_b.begin(), head_b.end());
    return flat;
}

void SharedTrunkModel::from_flat(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw ArgumentError("SharedTrunkModel::from_flat: size mismatch");
    }
    std::size_t pos = 0;
    std::copy_n(flat.begin(), trunk_w.size(), trunk_w.begin());
    pos += trunk_w.size();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), trunk_b.size(),
                trunk_b.begin());
    pos += trunk_b.size();
    for (auto& hw : head_w) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), hw.size(), hw.begin());
        pos += hw.size();
    }
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), head_b.size(),
                head_b.begin());
}

bool SharedTrunkModel::all_parameters_finite() const noexcept {
    if (!all_finite(trunk_w) || !all_finite(trunk_b) || !all_finite(head_b)) {
        return false;
    }
    for (const auto& hw : head_w) {
        if (!all_finite(hw)) {
            return false;
        }
    }
    return true;
}

Gradients Gradients::zeros_like(const SharedTrunkModel& model) {
    Gradients g;
    g.trunk_w.assign(model.trunk_w.size(), 0.0);
    g.trunk_b.assign(model.trunk_b.size(), 0.0);
    g.head_w.assign(model.head_w.size(),
                    std::vector<double>(static_cast<std::size_t>(model.hidden_dim), 0.0));
    g.head_b.assign(model.head_b.size(), 0.0);
    return g;
}

std::vector<double> Gradients::to_flat() const {
    std::vector<double> flat;
    flat.insert(flat.end(), trunk_w.begin(), trunk_w.end());
    flat.insert(flat.end(), trunk_b.begin(), trunk_b.end());
    for (const auto& hw : head_w) {
        flat.insert(flat.end(), hw.begin(), hw.end());
    }
    flat.insert(flat.end(), head_b.begin(), head_b.end());
    return flat;
}

bool Gradients::all_finite() const noexcept {
    if (!coba::all_finite(trunk_w) || !coba::all_finite(trunk_b) ||
        !coba::all_finite(head_b)) {
        return false;
    }
    for (const auto& hw : head_w) {
        if (!coba::all_finite(hw)) {
            return false;
        }
    }
    return true;
}

double forward_loss(const SharedTrunkModel& model, const Batch& batch, int task) {
    if (task < 0 || task >= model.num_tasks) {
        throw ArgumentError("forward_loss: task index out of range");
    }
    if (batch.input_dim != static_cast<std::size_t>(model.input_dim)) {
        throw ArgumentError("forward_loss: batch input_dim mismatch");
    }
    if (batch.rows == 0) {
        throw ArgumentError("forward_loss: empty batch");
    }
    std::vector<double> act(static_cast<std::size_t>(model.hidden_dim));
    double sum = 0.0;
    for (std::size_t r = 0; r < batch.rows; ++r) {
        const double* x = batch.x.data() + r * batch.input_dim;
        const double err = predict_row(model, x, task, act) - batch.y[r];
        sum += err * err;
    }
    return sum / static_cast<double>(batch.rows);
}

Gradients weighted_backward(const SharedTrunkModel& model, std::span<const Batch> batches,
                            std::span<const double> weights) {
    if (batches.size() != static_cast<std::size_t>(model.num_tasks) ||
        weights.size() != batches.size()) {
        throw ArgumentError("weighted_backward: need one batch and one weight per task");
    }
    Gradients g = Gradients::zeros_like(model);
    const int h = model.hidden_dim;
    const int d = model.input_dim;
    std::vector<double> act(static_cast<std::size_t>(h));

    for (int task = 0; task < model.num_tasks; ++task) {
        const Batch& batch = batches[static_cast<std::size_t>(task)];
        const double w = weights[static_cast<std::size_t>(task)];
        if (batch.input_dim != static_cast<std::size_t>(d) || batch.rows == 0) {
            throw ArgumentError("weighted_backward: bad batch for task " +
                                std::to_string(task));
        }
        const auto& head = model.head_w[static_cast<std::size_t>(task)];
        auto& g_head = g.head_w[static_cast<std::size_t>(task)];
        const double inv_rows = 1.0 / static_cast<double>(batch.rows);

        for (std::size_t r = 0; r < batch.rows; ++r) {
            const double* x = batch.x.data() + r * batch.input_dim;
            const double pred = predict_row(model, x, task, act);
            // d(mse)/d(pred) for this sample
            const double delta = 2.0 * (pred - batch.y[r]) * inv_rows;
            const double wdelta = w * delta;

            g.head_b[static_cast<std::size_t>(task)] += wdelta;
            for (int j = 0; j < h; ++j) {
                const double a = act[static_cast<std::size_t>(j)];
                g_head[static_cast<std::size_t>(j)] += wdelta * a;
                const double dz = wdelta * head[static_cast<std::size_t>(j)] * (1.0 - a * a);
                g.trunk_b[static_cast<std::size_t>(j)] += dz;
                double* grow = g.trunk_w.data() + static_cast<std::size_t>(j) * d;
                for (int c = 0; c < d; ++c) {
                    grow[c] += dz * x[c];
                }
            }
        }
    }
    return g;
}

void sgd_step(SharedTrunkModel& model, const Gradients& grads, double lr) {
    if (!(lr > 0.0)) {
        throw ArgumentError("sgd_step: lr must be positive");
    }
    if (!grads.all_finite()) {
        throw TrainingError("sgd_step: non-finite gradient");
    }
    for (std::size_t i = 0; i < model.trunk_w.size(); ++i) {
        model.trunk_w[i] -= lr * grads.trunk_w[i];
    }
    for (std::size_t i = 0; i < model.trunk_b.size(); ++i) {
        model.trunk_b[i] -= lr * grads.trunk_b[i];
    }
    for (std::size_t t = 0; t < model.head_w.size(); ++t) {
        for (std::size_t j = 0; j < model.head_w[t].size(); ++j) {
            model.head_w[t][j] -= lr * grads.head_w[t][j];
        }
    }
    for (std::size_t t = 0; t < model.head_b.size(); ++t) {
        model.head_b[t] -= lr * grads.head_b[t];
    }
}

namespace {

// Per-task mini-batch sampler with independent per-epoch shuffling.
class BatchSampler {
  public:
    BatchSampler(const Batch& data, int batch_size, std::uint64_t seed)
        : data_(data), batch_size_(static_cast<std::size_t>(batch_size)), rng_(seed) {
        order_.resize(data.rows);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        reshuffle();
    }

    Batch next() {
        Batch b;
        b.rows = std::min(batch_size_, data_.rows);
        b.input_dim = data_.input_dim;
        b.x.resize(b.rows * b.input_dim);
        b.y.resize(b.rows);
        for (std::size_t r = 0; r < b.rows; ++r) {
            if (cursor_ == data_.rows) {
                reshuffle();
            }
            const std::size_t src = order_[cursor_++];
            std::copy_n(data_.x.begin() + static_cast<std::ptrdiff_t>(src * data_.input_dim),
                        data_.input_dim,
                        b.x.begin() + static_cast<std::ptrdiff_t>(r * b.input_dim));
            b.y[r] = data_.y[src];
        }
        return b;
    }

  private:
    void reshuffle() {
        std::shuffle(order_.begin(), order_.end(), rng_);
        cursor_ = 0;
    }

    const Batch& data_;
    std::size_t batch_size_;
    std::mt19937_64 rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

} // namespace

TrainReport run_experiment(const SyntheticSuite& suite, SchedulerKind kind,
                           const CobaConfig& config, double lr, std::int64_t t_max,
                           std::uint64_t seed, int batch_size) {
    if (config.num_tasks != suite.num_tasks()) {
        throw ConfigError("run_experiment: scheduler K does not match suite K");
    }
    if (t_max < 1) {
        throw ConfigError("run_experiment: t_max must be at least 1");
    }
    if (!(lr > 0.0)) {
        throw ConfigError("run_experiment: lr must be positive");
    }
    if (batch_size < 1) {
        throw ConfigError("run_experiment: batch_size must be at least 1");
    }

    const auto t0 = std::chrono::steady_clock::now();
    const int k = suite.num_tasks();
    const SuiteSpec& sp = suite.spec();

    SharedTrunkModel model =
        SharedTrunkModel::init(sp.input_dim, sp.hidden_dim, k, mix_seed(seed, 1));
    Scheduler scheduler(kind, config);

    // Sampler seeds derive from each task's data seed: distinct tasks get
    // independent shuffles, while identical tasks (equal data seeds) see
    // identical batch sequences and training stays fully symmetric.
    std::vector<BatchSampler> samplers;
    samplers.reserve(static_cast<std::size_t>(k));
    for (int task = 0; task < k; ++task) {
        samplers.emplace_back(suite.train_data(task), batch_size,
                              mix_seed(seed ^ suite.task_data_seed(task), 100));
    }

    TrainReport report;
    report.trace.kind = kind;
    report.trace.config = config;
    report.trace.task_names = suite.task_names();
    report.train_losses.reserve(static_cast<std::size_t>(t_max));
    report.trace.records.reserve(static_cast<std::size_t>(t_max));

    std::vector<double> best_params;
    std::vector<Batch> batches(static_cast<std::size_t>(k));
    std::vector<double> val_losses(static_cast<std::size_t>(k));

    for (std::int64_t t = 0; t < t_max; ++t) {
        const std::span<const double> weights = scheduler.current_weights();
        for (int task = 0; task < k; ++task) {
            batches[static_cast<std::size_t>(task)] =
                samplers[static_cast<std::size_t>(task)].next();
        }

        double train_loss = 0.0;
        for (int task = 0; task < k; ++task) {
            train_loss += weights[static_cast<std::size_t>(task)] *
                          forward_loss(model, batches[static_cast<std::size_t>(task)], task);
        }
        if (!std::isfinite(train_loss)) {
            report.diverged = true;
            report.diverged_at = t;
            break;
        }
        report.train_losses.push_back(train_loss);

        try {
            const Gradients grads = weighted_backward(model, batches, weights);
            sgd_step(model, grads, lr);
        } catch (const TrainingError&) {
            report.diverged = true;
            report.diverged_at = t;
            break;
        }

        const int val_index = static_cast<int>(t % suite.num_val_batches());
        bool val_finite = true;
        for (int task = 0; task < k; ++task) {
            val_losses[static_cast<std::size_t>(task)] =
                forward_loss(model, suite.val_batch(task, val_index), task);
            val_finite = val_finite && std::isfinite(val_losses[static_cast<std::size_t>(task)]);
        }
        if (!val_finite) {
            report.diverged = true;
            report.diverged_at = t;
            break;
        }

        const WeightRecord rec = scheduler.step(val_losses);
        const double mean_ratio =
            std::accumulate(rec.loss_ratios.begin(), rec.loss_ratios.end(), 0.0) /
            static_cast<double>(k);
        if (report.best_step < 0 || mean_ratio < report.best_mean_val_ratio) {
            report.best_step = t;
            report.best_mean_val_ratio = mean_ratio;
            report.best_val_ratios = rec.loss_ratios;
            best_params = model.to_flat();
        }
        report.trace.records.push_back(rec);
    }

    if (report.best_step >= 0) {
        SharedTrunkModel best = model;
        best.from_flat(best_params);
        report.test_losses.resize(static_cast<std::size_t>(k));
        for (int task = 0; task < k; ++task) {
            report.test_losses[static_cast<std::size_t>(task)] =
                forward_loss(best, suite.test_data(task), task);
        }
    }

    const auto t1 = std::chrono::steady_clock::now();
    report.runtime_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
    return report;
}

void ExperimentConfig::validate() const {
    suite.validate();
    scheduler.validate();
    kind.validate();
    if (scheduler.num_tasks != suite.num_tasks) {
        throw ConfigError("ExperimentConfig: scheduler K does not match suite K");
    }
    if (t_max < 1) {
        throw ConfigError("ExperimentConfig: T_max must be at least 1");
    }
    if (!(lr > 0.0) || !std::isfinite(lr)) {
        throw ConfigError("ExperimentConfig: lr must be positive");
    }
    if (batch_size < 1) {
        throw ConfigError("ExperimentConfig: batch_size must be at least 1");
    }
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("experiment config: invalid JSON: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        const auto& s = j.at("suite");
        cfg.suite.num_tasks = s.at("K").get<int>();
        cfg.suite.input_dim = s.at("d").get<int>();
        cfg.suite.hidden_dim = s.at("h").get<int>();
        cfg.suite.n_train = s.at("n_train").get<int>();
        cfg.suite.val_batches = s.at("M").get<int>();
        cfg.suite.noise = s.at("noise").get<std::vector<double>>();
        cfg.suite.target_scale = s.value("target_scale", std::vector<double>{});
        cfg.suite.task_seeds = s.value("task_seeds", std::vector<std::uint64_t>{});
        cfg.suite.seed = s.value("seed", std::uint64_t{0});
        cfg.suite.val_batch_size = s.value("val_batch_size", 16);
        cfg.suite.n_test = s.value("n_test", 128);

        const auto sched = scheduler_config_from_json(j.at("scheduler").dump());
        cfg.kind = sched.first;
        cfg.scheduler = sched.second;

        cfg.lr = j.value("lr", 1e-2);
        cfg.t_max = j.value("T_max", std::int64_t{100});
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.batch_size = j.value("batch_size", 32);
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["suite"] = {{"K", config.suite.num_tasks},
                  {"d", config.suite.input_dim},
                  {"h", config.suite.hidden_dim},
                  {"n_train", config.suite.n_train},
                  {"M", config.suite.val_batches},
                  {"noise", config.suite.noise},
                  {"seed", config.suite.seed},
                  {"val_batch_size", config.suite.val_batch_size},
                  {"n_test", config.suite.n_test}};
    if (!config.suite.target_scale.empty()) {
        j["suite"]["target_scale"] = config.suite.target_scale;
    }
    if (!config.suite.task_seeds.empty()) {
        j["suite"]["task_seeds"] = config.suite.task_seeds;
    }
    j["scheduler"] =
        nlohmann::json::parse(scheduler_config_to_json(config.kind, config.scheduler));
    j["lr"] = config.lr;
    j["T_max"] = config.t_max;
    j["seed"] = config.seed;
    j["batch_size"] = config.batch_size;
    return j.dump(2);
}

std::string train_summary_json(const TrainReport& report) {
    nlohmann::json j;
    j["best_step"] = report.best_step;
    j["best_mean_val_ratio"] = report.best_mean_val_ratio;
    j["best_val_ratios"] = report.best_val_ratios;
    j["test_losses"] = report.test_losses;
    j["runtime_ms"] = report.runtime_ms;
    j["steps_run"] = report.trace.records.size();
    j["diverged"] = report.diverged;
    if (report.diverged) {
        j["diverged_at"] = report.diverged_at;
    }
    if (!report.trace.records.empty()) {
        j["final_weights"] = report.trace.records.back().weights;
    }
    return j.dump(2);
}

} // namespace coba
