// SPDX-License-Identifier: Apache-2.0
#include "coba/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "coba/errors.hpp"
#include "coba/numeric.hpp"

namespace coba {

void SchedulerKind::validate() const {
    if (type == Type::kLbtw && !(lbtw_b > 0.0 && lbtw_b <= 1.0)) {
        throw ConfigError("SchedulerKind: lbtw b must lie in (0, 1]");
    }
}

std::string SchedulerKind::name() const {
    switch (type) {
    case Type::kCoba:
        return "coba";
    case Type::kUniform:
        return "uniform";
    case Type::kLbtw:
        return "lbtw";
    }
    return "coba";
}

SchedulerKind SchedulerKind::from_name(const std::string& name, double b) {
    if (name == "coba") {
        return coba();
    }
    if (name == "uniform") {
        return uniform();
    }
    if (name == "lbtw") {
        return lbtw(b);
    }
    throw ConfigError("unknown scheduler kind '" + name + "'");
}

CobaConfig CobaConfig::for_tasks(int num_tasks, int val_batches) {
    CobaConfig c;
    c.num_tasks = num_tasks;
    c.val_batches = val_batches;
    c.window = 2 * val_batches;
    c.warmup = val_batches;
    c.validate();
    return c;
}

void CobaConfig::validate() const {
    if (num_tasks < 2) {
        throw ConfigError("CobaConfig: num_tasks must be at least 2");
    }
    if (window < 2) {
        throw ConfigError("CobaConfig: window must be at least 2");
    }
    if (warmup < 0) {
        throw ConfigError("CobaConfig: warmup must be non-negative");
    }
    if (val_batches < 1) {
        throw ConfigError("CobaConfig: val_batches must be at least 1");
    }
    if (!(tau > 1.0)) {
        throw ConfigError("CobaConfig: tau must exceed 1");
    }
    if (!(eps_den > 0.0)) {
        throw ConfigError("CobaConfig: eps_den must be positive");
    }
}

std::vector<double> uniform_weights(int k) {
    if (k < 1) {
        throw ArgumentError("uniform_weights: k must be positive");
    }
    return std::vector<double>(static_cast<std::size_t>(k), 1.0 / static_cast<double>(k));
}

std::vector<double> lbtw_weights(std::span<const double> current_losses,
                                 std::span<const double> initial_losses, double b,
                                 double eps_den) {
    if (current_losses.size() != initial_losses.size() || current_losses.empty()) {
        throw ArgumentError("lbtw_weights: arity mismatch");
    }
    if (!(b > 0.0 && b <= 1.0)) {
        throw ArgumentError("lbtw_weights: b must lie in (0, 1]");
    }
    const std::size_t k = current_losses.size();
    std::vector<double> raw(k);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(initial_losses[i] > 0.0) || !std::isfinite(initial_losses[i])) {
            throw DataError("lbtw_weights: non-positive initial loss for task " +
                            std::to_string(i));
        }
        const double ratio = current_losses[i] / initial_losses[i];
        raw[i] = ratio <= 0.0 ? 0.0 : std::pow(ratio, b);
        total += raw[i];
    }
    if (total < eps_den) {
        return uniform_weights(static_cast<int>(k));
    }
    for (double& r : raw) {
        r /= total;
    }
    return raw;
}

namespace {

CobaConfig validated(CobaConfig config) {
    config.validate();
    return config;
}

WeightRecord initial_record(int k) {
    WeightRecord r;
    r.step = -1;
    r.weights = uniform_weights(k);
    r.rcs = r.weights;
    r.acs = r.weights;
    r.slopes.assign(static_cast<std::size_t>(k), 0.0);
    r.loss_ratios.assign(static_cast<std::size_t>(k), 1.0);
    r.df = 1.0;
    return r;
}

} // namespace

Scheduler::Scheduler(SchedulerKind kind, CobaConfig config)
    : kind_(kind), config_(validated(config)),
      divergence_(config_.tau, config_.eps_den, config_.df_history_cap) {
    kind_.validate();
    const auto n = static_cast<std::size_t>(config_.window);
    windows_.reserve(static_cast<std::size_t>(config_.num_tasks));
    histories_.reserve(static_cast<std::size_t>(config_.num_tasks));
    for (int i = 0; i < config_.num_tasks; ++i) {
        windows_.emplace_back(n, "task" + std::to_string(i));
        histories_.emplace_back(n, "task" + std::to_string(i));
    }
    last_ = initial_record(config_.num_tasks);
}

WeightRecord Scheduler::step(std::span<const double> val_losses) {
    const auto k = static_cast<std::size_t>(config_.num_tasks);
    if (val_losses.size() != k) {
        throw ArgumentError("Scheduler::step: expected " + std::to_string(k) +
                            " losses, got " + std::to_string(val_losses.size()));
    }
    if (!all_finite(val_losses)) {
        throw DataError("Scheduler::step: non-finite validation loss at step " +
                        std::to_string(t_));
    }

    WeightRecord rec;
    rec.step = t_;
    rec.slopes.resize(k);
    rec.loss_ratios.resize(k);

    double alpha_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        windows_[i].push(t_, val_losses[i]);
        const SlopeEstimate est = windows_[i].fit();
        histories_[i].push(est.alpha);
        rec.slopes[i] = est.alpha;
        rec.loss_ratios[i] = windows_[i].latest_ratio();
        alpha_max = std::max(alpha_max, est.alpha);
    }

    // Diagnostics run every step for every kind; only the weight formula
    // depends on kind and warm-up.
    rec.rcs = relative_convergence_scores(rec.slopes, config_.eps_den);
    rec.acs = absolute_convergence_scores(histories_, config_.eps_den);
    rec.df = divergence_.step(alpha_max);

    if (t_ < config_.warmup) {
        rec.weights = uniform_weights(config_.num_tasks);
    } else {
        switch (kind_.type) {
        case SchedulerKind::Type::kCoba:
            rec.weights = combine_weights(rec.rcs, rec.acs, rec.df);
            break;
        case SchedulerKind::Type::kUniform:
            rec.weights = uniform_weights(config_.num_tasks);
            break;
        case SchedulerKind::Type::kLbtw: {
            std::vector<double> ones(k, 1.0);
            rec.weights = lbtw_weights(rec.loss_ratios, ones, kind_.lbtw_b, config_.eps_den);
            break;
        }
        }
    }

    ++t_;
    last_ = rec;
    return rec;
}

std::string scheduler_config_to_json(const SchedulerKind& kind, const CobaConfig& config) {
    nlohmann::json j;
    j["kind"] = kind.name();
    j["K"] = config.num_tasks;
    j["N"] = config.window;
    j["W"] = config.warmup;
    j["M"] = config.val_batches;
    j["tau"] = config.tau;
    j["b"] = kind.lbtw_b;
    j["eps_den"] = config.eps_den;
    return j.dump();
}

std::pair<SchedulerKind, CobaConfig> scheduler_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("scheduler config: invalid JSON: ") + e.what());
    }
    try {
        CobaConfig c;
        c.num_tasks = j.at("K").get<int>();
        c.val_batches = j.value("M", 1);
        c.window = j.value("N", 2 * c.val_batches);
        c.warmup = j.value("W", c.val_batches);
        c.tau = j.value("tau", 5.0);
        c.eps_den = j.value("eps_den", 1e-12);
        SchedulerKind kind =
            SchedulerKind::from_name(j.value("kind", std::string("coba")), j.value("b", 0.5));
        c.validate();
        kind.validate();
        return {kind, c};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scheduler config: ") + e.what());
    }
}

} // namespace coba
