// SPDX-License-Identifier: Apache-2.0
#include "coba/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coba/errors.hpp"

namespace coba {

std::vector<double> stable_softmax(std::span<const double> values) {
    if (values.empty()) {
        throw ArgumentError("stable_softmax: empty input");
    }
    if (!all_finite(values)) {
        throw ArgumentError("stable_softmax: non-finite input");
    }
    const double m = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = std::exp(values[i] - m);
        sum += out[i];
    }
    for (double& v : out) {
        v /= sum;
    }
    return out;
}

std::vector<double> relative_convergence_scores(std::span<const double> slopes,
                                                double eps_den) {
    if (slopes.empty()) {
        throw ArgumentError("relative_convergence_scores: empty slope vector");
    }
    if (!all_finite(slopes)) {
        throw ArgumentError("relative_convergence_scores: non-finite slope");
    }
    const std::size_t k = slopes.size();

    NeumaierSum abs_sum;
    for (double a : slopes) {
        abs_sum.add(std::abs(a));
    }
    const double den = abs_sum.value();
    if (den < eps_den) {
        return std::vector<double>(k, 1.0 / static_cast<double>(k));
    }

    std::vector<double> args(k);
    const double kf = static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
        args[i] = (kf * slopes[i]) / den;
    }
    return stable_softmax(args);
}

SlopeHistory::SlopeHistory(std::size_t capacity, std::string task_id)
    : capacity_(capacity), task_id_(std::move(task_id)) {
    if (capacity_ == 0) {
        throw ArgumentError("SlopeHistory: capacity must be at least 1");
    }
    vals_.reserve(capacity_);
}

void SlopeHistory::push(double alpha) {
    if (!std::isfinite(alpha)) {
        throw DataError("SlopeHistory[" + task_id_ + "]: non-finite slope");
    }
    if (vals_.size() == capacity_) {
        vals_.erase(vals_.begin());
    }
    vals_.push_back(alpha);
}

double SlopeHistory::latest() const {
    if (vals_.empty()) {
        throw ArgumentError("SlopeHistory[" + task_id_ + "]: latest on empty history");
    }
    return vals_.back();
}

std::vector<double> absolute_convergence_scores(std::span<const SlopeHistory> histories,
                                                double eps_den) {
    if (histories.empty()) {
        throw ArgumentError("absolute_convergence_scores: no histories");
    }
    std::vector<double> args(histories.size());
    for (std::size_t i = 0; i < histories.size(); ++i) {
        const SlopeHistory& h = histories[i];
        if (h.empty()) {
            throw ArgumentError("absolute_convergence_scores: empty history for task " +
                                std::to_string(i));
        }
        NeumaierSum abs_sum;
        for (double a : h.values()) {
            abs_sum.add(std::abs(a));
        }
        const double den = abs_sum.value();
        if (den < eps_den) {
            args[i] = 0.0;
            continue;
        }
        // Group as (n * latest) / den: for a constant history both numerator
        // magnitude and denominator round to the same double, giving +/-1
        // exactly.
        const double n = static_cast<double>(h.size());
        args[i] = -(n * h.latest()) / den;
    }
    return stable_softmax(args);
}

DivergenceState::DivergenceState(double tau, double eps_den, std::size_t history_cap)
    : tau_(tau), eps_den_(eps_den), history_cap_(history_cap) {
    if (!(tau > 1.0)) {
        throw ArgumentError("DivergenceState: tau must exceed 1");
    }
    if (!(eps_den > 0.0)) {
        throw ArgumentError("DivergenceState: eps_den must be positive");
    }
}

double DivergenceState::step(double alpha_max_t) {
    if (!std::isfinite(alpha_max_t)) {
        throw DataError("DivergenceState: non-finite alpha_max");
    }
    ++t_;
    prefix_.add(alpha_max_t);
    const double den = prefix_.value();
    const double tf = static_cast<double>(t_);

    double z = 0.0;
    if (std::abs(den) >= eps_den_) {
        // Grouped as tau * ((t * alpha) / den): a constant alpha stream makes
        // numerator and denominator the same rounded double, so z == -tau at
        // every step and df stays pinned at exactly 1.
        z = -tau_ * ((tf * alpha_max_t) / den);
    }
    z_.push_back(z);

    // df = min(len * softmax(z window)[last], 1), with the multiply-first
    // grouping (len * e) / sum so the all-equal-z case gives exactly 1.
    if (history_cap_ == 0) {
        if (t_ == 1 || z > max_z_) {
            // rescale the running sum to the new maximum
            sum_exp_ = (t_ == 1) ? 0.0 : sum_exp_ * std::exp(max_z_ - z);
            max_z_ = z;
        }
        const double e = std::exp(z - max_z_);
        sum_exp_ += e;
        return std::min((tf * e) / sum_exp_, 1.0);
    }

    const std::size_t window = std::min(z_.size(), history_cap_);
    const auto first = z_.end() - static_cast<std::ptrdiff_t>(window);
    const double m = *std::max_element(first, z_.end());
    double sum = 0.0;
    for (auto it = first; it != z_.end(); ++it) {
        sum += std::exp(*it - m);
    }
    const double len = static_cast<double>(window);
    return std::min((len * std::exp(z - m)) / sum, 1.0);
}

std::vector<double> combine_weights(std::span<const double> rcs,
                                    std::span<const double> acs, double df) {
    if (rcs.size() != acs.size()) {
        throw ArgumentError("combine_weights: length mismatch");
    }
    if (rcs.empty()) {
        throw ArgumentError("combine_weights: empty inputs");
    }
    if (!(df >= 0.0 && df <= 1.0)) {
        throw ArgumentError("combine_weights: df outside [0, 1]");
    }
    std::vector<double> out(rcs.size());
    for (std::size_t i = 0; i < rcs.size(); ++i) {
        out[i] = df * rcs[i] + (1.0 - df) * acs[i];
    }
    return out;
}

} // namespace coba
