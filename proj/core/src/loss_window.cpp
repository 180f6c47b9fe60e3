// SPDX-License-Identifier: Apache-2.0
#include "coba/loss_window.hpp"

#include <cmath>

#include "coba/errors.hpp"

namespace coba {

LossRatioWindow::LossRatioWindow(std::size_t capacity, std::string task_id)
    : capacity_(capacity), task_id_(std::move(task_id)) {
    if (capacity_ == 0) {
        throw ArgumentError("LossRatioWindow: capacity must be at least 1");
    }
}

void LossRatioWindow::push(std::int64_t step, double raw_loss) {
    if (!std::isfinite(raw_loss)) {
        throw DataError("LossRatioWindow[" + task_id_ + "]: non-finite loss at step " +
                        std::to_string(step));
    }
    if (raw_loss < 0.0) {
        throw DataError("LossRatioWindow[" + task_id_ + "]: negative loss at step " +
                        std::to_string(step));
    }
    if (!buf_.empty() && step <= buf_.back().step) {
        throw OrderingError("LossRatioWindow[" + task_id_ + "]: step " + std::to_string(step) +
                            " does not advance past " + std::to_string(buf_.back().step));
    }
    if (buf_.empty() && base_loss_ == 0.0) {
        base_loss_ = std::max(raw_loss, kBaseLossFloor);
    }
    buf_.push_back({step, raw_loss / base_loss_});
    if (buf_.size() > capacity_) {
        buf_.pop_front();
    }
}

SlopeEstimate LossRatioWindow::fit() const noexcept {
    SlopeEstimate est;
    est.n_points = buf_.size();
    if (buf_.size() < 2) {
        est.beta = buf_.empty() ? 0.0 : buf_.back().ratio;
        return est;
    }

    const double n = static_cast<double>(buf_.size());
    double mean_step = 0.0;
    double mean_ratio = 0.0;
    for (const Entry& e : buf_) {
        mean_step += static_cast<double>(e.step);
        mean_ratio += e.ratio;
    }
    mean_step /= n;
    mean_ratio /= n;

    double sxx = 0.0;
    double sxy = 0.0;
    for (const Entry& e : buf_) {
        const double ds = static_cast<double>(e.step) - mean_step;
        sxx += ds * ds;
        sxy += ds * (e.ratio - mean_ratio);
    }

    // Strictly increasing steps make sxx > 0; the guard is defensive only.
    if (sxx <= 0.0) {
        est.beta = mean_ratio;
        return est;
    }
    est.alpha = sxy / sxx;
    est.beta = mean_ratio - est.alpha * mean_step;
    return est;
}

std::vector<LossRatioWindow::Entry> LossRatioWindow::entries() const {
    return {buf_.begin(), buf_.end()};
}

double LossRatioWindow::latest_ratio() const {
    if (buf_.empty()) {
        throw ArgumentError("LossRatioWindow[" + task_id_ + "]: latest_ratio on empty window");
    }
    return buf_.back().ratio;
}

} // namespace coba
