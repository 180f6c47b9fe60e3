// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace coba {

/// Result of an ordinary least-squares line fit over a loss-ratio window.
struct SlopeEstimate {
    double alpha = 0.0;      ///< fitted slope per step; forced to 0 below 2 points
    double beta = 0.0;       ///< fitted intercept
    std::size_t n_points = 0;
};

/// Per-task sliding window of (step, validation-loss-ratio) pairs.
///
/// The first pushed loss becomes the base loss; every stored ratio is
/// raw_loss / base_loss. The window is capacity-bounded: pushing beyond
/// capacity evicts the oldest entry. Steps must be strictly increasing.
///
/// Single writer per window; fit() and entries() are pure reads and may be
/// called from any thread as long as no push() is in flight.
class LossRatioWindow {
  public:
    struct Entry {
        std::int64_t step;
        double ratio;
    };

    /// Base losses below this floor are clamped so the ratio stays finite.
    static constexpr double kBaseLossFloor = 1e-12;

    explicit LossRatioWindow(std::size_t capacity, std::string task_id = {});

    /// Record a raw validation loss at the given step.
    ///
    /// Throws DataError for non-finite or negative losses, OrderingError
    /// when the step does not advance.
    void push(std::int64_t step, double raw_loss);

    /// Fit ratio ~ alpha * step + beta over the current window contents.
    ///
    /// Uses the closed-form solution of the normal equations with centered
    /// steps (numerically stable for large step values). With fewer than
    /// two points the slope is defined to be zero and beta is the last
    /// ratio (0 if the window is empty).
    SlopeEstimate fit() const noexcept;

    /// Snapshot of the window contents in step order.
    std::vector<Entry> entries() const;

    bool empty() const noexcept { return buf_.empty(); }
    std::size_t size() const noexcept { return buf_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    const std::string& task_id() const noexcept { return task_id_; }

    /// First observed raw loss (after the floor clamp); 0 before any push.
    double base_loss() const noexcept { return base_loss_; }

    /// Most recent ratio; requires a non-empty window.
    double latest_ratio() const;

  private:
    std::size_t capacity_;
    std::string task_id_;
    double base_loss_ = 0.0;
    std::deque<Entry> buf_;
};

} // namespace coba
