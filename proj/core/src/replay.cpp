// SPDX-License-Identifier: Apache-2.0
#include "coba/replay.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "coba/errors.hpp"

namespace coba {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& cell, std::size_t row) {
    const std::string t = trim(cell);
    if (t.empty()) {
        throw FormatError("trajectory CSV: empty cell in row " + std::to_string(row));
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw FormatError("trajectory CSV: bad number '" + t + "' in row " +
                          std::to_string(row));
    }
    return v;
}

std::int64_t parse_step(const std::string& cell, std::size_t row) {
    const std::string t = trim(cell);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw FormatError("trajectory CSV: bad step '" + t + "' in row " +
                          std::to_string(row));
    }
    return v;
}

void append_g17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

LossTrajectory parse_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("trajectory CSV: missing header");
    }
    const auto header = split_csv_line(line);
    if (header.size() < 2 || trim(header[0]) != "step") {
        throw FormatError("trajectory CSV: header must be step,loss_<name>,...");
    }

    LossTrajectory traj;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const std::string col = trim(header[i]);
        if (col.rfind("loss_", 0) != 0 || col.size() <= 5) {
            throw FormatError("trajectory CSV: column '" + col +
                              "' is not of the form loss_<name>");
        }
        traj.task_names.push_back(col.substr(5));
    }

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw FormatError("trajectory CSV: row " + std::to_string(row) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(header.size()));
        }
        const std::int64_t step = parse_step(cells[0], row);
        if (step < 0) {
            throw DataError("trajectory CSV: negative step in row " + std::to_string(row));
        }
        if (!traj.steps.empty() && step <= traj.steps.back()) {
            throw OrderingError("trajectory CSV: step column not strictly increasing at row " +
                                std::to_string(row));
        }
        std::vector<double> losses(traj.num_tasks());
        for (std::size_t i = 0; i < losses.size(); ++i) {
            losses[i] = parse_double(cells[i + 1], row);
            if (!std::isfinite(losses[i]) || losses[i] <= 0.0) {
                throw DataError("trajectory CSV: non-positive or non-finite loss in row " +
                                std::to_string(row));
            }
        }
        traj.steps.push_back(step);
        traj.losses.push_back(std::move(losses));
    }
    if (traj.steps.empty()) {
        throw FormatError("trajectory CSV: no data rows");
    }
    return traj;
}

LossTrajectory load_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open trajectory CSV '" + path + "'");
    }
    return parse_trajectory_csv(in);
}

WeightTrace run_replay(const LossTrajectory& traj, SchedulerKind kind,
                       const CobaConfig& config) {
    if (static_cast<std::size_t>(config.num_tasks) != traj.num_tasks()) {
        throw ConfigError("run_replay: config has " + std::to_string(config.num_tasks) +
                          " tasks but trajectory has " + std::to_string(traj.num_tasks()));
    }
    WeightTrace trace;
    trace.kind = kind;
    trace.config = config;
    trace.task_names = traj.task_names;
    trace.records.reserve(traj.num_steps());

    Scheduler scheduler(kind, config);
    for (const auto& row : traj.losses) {
        trace.records.push_back(scheduler.step(row));
    }
    return trace;
}

void write_trace_csv(const WeightTrace& trace, std::ostream& out) {
    std::string line = "step,df";
    for (const auto& name : trace.task_names) {
        line += ",w_" + name + ",rcs_" + name + ",acs_" + name + ",alpha_" + name +
                ",ratio_" + name;
    }
    out << line << '\n';

    for (const WeightRecord& rec : trace.records) {
        line.clear();
        line += std::to_string(rec.step);
        line += ',';
        append_g17(line, rec.df);
        for (std::size_t i = 0; i < trace.task_names.size(); ++i) {
            line += ',';
            append_g17(line, rec.weights[i]);
            line += ',';
            append_g17(line, rec.rcs[i]);
            line += ',';
            append_g17(line, rec.acs[i]);
            line += ',';
            append_g17(line, rec.slopes[i]);
            line += ',';
            append_g17(line, rec.loss_ratios[i]);
        }
        out << line << '\n';
    }
}

void write_trace_csv(const WeightTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open trace output '" + path + "'");
    }
    write_trace_csv(trace, out);
    out.flush();
    if (!out) {
        throw IoError("failed writing trace to '" + path + "'");
    }
}

std::vector<double> minmax_normalize(std::span<const double> series) {
    if (series.empty()) {
        throw ArgumentError("minmax_normalize: empty series");
    }
    const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> out(series.size());
    if (hi == lo) {
        return out; // constant series maps to zeros
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < series.size(); ++i) {
        out[i] = (series[i] - lo) / range;
    }
    return out;
}

double SyntheticCurve::value_at(std::int64_t s) const {
    double v = amplitude * std::exp(-decay_rate * static_cast<double>(s)) + offset;
    if (turn_step >= 0 && s > turn_step) {
        v += turn_gain * static_cast<double>(s - turn_step);
    }
    return v;
}

LossTrajectory synthetic_trajectory(std::span<const SyntheticCurve> curves,
                                    std::int64_t num_steps, double noise_sigma,
                                    std::uint64_t seed) {
    if (curves.empty() || num_steps < 1) {
        throw ArgumentError("synthetic_trajectory: need at least one curve and one step");
    }
    LossTrajectory traj;
    for (const auto& c : curves) {
        traj.task_names.push_back(c.name);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    traj.steps.reserve(static_cast<std::size_t>(num_steps));
    traj.losses.reserve(static_cast<std::size_t>(num_steps));
    for (std::int64_t s = 0; s < num_steps; ++s) {
        std::vector<double> row(curves.size());
        for (std::size_t i = 0; i < curves.size(); ++i) {
            double v = curves[i].value_at(s);
            if (noise_sigma > 0.0) {
                v += noise_sigma * noise(rng);
            }
            row[i] = std::max(v, 1e-9);
        }
        traj.steps.push_back(s);
        traj.losses.push_back(std::move(row));
    }
    return traj;
}

} // namespace coba
