/*
 * Copyright 2026 The gaitgp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gaitgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gaitgp/errors.hpp"

namespace gaitgp::metrics {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> truth, std::size_t min_len) {
    if (pred.size() != truth.size()) {
        throw ValidationError("prediction and truth differ in length (" + std::to_string(pred.size()) +
                              " vs " + std::to_string(truth.size()) + ")");
    }
    if (pred.size() < min_len) {
        throw ValidationError("metric needs at least " + std::to_string(min_len) + " points");
    }
}

void check_sets(const std::vector<std::vector<double>>& pred_set, const std::vector<std::vector<double>>& truth_set) {
    if (pred_set.size() != truth_set.size() || pred_set.empty()) {
        throw ValidationError("prediction and truth channel sets do not match");
    }
}

} // namespace

double mae(std::span<const double> pred, std::span<const double> truth) {
    check_pair(pred, truth, 1);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

double r_squared(std::span<const double> pred, std::span<const double> truth) {
    check_pair(pred, truth, 2);
    double mean = 0.0;
    for (double v : truth) mean += v;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (!(ss_tot > 0.0)) throw ValidationError("R^2 is undefined for a constant truth sequence");
    return 1.0 - ss_res / ss_tot;
}

double dtw(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ValidationError("dtw needs non-empty sequences");
    const std::size_t m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf);
    std::vector<double> cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            cur[j] = std::abs(a[i - 1] - b[j - 1]) + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double adtw(const std::vector<std::vector<double>>& pred_set, const std::vector<std::vector<double>>& truth_set) {
    check_sets(pred_set, truth_set);
    double s = 0.0;
    for (std::size_t c = 0; c < pred_set.size(); ++c) s += dtw(pred_set[c], truth_set[c]);
    return s / static_cast<double>(pred_set.size());
}

MetricReport evaluate(const std::vector<std::vector<double>>& pred_set,
                      const std::vector<std::vector<double>>& truth_set) {
    check_sets(pred_set, truth_set);
    MetricReport r;
    const double n = static_cast<double>(pred_set.size());
    for (std::size_t c = 0; c < pred_set.size(); ++c) {
        r.mae_per_output.push_back(mae(pred_set[c], truth_set[c]));
        r.r_squared_per_output.push_back(r_squared(pred_set[c], truth_set[c]));
        r.dtw_per_output.push_back(dtw(pred_set[c], truth_set[c]));
        r.mae += r.mae_per_output.back();
        r.r_squared += r.r_squared_per_output.back();
        r.adtw += r.dtw_per_output.back();
    }
    r.mae /= n;
    r.r_squared /= n;
    r.adtw /= n;
    return r;
}

MetricReport average(std::span<const MetricReport> reports) {
    if (reports.empty()) throw ValidationError("no reports to average");
    const std::size_t outs = reports.front().mae_per_output.size();
    MetricReport avg;
    avg.mae_per_output.assign(outs, 0.0);
    avg.r_squared_per_output.assign(outs, 0.0);
    avg.dtw_per_output.assign(outs, 0.0);
    for (const auto& r : reports) {
        if (r.mae_per_output.size() != outs) throw ValidationError("reports disagree on the number of outputs");
        avg.mae += r.mae;
        avg.r_squared += r.r_squared;
        avg.adtw += r.adtw;
        for (std::size_t c = 0; c < outs; ++c) {
            avg.mae_per_output[c] += r.mae_per_output[c];
            avg.r_squared_per_output[c] += r.r_squared_per_output[c];
            avg.dtw_per_output[c] += r.dtw_per_output[c];
        }
    }
    const double n = static_cast<double>(reports.size());
    avg.mae /= n;
    avg.r_squared /= n;
    avg.adtw /= n;
    for (std::size_t c = 0; c < outs; ++c) {
        avg.mae_per_output[c] /= n;
        avg.r_squared_per_output[c] /= n;
        avg.dtw_per_output[c] /= n;
    }
    return avg;
}

std::string to_table(const MetricReport& report, const std::vector<std::string>& output_names) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %14s %14s %14s\n", "output", "mae", "r_squared", "dtw");
    out += line;
    for (std::size_t c = 0; c < report.mae_per_output.size(); ++c) {
        const std::string name = c < output_names.size() ? output_names[c] : std::to_string(c);
        std::snprintf(line, sizeof(line), "%-14s %14.6f %14.6f %14.6f\n", name.c_str(), report.mae_per_output[c],
                      report.r_squared_per_output[c], report.dtw_per_output[c]);
        out += line;
    }
    std::snprintf(line, sizeof(line), "%-14s %14.6f %14.6f %14.6f\n", "all", report.mae, report.r_squared,
                  report.adtw);
    out += line;
    return out;
}

} // namespace gaitgp::metrics
