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

#pragma once

#include <span>
#include <string>
#include <vector>

namespace gaitgp::metrics {

/// Mean absolute error, summed left to right then divided by n.
double mae(std::span<const double> pred, std::span<const double> truth);

/// 1 - SS_res / SS_tot with SS_tot centred on the truth mean.
double r_squared(std::span<const double> pred, std::span<const double> truth);

/// Classical DTW: absolute-difference local cost, no band, steps (1,0), (0,1), (1,1).
double dtw(std::span<const double> a, std::span<const double> b);

/// Mean of per-channel dtw.
double adtw(const std::vector<std::vector<double>>& pred_set, const std::vector<std::vector<double>>& truth_set);

struct MetricReport {
    double mae = 0.0;       // mean of per-output MAE
    double r_squared = 0.0; // mean of per-output R^2
    double adtw = 0.0;      // mean of per-output DTW
    std::vector<double> mae_per_output;
    std::vector<double> r_squared_per_output;
    std::vector<double> dtw_per_output;
};

MetricReport evaluate(const std::vector<std::vector<double>>& pred_set,
                      const std::vector<std::vector<double>>& truth_set);

/// Field-wise arithmetic mean of several reports (same number of outputs).
MetricReport average(std::span<const MetricReport> reports);

/// Flat whitespace-aligned table, one row per output plus an "all" row.
std::string to_table(const MetricReport& report, const std::vector<std::string>& output_names);

} // namespace gaitgp::metrics
