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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitgp/kernels.hpp"

namespace gaitgp::mogp {

/// Observations of M outputs on normalized time. Parallel arrays of equal length.
struct TrainingSet {
    int num_outputs = 0;
    std::vector<double> times;
    std::vector<int> outputs;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }

    /// Throws ValidationError. With `for_fit`, every output must have at least two points.
    void validate(bool for_fit) const;

    /// FNV-1a over the exact bit patterns of the three arrays.
    std::uint64_t hash() const;
};

/// Unconstrained parameter state: log-space kernel terms, raw W, log kappa,
/// per-output constant means and log noise variance.
struct HyperParameters {
    std::array<double, kernels::kNumKernelParams> kernel_log{};
    Eigen::MatrixXd w;
    Eigen::VectorXd log_kappa;
    Eigen::VectorXd means;
    double log_noise = 0.0;

    int outputs() const { return static_cast<int>(w.rows()); }
    int rank() const { return static_cast<int>(w.cols()); }

    kernels::CompositeKernelSpec kernel() const;
    kernels::CoregionalizationFactor coreg() const;
    double noise_variance() const;

    Eigen::Index size() const;
    Eigen::VectorXd pack() const;
    void unpack(const Eigen::VectorXd& theta);
    /// Per-entry flag: weight decay applies (everything but the means).
    Eigen::VectorXd decay_mask() const;
    static std::vector<std::string> names(int outputs, int rank);
};

/// Noise variance floor.
inline constexpr double kNoiseFloor = 1e-10;

struct InitConfig {
    int rank = 2;
    double variance = 1.0;
    double lengthscale = 0.2;
    double period = 1.0;
    double w_stddev = 0.5;
    double kappa = 0.5;
    double noise_variance = 0.1;
};

/// Default starting point. W entries are drawn from N(0, w_stddev^2) with `seed`;
/// means start at the per-output sample mean of `training` (zero for absent outputs).
HyperParameters initial_hyperparameters(const TrainingSet& training, const InitConfig& init,
                                        std::uint64_t seed);

struct OptimizerConfig {
    int iterations = 2000;
    double learning_rate = 7.5e-3;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double early_stop_tolerance = 1e-6;
    int early_stop_window = 50;
    std::uint64_t seed = 0;
    InitConfig init;
};

struct PosteriorPrediction {
    std::vector<double> times;
    std::vector<std::vector<double>> mean;   // [output][query]
    std::vector<std::vector<double>> stddev; // [output][query], includes observation noise
    int clamped_variances = 0;
    int extrapolated_queries = 0; // query times outside [0, 1]
};

/// A fitted (or hand-built) exact MoGP. Immutable once constructed; the
/// Cholesky factor and the weight vector are computed in the constructor.
class MoGPModel {
public:
    MoGPModel(HyperParameters params, TrainingSet training);

    const HyperParameters& params() const { return params_; }
    const TrainingSet& training() const { return training_; }
    double jitter() const { return jitter_; }

    double log_marginal_likelihood() const { return lml_; }
    /// d LML / d theta in HyperParameters::pack() order.
    Eigen::VectorXd lml_gradient() const;

    PosteriorPrediction predict(std::span<const double> query_times) const;

    /// Posterior mean and predictive variance (noise included) at arbitrary (time, output) pairs.
    void predict_points(std::span<const double> times, std::span<const int> outputs,
                        Eigen::VectorXd& mean, Eigen::VectorXd& variance,
                        int* clamped = nullptr) const;

private:
    HyperParameters params_;
    TrainingSet training_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
    double lml_ = 0.0;
};

struct FitResult {
    MoGPModel model;
    std::vector<double> lml_trace; // LML at the start of each iteration, plus the final value
    int iterations_run = 0;
    bool early_stopped = false;
};

/// Adam ascent on the log marginal likelihood from `start`. L2 weight decay is
/// folded into the gradient for every entry except the means. Returns the best
/// iterate seen.
FitResult fit_from(const HyperParameters& start, const TrainingSet& training,
                   const OptimizerConfig& config);

FitResult fit(const TrainingSet& training, const OptimizerConfig& config);

struct CoregionalizationExport {
    Eigen::MatrixXd covariance;  // B
    Eigen::MatrixXd correlation; // B[m,m'] / sqrt(B[m,m] B[m',m'])
};

CoregionalizationExport export_coregionalization(const MoGPModel& model);
CoregionalizationExport export_coregionalization(const kernels::CoregionalizationFactor& coreg);

} // namespace gaitgp::mogp
