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

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gaitgp::kernels {

/// Lower bound applied to every variance, length-scale, period and diagonal boost.
inline constexpr double kParamFloor = 1e-10;

struct SubKernelParams {
    double variance = 1.0;
    double lengthscale = 0.2;
    double period = 1.0; // only read by the periodic kernel
};

struct CompositeKernelSpec {
    SubKernelParams periodic;
    SubKernelParams se;
    SubKernelParams matern32;
};

/// Output-correlation factor: B = W W^T + diag(kappa).
struct CoregionalizationFactor {
    Eigen::MatrixXd w;     // M x R
    Eigen::VectorXd kappa; // M, non-negative

    int outputs() const { return static_cast<int>(w.rows()); }
    int rank() const { return static_cast<int>(w.cols()); }
    Eigen::MatrixXd matrix() const;
};

double eval_se(const SubKernelParams& p, double t, double t_prime);
double eval_matern32(const SubKernelParams& p, double t, double t_prime);
double eval_periodic(const SubKernelParams& p, double t, double t_prime);
double eval_composite(const CompositeKernelSpec& spec, double t, double t_prime);

/// B[m, m'] * k_t(t, t'). Throws ValidationError on an out-of-range output index.
double icm_covariance(const CompositeKernelSpec& spec, const CoregionalizationFactor& coreg,
                      int m, int m_prime, double t, double t_prime);

Eigen::MatrixXd gram_matrix(const CompositeKernelSpec& spec, const CoregionalizationFactor& coreg,
                            std::span<const double> times, std::span<const int> outputs);

/// Cross-covariance between (times_a, outputs_a) rows and (times_b, outputs_b) columns.
Eigen::MatrixXd cross_covariance(const CompositeKernelSpec& spec, const CoregionalizationFactor& coreg,
                                 std::span<const double> times_a, std::span<const int> outputs_a,
                                 std::span<const double> times_b, std::span<const int> outputs_b);

/// Indices of the time-kernel hyperparameters inside the unconstrained vector.
enum KernelParam : int {
    kLogPeriodicVariance = 0,
    kLogPeriodicLengthscale,
    kLogPeriod,
    kLogSeVariance,
    kLogSeLengthscale,
    kLogMaternVariance,
    kLogMaternLengthscale,
    kNumKernelParams
};

/// Value of the composite time kernel plus its derivatives with respect to the
/// seven log-space hyperparameters, evaluated for one pair of times.
struct TimeKernelTerms {
    double value = 0.0;
    std::array<double, kNumKernelParams> grad{};
};

TimeKernelTerms composite_with_gradient(const CompositeKernelSpec& spec, double t, double t_prime);

/// dK/dtheta for every unconstrained hyperparameter, in the order
/// [7 time-kernel log-params, W row-major (M*R), log kappa (M)].
std::vector<Eigen::MatrixXd> kernel_gradients(const CompositeKernelSpec& spec,
                                              const CoregionalizationFactor& coreg,
                                              std::span<const double> times,
                                              std::span<const int> outputs);

/// Human-readable names matching the order of kernel_gradients().
std::vector<std::string> kernel_gradient_names(int outputs, int rank);

} // namespace gaitgp::kernels
