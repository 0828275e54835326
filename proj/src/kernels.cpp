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

#include "gaitgp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaitgp/errors.hpp"

namespace gaitgp::kernels {

namespace {

double floored(double v) { return std::max(v, kParamFloor); }

// d(floored(exp(theta)))/d(theta) divided by the floored value: 1 above the floor, 0 on it.
double log_active(double v) { return v > kParamFloor ? 1.0 : 0.0; }

void check_lengths(std::span<const double> times, std::span<const int> outputs) {
    if (times.size() != outputs.size()) {
        throw ValidationError("times and outputs differ in length (" + std::to_string(times.size()) +
                              " vs " + std::to_string(outputs.size()) + ")");
    }
    if (times.empty()) {
        throw ValidationError("kernel evaluation needs at least one input point");
    }
}

void check_outputs(const CoregionalizationFactor& coreg, std::span<const int> outputs) {
    for (int m : outputs) {
        if (m < 0 || m >= coreg.outputs()) {
            throw ValidationError("invalid output index " + std::to_string(m) + " (M = " +
                                  std::to_string(coreg.outputs()) + ")");
        }
    }
}

} // namespace

Eigen::MatrixXd CoregionalizationFactor::matrix() const {
    Eigen::MatrixXd b = w * w.transpose();
    for (int m = 0; m < outputs(); ++m) {
        b(m, m) += std::max(kappa(m), 0.0);
    }
    return b;
}

double eval_se(const SubKernelParams& p, double t, double t_prime) {
    const double d = t - t_prime;
    const double l = floored(p.lengthscale);
    return floored(p.variance) * std::exp(-d * d / (2.0 * l * l));
}

double eval_matern32(const SubKernelParams& p, double t, double t_prime) {
    const double a = std::sqrt(3.0) * std::abs(t - t_prime) / floored(p.lengthscale);
    return floored(p.variance) * (1.0 + a) * std::exp(-a);
}

double eval_periodic(const SubKernelParams& p, double t, double t_prime) {
    const double l = floored(p.lengthscale);
    const double s = std::sin(std::numbers::pi * std::abs(t - t_prime) / floored(p.period));
    return floored(p.variance) * std::exp(-2.0 * s * s / (l * l));
}

double eval_composite(const CompositeKernelSpec& spec, double t, double t_prime) {
    return eval_periodic(spec.periodic, t, t_prime) + eval_se(spec.se, t, t_prime) +
           eval_matern32(spec.matern32, t, t_prime);
}

double icm_covariance(const CompositeKernelSpec& spec, const CoregionalizationFactor& coreg,
                      int m, int m_prime, double t, double t_prime) {
    const int outs[2] = {m, m_prime};
    check_outputs(coreg, outs);
    double b = coreg.w.row(m).dot(coreg.w.row(m_prime));
    if (m == m_prime) {
        b += std::max(coreg.kappa(m), 0.0);
    }
    return b * eval_composite(spec, t, t_prime);
}

Eigen::MatrixXd gram_matrix(const CompositeKernelSpec& spec, const CoregionalizationFactor& coreg,
                            std::span<const double> times, std::span<const int> outputs) {
    check_lengths(times, outputs);
    check_outputs(coreg, outputs);
    const Eigen::MatrixXd b = coreg.matrix();
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = b(outputs[i], outputs[j]) * eval_composite(spec, times[i], times[j]);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

Eigen::MatrixXd cross_covariance(const CompositeKernelSpec& spec, const CoregionalizationFactor& coreg,
                                 std::span<const double> times_a, std::span<const int> outputs_a,
                                 std::span<const double> times_b, std::span<const int> outputs_b) {
    check_lengths(times_a, outputs_a);
    check_lengths(times_b, outputs_b);
    check_outputs(coreg, outputs_a);
    check_outputs(coreg, outputs_b);
    const Eigen::MatrixXd b = coreg.matrix();
    Eigen::MatrixXd k(times_a.size(), times_b.size());
    for (std::size_t i = 0; i < times_a.size(); ++i) {
        for (std::size_t j = 0; j < times_b.size(); ++j) {
            k(i, j) = b(outputs_a[i], outputs_b[j]) * eval_composite(spec, times_a[i], times_b[j]);
        }
    }
    return k;
}

TimeKernelTerms composite_with_gradient(const CompositeKernelSpec& spec, double t, double t_prime) {
    TimeKernelTerms out;
    const double r = std::abs(t - t_prime);

    {
        const auto& p = spec.periodic;
        const double l = floored(p.lengthscale);
        const double period = floored(p.period);
        const double phase = std::numbers::pi * r / period;
        const double s = std::sin(phase);
        const double k = floored(p.variance) * std::exp(-2.0 * s * s / (l * l));
        out.value += k;
        out.grad[kLogPeriodicVariance] = k * log_active(p.variance);
        out.grad[kLogPeriodicLengthscale] = k * 4.0 * s * s / (l * l) * log_active(p.lengthscale);
        out.grad[kLogPeriod] = k * 4.0 * s * std::cos(phase) * phase / (l * l) * log_active(p.period);
    }
    {
        const auto& p = spec.se;
        const double l = floored(p.lengthscale);
        const double q = r * r / (l * l);
        const double k = floored(p.variance) * std::exp(-0.5 * q);
        out.value += k;
        out.grad[kLogSeVariance] = k * log_active(p.variance);
        out.grad[kLogSeLengthscale] = k * q * log_active(p.lengthscale);
    }
    {
        const auto& p = spec.matern32;
        const double a = std::sqrt(3.0) * r / floored(p.lengthscale);
        const double e = std::exp(-a);
        const double v = floored(p.variance);
        const double k = v * (1.0 + a) * e;
        out.value += k;
        out.grad[kLogMaternVariance] = k * log_active(p.variance);
        out.grad[kLogMaternLengthscale] = v * a * a * e * log_active(p.lengthscale);
    }
    return out;
}

std::vector<Eigen::MatrixXd> kernel_gradients(const CompositeKernelSpec& spec,
                                              const CoregionalizationFactor& coreg,
                                              std::span<const double> times,
                                              std::span<const int> outputs) {
    check_lengths(times, outputs);
    check_outputs(coreg, outputs);
    const int big_m = coreg.outputs();
    const int rank = coreg.rank();
    const auto n = static_cast<Eigen::Index>(times.size());
    const Eigen::MatrixXd b = coreg.matrix();

    std::vector<Eigen::MatrixXd> grads(kNumKernelParams + big_m * rank + big_m,
                                       Eigen::MatrixXd::Zero(n, n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const int mi = outputs[i];
            const int mj = outputs[j];
            const TimeKernelTerms terms = composite_with_gradient(spec, times[i], times[j]);
            auto put = [&](std::size_t idx, double v) {
                grads[idx](i, j) = v;
                grads[idx](j, i) = v;
            };
            for (int p = 0; p < kNumKernelParams; ++p) {
                put(p, b(mi, mj) * terms.grad[p]);
            }
            // dB[mi,mj]/dW[a,r] = [mi==a] W[mj,r] + [mj==a] W[mi,r]
            for (int r = 0; r < rank; ++r) {
                const std::size_t base = kNumKernelParams + r;
                grads[base + mi * rank](i, j) += coreg.w(mj, r) * terms.value;
                grads[base + mj * rank](i, j) += coreg.w(mi, r) * terms.value;
                if (i != j) {
                    grads[base + mi * rank](j, i) += coreg.w(mj, r) * terms.value;
                    grads[base + mj * rank](j, i) += coreg.w(mi, r) * terms.value;
                }
            }
            if (mi == mj) {
                const double kap = coreg.kappa(mi);
                put(kNumKernelParams + big_m * rank + mi, kap * log_active(kap) * terms.value);
            }
        }
    }
    return grads;
}

std::vector<std::string> kernel_gradient_names(int outputs, int rank) {
    std::vector<std::string> names = {"log_periodic_variance", "log_periodic_lengthscale",
                                      "log_period",            "log_se_variance",
                                      "log_se_lengthscale",    "log_matern_variance",
                                      "log_matern_lengthscale"};
    for (int m = 0; m < outputs; ++m) {
        for (int r = 0; r < rank; ++r) {
            names.push_back("w[" + std::to_string(m) + "," + std::to_string(r) + "]");
        }
    }
    for (int m = 0; m < outputs; ++m) {
        names.push_back("log_kappa[" + std::to_string(m) + "]");
    }
    return names;
}

} // namespace gaitgp::kernels
