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

#include "gaitgp/mogp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gaitgp/errors.hpp"

namespace gaitgp::mogp {

using kernels::kNumKernelParams;

// ---------------------------------------------------------------------------
// TrainingSet

void TrainingSet::validate(bool for_fit) const {
    if (num_outputs < 1) {
        throw ValidationError("training set needs at least one output");
    }
    if (times.size() != outputs.size() || times.size() != values.size()) {
        throw ValidationError("training set arrays differ in length");
    }
    if (times.empty()) {
        throw ValidationError("training set is empty");
    }
    std::vector<int> counts(num_outputs, 0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0 || times[i] > 1.0) {
            throw ValidationError("training time " + std::to_string(i) + " outside [0, 1]");
        }
        if (!std::isfinite(values[i])) {
            throw ValidationError("training value " + std::to_string(i) + " is not finite");
        }
        if (outputs[i] < 0 || outputs[i] >= num_outputs) {
            throw ValidationError("training output index " + std::to_string(outputs[i]) +
                                  " out of range");
        }
        ++counts[outputs[i]];
    }
    if (for_fit) {
        for (int m = 0; m < num_outputs; ++m) {
            if (counts[m] < 2) {
                throw ValidationError("output " + std::to_string(m) +
                                      " has fewer than 2 training points");
            }
        }
    }
}

std::uint64_t TrainingSet::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(num_outputs));
    for (double t : times) mix(std::bit_cast<std::uint64_t>(t));
    for (int m : outputs) mix(static_cast<std::uint64_t>(m));
    for (double v : values) mix(std::bit_cast<std::uint64_t>(v));
    return h;
}

// ---------------------------------------------------------------------------
// HyperParameters

namespace {

double from_log(double theta) { return std::max(std::exp(theta), kernels::kParamFloor); }

} // namespace

kernels::CompositeKernelSpec HyperParameters::kernel() const {
    using namespace kernels;
    CompositeKernelSpec spec;
    spec.periodic = {from_log(kernel_log[kLogPeriodicVariance]),
                     from_log(kernel_log[kLogPeriodicLengthscale]), from_log(kernel_log[kLogPeriod])};
    spec.se = {from_log(kernel_log[kLogSeVariance]), from_log(kernel_log[kLogSeLengthscale]), 1.0};
    spec.matern32 = {from_log(kernel_log[kLogMaternVariance]),
                     from_log(kernel_log[kLogMaternLengthscale]), 1.0};
    return spec;
}

kernels::CoregionalizationFactor HyperParameters::coreg() const {
    kernels::CoregionalizationFactor c;
    c.w = w;
    c.kappa = log_kappa.unaryExpr([](double v) { return from_log(v); });
    return c;
}

double HyperParameters::noise_variance() const { return std::max(std::exp(log_noise), kNoiseFloor); }

Eigen::Index HyperParameters::size() const {
    return kNumKernelParams + w.size() + log_kappa.size() + means.size() + 1;
}

Eigen::VectorXd HyperParameters::pack() const {
    Eigen::VectorXd theta(size());
    Eigen::Index k = 0;
    for (double v : kernel_log) theta(k++) = v;
    for (Eigen::Index m = 0; m < w.rows(); ++m)
        for (Eigen::Index r = 0; r < w.cols(); ++r) theta(k++) = w(m, r);
    for (Eigen::Index m = 0; m < log_kappa.size(); ++m) theta(k++) = log_kappa(m);
    for (Eigen::Index m = 0; m < means.size(); ++m) theta(k++) = means(m);
    theta(k) = log_noise;
    return theta;
}

void HyperParameters::unpack(const Eigen::VectorXd& theta) {
    if (theta.size() != size()) {
        throw ValidationError("parameter vector has wrong size");
    }
    Eigen::Index k = 0;
    for (double& v : kernel_log) v = theta(k++);
    for (Eigen::Index m = 0; m < w.rows(); ++m)
        for (Eigen::Index r = 0; r < w.cols(); ++r) w(m, r) = theta(k++);
    for (Eigen::Index m = 0; m < log_kappa.size(); ++m) log_kappa(m) = theta(k++);
    for (Eigen::Index m = 0; m < means.size(); ++m) means(m) = theta(k++);
    log_noise = theta(k);
}

Eigen::VectorXd HyperParameters::decay_mask() const {
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(size());
    mask.segment(kNumKernelParams + w.size() + log_kappa.size(), means.size()).setZero();
    return mask;
}

std::vector<std::string> HyperParameters::names(int outputs, int rank) {
    auto names = kernels::kernel_gradient_names(outputs, rank);
    for (int m = 0; m < outputs; ++m) names.push_back("mean[" + std::to_string(m) + "]");
    names.push_back("log_noise");
    return names;
}

HyperParameters initial_hyperparameters(const TrainingSet& training, const InitConfig& init,
                                        std::uint64_t seed) {
    const int big_m = training.num_outputs;
    if (init.rank < 1 || init.rank > big_m) {
        throw ValidationError("coregionalization rank must lie in 1.." + std::to_string(big_m));
    }
    HyperParameters p;
    using namespace kernels;
    p.kernel_log[kLogPeriodicVariance] = std::log(init.variance);
    p.kernel_log[kLogSeVariance] = std::log(init.variance);
    p.kernel_log[kLogMaternVariance] = std::log(init.variance);
    p.kernel_log[kLogPeriodicLengthscale] = std::log(init.lengthscale);
    p.kernel_log[kLogSeLengthscale] = std::log(init.lengthscale);
    p.kernel_log[kLogMaternLengthscale] = std::log(init.lengthscale);
    p.kernel_log[kLogPeriod] = std::log(init.period);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, init.w_stddev);
    p.w.resize(big_m, init.rank);
    for (int m = 0; m < big_m; ++m)
        for (int r = 0; r < init.rank; ++r) p.w(m, r) = normal(rng);
    p.log_kappa = Eigen::VectorXd::Constant(big_m, std::log(init.kappa));

    p.means = Eigen::VectorXd::Zero(big_m);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(big_m);
    for (std::size_t i = 0; i < training.size(); ++i) {
        p.means(training.outputs[i]) += training.values[i];
        counts(training.outputs[i]) += 1.0;
    }
    for (int m = 0; m < big_m; ++m) {
        if (counts(m) > 0) p.means(m) /= counts(m);
    }
    p.log_noise = std::log(init.noise_variance);
    return p;
}

// ---------------------------------------------------------------------------
// MoGPModel

namespace {

struct Factorization {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
};

bool usable(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return llt.info() == Eigen::Success && llt.matrixLLT().allFinite();
}

Factorization factorize(Eigen::MatrixXd k) {
    if (!k.allFinite()) throw NumericError("kernel matrix has non-finite entries; hyperparameters overflow");
    Factorization f;
    f.llt.compute(k);
    if (usable(f.llt)) return f;

    const double scale = std::max(k.diagonal().mean(), kernels::kParamFloor);
    for (double rel = 1e-8; rel <= 1e-2 * (1.0 + 1e-12); rel *= 10.0) {
        const double added = rel * scale - f.jitter;
        k.diagonal().array() += added;
        f.jitter = rel * scale;
        f.llt.compute(k);
        if (usable(f.llt)) return f;
    }
    throw NumericError("Cholesky factorization failed after jitter escalation to " +
                       std::to_string(f.jitter) + "; kernel is ill-conditioned");
}

} // namespace

MoGPModel::MoGPModel(HyperParameters params, TrainingSet training)
    : params_(std::move(params)), training_(std::move(training)) {
    training_.validate(false);
    if (params_.outputs() != training_.num_outputs || params_.means.size() != training_.num_outputs ||
        params_.log_kappa.size() != training_.num_outputs) {
        throw ValidationError("hyperparameters and training set disagree on the number of outputs");
    }
    const auto spec = params_.kernel();
    const auto coreg = params_.coreg();
    Eigen::MatrixXd k = kernels::gram_matrix(spec, coreg, training_.times, training_.outputs);
    k.diagonal().array() += params_.noise_variance();
    Factorization f = factorize(std::move(k));
    chol_ = std::move(f.llt);
    jitter_ = f.jitter;

    const auto n = static_cast<Eigen::Index>(training_.size());
    Eigen::VectorXd centered(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        centered(i) = training_.values[i] - params_.means(training_.outputs[i]);
    }
    alpha_ = chol_.solve(centered);

    const Eigen::MatrixXd& l = chol_.matrixLLT();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(l(i, i));
    log_det *= 2.0;
    lml_ = -0.5 * centered.dot(alpha_) - 0.5 * log_det -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Eigen::VectorXd MoGPModel::lml_gradient() const {
    const auto n = static_cast<Eigen::Index>(training_.size());
    const int big_m = params_.outputs();
    const int rank = params_.rank();
    const auto spec = params_.kernel();
    const auto coreg = params_.coreg();
    const Eigen::MatrixXd b = coreg.matrix();

    // Q = alpha alpha^T - K^{-1};  dLML/dtheta = 0.5 * sum(Q .* dK/dtheta)
    Eigen::MatrixXd q = chol_.solve(Eigen::MatrixXd::Identity(n, n));
    q = alpha_ * alpha_.transpose() - q;

    std::array<double, kNumKernelParams> kernel_grad{};
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(big_m, big_m); // sum of Q_ij k_t(ij) per output pair
    for (Eigen::Index i = 0; i < n; ++i) {
        const int mi = training_.outputs[i];
        for (Eigen::Index j = 0; j <= i; ++j) {
            const int mj = training_.outputs[j];
            const double weight = (i == j) ? q(i, j) : 2.0 * q(i, j);
            const auto terms = kernels::composite_with_gradient(spec, training_.times[i], training_.times[j]);
            const double bw = b(mi, mj) * weight;
            for (int p = 0; p < kNumKernelParams; ++p) kernel_grad[p] += bw * terms.grad[p];
            if (i == j) {
                s(mi, mj) += q(i, j) * terms.value;
            } else {
                s(mi, mj) += q(i, j) * terms.value;
                s(mj, mi) += q(i, j) * terms.value;
            }
        }
    }

    Eigen::VectorXd grad(params_.size());
    Eigen::Index k = 0;
    for (int p = 0; p < kNumKernelParams; ++p) grad(k++) = 0.5 * kernel_grad[p];
    const Eigen::MatrixXd gw = s * coreg.w; // 0.5 * (S + S^T) W
    for (int m = 0; m < big_m; ++m)
        for (int r = 0; r < rank; ++r) grad(k++) = gw(m, r);
    for (int m = 0; m < big_m; ++m) {
        const double kap = coreg.kappa(m);
        grad(k++) = kap > kernels::kParamFloor ? 0.5 * s(m, m) * kap : 0.0;
    }
    Eigen::VectorXd gmean = Eigen::VectorXd::Zero(big_m);
    for (Eigen::Index i = 0; i < n; ++i) gmean(training_.outputs[i]) += alpha_(i);
    for (int m = 0; m < big_m; ++m) grad(k++) = gmean(m);
    const double noise = params_.noise_variance();
    grad(k) = std::exp(params_.log_noise) > kNoiseFloor ? 0.5 * q.trace() * noise : 0.0;
    return grad;
}

void MoGPModel::predict_points(std::span<const double> times, std::span<const int> outputs,
                               Eigen::VectorXd& mean, Eigen::VectorXd& variance, int* clamped) const {
    const auto spec = params_.kernel();
    const auto coreg = params_.coreg();
    const Eigen::MatrixXd b = coreg.matrix();
    const Eigen::MatrixXd kstar =
        kernels::cross_covariance(spec, coreg, training_.times, training_.outputs, times, outputs);
    const auto q = static_cast<Eigen::Index>(times.size());
    mean.resize(q);
    variance.resize(q);
    const Eigen::MatrixXd v = chol_.matrixL().solve(kstar);
    const double noise = params_.noise_variance();
    int clamps = 0;
    for (Eigen::Index j = 0; j < q; ++j) {
        mean(j) = params_.means(outputs[j]) + kstar.col(j).dot(alpha_);
        double var = b(outputs[j], outputs[j]) * kernels::eval_composite(spec, times[j], times[j]) -
                     v.col(j).squaredNorm();
        if (var < 0.0) {
            var = 0.0;
            ++clamps;
        }
        variance(j) = var + noise;
    }
    if (clamped != nullptr) *clamped += clamps;
}

PosteriorPrediction MoGPModel::predict(std::span<const double> query_times) const {
    PosteriorPrediction out;
    out.times.assign(query_times.begin(), query_times.end());
    for (double t : query_times) {
        if (t < 0.0 || t > 1.0) ++out.extrapolated_queries;
    }
    const int big_m = params_.outputs();
    out.mean.resize(big_m);
    out.stddev.resize(big_m);
    std::vector<int> outs(query_times.size());
    for (int m = 0; m < big_m; ++m) {
        std::fill(outs.begin(), outs.end(), m);
        Eigen::VectorXd mu, var;
        predict_points(query_times, outs, mu, var, &out.clamped_variances);
        out.mean[m].assign(mu.data(), mu.data() + mu.size());
        out.stddev[m].resize(var.size());
        for (Eigen::Index j = 0; j < var.size(); ++j) out.stddev[m][j] = std::sqrt(var(j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fitting

FitResult fit_from(const HyperParameters& start, const TrainingSet& training,
                   const OptimizerConfig& config) {
    training.validate(true);
    if (config.iterations < 0) throw ValidationError("iteration budget must be non-negative");
    if (!(config.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
    if (config.weight_decay < 0.0) throw ValidationError("weight decay must be non-negative");

    HyperParameters params = start;
    Eigen::VectorXd theta = params.pack();
    const Eigen::VectorXd mask = params.decay_mask();
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());

    auto snapshot = [&](const Eigen::VectorXd& th) {
        std::ostringstream os;
        os.precision(17);
        const auto names = HyperParameters::names(params.outputs(), params.rank());
        for (Eigen::Index i = 0; i < th.size(); ++i) os << (i ? ", " : "") << names[i] << "=" << th(i);
        return os.str();
    };

    MoGPModel current(params, training);
    MoGPModel best = current;
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(config.iterations) + 1);
    int quiet = 0;
    int it = 0;
    bool early = false;
    for (; it < config.iterations; ++it) {
        const double lml = current.log_marginal_likelihood();
        trace.push_back(lml);
        Eigen::VectorXd g = current.lml_gradient();
        if (!g.allFinite()) {
            throw NumericError("non-finite LML gradient at iteration " + std::to_string(it) + ": " +
                               snapshot(theta));
        }
        g -= config.weight_decay * mask.cwiseProduct(theta);

        m1 = config.beta1 * m1 + (1.0 - config.beta1) * g;
        m2 = config.beta2 * m2 + (1.0 - config.beta2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(config.beta1, it + 1);
        const double c2 = 1.0 - std::pow(config.beta2, it + 1);
        theta += config.learning_rate *
                 ((m1 / c1).array() / ((m2 / c2).array().sqrt() + config.epsilon)).matrix();

        params.unpack(theta);
        current = MoGPModel(params, training);
        const double next = current.log_marginal_likelihood();
        if (!std::isfinite(next)) {
            throw NumericError("non-finite LML at iteration " + std::to_string(it + 1) + ": " +
                               snapshot(theta));
        }
        if (next > best.log_marginal_likelihood()) best = current;

        quiet = std::abs(next - lml) < config.early_stop_tolerance ? quiet + 1 : 0;
        if (quiet >= config.early_stop_window) {
            ++it;
            early = true;
            break;
        }
    }
    trace.push_back(current.log_marginal_likelihood());
    if (!std::isfinite(trace.front())) {
        throw NumericError("non-finite LML at iteration 0: " + snapshot(start.pack()));
    }
    return FitResult{std::move(best), std::move(trace), it, early};
}

FitResult fit(const TrainingSet& training, const OptimizerConfig& config) {
    training.validate(true);
    return fit_from(initial_hyperparameters(training, config.init, config.seed), training, config);
}

// ---------------------------------------------------------------------------

CoregionalizationExport export_coregionalization(const kernels::CoregionalizationFactor& coreg) {
    CoregionalizationExport out;
    out.covariance = coreg.matrix();
    const Eigen::Index m = out.covariance.rows();
    out.correlation.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(out.covariance(i, i) > 0.0)) {
            throw NumericError("coregionalization matrix has a zero diagonal entry at " +
                               std::to_string(i));
        }
    }
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            out.correlation(i, j) =
                i == j ? 1.0
                       : out.covariance(i, j) / std::sqrt(out.covariance(i, i) * out.covariance(j, j));
    return out;
}

CoregionalizationExport export_coregionalization(const MoGPModel& model) {
    return export_coregionalization(model.params().coreg());
}

} // namespace gaitgp::mogp
