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

// Random instances shared by the unit and acceptance tests.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "gaitgp/hmm.hpp"
#include "gaitgp/mogp.hpp"

namespace fixtures {

inline gaitgp::mogp::HyperParameters random_params(std::mt19937_64& rng, int outputs, int rank,
                                                   double log_noise_lo = std::log(1e-2),
                                                   double log_noise_hi = std::log(0.5)) {
    std::uniform_real_distribution<double> lvar(std::log(0.2), std::log(3.0));
    std::uniform_real_distribution<double> llen(std::log(0.08), std::log(1.0));
    std::uniform_real_distribution<double> lper(std::log(0.5), std::log(1.5));
    std::uniform_real_distribution<double> lkap(std::log(0.05), std::log(1.0));
    std::uniform_real_distribution<double> lnoise(log_noise_lo, log_noise_hi);
    std::normal_distribution<double> n01;
    gaitgp::mogp::HyperParameters p;
    using namespace gaitgp::kernels;
    p.kernel_log[kLogPeriodicVariance] = lvar(rng);
    p.kernel_log[kLogPeriodicLengthscale] = llen(rng);
    p.kernel_log[kLogPeriod] = lper(rng);
    p.kernel_log[kLogSeVariance] = lvar(rng);
    p.kernel_log[kLogSeLengthscale] = llen(rng);
    p.kernel_log[kLogMaternVariance] = lvar(rng);
    p.kernel_log[kLogMaternLengthscale] = llen(rng);
    p.w.resize(outputs, rank);
    p.log_kappa.resize(outputs);
    p.means.resize(outputs);
    for (int m = 0; m < outputs; ++m) {
        for (int r = 0; r < rank; ++r) p.w(m, r) = 0.7 * n01(rng);
        p.log_kappa(m) = lkap(rng);
        p.means(m) = n01(rng);
    }
    p.log_noise = lnoise(rng);
    return p;
}

/// Random (time, output) layout with every output present at least twice.
inline gaitgp::mogp::TrainingSet random_layout(std::mt19937_64& rng, int outputs, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    gaitgp::mogp::TrainingSet tr;
    tr.num_outputs = outputs;
    for (int i = 0; i < n; ++i) {
        tr.times.push_back(u(rng));
        tr.outputs.push_back(i % outputs);
        tr.values.push_back(0.0);
    }
    return tr;
}

/// Joint draw of noisy observations from the MoGP prior at the layout's inputs.
inline void sample_prior(std::mt19937_64& rng, const gaitgp::mogp::HyperParameters& p,
                         gaitgp::mogp::TrainingSet& layout) {
    Eigen::MatrixXd k = gaitgp::kernels::gram_matrix(p.kernel(), p.coreg(), layout.times, layout.outputs);
    k.diagonal().array() += p.noise_variance();
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(k).matrixL();
    std::normal_distribution<double> n01;
    Eigen::VectorXd z(k.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = n01(rng);
    const Eigen::VectorXd y = l * z;
    for (std::size_t i = 0; i < layout.size(); ++i) layout.values[i] = y(static_cast<Eigen::Index>(i)) + p.means(layout.outputs[i]);
}

inline gaitgp::hmm::HmmModel random_hmm(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::normal_distribution<double> n01;
    gaitgp::hmm::HmmModel m;
    for (int i = 0; i < 4; ++i) m.initial_probs(i) = u(rng);
    m.initial_probs /= m.initial_probs.sum();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m.transitions(i, j) = u(rng);
        m.transitions.row(i) /= m.transitions.row(i).sum();
    }
    for (auto& mu : m.state_means) mu = Eigen::Vector2d(n01(rng), n01(rng));
    Eigen::Matrix2d a;
    a << n01(rng), n01(rng), n01(rng), n01(rng);
    m.shared_covariance = a * a.transpose() + 0.3 * Eigen::Matrix2d::Identity();
    return m;
}

inline gaitgp::hmm::ObservationSequence random_sequence(std::mt19937_64& rng, int length) {
    std::normal_distribution<double> n01;
    gaitgp::hmm::ObservationSequence s;
    for (int t = 0; t < length; ++t) s.steps.emplace_back(1.5 * n01(rng), 1.5 * n01(rng));
    return s;
}

/// Sample a state path and observations from `m`.
inline gaitgp::hmm::ObservationSequence sample_hmm(std::mt19937_64& rng, const gaitgp::hmm::HmmModel& m, int length,
                                                   std::vector<int>* labels = nullptr) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n01;
    const Eigen::Matrix2d l = Eigen::LLT<Eigen::Matrix2d>(m.shared_covariance).matrixL();
    auto draw = [&](const Eigen::Vector4d& p) {
        double r = u(rng), acc = 0.0;
        for (int i = 0; i < 4; ++i) {
            acc += p(i);
            if (r < acc) return i;
        }
        return 3;
    };
    gaitgp::hmm::ObservationSequence s;
    int state = draw(m.initial_probs);
    for (int t = 0; t < length; ++t) {
        if (t > 0) state = draw(m.transitions.row(state).transpose());
        if (labels) labels->push_back(state + 1);
        s.steps.push_back(m.state_means[state] + l * Eigen::Vector2d(n01(rng), n01(rng)));
    }
    return s;
}

} // namespace fixtures
