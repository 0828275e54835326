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
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gaitgp::hmm {

/// Hidden states, labelled 1..4 in every public interface:
/// 1 normal stance, 2 normal swing, 3 abnormal stance, 4 abnormal swing.
inline constexpr int kNumStates = 4;

std::string_view state_name(int label);

using Observation = Eigen::Vector2d; // [right ankle y, left ankle y]

struct HmmModel {
    Eigen::Vector4d initial_probs;
    Eigen::Matrix4d transitions; // row-stochastic, row = from
    std::array<Observation, kNumStates> state_means;
    Eigen::Matrix2d shared_covariance;

    /// Throws ValidationError if the simplex/stochasticity/PD invariants fail.
    void validate() const;
};

enum class SequenceSource { Raw, MogpPredicted };

struct ObservationSequence {
    std::vector<Observation> steps;
    SequenceSource source = SequenceSource::Raw;
};

struct DecodedStates {
    std::vector<int> states; // labels 1..4
    double log_joint = 0.0;
};

/// Expert-designed initial and transition probabilities; emission parameters are placeholders.
HmmModel default_model();

/// Log density of `obs` under state `label` (1..4). Throws NumericError if the covariance is not PD.
double emission_logpdf(const HmmModel& model, const Observation& obs, int label);

/// log p(O | model) via the log-space forward recursion.
double forward_log_likelihood(const HmmModel& model, const ObservationSequence& seq);

/// log p(path, O | model) for an explicit label path.
double path_log_joint(const HmmModel& model, const ObservationSequence& seq, std::span<const int> labels);

/// Emission starting point from pooled observations: states 1/2 at the per-channel
/// 25th/75th percentiles, states 3/4 shifted from them by +1 pooled standard
/// deviation, shared covariance = pooled covariance.
HmmModel initialize_emissions(HmmModel base, std::span<const ObservationSequence> sequences);

struct BaumWelchConfig {
    int max_iterations = 100;
    double tolerance = 1e-6; // relative change of the total log-likelihood
    bool learn_transitions = false; // re-estimate pi and A, otherwise keep them frozen
    std::array<bool, kNumStates> active_states{true, true, true, true}; // inactive states emit nothing
};

struct BaumWelchResult {
    HmmModel model;
    std::vector<double> log_likelihood_trace; // [k] = total log-likelihood after k iterations
    int iterations = 0;
    bool converged = false;
};

BaumWelchResult baum_welch_fit(const HmmModel& init, std::span<const ObservationSequence> sequences,
                               const BaumWelchConfig& config);

/// Normal-state means and the shared covariance by Baum-Welch with the abnormal
/// states switched off; the abnormal means are then placed at the normal means
/// plus the initial offset of initialize_emissions (+1 pooled sd per channel).
BaumWelchResult fit_anchored(const HmmModel& base, std::span<const ObservationSequence> sequences,
                             const BaumWelchConfig& config);

/// Most probable label path. Ties resolve to the lowest state label.
DecodedStates viterbi_decode(const HmmModel& model, const ObservationSequence& seq);

struct AnomalousSegment {
    double start_time = 0.0;
    double end_time = 0.0;
    int state = 3; // dominant abnormal label in the run
};

/// Maximal runs of labels 3/4, mapped onto `time_grid`.
std::vector<AnomalousSegment> anomalous_segments(const DecodedStates& decoded,
                                                 std::span<const double> time_grid);

inline constexpr std::string_view kModelSchema = "hmm-v1";

std::string save_model(const HmmModel& model);
HmmModel load_model(std::string_view text);

} // namespace gaitgp::hmm
