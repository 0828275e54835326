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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaitgp/dataio.hpp"
#include "gaitgp/gait_signal.hpp"
#include "gaitgp/hmm.hpp"
#include "gaitgp/metrics.hpp"
#include "gaitgp/mogp.hpp"

namespace gaitgp::pipeline {

enum class FitScope { Subject, Population };
enum class HmmSource { Mogp, Raw };
/// Anchored: abnormal means offset from EM-fitted normal means. Learned: all four means by EM.
enum class AbnormalMeans { Anchored, Learned };

/// Every tunable of a run. Built from flat key/value pairs; unknown keys are rejected.
struct RunConfig {
    std::uint64_t seed = 7;

    // preprocessing
    bool filter = true;
    double cutoff_hz = 6.0;
    int filter_order = 4;
    int grid_points = gait::kGridPoints;

    // MoGP
    FitScope fit_scope = FitScope::Subject;
    int points_per_output = 25;
    mogp::OptimizerConfig optimizer;

    // HMM
    hmm::BaumWelchConfig em;
    HmmSource hmm_source = HmmSource::Mogp;
    AbnormalMeans abnormal_means = AbnormalMeans::Anchored;
    gait::EventConfig events;

    // evaluation
    int context_stride = 4;
    int eval_points_per_output = 10;

    // synthetic corpus
    data::SynthConfig synth;

    static RunConfig from_pairs(const std::map<std::string, std::string>& pairs);
    std::map<std::string, std::string> to_pairs() const;
    static std::vector<std::string> keys();
};

/// Flat "key = value" text with '#' comments.
std::map<std::string, std::string> parse_config_text(std::string_view text);

struct PreparedSubject {
    std::string id;
    data::Cohort cohort = data::Cohort::Control;
    gait::AlignedSubject aligned;
    gait::TrajectorySet average;
};

/// Low-pass filter (optional), y extraction, resampling and z-scoring of one subject.
PreparedSubject prepare_subject(const data::SubjectRecord& record, const RunConfig& config);

/// Evenly spaced subsample of the averaged cycle, all six outputs.
mogp::TrainingSet training_from_average(const gait::TrajectorySet& average, int points_per_output);

/// Concatenation of several subjects' training sets (fully pooled means).
mogp::TrainingSet pooled_training(const std::vector<const PreparedSubject*>& subjects, int points_per_output);

mogp::OptimizerConfig optimizer_for(const RunConfig& config);

/// Shared hyperparameters conditioned on other data, with means reset to that data's per-output means.
mogp::MoGPModel condition_on(const mogp::HyperParameters& shared, const mogp::TrainingSet& data);

/// Posterior of `model` on the grid, as an ankle observation sequence.
hmm::ObservationSequence ankle_sequence(const mogp::PosteriorPrediction& prediction);
hmm::ObservationSequence ankle_sequence(const gait::TrajectorySet& signals);

struct SubjectSegmentation {
    std::string id;
    data::Cohort cohort = data::Cohort::Control;
    std::vector<double> grid;
    hmm::DecodedStates decoded;
    std::vector<hmm::AnomalousSegment> segments;
    gait::GaitEvents events;
    std::optional<gait::PhaseDurations> phases;
    std::string phase_error;
    std::array<double, 2> knee_angle_min{};
    std::array<double, 2> knee_angle_max{};
    double mogp_lml = 0.0;
};

struct SegmentationResult {
    hmm::HmmModel model;
    std::vector<double> em_trace;
    std::vector<SubjectSegmentation> subjects;
};

/// Per-subject MoGP fits (or the supplied models), HMM training on every
/// subject's ankle sequence (unless `hmm_model` is given), Viterbi decoding and
/// anomalous-segment extraction.
SegmentationResult segment_corpus(const data::Corpus& corpus, const RunConfig& config,
                                  const std::map<std::string, mogp::MoGPModel>* models = nullptr,
                                  const std::optional<hmm::HmmModel>& hmm_model = std::nullopt);

struct SplitEvaluation {
    std::string subject;
    metrics::MetricReport normalized;
    metrics::MetricReport raw;
};

struct EvaluationResult {
    std::vector<SplitEvaluation> splits;
    metrics::MetricReport normalized;
    metrics::MetricReport raw;
};

/// Leave-one-subject-out: kernel hyperparameters fitted on the training subjects,
/// the held-out subject's averaged cycle predicted from every `context_stride`-th
/// grid point of itself, scored on the full grid.
EvaluationResult evaluate_loso(const data::Corpus& corpus, const RunConfig& config);

} // namespace gaitgp::pipeline
