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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gaitgp/gait_signal.hpp"

namespace gaitgp::data {

enum class Cohort { Control, Disorder };

std::string_view cohort_name(Cohort c);
Cohort parse_cohort(std::string_view text);

/// One recorded gait cycle: six 3D joint trajectories indexed by gait::channel_index().
struct GaitCycle {
    int index = 0;
    std::vector<long long> frames;
    std::array<gait::JointTrajectory3D, gait::kNumChannels> joints;

    /// y-coordinate of every joint, in channel order.
    gait::CycleSignals y_signals() const;
};

struct SubjectRecord {
    std::string id;
    Cohort cohort = Cohort::Control;
    std::vector<GaitCycle> cycles;
    std::string provenance;
};

using Corpus = std::vector<SubjectRecord>;

inline constexpr std::string_view kCsvHeader = "subject_id,cohort,cycle,frame,joint,side,x,y,z";

/// Parse the long-form CSV. Gaps (empty coordinate fields) are imputed.
/// Subjects are returned sorted by id. Throws ValidationError with row/column.
Corpus parse_corpus(std::string_view text, const std::string& source = "<memory>");
Corpus load_corpus(const std::filesystem::path& path);

/// Canonical CSV: sorted by (subject_id, cycle, frame), joints hip/knee/ankle, sides right/left.
std::string save_corpus(const Corpus& corpus);

struct LosoSplit {
    std::vector<std::size_t> train; // indices into the corpus
    std::size_t test = 0;
};

/// One split per subject in subject-id order.
std::vector<LosoSplit> loso_splits(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Synthetic corpus

struct AnomalySpec {
    gait::Side side = gait::Side::Right;
    double window_start = 0.65;     // normalized cycle time
    double duration_fraction = 0.2; // fraction of the cycle
    double amplitude_shift = 2.0;   // extra lift of the affected ankle, in ankle amplitudes (negative lowers it)
};

struct SynthConfig {
    std::uint64_t seed = 7;
    int controls = 4;
    int disorders = 4;
    int cycles_per_subject = 4;
    int min_frames = 31; // frames per cycle, both cycle ends included
    int max_frames = 41;
    double noise = 0.0005;          // metres, additive Gaussian on every coordinate
    double amplitude_jitter = 0.1;  // relative, per subject
    double phase_jitter = 0.02;     // cycle fraction, per subject
    AnomalySpec anomaly;

    void validate() const;
};

/// Two-harmonic template -cos(2 pi t) + 0.3 sin(4 pi t): one minimum and one maximum per cycle.
double template_shape(double t);

/// Vertical excursion (metres) of the template for each joint.
double joint_amplitude(gait::Joint joint);

/// Flat-topped window (cosine ramps over the outer 10% on each side) for the injected anomaly.
double anomaly_window(const AnomalySpec& spec, double t);

Corpus generate_synthetic(const SynthConfig& config);

} // namespace gaitgp::data
