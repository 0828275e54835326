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

namespace gaitgp::gait {

enum class Joint { Hip, Knee, Ankle };
enum class Side { Right, Left };

/// Capture rate of the pose pipeline.
inline constexpr double kFrameRate = 30.0;
/// Default length of the normalized cycle grid.
inline constexpr int kGridPoints = 400;
inline constexpr int kNumChannels = 6;

/// Channel order: hip-right, hip-left, knee-right, knee-left, ankle-right, ankle-left.
int channel_index(Joint joint, Side side);
std::string_view channel_name(int channel);
/// Inverse of channel_name().
int parse_channel(std::string_view name);
std::string_view joint_name(Joint joint);
std::string_view side_name(Side side);
Joint parse_joint(std::string_view text);
Side parse_side(std::string_view text);

inline constexpr int kAnkleRight = 4;
inline constexpr int kAnkleLeft = 5;

struct JointTrajectory3D {
    Joint joint = Joint::Hip;
    Side side = Side::Right;
    std::vector<Eigen::Vector3d> samples; // NaN components mark gaps before imputation
};

/// Six y-signals of one cycle on a uniform grid over [0, 1].
struct TrajectorySet {
    std::string subject_id;
    int cycle = 0;
    std::vector<double> grid;
    std::array<std::vector<double>, kNumChannels> channels;
};

/// Raw (variable-length) y-signals of one cycle, indexed by channel.
using CycleSignals = std::array<std::vector<double>, kNumChannels>;

struct NormalizationStats {
    std::array<double, kNumChannels> mean{};
    std::array<double, kNumChannels> stddev{};
};

struct AlignedSubject {
    std::vector<TrajectorySet> cycles;
    NormalizationStats stats;

    /// Pointwise average over cycles.
    TrajectorySet average() const;
};

std::vector<double> uniform_grid(int points);

JointTrajectory3D lowpass_filter(const JointTrajectory3D& traj, double cutoff_hz = 6.0, int order = 4);

/// Linear interpolation inside gaps and edge-hold at the boundaries. A gap run
/// of at least a third of the sequence is rejected.
JointTrajectory3D impute_missing(const JointTrajectory3D& traj);

/// Resample every cycle onto `grid_points` points, then z-score each channel
/// over the subject's pooled resampled cycles.
AlignedSubject normalize_and_align(std::span<const CycleSignals> cycles, const std::string& subject_id,
                                   int grid_points = kGridPoints);

struct EventConfig {
    double prominence_fraction = 0.2; // of the signal's peak-to-peak range
    double min_spacing = 0.15;        // normalized time between events of one kind
    double refine_halfwidth = 0.025;  // local quadratic refinement window
};

/// Heel strikes (local minima) and toe-offs (local maxima) of one ankle signal.
struct SideEvents {
    std::vector<double> heel_strikes;
    std::vector<double> toe_offs;
};

struct GaitEvents {
    SideEvents right;
    SideEvents left;
};

/// Events of a signal sampled uniformly on [0, 1].
SideEvents detect_events(std::span<const double> signal, const EventConfig& config = {});

/// Events of one periodic cycle (first and last samples coincide in phase),
/// reported in [0, 1). Extrema are located on a least-squares Fourier series
/// whose number of harmonics minimizes generalized cross-validation.
SideEvents detect_events_periodic(std::span<const double> cycle, const EventConfig& config = {});

struct SidePhases {
    std::vector<double> stance;
    std::vector<double> swing;
};

struct PhaseDurations {
    SidePhases right;
    SidePhases left;
};

/// Stance = heel strike to next toe-off, swing = toe-off to next heel strike.
SidePhases phase_durations(const SideEvents& events);

/// Stance/swing of a periodic cycle: wraps around the cycle end.
SidePhases periodic_phase_durations(const SideEvents& events);

/// Inner knee angle in degrees between thigh (hip - knee) and shank (ankle - knee).
std::vector<double> knee_angle(const JointTrajectory3D& hip, const JointTrajectory3D& knee,
                               const JointTrajectory3D& ankle);

} // namespace gaitgp::gait
