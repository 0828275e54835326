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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "gaitgp/dataio.hpp"
#include "gaitgp/errors.hpp"

namespace gaitgp::data {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct JointLayout {
    double height;       // mean y (m)
    double phase_offset; // cycle fraction
    double forward;      // x swing amplitude (m)
    double lateral;      // |z| (m)
};

JointLayout layout(gait::Joint j) {
    switch (j) {
    case gait::Joint::Hip: return {0.50, 0.08, 0.03, 0.07};
    case gait::Joint::Knee: return {0.28, 0.04, 0.07, 0.06};
    case gait::Joint::Ankle: return {0.06, 0.0, 0.10, 0.05};
    }
    return {};
}

} // namespace

void SynthConfig::validate() const {
    if (controls < 0 || disorders < 0 || controls + disorders < 1) {
        throw ValidationError("synthetic corpus needs at least one subject");
    }
    if (cycles_per_subject < 1) throw ValidationError("cycles per subject must be >= 1");
    if (min_frames < 10 || max_frames < min_frames) throw ValidationError("frame range must satisfy 10 <= min <= max");
    if (!(anomaly.duration_fraction > 0.0 && anomaly.duration_fraction < 1.0)) {
        throw ValidationError("anomaly duration fraction must lie in (0, 1)");
    }
    if (!(anomaly.window_start >= 0.0 && anomaly.window_start < 1.0)) {
        throw ValidationError("anomaly window start must lie in [0, 1)");
    }
    if (!(noise >= 0.0) || !(amplitude_jitter >= 0.0) || !(phase_jitter >= 0.0)) {
        throw ValidationError("noise and jitter levels must be non-negative");
    }
}

double template_shape(double t) { return -std::cos(kTwoPi * t) + 0.3 * std::sin(2.0 * kTwoPi * t); }

double joint_amplitude(gait::Joint joint) {
    switch (joint) {
    case gait::Joint::Hip: return 0.012;
    case gait::Joint::Knee: return 0.025;
    case gait::Joint::Ankle: return 0.04;
    }
    return 0.0;
}

double anomaly_window(const AnomalySpec& spec, double t) {
    double u = std::fmod(t - spec.window_start, 1.0);
    if (u < 0.0) u += 1.0;
    const double d = spec.duration_fraction;
    if (u >= d) return 0.0;
    const double ramp = 0.1 * d;
    if (u < ramp) return 0.5 - 0.5 * std::cos(std::numbers::pi * u / ramp);
    if (u > d - ramp) return 0.5 - 0.5 * std::cos(std::numbers::pi * (d - u) / ramp);
    return 1.0;
}

Corpus generate_synthetic(const SynthConfig& config) {
    config.validate();
    Corpus corpus;
    const int total = config.controls + config.disorders;
    for (int s = 0; s < total; ++s) {
        const bool disorder = s >= config.controls;
        const int ordinal = disorder ? s - config.controls + 1 : s + 1;
        char id[32];
        std::snprintf(id, sizeof(id), "%s-%02d", disorder ? "dis" : "ctrl", ordinal);

        // one stream per subject slot so cohort sizes do not perturb each other's draws
        std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(s) + 1)));
        std::normal_distribution<double> unit(0.0, 1.0);
        const double amp_scale = 1.0 + config.amplitude_jitter * unit(rng);
        const double phase = config.phase_jitter * unit(rng);

        SubjectRecord rec;
        rec.id = id;
        rec.cohort = disorder ? Cohort::Disorder : Cohort::Control;
        rec.provenance = "synthetic seed=" + std::to_string(config.seed);

        long long frame0 = 0;
        std::uniform_int_distribution<int> frames_dist(config.min_frames, config.max_frames);
        for (int c = 0; c < config.cycles_per_subject; ++c) {
            const int n = frames_dist(rng);
            GaitCycle cyc;
            cyc.index = c;
            for (int ch = 0; ch < gait::kNumChannels; ++ch) {
                cyc.joints[ch].joint = static_cast<gait::Joint>(ch / 2);
                cyc.joints[ch].side = static_cast<gait::Side>(ch % 2);
                cyc.joints[ch].samples.resize(n);
            }
            for (int k = 0; k < n; ++k) {
                cyc.frames.push_back(frame0 + k);
                const double t = static_cast<double>(k) / (n - 1);
                for (int ch = 0; ch < gait::kNumChannels; ++ch) {
                    const auto joint = static_cast<gait::Joint>(ch / 2);
                    const auto side = static_cast<gait::Side>(ch % 2);
                    const JointLayout lay = layout(joint);
                    const double shift = side == gait::Side::Left ? 0.5 : 0.0;
                    const double u = t + phase + lay.phase_offset + shift;
                    double y = lay.height + amp_scale * joint_amplitude(joint) * template_shape(u);
                    if (disorder && joint == gait::Joint::Ankle && side == config.anomaly.side) {
                        y += config.anomaly.amplitude_shift * amp_scale * joint_amplitude(joint) *
                             anomaly_window(config.anomaly, t);
                    }
                    const double x = lay.forward * std::sin(kTwoPi * u);
                    const double z = side == gait::Side::Right ? -lay.lateral : lay.lateral;
                    cyc.joints[ch].samples[k] = Eigen::Vector3d(x, y, z);
                }
            }
            if (config.noise > 0.0) {
                for (int k = 0; k < n; ++k)
                    for (int ch = 0; ch < gait::kNumChannels; ++ch)
                        for (int a = 0; a < 3; ++a) cyc.joints[ch].samples[k](a) += config.noise * unit(rng);
            }
            frame0 += n - 1;
            rec.cycles.push_back(std::move(cyc));
        }
        corpus.push_back(std::move(rec));
    }
    std::sort(corpus.begin(), corpus.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return corpus;
}

} // namespace gaitgp::data
