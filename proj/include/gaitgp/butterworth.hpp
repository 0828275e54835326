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

#include <span>
#include <vector>

namespace gaitgp::dsp {

/// One direct-form-II-transposed biquad: b0 b1 b2 / 1 a1 a2.
struct Biquad {
    double b0, b1, b2, a1, a2;
};

/// Digital Butterworth low-pass as cascaded biquads (bilinear transform with
/// prewarping). `order` must be even and positive.
std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz);

/// |H(e^{jw})| of the cascade at `freq_hz`.
double magnitude_response(std::span<const Biquad> sections, double freq_hz, double sample_rate_hz);

/// Single forward pass with steady-state initial conditions scaled by x[0].
std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x);

/// Zero-phase forward-backward filtering with odd-extension padding.
std::vector<double> sosfiltfilt(std::span<const Biquad> sections, std::span<const double> x);

} // namespace gaitgp::dsp
