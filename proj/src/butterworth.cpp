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

#include "gaitgp/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "gaitgp/errors.hpp"

namespace gaitgp::dsp {

std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz) {
    if (order <= 0 || order % 2 != 0) throw ValidationError("Butterworth order must be even and positive");
    const double nyquist = 0.5 * sample_rate_hz;
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < nyquist)) {
        throw ValidationError("cutoff must lie in (0, " + std::to_string(nyquist) + ") Hz");
    }
    const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    const double k2 = k * k;
    std::vector<Biquad> out;
    for (int i = 1; i <= order / 2; ++i) {
        // analog section s^2 + c s + 1 for the conjugate pole pair i
        const double c = 2.0 * std::sin((2.0 * i - 1.0) * std::numbers::pi / (2.0 * order));
        const double d = 1.0 + c * k + k2;
        out.push_back({k2 / d, 2.0 * k2 / d, k2 / d, (2.0 * k2 - 2.0) / d, (1.0 - c * k + k2) / d});
    }
    return out;
}

double magnitude_response(std::span<const Biquad> sections, double freq_hz, double sample_rate_hz) {
    const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h = 1.0;
    for (const auto& s : sections) h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    return std::abs(h);
}

namespace {

void run_section(const Biquad& s, std::vector<double>& x) {
    if (x.empty()) return;
    // steady state for a constant input equal to x[0]
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double x0 = x.front();
    double z2 = (s.b2 - s.a2 * gain) * x0;
    double z1 = (s.b1 - s.a1 * gain) * x0 + z2;
    for (double& v : x) {
        const double in = v;
        const double y = s.b0 * in + z1;
        z1 = s.b1 * in - s.a1 * y + z2;
        z2 = s.b2 * in - s.a2 * y;
        v = y;
    }
}

} // namespace

std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (const auto& s : sections) run_section(s, y);
    return y;
}

std::vector<double> sosfiltfilt(std::span<const Biquad> sections, std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    const std::size_t padlen = std::min<std::size_t>(3 * (2 * sections.size() + 1), n - 1);

    std::vector<double> ext;
    ext.reserve(n + 2 * padlen);
    for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    for (const auto& s : sections) run_section(s, ext);
    std::reverse(ext.begin(), ext.end());
    for (const auto& s : sections) run_section(s, ext);
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + static_cast<std::ptrdiff_t>(padlen),
            ext.begin() + static_cast<std::ptrdiff_t>(padlen + n)};
}

} // namespace gaitgp::dsp
