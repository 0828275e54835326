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

#include "gaitgp/gait_signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

#include "gaitgp/butterworth.hpp"
#include "gaitgp/errors.hpp"

namespace gaitgp::gait {

int channel_index(Joint joint, Side side) {
    return 2 * static_cast<int>(joint) + static_cast<int>(side);
}

std::string_view channel_name(int channel) {
    static constexpr std::array<std::string_view, kNumChannels> names = {
        "hip_right", "hip_left", "knee_right", "knee_left", "ankle_right", "ankle_left"};
    if (channel < 0 || channel >= kNumChannels) throw ValidationError("invalid channel index");
    return names[channel];
}

int parse_channel(std::string_view name) {
    for (int c = 0; c < kNumChannels; ++c)
        if (channel_name(c) == name) return c;
    throw ValidationError("unknown channel '" + std::string(name) + "'");
}

std::string_view joint_name(Joint joint) {
    switch (joint) {
    case Joint::Hip: return "hip";
    case Joint::Knee: return "knee";
    case Joint::Ankle: return "ankle";
    }
    return "?";
}

std::string_view side_name(Side side) { return side == Side::Right ? "right" : "left"; }

Joint parse_joint(std::string_view text) {
    if (text == "hip") return Joint::Hip;
    if (text == "knee") return Joint::Knee;
    if (text == "ankle") return Joint::Ankle;
    throw ValidationError("unknown joint '" + std::string(text) + "'");
}

Side parse_side(std::string_view text) {
    if (text == "right") return Side::Right;
    if (text == "left") return Side::Left;
    throw ValidationError("unknown side '" + std::string(text) + "'");
}

std::vector<double> uniform_grid(int points) {
    if (points < 2) throw ValidationError("grid needs at least two points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = static_cast<double>(i) / (points - 1);
    g.back() = 1.0;
    return g;
}

// ---------------------------------------------------------------------------
// Preprocessing

JointTrajectory3D lowpass_filter(const JointTrajectory3D& traj, double cutoff_hz, int order) {
    if (order != 2 && order != 4 && order != 6) throw ValidationError("filter order must be 2, 4 or 6");
    if (traj.samples.size() < 2) throw ValidationError("trajectory needs at least two samples");
    const auto sections = dsp::butterworth_lowpass(order, cutoff_hz, kFrameRate);
    JointTrajectory3D out = traj;
    std::vector<double> axis(traj.samples.size());
    for (int a = 0; a < 3; ++a) {
        for (std::size_t i = 0; i < axis.size(); ++i) axis[i] = traj.samples[i](a);
        const auto filtered = dsp::sosfiltfilt(sections, axis);
        for (std::size_t i = 0; i < axis.size(); ++i) out.samples[i](a) = filtered[i];
    }
    return out;
}

JointTrajectory3D impute_missing(const JointTrajectory3D& traj) {
    const std::size_t n = traj.samples.size();
    if (n < 2) throw ValidationError("trajectory needs at least two samples");
    JointTrajectory3D out = traj;
    for (int a = 0; a < 3; ++a) {
        std::vector<std::size_t> known;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isfinite(traj.samples[i](a))) known.push_back(i);
        }
        if (known.empty()) {
            throw ValidationError("trajectory axis has no valid samples; exclude this cycle");
        }
        // longest gap run, including leading and trailing runs
        std::size_t longest = known.front();
        for (std::size_t k = 1; k < known.size(); ++k) longest = std::max(longest, known[k] - known[k - 1] - 1);
        longest = std::max(longest, n - 1 - known.back());
        if (3 * longest >= n) {
            throw ValidationError("gap of " + std::to_string(longest) + " samples exceeds a third of the " +
                                  std::to_string(n) + "-sample sequence; exclude this cycle");
        }
        for (std::size_t i = 0; i < known.front(); ++i) out.samples[i](a) = traj.samples[known.front()](a);
        for (std::size_t i = known.back() + 1; i < n; ++i) out.samples[i](a) = traj.samples[known.back()](a);
        for (std::size_t k = 1; k < known.size(); ++k) {
            const std::size_t lo = known[k - 1];
            const std::size_t hi = known[k];
            for (std::size_t i = lo + 1; i < hi; ++i) {
                const double f = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
                out.samples[i](a) = (1.0 - f) * traj.samples[lo](a) + f * traj.samples[hi](a);
            }
        }
    }
    return out;
}

namespace {

std::vector<double> resample_linear(std::span<const double> x, std::span<const double> grid) {
    const std::size_t n = x.size();
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double pos = grid[i] * static_cast<double>(n - 1);
        auto lo = static_cast<std::size_t>(std::floor(pos));
        if (lo >= n - 1) {
            out[i] = x[n - 1];
            continue;
        }
        const double f = pos - static_cast<double>(lo);
        out[i] = (1.0 - f) * x[lo] + f * x[lo + 1];
    }
    return out;
}

} // namespace

AlignedSubject normalize_and_align(std::span<const CycleSignals> cycles, const std::string& subject_id,
                                   int grid_points) {
    if (cycles.empty()) throw ValidationError("subject " + subject_id + " has no cycles");
    const std::vector<double> grid = uniform_grid(grid_points);
    AlignedSubject out;
    int cycle_no = 0;
    for (const auto& cyc : cycles) {
        TrajectorySet ts;
        ts.subject_id = subject_id;
        ts.cycle = cycle_no++;
        ts.grid = grid;
        for (int c = 0; c < kNumChannels; ++c) {
            if (cyc[c].size() < 10) {
                throw ValidationError("cycle " + std::to_string(ts.cycle) + " of subject " + subject_id +
                                      " has fewer than 10 samples in " + std::string(channel_name(c)));
            }
            ts.channels[c] = resample_linear(cyc[c], grid);
        }
        out.cycles.push_back(std::move(ts));
    }
    for (int c = 0; c < kNumChannels; ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& ts : out.cycles) {
            sum = std::accumulate(ts.channels[c].begin(), ts.channels[c].end(), sum);
            count += ts.channels[c].size();
        }
        const double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (const auto& ts : out.cycles)
            for (double v : ts.channels[c]) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(count));
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
            throw ValidationError("channel " + std::string(channel_name(c)) + " of subject " + subject_id +
                                  " has zero variance");
        }
        out.stats.mean[c] = mean;
        out.stats.stddev[c] = sd;
        for (auto& ts : out.cycles)
            for (double& v : ts.channels[c]) v = (v - mean) / sd;
    }
    return out;
}

TrajectorySet AlignedSubject::average() const {
    if (cycles.empty()) throw ValidationError("no cycles to average");
    TrajectorySet avg = cycles.front();
    avg.cycle = -1;
    for (int c = 0; c < kNumChannels; ++c) {
        for (std::size_t i = 0; i < avg.grid.size(); ++i) {
            double s = 0.0;
            for (const auto& ts : cycles) s += ts.channels[c][i];
            avg.channels[c][i] = s / static_cast<double>(cycles.size());
        }
    }
    return avg;
}

// ---------------------------------------------------------------------------
// Event detection

namespace {

// Candidate local maxima; a flat plateau contributes its middle sample.
std::vector<std::size_t> local_maxima(std::span<const double> y) {
    std::vector<std::size_t> peaks;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (y[i - 1] < y[i]) {
            std::size_t ahead = i + 1;
            while (ahead + 1 < n && y[ahead] == y[i]) ++ahead;
            if (y[ahead] < y[i]) {
                peaks.push_back((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        ++i;
    }
    return peaks;
}

// Topographic prominence: drop from the peak to the higher of the two lowest
// points reached before meeting a strictly higher sample (or the signal edge).
double prominence(std::span<const double> y, std::size_t peak) {
    double left_min = y[peak];
    for (std::size_t i = peak; i-- > 0;) {
        if (y[i] > y[peak]) break;
        left_min = std::min(left_min, y[i]);
    }
    double right_min = y[peak];
    for (std::size_t i = peak + 1; i < y.size(); ++i) {
        if (y[i] > y[peak]) break;
        right_min = std::min(right_min, y[i]);
    }
    return y[peak] - std::max(left_min, right_min);
}

std::vector<std::size_t> select_peaks(std::span<const double> y, double min_prominence, double min_distance) {
    std::vector<std::size_t> peaks;
    for (std::size_t p : local_maxima(y)) {
        if (prominence(y, p) >= min_prominence) peaks.push_back(p);
    }
    // keep higher peaks first, suppress neighbours closer than min_distance samples
    std::vector<std::size_t> order(peaks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[peaks[a]] > y[peaks[b]]; });
    std::vector<bool> keep(peaks.size(), true);
    for (std::size_t k : order) {
        if (!keep[k]) continue;
        for (std::size_t j = 0; j < peaks.size(); ++j) {
            if (j != k && keep[j] &&
                std::abs(static_cast<double>(peaks[j]) - static_cast<double>(peaks[k])) < min_distance) {
                keep[j] = false;
            }
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < peaks.size(); ++j)
        if (keep[j]) out.push_back(peaks[j]);
    return out;
}

// Vertex of a least-squares parabola through y[idx-h .. idx+h]; falls back to idx.
double refine(std::span<const double> y, std::size_t idx, int halfwidth, bool maximum) {
    const long n = static_cast<long>(y.size());
    const long lo = std::max(0L, static_cast<long>(idx) - halfwidth);
    const long hi = std::min(n - 1, static_cast<long>(idx) + halfwidth);
    if (hi - lo < 2) return static_cast<double>(idx);
    Eigen::MatrixXd a(hi - lo + 1, 3);
    Eigen::VectorXd b(hi - lo + 1);
    for (long i = lo; i <= hi; ++i) {
        const double x = static_cast<double>(i) - static_cast<double>(idx);
        a(i - lo, 0) = x * x;
        a(i - lo, 1) = x;
        a(i - lo, 2) = 1.0;
        b(i - lo) = y[i];
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    if ((maximum && !(c(0) < 0.0)) || (!maximum && !(c(0) > 0.0))) return static_cast<double>(idx);
    const double vertex = -c(1) / (2.0 * c(0));
    if (!(vertex >= static_cast<double>(lo - static_cast<long>(idx))) ||
        !(vertex <= static_cast<double>(hi - static_cast<long>(idx)))) {
        return static_cast<double>(idx);
    }
    return static_cast<double>(idx) + vertex;
}

struct RawEvent {
    std::size_t index;
    bool toe_off; // maximum
};

// Positions in samples of heel strikes and toe-offs; min_spacing is in samples.
std::pair<std::vector<double>, std::vector<double>> detect_positions(std::span<const double> y,
                                                                     double samples_per_unit,
                                                                     const EventConfig& cfg) {
    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double ptp = *hi_it - *lo_it;
    if (!(ptp >= 1e-9)) return {};
    const double min_prom = cfg.prominence_fraction * ptp;
    const double min_dist = cfg.min_spacing * samples_per_unit;

    std::vector<double> neg(y.size());
    std::transform(y.begin(), y.end(), neg.begin(), [](double v) { return -v; });
    std::vector<RawEvent> events;
    for (std::size_t p : select_peaks(y, min_prom, min_dist)) events.push_back({p, true});
    for (std::size_t p : select_peaks(neg, min_prom, min_dist)) events.push_back({p, false});
    std::sort(events.begin(), events.end(), [](const RawEvent& a, const RawEvent& b) { return a.index < b.index; });

    // enforce alternation: of two consecutive events of one kind keep the more extreme
    std::vector<RawEvent> alt;
    for (const auto& e : events) {
        if (!alt.empty() && alt.back().toe_off == e.toe_off) {
            const bool replace = e.toe_off ? y[e.index] > y[alt.back().index] : y[e.index] < y[alt.back().index];
            if (replace) alt.back() = e;
            continue;
        }
        alt.push_back(e);
    }

    const int half = std::max(2, static_cast<int>(std::lround(cfg.refine_halfwidth * samples_per_unit)));
    std::vector<double> hs, to;
    for (const auto& e : alt) {
        const double pos = refine(y, e.index, half, e.toe_off);
        (e.toe_off ? to : hs).push_back(pos);
    }
    return {hs, to};
}

void check_event_config(const EventConfig& cfg) {
    if (!(cfg.prominence_fraction >= 0.0) || !(cfg.min_spacing >= 0.0) || !(cfg.refine_halfwidth >= 0.0)) {
        throw ValidationError("event detection settings must be non-negative");
    }
}

} // namespace

SideEvents detect_events(std::span<const double> signal, const EventConfig& config) {
    check_event_config(config);
    if (signal.size() < 5) throw ValidationError("event detection needs at least 5 samples");
    const double scale = static_cast<double>(signal.size() - 1);
    auto [hs, to] = detect_positions(signal, scale, config);
    SideEvents out;
    for (double p : hs) out.heel_strikes.push_back(std::clamp(p / scale, 0.0, 1.0));
    for (double p : to) out.toe_offs.push_back(std::clamp(p / scale, 0.0, 1.0));
    return out;
}

namespace {

// Truncated Fourier series of one period, t in cycle units.
struct FourierSeries {
    double mean = 0.0;
    std::vector<double> a, b; // cos / sin coefficients of harmonics 1..K

    double value(double t) const {
        double v = mean;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(k + 1);
            v += a[k] * std::cos(w * t) + b[k] * std::sin(w * t);
        }
        return v;
    }
    std::pair<double, double> derivatives(double t) const {
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(k + 1);
            const double c = std::cos(w * t), s = std::sin(w * t);
            d1 += w * (b[k] * c - a[k] * s);
            d2 -= w * w * (a[k] * c + b[k] * s);
        }
        return {d1, d2};
    }
};

// Least-squares series on N equispaced samples of one period; the number of
// harmonics K minimizes modified generalized cross-validation
// N * RSS / (N - 1.4 (2K + 1))^2.
FourierSeries fit_series(std::span<const double> y) {
    const std::size_t n = y.size();
    const double nd = static_cast<double>(n);
    FourierSeries full;
    full.mean = std::accumulate(y.begin(), y.end(), 0.0) / nd;
    const std::size_t kmax = std::max<std::size_t>(1, n / 4);
    double rss = 0.0;
    for (double v : y) rss += (v - full.mean) * (v - full.mean);
    double best = rss * nd / ((nd - 1.0) * (nd - 1.0));
    std::size_t best_k = 0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        double ca = 0.0, cb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = 2.0 * std::numbers::pi * static_cast<double>(k * i % n) / nd;
            ca += y[i] * std::cos(ph);
            cb += y[i] * std::sin(ph);
        }
        ca *= 2.0 / nd;
        cb *= 2.0 / nd;
        full.a.push_back(ca);
        full.b.push_back(cb);
        rss = std::max(0.0, rss - 0.5 * nd * (ca * ca + cb * cb));
        const double dof = nd - 1.4 * static_cast<double>(2 * k + 1);
        if (dof <= 0.0) break;
        const double gcv = nd * rss / (dof * dof);
        if (gcv < best) best = gcv, best_k = k;
    }
    full.a.resize(best_k);
    full.b.resize(best_k);
    return full;
}

// Newton polish of a stationary point of the series near t0; nullopt if it wanders off.
std::optional<double> polish(const FourierSeries& f, double t0, double max_move, bool maximum) {
    double t = t0;
    for (int it = 0; it < 30; ++it) {
        const auto [d1, d2] = f.derivatives(t);
        if (maximum ? !(d2 < 0.0) : !(d2 > 0.0)) return std::nullopt;
        const double step = d1 / d2;
        t -= step;
        if (!(std::abs(t - t0) <= max_move)) return std::nullopt;
        if (std::abs(step) < 1e-13) return t;
    }
    return t;
}

} // namespace

SideEvents detect_events_periodic(std::span<const double> cycle, const EventConfig& config) {
    check_event_config(config);
    if (cycle.size() < 5) throw ValidationError("event detection needs at least 5 samples");
    const std::size_t period = cycle.size() - 1;
    const FourierSeries series = fit_series(cycle.first(period));
    std::vector<double> smooth(period);
    for (std::size_t i = 0; i < period; ++i) smooth[i] = series.value(static_cast<double>(i) / static_cast<double>(period));

    std::vector<double> tiled;
    tiled.reserve(3 * period + 1);
    for (int rep = 0; rep < 3; ++rep) tiled.insert(tiled.end(), smooth.begin(), smooth.end());
    tiled.push_back(smooth.front());
    const double scale = static_cast<double>(period);
    auto [hs, to] = detect_positions(tiled, scale, config);
    SideEvents out;
    auto keep_middle = [&](const std::vector<double>& pos, bool maximum, std::vector<double>& dst) {
        for (double p : pos) {
            double t = p / scale - 1.0;
            if (const auto exact = polish(series, t, 2.0 / scale, maximum)) t = *exact;
            if (t >= 0.0 && t < 1.0) dst.push_back(t);
        }
        std::sort(dst.begin(), dst.end());
    };
    keep_middle(hs, false, out.heel_strikes);
    keep_middle(to, true, out.toe_offs);
    return out;
}

// ---------------------------------------------------------------------------
// Phases

namespace {

struct TimedEvent {
    double time;
    bool toe_off;
};

std::vector<TimedEvent> merge_events(const SideEvents& events) {
    std::vector<TimedEvent> all;
    for (double t : events.heel_strikes) all.push_back({t, false});
    for (double t : events.toe_offs) all.push_back({t, true});
    std::sort(all.begin(), all.end(), [](const TimedEvent& a, const TimedEvent& b) { return a.time < b.time; });
    if (events.heel_strikes.empty() || events.toe_offs.empty()) {
        throw ValidationError("phase durations need at least one heel strike and one toe-off");
    }
    std::string offending;
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (all[i].toe_off == all[i - 1].toe_off || !(all[i].time > all[i - 1].time)) {
            offending += (offending.empty() ? "" : ",") + std::to_string(i - 1) + "-" + std::to_string(i);
        }
    }
    if (!offending.empty()) {
        throw ValidationError("gait events do not alternate at merged indices " + offending);
    }
    return all;
}

} // namespace

SidePhases phase_durations(const SideEvents& events) {
    const auto all = merge_events(events);
    SidePhases out;
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        const double d = all[i + 1].time - all[i].time;
        (all[i].toe_off ? out.swing : out.stance).push_back(d);
    }
    return out;
}

SidePhases periodic_phase_durations(const SideEvents& events) {
    const auto all = merge_events(events);
    if (all.size() % 2 != 0 || all.front().toe_off == all.back().toe_off) {
        throw ValidationError("periodic gait events do not alternate across the cycle boundary");
    }
    SidePhases out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const bool wrap = i + 1 == all.size();
        const double next = wrap ? all.front().time + 1.0 : all[i + 1].time;
        (all[i].toe_off ? out.swing : out.stance).push_back(next - all[i].time);
    }
    return out;
}

std::vector<double> knee_angle(const JointTrajectory3D& hip, const JointTrajectory3D& knee,
                               const JointTrajectory3D& ankle) {
    const std::size_t n = knee.samples.size();
    if (hip.samples.size() != n || ankle.samples.size() != n) {
        throw ValidationError("hip, knee and ankle trajectories differ in length");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d thigh = hip.samples[i] - knee.samples[i];
        const Eigen::Vector3d shank = ankle.samples[i] - knee.samples[i];
        if (!(thigh.norm() > 1e-9) || !(shank.norm() > 1e-9)) {
            throw ValidationError("degenerate leg segment at sample " + std::to_string(i));
        }
        const double rad = std::atan2(thigh.cross(shank).norm(), thigh.dot(shank));
        out[i] = rad * 180.0 / std::numbers::pi;
    }
    return out;
}

} // namespace gaitgp::gait
