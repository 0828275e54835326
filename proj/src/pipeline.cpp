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

#include "gaitgp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "gaitgp/errors.hpp"
#include "gaitgp/kvdoc.hpp"

namespace gaitgp::pipeline {

// ---------------------------------------------------------------------------
// Configuration

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("setting '" + key + "' expects true/false, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        const double d = kv::parse_double(v);
        if (!std::isfinite(d)) throw ValidationError("");
        return d;
    } catch (const ValidationError&) {
        throw ValidationError("setting '" + key + "' expects a number, got '" + v + "'");
    }
}

long long parse_integer(const std::string& key, const std::string& v) {
    try {
        return kv::parse_int(v);
    } catch (const ValidationError&) {
        throw ValidationError("setting '" + key + "' expects an integer, got '" + v + "'");
    }
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ValidationError("setting '" + key + "' " + what);
}

std::string fmt(double v) { return kv::format_double(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

struct Binding {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename Field>
Binding real_binding(const std::string& key, Field field, double lo, double hi, bool lo_open = false,
                     bool hi_open = false) {
    return {key,
            [=](RunConfig& c, const std::string& v) {
                const double d = parse_real(key, v);
                require(lo_open ? d > lo : d >= lo, key, "is below its allowed range");
                require(hi_open ? d < hi : d <= hi, key, "is above its allowed range");
                field(c) = d;
            },
            [=](const RunConfig& c) { return fmt(field(const_cast<RunConfig&>(c))); }};
}

template <typename Field>
Binding int_binding(const std::string& key, Field field, long long lo, long long hi) {
    return {key,
            [=](RunConfig& c, const std::string& v) {
                const long long d = parse_integer(key, v);
                require(d >= lo && d <= hi, key, "is outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
                field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(d);
            },
            [=](const RunConfig& c) { return std::to_string(field(const_cast<RunConfig&>(c))); }};
}

template <typename Field>
Binding bool_binding(const std::string& key, Field field) {
    return {key, [=](RunConfig& c, const std::string& v) { field(c) = parse_bool(key, v); },
            [=](const RunConfig& c) { return fmt(static_cast<bool>(field(const_cast<RunConfig&>(c)))); }};
}

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> b = [] {
        std::vector<Binding> v;
        v.push_back({"seed",
                     [](RunConfig& c, const std::string& s) {
                         const long long d = parse_integer("seed", s);
                         require(d >= 0, "seed", "must be non-negative");
                         c.seed = static_cast<std::uint64_t>(d);
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        v.push_back(bool_binding("filter", [](RunConfig& c) -> bool& { return c.filter; }));
        v.push_back(real_binding("cutoff_hz", [](RunConfig& c) -> double& { return c.cutoff_hz; }, 0.0, 15.0, true, true));
        v.push_back({"filter_order",
                     [](RunConfig& c, const std::string& s) {
                         const long long d = parse_integer("filter_order", s);
                         require(d == 2 || d == 4 || d == 6, "filter_order", "must be 2, 4 or 6");
                         c.filter_order = static_cast<int>(d);
                     },
                     [](const RunConfig& c) { return std::to_string(c.filter_order); }});
        v.push_back(int_binding("grid_points", [](RunConfig& c) -> int& { return c.grid_points; }, 10, 100000));
        v.push_back({"fit_scope",
                     [](RunConfig& c, const std::string& s) {
                         if (s == "subject") c.fit_scope = FitScope::Subject;
                         else if (s == "population") c.fit_scope = FitScope::Population;
                         else throw ValidationError("setting 'fit_scope' must be subject or population");
                     },
                     [](const RunConfig& c) { return std::string(c.fit_scope == FitScope::Subject ? "subject" : "population"); }});
        v.push_back(int_binding("points_per_output", [](RunConfig& c) -> int& { return c.points_per_output; }, 2, 100000));
        v.push_back(int_binding("iterations", [](RunConfig& c) -> int& { return c.optimizer.iterations; }, 0, 10000000));
        v.push_back(real_binding("learning_rate", [](RunConfig& c) -> double& { return c.optimizer.learning_rate; }, 0.0, 10.0, true));
        v.push_back(real_binding("weight_decay", [](RunConfig& c) -> double& { return c.optimizer.weight_decay; }, 0.0, 10.0));
        v.push_back(real_binding("early_stop_tolerance", [](RunConfig& c) -> double& { return c.optimizer.early_stop_tolerance; }, 0.0, 1e6));
        v.push_back(int_binding("early_stop_window", [](RunConfig& c) -> int& { return c.optimizer.early_stop_window; }, 1, 10000000));
        v.push_back(int_binding("rank", [](RunConfig& c) -> int& { return c.optimizer.init.rank; }, 1, gait::kNumChannels));
        v.push_back(real_binding("init_variance", [](RunConfig& c) -> double& { return c.optimizer.init.variance; }, 0.0, 1e6, true));
        v.push_back(real_binding("init_lengthscale", [](RunConfig& c) -> double& { return c.optimizer.init.lengthscale; }, 0.0, 1e6, true));
        v.push_back(real_binding("init_period", [](RunConfig& c) -> double& { return c.optimizer.init.period; }, 0.0, 1e6, true));
        v.push_back(real_binding("init_w_stddev", [](RunConfig& c) -> double& { return c.optimizer.init.w_stddev; }, 0.0, 1e6));
        v.push_back(real_binding("init_kappa", [](RunConfig& c) -> double& { return c.optimizer.init.kappa; }, 0.0, 1e6, true));
        v.push_back(real_binding("init_noise", [](RunConfig& c) -> double& { return c.optimizer.init.noise_variance; }, 0.0, 1e6, true));
        v.push_back(int_binding("hmm_iterations", [](RunConfig& c) -> int& { return c.em.max_iterations; }, 0, 1000000));
        v.push_back(real_binding("hmm_tolerance", [](RunConfig& c) -> double& { return c.em.tolerance; }, 0.0, 1.0));
        v.push_back(bool_binding("hmm_learn_transitions", [](RunConfig& c) -> bool& { return c.em.learn_transitions; }));
        v.push_back({"hmm_source",
                     [](RunConfig& c, const std::string& s) {
                         if (s == "mogp") c.hmm_source = HmmSource::Mogp;
                         else if (s == "raw") c.hmm_source = HmmSource::Raw;
                         else throw ValidationError("setting 'hmm_source' must be mogp or raw");
                     },
                     [](const RunConfig& c) { return std::string(c.hmm_source == HmmSource::Mogp ? "mogp" : "raw"); }});
        v.push_back({"hmm_abnormal_means",
                     [](RunConfig& c, const std::string& s) {
                         if (s == "anchored") c.abnormal_means = AbnormalMeans::Anchored;
                         else if (s == "learned") c.abnormal_means = AbnormalMeans::Learned;
                         else throw ValidationError("setting 'hmm_abnormal_means' must be anchored or learned");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.abnormal_means == AbnormalMeans::Anchored ? "anchored" : "learned");
                     }});
        v.push_back(real_binding("event_prominence", [](RunConfig& c) -> double& { return c.events.prominence_fraction; }, 0.0, 1.0));
        v.push_back(real_binding("event_spacing", [](RunConfig& c) -> double& { return c.events.min_spacing; }, 0.0, 1.0));
        v.push_back(int_binding("context_stride", [](RunConfig& c) -> int& { return c.context_stride; }, 1, 100000));
        v.push_back(int_binding("eval_points_per_output", [](RunConfig& c) -> int& { return c.eval_points_per_output; }, 2, 100000));
        v.push_back(int_binding("synth_controls", [](RunConfig& c) -> int& { return c.synth.controls; }, 0, 100000));
        v.push_back(int_binding("synth_disorders", [](RunConfig& c) -> int& { return c.synth.disorders; }, 0, 100000));
        v.push_back(int_binding("synth_cycles", [](RunConfig& c) -> int& { return c.synth.cycles_per_subject; }, 1, 100000));
        v.push_back(int_binding("synth_min_frames", [](RunConfig& c) -> int& { return c.synth.min_frames; }, 10, 100000));
        v.push_back(int_binding("synth_max_frames", [](RunConfig& c) -> int& { return c.synth.max_frames; }, 10, 100000));
        v.push_back(real_binding("synth_noise", [](RunConfig& c) -> double& { return c.synth.noise; }, 0.0, 1.0));
        v.push_back(real_binding("synth_amplitude_jitter", [](RunConfig& c) -> double& { return c.synth.amplitude_jitter; }, 0.0, 1.0));
        v.push_back(real_binding("synth_phase_jitter", [](RunConfig& c) -> double& { return c.synth.phase_jitter; }, 0.0, 1.0));
        v.push_back({"anomaly_side",
                     [](RunConfig& c, const std::string& s) { c.synth.anomaly.side = gait::parse_side(s); },
                     [](const RunConfig& c) { return std::string(gait::side_name(c.synth.anomaly.side)); }});
        v.push_back(real_binding("anomaly_start", [](RunConfig& c) -> double& { return c.synth.anomaly.window_start; }, 0.0, 1.0));
        v.push_back(real_binding("anomaly_duration", [](RunConfig& c) -> double& { return c.synth.anomaly.duration_fraction; }, 0.0, 1.0, true));
        v.push_back(real_binding("anomaly_shift", [](RunConfig& c) -> double& { return c.synth.anomaly.amplitude_shift; }, -100.0, 100.0));
        return v;
    }();
    return b;
}

} // namespace

RunConfig RunConfig::from_pairs(const std::map<std::string, std::string>& pairs) {
    RunConfig c;
    for (const auto& [key, value] : pairs) {
        auto it = std::find_if(bindings().begin(), bindings().end(), [&](const Binding& b) { return b.key == key; });
        if (it == bindings().end()) throw ValidationError("unknown setting '" + key + "'");
        it->set(c, value);
    }
    c.optimizer.seed = c.seed;
    c.synth.seed = c.seed;
    if (c.synth.max_frames < c.synth.min_frames) {
        throw ValidationError("setting 'synth_max_frames' must be >= synth_min_frames");
    }
    return c;
}

std::map<std::string, std::string> RunConfig::to_pairs() const {
    std::map<std::string, std::string> out;
    for (const auto& b : bindings()) out[b.key] = b.get(*this);
    return out;
}

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> out;
    for (const auto& b : bindings()) out.push_back(b.key);
    return out;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    int line_no = 0;
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
        if (out.contains(key)) throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        out[key] = value;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Preparation

PreparedSubject prepare_subject(const data::SubjectRecord& record, const RunConfig& config) {
    std::vector<gait::CycleSignals> cycles;
    for (const auto& cyc : record.cycles) {
        data::GaitCycle work = cyc;
        if (config.filter) {
            for (auto& j : work.joints) j = gait::lowpass_filter(j, config.cutoff_hz, config.filter_order);
        }
        cycles.push_back(work.y_signals());
    }
    PreparedSubject out;
    out.id = record.id;
    out.cohort = record.cohort;
    out.aligned = gait::normalize_and_align(cycles, record.id, config.grid_points);
    out.average = out.aligned.average();
    return out;
}

mogp::TrainingSet training_from_average(const gait::TrajectorySet& average, int points_per_output) {
    const auto n = static_cast<int>(average.grid.size());
    if (points_per_output < 2 || points_per_output > n) {
        throw ValidationError("points_per_output must lie in [2, grid size]");
    }
    mogp::TrainingSet tr;
    tr.num_outputs = gait::kNumChannels;
    for (int c = 0; c < gait::kNumChannels; ++c) {
        for (int k = 0; k < points_per_output; ++k) {
            const auto idx = static_cast<std::size_t>(
                std::lround(static_cast<double>(k) * (n - 1) / (points_per_output - 1)));
            tr.times.push_back(average.grid[idx]);
            tr.outputs.push_back(c);
            tr.values.push_back(average.channels[c][idx]);
        }
    }
    return tr;
}

mogp::TrainingSet pooled_training(const std::vector<const PreparedSubject*>& subjects, int points_per_output) {
    if (subjects.empty()) throw ValidationError("population fit needs at least one subject");
    mogp::TrainingSet pooled;
    pooled.num_outputs = gait::kNumChannels;
    for (const auto* s : subjects) {
        const auto tr = training_from_average(s->average, points_per_output);
        pooled.times.insert(pooled.times.end(), tr.times.begin(), tr.times.end());
        pooled.outputs.insert(pooled.outputs.end(), tr.outputs.begin(), tr.outputs.end());
        pooled.values.insert(pooled.values.end(), tr.values.begin(), tr.values.end());
    }
    return pooled;
}

mogp::OptimizerConfig optimizer_for(const RunConfig& config) {
    mogp::OptimizerConfig o = config.optimizer;
    o.seed = config.seed;
    return o;
}

hmm::ObservationSequence ankle_sequence(const mogp::PosteriorPrediction& prediction) {
    hmm::ObservationSequence seq;
    seq.source = hmm::SequenceSource::MogpPredicted;
    for (std::size_t t = 0; t < prediction.times.size(); ++t) {
        seq.steps.emplace_back(prediction.mean[gait::kAnkleRight][t], prediction.mean[gait::kAnkleLeft][t]);
    }
    return seq;
}

hmm::ObservationSequence ankle_sequence(const gait::TrajectorySet& signals) {
    hmm::ObservationSequence seq;
    seq.source = hmm::SequenceSource::Raw;
    for (std::size_t t = 0; t < signals.grid.size(); ++t) {
        seq.steps.emplace_back(signals.channels[gait::kAnkleRight][t], signals.channels[gait::kAnkleLeft][t]);
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Segmentation

mogp::MoGPModel condition_on(const mogp::HyperParameters& shared, const mogp::TrainingSet& data) {
    mogp::HyperParameters p = shared;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(p.outputs());
    p.means.setZero();
    for (std::size_t i = 0; i < data.size(); ++i) {
        p.means(data.outputs[i]) += data.values[i];
        counts(data.outputs[i]) += 1.0;
    }
    for (int m = 0; m < p.outputs(); ++m)
        if (counts(m) > 0) p.means(m) /= counts(m);
    return mogp::MoGPModel(std::move(p), data);
}

namespace {

void knee_ranges(const data::SubjectRecord& record, const RunConfig& config, SubjectSegmentation& out) {
    for (int side = 0; side < 2; ++side) {
        double lo = 180.0, hi = 0.0;
        for (const auto& cyc : record.cycles) {
            auto joint = [&](gait::Joint j) {
                const auto& traj = cyc.joints[gait::channel_index(j, static_cast<gait::Side>(side))];
                return config.filter ? gait::lowpass_filter(traj, config.cutoff_hz, config.filter_order) : traj;
            };
            const auto angles = gait::knee_angle(joint(gait::Joint::Hip), joint(gait::Joint::Knee), joint(gait::Joint::Ankle));
            lo = std::min(lo, *std::min_element(angles.begin(), angles.end()));
            hi = std::max(hi, *std::max_element(angles.begin(), angles.end()));
        }
        out.knee_angle_min[side] = lo;
        out.knee_angle_max[side] = hi;
    }
}

} // namespace

SegmentationResult segment_corpus(const data::Corpus& corpus, const RunConfig& config,
                                  const std::map<std::string, mogp::MoGPModel>* models,
                                  const std::optional<hmm::HmmModel>& hmm_model) {
    if (corpus.empty()) throw ValidationError("corpus has no subjects");
    std::vector<PreparedSubject> prepared;
    for (const auto& rec : corpus) prepared.push_back(prepare_subject(rec, config));

    const std::vector<double> grid = gait::uniform_grid(config.grid_points);
    const auto opt = optimizer_for(config);

    std::optional<mogp::HyperParameters> population;
    if (config.fit_scope == FitScope::Population && models == nullptr && config.hmm_source == HmmSource::Mogp) {
        std::vector<const PreparedSubject*> all;
        for (const auto& p : prepared) all.push_back(&p);
        population = mogp::fit(pooled_training(all, config.points_per_output), opt).model.params();
    }

    SegmentationResult result;
    std::vector<hmm::ObservationSequence> sequences;
    std::vector<std::vector<double>> ankle_right, ankle_left;
    for (const auto& p : prepared) {
        SubjectSegmentation seg;
        seg.id = p.id;
        seg.cohort = p.cohort;
        seg.grid = grid;
        if (config.hmm_source == HmmSource::Raw) {
            sequences.push_back(ankle_sequence(p.average));
            ankle_right.push_back(p.average.channels[gait::kAnkleRight]);
            ankle_left.push_back(p.average.channels[gait::kAnkleLeft]);
        } else {
            const auto training = training_from_average(p.average, config.points_per_output);
            std::optional<mogp::MoGPModel> model;
            if (models != nullptr) {
                auto it = models->find(p.id);
                if (it == models->end()) throw ValidationError("no MoGP model for subject '" + p.id + "'");
                model = it->second;
            } else if (population) {
                model = condition_on(*population, training);
            } else {
                model = mogp::fit(training, opt).model;
            }
            seg.mogp_lml = model->log_marginal_likelihood();
            const auto pred = model->predict(grid);
            sequences.push_back(ankle_sequence(pred));
            ankle_right.push_back(pred.mean[gait::kAnkleRight]);
            ankle_left.push_back(pred.mean[gait::kAnkleLeft]);
        }
        result.subjects.push_back(std::move(seg));
    }

    if (hmm_model) {
        result.model = *hmm_model;
        result.model.validate();
    } else {
        auto fitted = config.abnormal_means == AbnormalMeans::Anchored
                          ? hmm::fit_anchored(hmm::default_model(), sequences, config.em)
                          : hmm::baum_welch_fit(hmm::initialize_emissions(hmm::default_model(), sequences),
                                                sequences, config.em);
        result.model = fitted.model;
        result.em_trace = std::move(fitted.log_likelihood_trace);
    }

    for (std::size_t s = 0; s < result.subjects.size(); ++s) {
        auto& seg = result.subjects[s];
        seg.decoded = hmm::viterbi_decode(result.model, sequences[s]);
        seg.segments = hmm::anomalous_segments(seg.decoded, seg.grid);
        seg.events.right = gait::detect_events_periodic(ankle_right[s], config.events);
        seg.events.left = gait::detect_events_periodic(ankle_left[s], config.events);
        try {
            gait::PhaseDurations ph;
            ph.right = gait::periodic_phase_durations(seg.events.right);
            ph.left = gait::periodic_phase_durations(seg.events.left);
            seg.phases = ph;
        } catch (const ValidationError& e) {
            seg.phase_error = e.what();
        }
        knee_ranges(corpus[s], config, seg);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation

EvaluationResult evaluate_loso(const data::Corpus& corpus, const RunConfig& config) {
    const auto splits = data::loso_splits(corpus);
    std::vector<PreparedSubject> prepared;
    for (const auto& rec : corpus) prepared.push_back(prepare_subject(rec, config));
    const auto opt = optimizer_for(config);

    EvaluationResult result;
    std::vector<metrics::MetricReport> norm_reports, raw_reports;
    for (const auto& split : splits) {
        std::vector<const PreparedSubject*> train;
        for (std::size_t i : split.train) train.push_back(&prepared[i]);
        const auto fitted = mogp::fit(pooled_training(train, config.eval_points_per_output), opt);

        const PreparedSubject& held = prepared[split.test];
        mogp::TrainingSet context;
        context.num_outputs = gait::kNumChannels;
        const auto n = held.average.grid.size();
        for (int c = 0; c < gait::kNumChannels; ++c) {
            for (std::size_t k = 0; k < n; k += static_cast<std::size_t>(config.context_stride)) {
                context.times.push_back(held.average.grid[k]);
                context.outputs.push_back(c);
                context.values.push_back(held.average.channels[c][k]);
            }
        }
        const auto model = condition_on(fitted.model.params(), context);
        const auto pred = model.predict(held.average.grid);

        std::vector<std::vector<double>> p_norm(gait::kNumChannels), t_norm(gait::kNumChannels);
        std::vector<std::vector<double>> p_raw(gait::kNumChannels), t_raw(gait::kNumChannels);
        for (int c = 0; c < gait::kNumChannels; ++c) {
            p_norm[c] = pred.mean[c];
            t_norm[c] = held.average.channels[c];
            const double mu = held.aligned.stats.mean[c];
            const double sd = held.aligned.stats.stddev[c];
            for (std::size_t k = 0; k < n; ++k) {
                p_raw[c].push_back(p_norm[c][k] * sd + mu);
                t_raw[c].push_back(t_norm[c][k] * sd + mu);
            }
        }
        SplitEvaluation ev;
        ev.subject = held.id;
        ev.normalized = metrics::evaluate(p_norm, t_norm);
        ev.raw = metrics::evaluate(p_raw, t_raw);
        norm_reports.push_back(ev.normalized);
        raw_reports.push_back(ev.raw);
        result.splits.push_back(std::move(ev));
    }
    result.normalized = metrics::average(norm_reports);
    result.raw = metrics::average(raw_reports);
    return result;
}

} // namespace gaitgp::pipeline
