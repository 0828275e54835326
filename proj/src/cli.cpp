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

#include "gaitgp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "gaitgp/dataio.hpp"
#include "gaitgp/errors.hpp"
#include "gaitgp/hmm.hpp"
#include "gaitgp/kvdoc.hpp"
#include "gaitgp/metrics.hpp"
#include "gaitgp/mogp_io.hpp"
#include "gaitgp/pipeline.hpp"

namespace gaitgp::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using pipeline::RunConfig;

namespace {

struct Common {
    std::string input;
    std::string output;
    std::string config;
    bool verbose = false;
    std::map<std::string, std::string> overrides;
};

class Logger {
public:
    Logger(std::ostream& err, bool on) : err_(err), on_(on) {}
    void operator()(const std::string& msg) const {
        if (on_) err_ << "[gaitgp] " << msg << '\n';
    }

private:
    std::ostream& err_;
    bool on_;
};

std::string flag_for(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

RunConfig resolve_config(const Common& c) {
    std::map<std::string, std::string> pairs;
    if (!c.config.empty()) pairs = pipeline::parse_config_text(kv::read_file(c.config));
    for (const auto& [k, v] : c.overrides) pairs[k] = v;
    return RunConfig::from_pairs(pairs);
}

void require_path(const std::string& value, const std::string& flag) {
    if (value.empty()) throw ValidationError("missing required option " + flag);
}

std::string fmt(double v) { return kv::format_double(v); }

std::string csv_header(const std::string& schema, const std::string& columns) {
    return "# schema " + schema + "\n" + columns + "\n";
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::vector<fs::path> model_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("model directory '" + dir.string() + "' does not exist");
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".mogp") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw ValidationError("no .mogp model files in '" + dir.string() + "'");
    return out;
}

// ---------------------------------------------------------------------------
// Long-format series files: subject_id,output,t,value[,...,raw_value]

struct Series {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> raw;
};
using SeriesTable = std::map<std::string, std::map<int, Series>>;

SeriesTable read_series(const fs::path& path) {
    const std::string text = kv::read_file(path);
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> header;
    SeriesTable out;
    int row = 0;
    auto split = [](const std::string& l) {
        std::vector<std::string> f;
        std::string cur;
        for (char ch : l) {
            if (ch == ',') {
                f.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        f.push_back(cur);
        return f;
    };
    int c_subject = -1, c_output = -1, c_t = -1, c_value = -1, c_raw = -1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line);
        if (header.empty()) {
            header = fields;
            for (std::size_t i = 0; i < header.size(); ++i) {
                const auto& h = header[i];
                const int ii = static_cast<int>(i);
                if (h == "subject_id") c_subject = ii;
                else if (h == "output") c_output = ii;
                else if (h == "t") c_t = ii;
                else if (h == "value") c_value = ii;
                else if (h == "raw_value") c_raw = ii;
            }
            if (c_subject < 0 || c_output < 0 || c_t < 0 || c_value < 0) {
                throw ValidationError(path.string() + ": header must contain subject_id,output,t,value");
            }
            continue;
        }
        if (fields.size() != header.size()) {
            throw ValidationError(path.string() + ": row " + std::to_string(row) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " + std::to_string(header.size()));
        }
        int output = 0;
        try {
            output = gait::parse_channel(fields[c_output]);
        } catch (const ValidationError&) {
            output = static_cast<int>(kv::parse_int(fields[c_output]));
        }
        auto& s = out[fields[c_subject]][output];
        s.t.push_back(kv::parse_double(fields[c_t]));
        s.value.push_back(kv::parse_double(fields[c_value]));
        if (c_raw >= 0) s.raw.push_back(kv::parse_double(fields[c_raw]));
    }
    if (header.empty()) throw ValidationError(path.string() + ": empty series file");
    return out;
}

// ---------------------------------------------------------------------------
// Metric documents

void put_report(kv::Document& doc, const std::string& prefix, const metrics::MetricReport& r) {
    doc.set(prefix + ".mae", r.mae);
    doc.set(prefix + ".r_squared", r.r_squared);
    doc.set(prefix + ".adtw", r.adtw);
    doc.set(prefix + ".mae_per_output", r.mae_per_output);
    doc.set(prefix + ".r_squared_per_output", r.r_squared_per_output);
    doc.set(prefix + ".dtw_per_output", r.dtw_per_output);
}

std::vector<std::string> output_names() {
    std::vector<std::string> names;
    for (int c = 0; c < gait::kNumChannels; ++c) names.emplace_back(gait::channel_name(c));
    return names;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_synth(const Common& c, std::ostream& out, const Logger& log) {
    require_path(c.output, "--output");
    const RunConfig cfg = resolve_config(c);
    const auto corpus = data::generate_synthetic(cfg.synth);
    kv::write_atomic(c.output, data::save_corpus(corpus));
    log("wrote " + std::to_string(corpus.size()) + " subjects to " + c.output);
    out << "subjects " << corpus.size() << '\n';
    return kExitOk;
}

int cmd_preprocess(const Common& c, std::ostream& out, const Logger& log) {
    require_path(c.input, "--input");
    require_path(c.output, "--output");
    const RunConfig cfg = resolve_config(c);
    const auto corpus = data::load_corpus(c.input);
    std::string text = csv_header("preprocess-v1", "subject_id,output,t,value,raw_value");
    for (const auto& rec : corpus) {
        log("preprocessing " + rec.id);
        const auto p = pipeline::prepare_subject(rec, cfg);
        for (int ch = 0; ch < gait::kNumChannels; ++ch) {
            const double mu = p.aligned.stats.mean[ch];
            const double sd = p.aligned.stats.stddev[ch];
            for (std::size_t k = 0; k < p.average.grid.size(); ++k) {
                const double v = p.average.channels[ch][k];
                text += p.id + "," + std::string(gait::channel_name(ch)) + "," + fmt(p.average.grid[k]) + "," + fmt(v) +
                        "," + fmt(v * sd + mu) + "\n";
            }
        }
    }
    kv::write_atomic(c.output, text);
    out << "subjects " << corpus.size() << '\n';
    return kExitOk;
}

void write_fit(const fs::path& dir, const std::string& label, const mogp::FitResult& fit,
               const mogp::OptimizerConfig& opt) {
    kv::write_atomic(dir / (label + ".mogp"), mogp::save_model(fit.model, opt, label));
    std::string log = csv_header("fitlog-v1", "iteration,lml");
    for (std::size_t i = 0; i < fit.lml_trace.size(); ++i) log += std::to_string(i) + "," + fmt(fit.lml_trace[i]) + "\n";
    kv::write_atomic(dir / (label + ".fitlog.csv"), log);
}

int cmd_fit(const Common& c, std::ostream& out, const Logger& log) {
    require_path(c.input, "--input");
    require_path(c.output, "--output");
    const RunConfig cfg = resolve_config(c);
    const auto corpus = data::load_corpus(c.input);
    const fs::path dir(c.output);
    ensure_dir(dir);
    const auto opt = pipeline::optimizer_for(cfg);
    std::vector<pipeline::PreparedSubject> prepared;
    for (const auto& rec : corpus) prepared.push_back(pipeline::prepare_subject(rec, cfg));
    if (cfg.fit_scope == pipeline::FitScope::Population) {
        std::vector<const pipeline::PreparedSubject*> all;
        for (const auto& p : prepared) all.push_back(&p);
        log("fitting population model on " + std::to_string(all.size()) + " subjects");
        const auto fit = mogp::fit(pipeline::pooled_training(all, cfg.points_per_output), opt);
        write_fit(dir, "population", fit, opt);
        out << "population lml " << fmt(fit.model.log_marginal_likelihood()) << '\n';
        return kExitOk;
    }
    for (const auto& p : prepared) {
        log("fitting " + p.id);
        const auto fit = mogp::fit(pipeline::training_from_average(p.average, cfg.points_per_output), opt);
        write_fit(dir, p.id, fit, opt);
        out << p.id << " lml " << fmt(fit.model.log_marginal_likelihood()) << " iterations " << fit.iterations_run
            << '\n';
    }
    return kExitOk;
}

int cmd_predict(const Common& c, const std::string& models_dir, std::ostream& out, const Logger& log) {
    require_path(models_dir, "--models");
    require_path(c.output, "--output");
    const RunConfig cfg = resolve_config(c);
    std::map<std::string, gait::NormalizationStats> stats;
    if (!c.input.empty()) {
        for (const auto& rec : data::load_corpus(c.input))
            stats[rec.id] = pipeline::prepare_subject(rec, cfg).aligned.stats;
    }
    const auto grid = gait::uniform_grid(cfg.grid_points);
    std::string text = csv_header("predictions-v1",
                                  std::string("subject_id,output,t,value,stddev") + (stats.empty() ? "" : ",raw_value"));
    for (const auto& path : model_files(models_dir)) {
        const auto stored = mogp::load_model(kv::read_file(path));
        log("predicting " + stored.label);
        const auto pred = stored.model.predict(grid);
        const auto it = stats.find(stored.label);
        if (!stats.empty() && it == stats.end()) {
            throw ValidationError("subject '" + stored.label + "' is not in the input corpus");
        }
        for (int ch = 0; ch < stored.model.params().outputs(); ++ch) {
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double v = pred.mean[ch][k];
                text += stored.label + "," + std::string(gait::channel_name(ch)) + "," + fmt(grid[k]) + "," + fmt(v) +
                        "," + fmt(pred.stddev[ch][k]);
                if (!stats.empty()) text += "," + fmt(v * it->second.stddev[ch] + it->second.mean[ch]);
                text += "\n";
            }
        }
    }
    kv::write_atomic(c.output, text);
    out << "wrote " << c.output << '\n';
    return kExitOk;
}

json segmentation_json(const pipeline::SegmentationResult& res, const RunConfig& cfg) {
    json doc;
    doc["schema"] = kSegmentSchema;
    json config = json::object();
    for (const auto& [k, v] : cfg.to_pairs()) config[k] = v;
    doc["config"] = config;

    json model;
    model["initial_probs"] = std::vector<double>(res.model.initial_probs.data(), res.model.initial_probs.data() + 4);
    json trans = json::array();
    for (int i = 0; i < hmm::kNumStates; ++i) {
        std::vector<double> row;
        for (int j = 0; j < hmm::kNumStates; ++j) row.push_back(res.model.transitions(i, j));
        trans.push_back(row);
    }
    model["transitions"] = trans;
    json means = json::array();
    for (const auto& m : res.model.state_means) means.push_back({m(0), m(1)});
    model["state_means"] = means;
    const auto& s = res.model.shared_covariance;
    model["shared_covariance"] = {{s(0, 0), s(0, 1)}, {s(1, 0), s(1, 1)}};
    model["em_log_likelihood"] = res.em_trace;
    doc["hmm"] = model;

    json subjects = json::array();
    std::size_t flagged = 0;
    for (const auto& sub : res.subjects) {
        json j;
        j["subject_id"] = sub.id;
        j["cohort"] = std::string(data::cohort_name(sub.cohort));
        j["source"] = cfg.hmm_source == pipeline::HmmSource::Mogp ? "mogp-predicted" : "raw";
        if (cfg.hmm_source == pipeline::HmmSource::Mogp) j["mogp_log_marginal_likelihood"] = sub.mogp_lml;
        else j["mogp_log_marginal_likelihood"] = nullptr;
        j["grid_points"] = sub.grid.size();
        j["states"] = sub.decoded.states;
        j["state_path_log_joint"] = sub.decoded.log_joint;
        json ev;
        ev["right"] = {{"heel_strikes", sub.events.right.heel_strikes}, {"toe_offs", sub.events.right.toe_offs}};
        ev["left"] = {{"heel_strikes", sub.events.left.heel_strikes}, {"toe_offs", sub.events.left.toe_offs}};
        j["events"] = ev;
        if (sub.phases) {
            j["phases"] = {{"right", {{"stance", sub.phases->right.stance}, {"swing", sub.phases->right.swing}}},
                           {"left", {{"stance", sub.phases->left.stance}, {"swing", sub.phases->left.swing}}}};
        } else {
            j["phases"] = nullptr;
            j["phase_error"] = sub.phase_error;
        }
        j["knee_angle_deg"] = {{"right", {{"min", sub.knee_angle_min[0]}, {"max", sub.knee_angle_max[0]}}},
                               {"left", {{"min", sub.knee_angle_min[1]}, {"max", sub.knee_angle_max[1]}}}};
        json segs = json::array();
        for (const auto& seg : sub.segments) {
            segs.push_back({{"start", seg.start_time},
                            {"end", seg.end_time},
                            {"state", seg.state},
                            {"state_name", std::string(hmm::state_name(seg.state))}});
        }
        if (!sub.segments.empty()) ++flagged;
        j["anomalous_segments"] = segs;
        subjects.push_back(j);
    }
    doc["subjects"] = subjects;
    doc["summary"] = {{"subjects", res.subjects.size()}, {"subjects_with_anomalies", flagged}};
    return doc;
}

int cmd_segment(const Common& c, const std::string& models_dir, const std::string& hmm_path,
                const std::string& hmm_out, std::ostream& out, const Logger& log) {
    require_path(c.input, "--input");
    require_path(c.output, "--output");
    const RunConfig cfg = resolve_config(c);
    const auto corpus = data::load_corpus(c.input);

    std::optional<std::map<std::string, mogp::MoGPModel>> models;
    if (!models_dir.empty()) {
        models.emplace();
        std::optional<mogp::HyperParameters> population;
        for (const auto& path : model_files(models_dir)) {
            auto stored = mogp::load_model(kv::read_file(path));
            if (stored.label == "population") population = stored.model.params();
            else models->emplace(stored.label, std::move(stored.model));
        }
        for (const auto& rec : corpus) {
            if (models->contains(rec.id)) continue;
            if (!population) throw ValidationError("missing model file for subject '" + rec.id + "'");
            const auto p = pipeline::prepare_subject(rec, cfg);
            models->emplace(rec.id, pipeline::condition_on(
                                        *population, pipeline::training_from_average(p.average, cfg.points_per_output)));
        }
    }
    std::optional<hmm::HmmModel> hmm_model;
    if (!hmm_path.empty()) hmm_model = hmm::load_model(kv::read_file(hmm_path));

    log("segmenting " + std::to_string(corpus.size()) + " subjects");
    const auto res = pipeline::segment_corpus(corpus, cfg, models ? &*models : nullptr, hmm_model);
    kv::write_atomic(c.output, segmentation_json(res, cfg).dump(2) + "\n");
    if (!hmm_out.empty()) kv::write_atomic(hmm_out, hmm::save_model(res.model));
    for (const auto& sub : res.subjects) {
        out << sub.id << " segments " << sub.segments.size() << '\n';
    }
    return kExitOk;
}

int cmd_evaluate(const Common& c, const std::string& pred_path, const std::string& truth_path, std::ostream& out,
                 const Logger& log) {
    require_path(c.output, "--output");
    const RunConfig cfg = resolve_config(c);
    kv::Document doc;
    doc.set("schema", kMetricsSchema);
    const auto names = output_names();

    if (!c.input.empty()) {
        if (!pred_path.empty() || !truth_path.empty()) {
            throw ValidationError("--input (LOSO) cannot be combined with --predictions/--truth");
        }
        log("running leave-one-subject-out evaluation");
        const auto res = pipeline::evaluate_loso(data::load_corpus(c.input), cfg);
        doc.set("mode", "loso");
        doc.set_int("splits", static_cast<long long>(res.splits.size()));
        for (const auto& s : res.splits) {
            put_report(doc, "split." + s.subject + ".normalized", s.normalized);
            put_report(doc, "split." + s.subject + ".raw", s.raw);
        }
        put_report(doc, "aggregate.normalized", res.normalized);
        put_report(doc, "aggregate.raw", res.raw);
        kv::write_atomic(c.output, doc.to_string());
        out << "normalized units\n" << metrics::to_table(res.normalized, names);
        out << "raw units\n" << metrics::to_table(res.raw, names);
        return kExitOk;
    }

    require_path(pred_path, "--predictions");
    require_path(truth_path, "--truth");
    const auto pred = read_series(pred_path);
    const auto truth = read_series(truth_path);
    for (const auto& [subject, _] : pred) {
        if (!truth.contains(subject)) throw ValidationError("no ground truth for split '" + subject + "'");
    }
    bool with_raw = true;
    std::vector<metrics::MetricReport> norm_reports, raw_reports;
    std::vector<std::string> subjects;
    for (const auto& [subject, truth_outputs] : truth) {
        const auto it = pred.find(subject);
        if (it == pred.end()) throw ValidationError("missing split: no predictions for subject '" + subject + "'");
        std::vector<std::vector<double>> p, t, pr, tr;
        for (const auto& [output, ts] : truth_outputs) {
            const auto po = it->second.find(output);
            if (po == it->second.end()) {
                throw ValidationError("missing output " + std::to_string(output) + " for subject '" + subject + "'");
            }
            if (po->second.t != ts.t) {
                throw ValidationError("time grids differ for subject '" + subject + "' output " + std::to_string(output));
            }
            p.push_back(po->second.value);
            t.push_back(ts.value);
            if (po->second.raw.empty() || ts.raw.empty()) with_raw = false;
            pr.push_back(po->second.raw);
            tr.push_back(ts.raw);
        }
        if (it->second.size() != truth_outputs.size()) {
            throw ValidationError("output sets differ for subject '" + subject + "'");
        }
        subjects.push_back(subject);
        norm_reports.push_back(metrics::evaluate(p, t));
        if (with_raw) raw_reports.push_back(metrics::evaluate(pr, tr));
    }
    doc.set("mode", "files");
    doc.set_int("splits", static_cast<long long>(subjects.size()));
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        put_report(doc, "split." + subjects[i] + ".normalized", norm_reports[i]);
        if (with_raw) put_report(doc, "split." + subjects[i] + ".raw", raw_reports[i]);
    }
    const auto agg = metrics::average(norm_reports);
    put_report(doc, "aggregate.normalized", agg);
    out << "normalized units\n" << metrics::to_table(agg, names);
    if (with_raw) {
        const auto agg_raw = metrics::average(raw_reports);
        put_report(doc, "aggregate.raw", agg_raw);
        out << "raw units\n" << metrics::to_table(agg_raw, names);
    }
    kv::write_atomic(c.output, doc.to_string());
    return kExitOk;
}

int cmd_export_plots(const Common& c, std::ostream& out, const Logger& log) {
    require_path(c.input, "--input");
    require_path(c.output, "--output");
    const RunConfig cfg = resolve_config(c);
    if (!fs::exists(c.input)) throw ValidationError("model file '" + c.input + "' does not exist");
    const auto stored = mogp::load_model(kv::read_file(c.input));
    const fs::path dir(c.output);
    ensure_dir(dir);
    const int outputs = stored.model.params().outputs();
    auto name = [&](int m) { return outputs == gait::kNumChannels ? std::string(gait::channel_name(m)) : std::to_string(m); };

    const auto grid = gait::uniform_grid(cfg.grid_points);
    const auto pred = stored.model.predict(grid);
    std::string bands = csv_header("bands-v1", "output,t,mean,lower,upper,stddev");
    for (int m = 0; m < outputs; ++m) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double mu = pred.mean[m][k];
            const double sd = pred.stddev[m][k];
            bands += name(m) + "," + fmt(grid[k]) + "," + fmt(mu) + "," + fmt(mu - 2.0 * sd) + "," + fmt(mu + 2.0 * sd) +
                     "," + fmt(sd) + "\n";
        }
    }
    kv::write_atomic(dir / "bands.csv", bands);

    const auto coreg = mogp::export_coregionalization(stored.model);
    std::string cols = "matrix,row";
    for (int m = 0; m < outputs; ++m) cols += "," + name(m);
    std::string b = csv_header("coreg-v1", cols);
    for (const auto& [label, mat] : {std::pair{"covariance", &coreg.covariance}, std::pair{"correlation", &coreg.correlation}}) {
        for (int r = 0; r < outputs; ++r) {
            b += std::string(label) + "," + name(r);
            for (int m = 0; m < outputs; ++m) b += "," + fmt((*mat)(r, m));
            b += "\n";
        }
    }
    kv::write_atomic(dir / "coreg.csv", b);

    const auto& tr = stored.model.training();
    std::string obs = csv_header("observations-v1", "output,t,value");
    for (std::size_t i = 0; i < tr.size(); ++i) obs += name(tr.outputs[i]) + "," + fmt(tr.times[i]) + "," + fmt(tr.values[i]) + "\n";
    kv::write_atomic(dir / "observations.csv", obs);
    log("exported plot data for " + stored.label);
    out << "wrote " << (dir / "bands.csv").string() << ", coreg.csv, observations.csv\n";
    return kExitOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--input", c.input, "input file");
    sub->add_option("--output", c.output, "output file or directory");
    sub->add_option("--config", c.config, "key = value settings file");
    sub->add_flag("--verbose", c.verbose, "progress on stderr");
    for (const auto& key : RunConfig::keys()) {
        sub->add_option_function<std::string>(
            flag_for(key), [&c, key](const std::string& v) { c.overrides[key] = v; }, "setting '" + key + "'");
    }
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
    json e;
    e["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
    err << e.dump() << '\n';
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian-process gait analysis and HMM phase segmentation", "gaitgp"};
    app.require_subcommand(1);
    Common c;
    std::string models_dir, hmm_path, hmm_out, pred_path, truth_path;

    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic corpus CSV");
    auto* preprocess = app.add_subcommand("preprocess", "filter, align and normalize; write averaged cycles");
    auto* fit = app.add_subcommand("fit", "fit MoGP models (one per subject or one population model)");
    auto* predict = app.add_subcommand("predict", "posterior mean and stddev of fitted models on the grid");
    auto* segment = app.add_subcommand("segment", "HMM phase segmentation and anomaly report");
    auto* evaluate = app.add_subcommand("evaluate", "MAE / R2 / aDTW, leave-one-subject-out or from files");
    auto* plots = app.add_subcommand("export-plots", "tabular predictive bands, coregionalization and observations");
    for (auto* sub : {synth, preprocess, fit, predict, segment, evaluate, plots}) add_common(sub, c);
    predict->add_option("--models", models_dir, "directory of .mogp files");
    segment->add_option("--models", models_dir, "directory of .mogp files (fitted in-run when absent)");
    segment->add_option("--hmm", hmm_path, "hmm-v1 model (trained in-run when absent)");
    segment->add_option("--hmm-output", hmm_out, "write the HMM used for decoding");
    evaluate->add_option("--predictions", pred_path, "long-format predictions CSV");
    evaluate->add_option("--truth", truth_path, "long-format ground-truth CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        print_error(err, "validation", e.what(), kExitValidation);
        return kExitValidation;
    }

    const Logger log(err, c.verbose);
    try {
        if (synth->parsed()) return cmd_synth(c, out, log);
        if (preprocess->parsed()) return cmd_preprocess(c, out, log);
        if (fit->parsed()) return cmd_fit(c, out, log);
        if (predict->parsed()) return cmd_predict(c, models_dir, out, log);
        if (segment->parsed()) return cmd_segment(c, models_dir, hmm_path, hmm_out, out, log);
        if (evaluate->parsed()) return cmd_evaluate(c, pred_path, truth_path, out, log);
        if (plots->parsed()) return cmd_export_plots(c, out, log);
    } catch (const ValidationError& e) {
        print_error(err, "validation", e.what(), kExitValidation);
        return kExitValidation;
    } catch (const NumericError& e) {
        print_error(err, "numeric", e.what(), kExitNumeric);
        return kExitNumeric;
    } catch (const fs::filesystem_error& e) {
        print_error(err, "validation", e.what(), kExitValidation);
        return kExitValidation;
    }
    return kExitValidation;
}

} // namespace gaitgp::cli
