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


#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "gaitgp/cli.hpp"
#include "gaitgp/dataio.hpp"
#include "gaitgp/kvdoc.hpp"
#include "gaitgp/metrics.hpp"
#include "gaitgp/mogp_io.hpp"
#include "gaitgp/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace gaitgp;

namespace {

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("gaitgp_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

/// Runs the installed binary; stdout and stderr captured through files.
Run run_bin(const std::vector<std::string>& args, const Scratch& s) {
    std::string cmd = quote(GAITGP_CLI_PATH);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " >" + quote(s / "stdout.txt") + " 2>" + quote(s / "stderr.txt");
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = kv::read_file(s / "stdout.txt");
    r.err = kv::read_file(s / "stderr.txt");
    return r;
}

/// In-process run.
Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::string& path) { return kv::read_file(path); }

/// Rows of a "# schema" CSV as column -> value maps.
std::vector<std::map<std::string, std::string>> read_table(const std::string& path, std::string* schema = nullptr) {
    std::istringstream in(slurp(path));
    std::string line;
    std::getline(in, line);
    if (schema) *schema = line;
    std::getline(in, line);
    std::vector<std::string> cols;
    {
        std::istringstream h(line);
        std::string c;
        while (std::getline(h, c, ',')) cols.push_back(c);
    }
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream l(line);
        std::string v;
        std::map<std::string, std::string> row;
        for (const auto& c : cols) {
            std::getline(l, v, ',');
            row[c] = v;
        }
        rows.push_back(row);
    }
    return rows;
}

double num(const std::map<std::string, std::string>& row, const std::string& col) {
    return kv::parse_double(row.at(col));
}

void write(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

std::string make_corpus(const Scratch& s, int controls, int disorders, int cycles = 2) {
    const std::string path = s / "corpus.csv";
    const Run r = run({"synth", "--output", path, "--synth-controls", std::to_string(controls), "--synth-disorders",
                       std::to_string(disorders), "--synth-cycles", std::to_string(cycles)});
    REQUIRE(r.code == 0);
    return path;
}

// ---------------------------------------------------------------------------
// Minimal JSON Schema check: type, const, enum, required, properties,
// additionalProperties, items, minItems, maxItems, minimum, maximum, $ref.

bool type_ok(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    if (t == "null") return v.is_null();
    if (t == "boolean") return v.is_boolean();
    return false;
}

void validate(const json& v, const json& schema, const json& root, const std::string& at, std::vector<std::string>& errs) {
    if (schema.contains("$ref")) {
        const std::string ref = schema["$ref"];
        REQUIRE(ref.rfind("#/$defs/", 0) == 0);
        validate(v, root["$defs"][ref.substr(8)], root, at, errs);
        return;
    }
    if (schema.contains("type")) {
        bool ok = false;
        if (schema["type"].is_array()) {
            for (const auto& t : schema["type"]) ok |= type_ok(v, t);
        } else {
            ok = type_ok(v, schema["type"]);
        }
        if (!ok) {
            errs.push_back(at + ": wrong type");
            return;
        }
    }
    if (schema.contains("const") && v != schema["const"]) errs.push_back(at + ": const mismatch");
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& e : schema["enum"]) hit |= e == v;
        if (!hit) errs.push_back(at + ": not in enum");
    }
    if (v.is_number()) {
        if (schema.contains("minimum") && v.get<double>() < schema["minimum"].get<double>()) errs.push_back(at + ": below minimum");
        if (schema.contains("maximum") && v.get<double>() > schema["maximum"].get<double>()) errs.push_back(at + ": above maximum");
    }
    if (v.is_object()) {
        if (schema.contains("required"))
            for (const auto& k : schema["required"])
                if (!v.contains(k.get<std::string>())) errs.push_back(at + ": missing " + k.get<std::string>());
        for (const auto& [k, sub] : v.items()) {
            if (schema.contains("properties") && schema["properties"].contains(k)) {
                validate(sub, schema["properties"][k], root, at + "." + k, errs);
            } else if (schema.contains("additionalProperties")) {
                const json& ap = schema["additionalProperties"];
                if (ap.is_boolean()) {
                    if (!ap.get<bool>()) errs.push_back(at + ": unexpected " + k);
                } else {
                    validate(sub, ap, root, at + "." + k, errs);
                }
            }
        }
    }
    if (v.is_array()) {
        if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>()) errs.push_back(at + ": too few items");
        if (schema.contains("maxItems") && v.size() > schema["maxItems"].get<std::size_t>()) errs.push_back(at + ": too many items");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], schema["items"], root, at + "[" + std::to_string(i) + "]", errs);
    }
}

std::vector<std::string> schema_errors(const json& doc) {
    const json schema = json::parse(slurp(std::string(GAITGP_SOURCE_DIR) + "/docs/segment-report.schema.json"));
    std::vector<std::string> errs;
    validate(doc, schema, schema, "$", errs);
    return errs;
}

} // namespace

TEST_CASE("exit codes and error documents from the real binary") {
    Scratch s("exit");
    Run r = run_bin({"synth", "--output", s / "c.csv", "--synth-controls", "1", "--synth-disorders", "1"}, s);
    CHECK(r.code == 0);
    CHECK(fs::exists(s / "c.csv"));

    r = run_bin({"--help"}, s);
    CHECK(r.code == 0);
    CHECK(r.out.find("segment") != std::string::npos);

    r = run_bin({"fit", "--input", s / "missing.csv", "--output", s / "m"}, s);
    CHECK(r.code == 2);
    json e = json::parse(r.err);
    CHECK(e["error"]["kind"] == "validation");
    CHECK(e["error"]["exit_code"] == 2);
    CHECK(e["error"]["message"].get<std::string>().find("missing.csv") != std::string::npos);

    CHECK(run_bin({"fit", "--input", s / "c.csv", "--output", s / "m", "--no-such-flag", "1"}, s).code == 2);
    CHECK(run_bin({"fit", "--input", s / "c.csv", "--output", s / "m", "--iterations", "-4"}, s).code == 2);
    CHECK(run_bin({"fit", "--output", s / "m"}, s).code == 2);
    CHECK(run_bin({"transmogrify"}, s).code == 2);
    CHECK(run_bin({}, s).code == 2);

    // a kernel variance that overflows is a numeric failure
    REQUIRE(run_bin({"fit", "--input", s / "c.csv", "--output", s / "m", "--iterations", "0"}, s).code == 0);
    std::string text = slurp(s / "m/ctrl-01.mogp");
    const auto at = text.find("kernel.log_se_variance ");
    text.replace(at, text.find('\n', at) - at, "kernel.log_se_variance 800");
    write(s / "bad.mogp", text);
    r = run_bin({"export-plots", "--input", s / "bad.mogp", "--output", s / "plots"}, s);
    CHECK(r.code == 3);
    e = json::parse(r.err);
    CHECK(e["error"]["kind"] == "numeric");
    CHECK(e["error"]["exit_code"] == 3);
    CHECK_FALSE(fs::exists(s / "plots/bands.csv"));
}

TEST_CASE("config files apply and flags override them") {
    Scratch s("config");
    const std::string corpus = make_corpus(s, 1, 1);
    write(s / "run.cfg", "# test settings\nhmm_source = raw\nhmm_iterations = 7\ncontext_stride = 3\n");
    Run r = run({"segment", "--input", corpus, "--output", s / "seg.json", "--config", s / "run.cfg", "--hmm-iterations", "9"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(slurp(s / "seg.json"));
    CHECK(doc["config"]["hmm_source"] == "raw");
    CHECK(doc["config"]["hmm_iterations"] == "9");
    CHECK(doc["config"]["context_stride"] == "3");
    CHECK(doc["config"]["learning_rate"] == "0.0075");

    write(s / "bad.cfg", "hmm_sauce = raw\n");
    r = run({"segment", "--input", corpus, "--output", s / "x.json", "--config", s / "bad.cfg"});
    CHECK(r.code == 2);
    CHECK(r.err.find("hmm_sauce") != std::string::npos);
}

TEST_CASE("fit with zero iterations writes the initialization") {
    Scratch s("fit0");
    const std::string corpus = make_corpus(s, 1, 0);
    REQUIRE(run({"fit", "--input", corpus, "--output", s / "m", "--iterations", "0", "--seed", "5"}).code == 0);
    const auto stored = mogp::load_model(slurp(s / "m/ctrl-01.mogp"));
    const auto cfg = pipeline::RunConfig::from_pairs({{"iterations", "0"}, {"seed", "5"}});
    const auto corp = data::load_corpus(corpus);
    const auto prep = pipeline::prepare_subject(corp[0], cfg);
    const auto tr = pipeline::training_from_average(prep.average, cfg.points_per_output);
    const auto init = mogp::initial_hyperparameters(tr, cfg.optimizer.init, cfg.optimizer.seed);
    const auto& p = stored.model.params();
    CHECK(p.kernel_log == init.kernel_log);
    CHECK(p.w == init.w);
    CHECK(p.log_kappa == init.log_kappa);
    CHECK(p.means == init.means);
    CHECK(p.log_noise == init.log_noise);
    CHECK(stored.label == "ctrl-01");
    const auto log = read_table(s / "m/ctrl-01.fitlog.csv");
    CHECK(log.size() == 1u);
}

TEST_CASE("fit is deterministic and its log climbs") {
    Scratch s("fitlog");
    const std::string corpus = make_corpus(s, 1, 0);
    REQUIRE(run({"fit", "--input", corpus, "--output", s / "a"}).code == 0);
    REQUIRE(run({"fit", "--input", corpus, "--output", s / "b"}).code == 0);
    CHECK(slurp(s / "a/ctrl-01.mogp") == slurp(s / "b/ctrl-01.mogp"));
    CHECK(slurp(s / "a/ctrl-01.fitlog.csv") == slurp(s / "b/ctrl-01.fitlog.csv"));

    std::string schema;
    const auto log = read_table(s / "a/ctrl-01.fitlog.csv", &schema);
    CHECK(schema == "# schema fitlog-v1");
    REQUIRE(log.size() > 40u);
    std::vector<double> lml;
    for (const auto& row : log) lml.push_back(num(row, "lml"));
    int drops = 0;
    double prev = -1e300;
    for (std::size_t i = 0; i + 20 <= lml.size(); ++i) {
        double m = 0;
        for (std::size_t k = 0; k < 20; ++k) m += lml[i + k];
        m /= 20;
        drops += m < prev - 1e-9;
        prev = m;
    }
    CHECK(drops == 0);
    CHECK(lml.back() > lml.front());

    REQUIRE(run({"fit", "--input", corpus, "--output", s / "c", "--seed", "8"}).code == 0);
    CHECK(slurp(s / "a/ctrl-01.mogp") != slurp(s / "c/ctrl-01.mogp"));
}

TEST_CASE("segment report follows the published schema") {
    Scratch s("segment");
    const std::string corpus = make_corpus(s, 2, 2, 3);
    Run r = run({"segment", "--input", corpus, "--output", s / "seg.json", "--hmm-source", "raw", "--hmm-output", s / "h.hmm"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(slurp(s / "seg.json"));
    const auto errs = schema_errors(doc);
    for (const auto& e : errs) MESSAGE(e);
    CHECK(errs.empty());
    CHECK(doc["schema"] == cli::kSegmentSchema);
    CHECK(doc["summary"]["subjects"] == 4);
    CHECK(doc["summary"]["subjects_with_anomalies"] == 2);
    for (const auto& sub : doc["subjects"]) {
        CHECK(sub["states"].size() == sub["grid_points"].get<std::size_t>());
        CHECK(sub["source"] == "raw");
        CHECK(sub["mogp_log_marginal_likelihood"].is_null());
        CHECK((sub["cohort"] == "disorder") == !sub["anomalous_segments"].empty());
    }

    // a tampered document is caught by the validator
    json broken = doc;
    broken["subjects"][0]["states"][0] = 7;
    broken["summary"].erase("subjects");
    CHECK(schema_errors(broken).size() == 2u);

    // reusing the written HMM decodes identically
    r = run({"segment", "--input", corpus, "--output", s / "seg2.json", "--hmm-source", "raw", "--hmm", s / "h.hmm"});
    REQUIRE(r.code == 0);
    const json again = json::parse(slurp(s / "seg2.json"));
    for (std::size_t i = 0; i < 4; ++i) CHECK(again["subjects"][i]["states"] == doc["subjects"][i]["states"]);
    CHECK(again["hmm"]["state_means"] == doc["hmm"]["state_means"]);
}

TEST_CASE("segment through fitted models") {
    Scratch s("segmodels");
    const std::string corpus = make_corpus(s, 1, 1);
    REQUIRE(run({"fit", "--input", corpus, "--output", s / "m", "--iterations", "20"}).code == 0);
    Run r = run({"segment", "--input", corpus, "--output", s / "seg.json", "--models", s / "m"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(slurp(s / "seg.json"));
    CHECK(schema_errors(doc).empty());
    const auto stored = mogp::load_model(slurp(s / "m/dis-01.mogp"));
    for (const auto& sub : doc["subjects"]) {
        CHECK(sub["source"] == "mogp-predicted");
        if (sub["subject_id"] == "dis-01") {
            CHECK(sub["mogp_log_marginal_likelihood"].get<double>() == stored.model.log_marginal_likelihood());
        }
    }

    fs::remove(s / "m/dis-01.mogp");
    r = run({"segment", "--input", corpus, "--output", s / "seg3.json", "--models", s / "m"});
    CHECK(r.code == 2);
    CHECK(r.err.find("missing model file") != std::string::npos);
    CHECK_FALSE(fs::exists(s / "seg3.json"));
}

TEST_CASE("evaluate from files") {
    Scratch s("evaluate");
    const std::string corpus = make_corpus(s, 3, 0);
    REQUIRE(run({"preprocess", "--input", corpus, "--output", s / "truth.csv"}).code == 0);
    std::string schema;
    const auto truth = read_table(s / "truth.csv", &schema);
    CHECK(schema == "# schema preprocess-v1");

    Run r = run({"evaluate", "--predictions", s / "truth.csv", "--truth", s / "truth.csv", "--output", s / "self.txt"});
    REQUIRE(r.code == 0);
    auto doc = kv::Document::parse(slurp(s / "self.txt"));
    CHECK(doc.get("schema") == cli::kMetricsSchema);
    CHECK(doc.get_double("aggregate.normalized.mae") == 0.0);
    CHECK(doc.get_double("aggregate.normalized.r_squared") == 1.0);
    CHECK(doc.get_double("aggregate.normalized.adtw") == 0.0);
    CHECK(doc.get_double("aggregate.raw.mae") == 0.0);

    // perturbed predictions: per-split fields equal the metrics module, aggregate is their mean
    std::string pred = slurp(s / "truth.csv");
    {
        std::istringstream in(pred);
        std::ostringstream out;
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            if (n++ >= 2) {
                const auto c = line.find(',', line.find(',', line.find(',') + 1) + 1);
                const auto c2 = line.find(',', c + 1);
                const double v = kv::parse_double(line.substr(c + 1, c2 - c - 1));
                line = line.substr(0, c + 1) + kv::format_double(v + 0.1 * std::sin(n)) + line.substr(c2);
            }
            out << line << '\n';
        }
        pred = out.str();
    }
    write(s / "pred.csv", pred);
    r = run({"evaluate", "--predictions", s / "pred.csv", "--truth", s / "truth.csv", "--output", s / "m.txt"});
    REQUIRE(r.code == 0);
    doc = kv::Document::parse(slurp(s / "m.txt"));
    const auto preds = read_table(s / "pred.csv");
    std::vector<metrics::MetricReport> reports;
    for (const std::string id : {"ctrl-01", "ctrl-02", "ctrl-03"}) {
        std::vector<std::vector<double>> p(6), t(6);
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (truth[i].at("subject_id") != id) continue;
            const int o = gait::parse_channel(truth[i].at("output"));
            t[o].push_back(num(truth[i], "value"));
            p[o].push_back(num(preds[i], "value"));
        }
        const auto rep = metrics::evaluate(p, t);
        reports.push_back(rep);
        CHECK(doc.get_double("split." + id + ".normalized.mae") == rep.mae);
        CHECK(doc.get_double("split." + id + ".normalized.r_squared") == rep.r_squared);
        CHECK(doc.get_double("split." + id + ".normalized.adtw") == rep.adtw);
        CHECK(doc.get_doubles("split." + id + ".normalized.dtw_per_output") == rep.dtw_per_output);
    }
    const auto avg = metrics::average(reports);
    CHECK(doc.get_double("aggregate.normalized.mae") == avg.mae);
    CHECK(doc.get_double("aggregate.normalized.adtw") == avg.adtw);

    // a subject absent from the predictions is a protocol mismatch
    std::istringstream in(pred);
    std::string line, kept;
    while (std::getline(in, line))
        if (line.rfind("ctrl-02,", 0) != 0) kept += line + "\n";
    write(s / "partial.csv", kept);
    r = run({"evaluate", "--predictions", s / "partial.csv", "--truth", s / "truth.csv", "--output", s / "p.txt"});
    CHECK(r.code == 2);
    CHECK(r.err.find("ctrl-02") != std::string::npos);
}

TEST_CASE("evaluate leave-one-subject-out") {
    Scratch s("loso");
    const std::string corpus = make_corpus(s, 3, 0);
    const Run r = run({"evaluate", "--input", corpus, "--output", s / "m.txt", "--iterations", "30", "--eval-points-per-output", "8"});
    REQUIRE(r.code == 0);
    const auto doc = kv::Document::parse(slurp(s / "m.txt"));
    CHECK(doc.get("mode") == "loso");
    CHECK(doc.get_int("splits") == 3);
    double m = 0;
    for (const std::string id : {"ctrl-01", "ctrl-02", "ctrl-03"}) m += doc.get_double("split." + id + ".raw.mae");
    CHECK(doc.get_double("aggregate.raw.mae") == doctest::Approx(m / 3).epsilon(1e-14));
    CHECK(r.out.find("raw units") != std::string::npos);
}

TEST_CASE("export-plots tables") {
    Scratch s("plots");
    const std::string corpus = make_corpus(s, 1, 0);
    REQUIRE(run({"fit", "--input", corpus, "--output", s / "m", "--iterations", "40"}).code == 0);
    REQUIRE(run({"export-plots", "--input", s / "m/ctrl-01.mogp", "--output", s / "plots"}).code == 0);
    const auto stored = mogp::load_model(slurp(s / "m/ctrl-01.mogp"));

    std::string schema;
    const auto bands = read_table(s / "plots/bands.csv", &schema);
    CHECK(schema == "# schema bands-v1");
    CHECK(bands.size() == 6u * 400u);
    for (const auto& b : bands) {
        CHECK(num(b, "lower") <= num(b, "mean"));
        CHECK(num(b, "mean") <= num(b, "upper"));
        CHECK(num(b, "upper") - num(b, "mean") == doctest::Approx(2.0 * num(b, "stddev")).epsilon(1e-12));
    }

    const auto coreg = read_table(s / "plots/coreg.csv", &schema);
    CHECK(schema == "# schema coreg-v1");
    std::map<std::string, std::map<std::string, double>> cov, cor;
    for (const auto& row : coreg) {
        auto& target = row.at("matrix") == "covariance" ? cov : cor;
        for (int c = 0; c < 6; ++c) {
            const std::string name(gait::channel_name(c));
            target[row.at("row")][name] = num(row, name);
        }
    }
    REQUIRE(cov.size() == 6u);
    REQUIRE(cor.size() == 6u);
    const Eigen::MatrixXd b = stored.model.params().coreg().matrix();
    for (int i = 0; i < 6; ++i) {
        const std::string a(gait::channel_name(i));
        CHECK(cor[a][a] == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 0; j < 6; ++j) {
            const std::string c(gait::channel_name(j));
            CHECK(cov[a][c] == cov[c][a]);
            CHECK(cor[a][c] == cor[c][a]);
            CHECK(std::abs(cor[a][c]) <= 1.0 + 1e-12);
            CHECK(cov[a][c] == doctest::Approx(b(i, j)).epsilon(1e-14));
        }
    }

    // exported means at the training times agree with a direct prediction
    const auto obs = read_table(s / "plots/observations.csv", &schema);
    CHECK(schema == "# schema observations-v1");
    const auto& tr = stored.model.training();
    REQUIRE(obs.size() == tr.size());
    Eigen::VectorXd mean, var;
    stored.model.predict_points(tr.times, tr.outputs, mean, var);
    const auto grid = gait::uniform_grid(400);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(num(obs[i], "t") == tr.times[i]);
        CHECK(num(obs[i], "value") == tr.values[i]);
        const auto k = static_cast<std::size_t>(std::lround(tr.times[i] * 399));
        REQUIRE(grid[k] == tr.times[i]);
        const auto& row = bands[static_cast<std::size_t>(tr.outputs[i]) * 400 + k];
        CHECK(row.at("output") == gait::channel_name(tr.outputs[i]));
        CHECK(std::abs(num(row, "mean") - mean(static_cast<Eigen::Index>(i))) < 1e-9);
    }

    CHECK(run({"export-plots", "--input", s / "m/nope.mogp", "--output", s / "p2"}).code == 2);
}

TEST_CASE("predict writes grid posteriors and raw units") {
    Scratch s("predict");
    const std::string corpus = make_corpus(s, 1, 1);
    REQUIRE(run({"fit", "--input", corpus, "--output", s / "m", "--iterations", "10"}).code == 0);
    REQUIRE(run({"predict", "--models", s / "m", "--input", corpus, "--output", s / "p.csv"}).code == 0);
    std::string schema;
    const auto rows = read_table(s / "p.csv", &schema);
    CHECK(schema == "# schema predictions-v1");
    CHECK(rows.size() == 2u * 6u * 400u);
    for (const auto& r : rows) {
        CHECK(num(r, "stddev") > 0.0);
        CHECK(std::isfinite(num(r, "raw_value")));
    }
    REQUIRE(run({"predict", "--models", s / "m", "--output", s / "q.csv"}).code == 0);
    CHECK(read_table(s / "q.csv").front().count("raw_value") == 0u);
    CHECK(run({"predict", "--models", s / "empty", "--output", s / "r.csv"}).code == 2);
    REQUIRE(run({"predict", "--models", s / "m", "--input", corpus, "--output", s / "p2.csv"}).code == 0);
    CHECK(slurp(s / "p.csv") == slurp(s / "p2.csv"));
}
