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

#include "gaitgp/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "gaitgp/errors.hpp"
#include "gaitgp/kvdoc.hpp"

namespace gaitgp::data {

std::string_view cohort_name(Cohort c) { return c == Cohort::Control ? "control" : "disorder"; }

Cohort parse_cohort(std::string_view text) {
    if (text == "control") return Cohort::Control;
    if (text == "disorder") return Cohort::Disorder;
    throw ValidationError("unknown cohort '" + std::string(text) + "'");
}

gait::CycleSignals GaitCycle::y_signals() const {
    gait::CycleSignals out;
    for (int c = 0; c < gait::kNumChannels; ++c) {
        out[c].reserve(joints[c].samples.size());
        for (const auto& p : joints[c].samples) out[c].push_back(p.y());
    }
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

constexpr std::array<std::string_view, 9> kColumns = {"subject_id", "cohort", "cycle", "frame", "joint",
                                                      "side",       "x",      "y",     "z"};

struct RowError {
    std::string source;
    std::size_t row;
    [[noreturn]] void fail(std::size_t col, const std::string& what) const {
        throw ValidationError(source + ": row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                              " (" + std::string(kColumns[col]) + "): " + what);
    }
};

} // namespace

Corpus parse_corpus(std::string_view text, const std::string& source) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw ValidationError(source + ": no subjects");
    std::string_view header = lines.front();
    if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
    if (header != kCsvHeader) {
        throw ValidationError(source + ": row 1: header must be '" + std::string(kCsvHeader) + "'");
    }

    struct Sample {
        std::array<Eigen::Vector3d, gait::kNumChannels> pos;
        std::array<bool, gait::kNumChannels> seen{};
    };
    struct SubjectAcc {
        Cohort cohort;
        std::map<long long, std::map<long long, Sample>> cycles; // cycle -> frame -> sample
    };
    std::map<std::string, SubjectAcc> subjects;

    for (std::size_t r = 1; r < lines.size(); ++r) {
        const RowError err{source, r + 1};
        if (lines[r].empty()) err.fail(0, "empty row");
        const auto f = split_fields(lines[r]);
        if (f.size() != kColumns.size()) {
            err.fail(std::min(f.size(), kColumns.size() - 1),
                     "expected 9 fields, found " + std::to_string(f.size()));
        }
        if (f[0].empty()) err.fail(0, "empty subject id");
        Cohort cohort;
        long long cycle = 0, frame = 0;
        gait::Joint joint;
        gait::Side side;
        try { cohort = parse_cohort(f[1]); } catch (const ValidationError& e) { err.fail(1, e.what()); }
        try { cycle = kv::parse_int(f[2]); } catch (const ValidationError& e) { err.fail(2, e.what()); }
        try { frame = kv::parse_int(f[3]); } catch (const ValidationError& e) { err.fail(3, e.what()); }
        try { joint = gait::parse_joint(f[4]); } catch (const ValidationError& e) { err.fail(4, e.what()); }
        try { side = gait::parse_side(f[5]); } catch (const ValidationError& e) { err.fail(5, e.what()); }
        Eigen::Vector3d p;
        for (int a = 0; a < 3; ++a) {
            const std::string_view field = f[6 + a];
            if (field.empty()) {
                p(a) = std::nan("");
                continue;
            }
            try {
                p(a) = kv::parse_double(field);
            } catch (const ValidationError& e) {
                err.fail(6 + a, e.what());
            }
            if (!std::isfinite(p(a))) err.fail(6 + a, "non-finite value; mark gaps with an empty field");
        }

        auto [it, inserted] = subjects.try_emplace(std::string(f[0]), SubjectAcc{cohort, {}});
        if (!inserted && it->second.cohort != cohort) err.fail(1, "cohort differs from earlier rows of this subject");
        Sample& s = it->second.cycles[cycle][frame];
        const int ch = gait::channel_index(joint, side);
        if (s.seen[ch]) err.fail(4, "duplicate joint/side for this frame");
        s.seen[ch] = true;
        s.pos[ch] = p;
    }
    if (subjects.empty()) throw ValidationError(source + ": no subjects");

    Corpus corpus;
    for (auto& [id, acc] : subjects) {
        SubjectRecord rec;
        rec.id = id;
        rec.cohort = acc.cohort;
        rec.provenance = source;
        for (auto& [cycle_no, frames] : acc.cycles) {
            GaitCycle cyc;
            cyc.index = static_cast<int>(cycle_no);
            for (int c = 0; c < gait::kNumChannels; ++c) {
                cyc.joints[c].joint = static_cast<gait::Joint>(c / 2);
                cyc.joints[c].side = static_cast<gait::Side>(c % 2);
            }
            for (auto& [frame_no, s] : frames) {
                for (int c = 0; c < gait::kNumChannels; ++c) {
                    if (!s.seen[c]) {
                        throw ValidationError(source + ": subject " + id + " cycle " + std::to_string(cycle_no) +
                                              " frame " + std::to_string(frame_no) + " lacks " +
                                              std::string(gait::channel_name(c)));
                    }
                    cyc.joints[c].samples.push_back(s.pos[c]);
                }
                cyc.frames.push_back(frame_no);
            }
            if (cyc.frames.size() < 2) {
                throw ValidationError(source + ": subject " + id + " cycle " + std::to_string(cycle_no) +
                                      " has fewer than 2 frames");
            }
            for (auto& j : cyc.joints) {
                try {
                    j = gait::impute_missing(j);
                } catch (const ValidationError& e) {
                    throw ValidationError(source + ": subject " + id + " cycle " + std::to_string(cycle_no) +
                                          ": " + e.what());
                }
            }
            rec.cycles.push_back(std::move(cyc));
        }
        corpus.push_back(std::move(rec));
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ValidationError("corpus file '" + path.string() + "' does not exist");
    return parse_corpus(kv::read_file(path), path.string());
}

std::string save_corpus(const Corpus& corpus) {
    std::vector<const SubjectRecord*> order;
    for (const auto& s : corpus) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });

    std::string out(kCsvHeader);
    out += '\n';
    for (const SubjectRecord* s : order) {
        std::vector<const GaitCycle*> cycles;
        for (const auto& c : s->cycles) cycles.push_back(&c);
        std::sort(cycles.begin(), cycles.end(), [](auto* a, auto* b) { return a->index < b->index; });
        for (const GaitCycle* c : cycles) {
            std::vector<std::size_t> idx(c->frames.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return c->frames[a] < c->frames[b]; });
            for (std::size_t i : idx) {
                for (int ch = 0; ch < gait::kNumChannels; ++ch) {
                    const auto& p = c->joints[ch].samples[i];
                    out += s->id;
                    out += ',';
                    out += cohort_name(s->cohort);
                    out += ',' + std::to_string(c->index) + ',' + std::to_string(c->frames[i]) + ',';
                    out += gait::joint_name(static_cast<gait::Joint>(ch / 2));
                    out += ',';
                    out += gait::side_name(static_cast<gait::Side>(ch % 2));
                    for (int a = 0; a < 3; ++a) {
                        out += ',';
                        if (std::isfinite(p(a))) out += kv::format_double(p(a));
                    }
                    out += '\n';
                }
            }
        }
    }
    return out;
}

std::vector<LosoSplit> loso_splits(const Corpus& corpus) {
    if (corpus.size() < 2) throw ValidationError("leave-one-subject-out needs at least 2 subjects");
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return corpus[a].id < corpus[b].id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (corpus[order[i]].id == corpus[order[i - 1]].id) {
            throw ValidationError("duplicate subject id '" + corpus[order[i]].id + "'");
        }
    }
    std::vector<LosoSplit> splits;
    for (std::size_t held : order) {
        LosoSplit s;
        s.test = held;
        for (std::size_t i : order)
            if (i != held) s.train.push_back(i);
        splits.push_back(std::move(s));
    }
    return splits;
}

} // namespace gaitgp::data
