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

#include "gaitgp/kvdoc.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gaitgp/errors.hpp"

namespace gaitgp::kv {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    if (text == "nan") return std::nan("");
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ValidationError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

long long parse_int(std::string_view text) {
    long long v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ValidationError("not an integer: '" + std::string(text) + "'");
    }
    return v;
}

void Document::set(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of(" \t\n") != std::string::npos) {
        throw ValidationError("invalid key '" + key + "'");
    }
    if (!values_.contains(key)) order_.push_back(key);
    values_[key] = value;
}

void Document::set(const std::string& key, double value) { set(key, format_double(value)); }

void Document::set(const std::string& key, const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ' ';
        s += format_double(values[i]);
    }
    set(key, s);
}

void Document::set_int(const std::string& key, long long value) { set(key, std::to_string(value)); }

bool Document::has(const std::string& key) const { return values_.contains(key); }

const std::string& Document::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("missing key '" + key + "'");
    return it->second;
}

double Document::get_double(const std::string& key) const { return parse_double(get(key)); }

long long Document::get_int(const std::string& key) const { return parse_int(get(key)); }

std::vector<double> Document::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::string_view s = get(key);
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t end = std::min(s.find(' ', pos), s.size());
        if (end > pos) out.push_back(parse_double(s.substr(pos, end - pos)));
        pos = end + 1;
    }
    return out;
}

std::string Document::to_string() const {
    std::string out;
    for (const auto& key : order_) {
        out += key;
        const auto& v = values_.at(key);
        if (!v.empty()) {
            out += ' ';
            out += v;
        }
        out += '\n';
    }
    return out;
}

Document Document::parse(std::string_view text) {
    Document doc;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t sp = line.find(' ');
        const std::string key(line.substr(0, sp));
        const std::string value = sp == std::string_view::npos ? "" : std::string(line.substr(sp + 1));
        if (doc.has(key)) {
            throw ValidationError("duplicate key '" + key + "' on line " + std::to_string(line_no));
        }
        doc.set(key, value);
    }
    return doc;
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
        os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!os) throw ValidationError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace gaitgp::kv
