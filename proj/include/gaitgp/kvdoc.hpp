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

// Line-oriented "key value value ..." text documents. Doubles are written in
// shortest round-trip form so save/load is bit-exact.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gaitgp::kv {

std::string format_double(double v);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

class Document {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::vector<double>& values);
    void set_int(const std::string& key, long long value);

    bool has(const std::string& key) const;
    /// Raw value text; throws ValidationError when missing.
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    const std::vector<std::string>& keys() const { return order_; }

    std::string to_string() const;
    static Document parse(std::string_view text);

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

/// Write via a sibling temp file and rename so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

} // namespace gaitgp::kv
