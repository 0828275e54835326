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

#include <string>
#include <string_view>

#include "gaitgp/mogp.hpp"

namespace gaitgp::mogp {

inline constexpr std::string_view kModelSchema = "mogp-v1";

struct StoredModel {
    MoGPModel model;
    OptimizerConfig config;
    std::string label; // subject id or "population"
};

/// `mogp-v1` document: every unconstrained parameter, the training data and its
/// hash, and the optimizer configuration. Bit-exact under save -> load -> save.
std::string save_model(const MoGPModel& model, const OptimizerConfig& config, const std::string& label);
StoredModel load_model(std::string_view text);

} // namespace gaitgp::mogp
