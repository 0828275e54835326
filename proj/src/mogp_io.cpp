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

#include "gaitgp/mogp_io.hpp"

#include <cstdio>

#include "gaitgp/errors.hpp"
#include "gaitgp/kvdoc.hpp"

namespace gaitgp::mogp {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

std::string save_model(const MoGPModel& model, const OptimizerConfig& config, const std::string& label) {
    const auto& p = model.params();
    const auto& tr = model.training();
    kv::Document doc;
    doc.set("schema", std::string(kModelSchema));
    doc.set("label", label.empty() ? std::string("-") : label);
    doc.set_int("outputs", p.outputs());
    doc.set_int("rank", p.rank());

    const auto names = kernels::kernel_gradient_names(p.outputs(), p.rank());
    for (int k = 0; k < kernels::kNumKernelParams; ++k) doc.set("kernel." + names[k], p.kernel_log[k]);
    std::vector<double> w;
    for (int m = 0; m < p.outputs(); ++m)
        for (int r = 0; r < p.rank(); ++r) w.push_back(p.w(m, r));
    doc.set("coreg.w", w);
    doc.set("coreg.log_kappa", to_vec(p.log_kappa));
    doc.set("means", to_vec(p.means));
    doc.set("log_noise", p.log_noise);

    doc.set("config.iterations", static_cast<double>(config.iterations));
    doc.set("config.learning_rate", config.learning_rate);
    doc.set("config.weight_decay", config.weight_decay);
    doc.set("config.beta1", config.beta1);
    doc.set("config.beta2", config.beta2);
    doc.set("config.epsilon", config.epsilon);
    doc.set("config.early_stop_tolerance", config.early_stop_tolerance);
    doc.set_int("config.early_stop_window", config.early_stop_window);
    doc.set("config.seed", std::to_string(config.seed));
    doc.set("config.init.variance", config.init.variance);
    doc.set("config.init.lengthscale", config.init.lengthscale);
    doc.set("config.init.period", config.init.period);
    doc.set("config.init.w_stddev", config.init.w_stddev);
    doc.set("config.init.kappa", config.init.kappa);
    doc.set("config.init.noise_variance", config.init.noise_variance);

    doc.set("log_marginal_likelihood", model.log_marginal_likelihood());
    doc.set_int("training.n", static_cast<long long>(tr.size()));
    doc.set("training.hash", hex64(tr.hash()));
    doc.set("training.times", tr.times);
    std::vector<double> outs(tr.outputs.begin(), tr.outputs.end());
    doc.set("training.outputs", outs);
    doc.set("training.values", tr.values);
    return doc.to_string();
}

StoredModel load_model(std::string_view text) {
    const kv::Document doc = kv::Document::parse(text);
    if (doc.get("schema") != kModelSchema) {
        throw ValidationError("unsupported model schema '" + doc.get("schema") + "'");
    }
    const int big_m = static_cast<int>(doc.get_int("outputs"));
    const int rank = static_cast<int>(doc.get_int("rank"));
    if (big_m < 1 || rank < 1 || rank > big_m) throw ValidationError("bad outputs/rank in model");

    HyperParameters p;
    const auto names = kernels::kernel_gradient_names(big_m, rank);
    for (int k = 0; k < kernels::kNumKernelParams; ++k) p.kernel_log[k] = doc.get_double("kernel." + names[k]);
    const auto w = doc.get_doubles("coreg.w");
    const auto lk = doc.get_doubles("coreg.log_kappa");
    const auto means = doc.get_doubles("means");
    if (w.size() != static_cast<std::size_t>(big_m * rank) || lk.size() != static_cast<std::size_t>(big_m) ||
        means.size() != static_cast<std::size_t>(big_m)) {
        throw ValidationError("model parameter arrays have the wrong length");
    }
    p.w.resize(big_m, rank);
    for (int m = 0; m < big_m; ++m)
        for (int r = 0; r < rank; ++r) p.w(m, r) = w[m * rank + r];
    p.log_kappa = Eigen::Map<const Eigen::VectorXd>(lk.data(), big_m);
    p.means = Eigen::Map<const Eigen::VectorXd>(means.data(), big_m);
    p.log_noise = doc.get_double("log_noise");

    OptimizerConfig c;
    c.iterations = static_cast<int>(doc.get_double("config.iterations"));
    c.learning_rate = doc.get_double("config.learning_rate");
    c.weight_decay = doc.get_double("config.weight_decay");
    c.beta1 = doc.get_double("config.beta1");
    c.beta2 = doc.get_double("config.beta2");
    c.epsilon = doc.get_double("config.epsilon");
    c.early_stop_tolerance = doc.get_double("config.early_stop_tolerance");
    c.early_stop_window = static_cast<int>(doc.get_int("config.early_stop_window"));
    c.seed = std::stoull(doc.get("config.seed"));
    c.init.rank = rank;
    c.init.variance = doc.get_double("config.init.variance");
    c.init.lengthscale = doc.get_double("config.init.lengthscale");
    c.init.period = doc.get_double("config.init.period");
    c.init.w_stddev = doc.get_double("config.init.w_stddev");
    c.init.kappa = doc.get_double("config.init.kappa");
    c.init.noise_variance = doc.get_double("config.init.noise_variance");

    TrainingSet tr;
    tr.num_outputs = big_m;
    tr.times = doc.get_doubles("training.times");
    tr.values = doc.get_doubles("training.values");
    for (double o : doc.get_doubles("training.outputs")) tr.outputs.push_back(static_cast<int>(o));
    if (static_cast<long long>(tr.size()) != doc.get_int("training.n")) {
        throw ValidationError("training.n does not match the stored training arrays");
    }
    if (hex64(tr.hash()) != doc.get("training.hash")) {
        throw ValidationError("training data hash mismatch; model document is corrupt");
    }
    std::string label = doc.get("label");
    if (label == "-") label.clear();
    return StoredModel{MoGPModel(std::move(p), std::move(tr)), c, std::move(label)};
}

} // namespace gaitgp::mogp
