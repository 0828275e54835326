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

#include "gaitgp/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gaitgp/errors.hpp"
#include "gaitgp/kvdoc.hpp"

namespace gaitgp::hmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEmptyStateMass = 1e-12;
constexpr double kMinCovarianceEigen = 1e-8;

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

double logsumexp(std::span<const double> xs) {
    double hi = kNegInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - hi);
    return hi + std::log(s);
}

void check_label(int label) {
    if (label < 1 || label > kNumStates) {
        throw ValidationError("invalid HMM state label " + std::to_string(label));
    }
}

void check_sequence(const ObservationSequence& seq) {
    if (seq.steps.empty()) throw ValidationError("observation sequence is empty");
    for (std::size_t t = 0; t < seq.steps.size(); ++t) {
        if (!seq.steps[t].allFinite()) {
            throw ValidationError("non-finite observation at step " + std::to_string(t));
        }
    }
}

/// Precomputed Gaussian pieces shared by all states.
struct Emission {
    Eigen::Matrix2d inverse;
    double log_norm = 0.0;
    std::array<Observation, kNumStates> means;

    explicit Emission(const HmmModel& model) : means(model.state_means) {
        const Eigen::Matrix2d& s = model.shared_covariance;
        Eigen::LLT<Eigen::Matrix2d> llt(s);
        if (llt.info() != Eigen::Success || !s.allFinite() || std::abs(s(0, 1) - s(1, 0)) > 1e-12 * s.norm()) {
            throw NumericError("shared emission covariance is not symmetric positive definite");
        }
        const Eigen::Matrix2d l = llt.matrixL();
        inverse = llt.solve(Eigen::Matrix2d::Identity());
        log_norm = -std::log(2.0 * std::numbers::pi) - std::log(l(0, 0)) - std::log(l(1, 1));
    }

    double operator()(const Observation& o, int idx) const {
        const Eigen::Vector2d d = o - means[idx];
        return log_norm - 0.5 * d.dot(inverse * d);
    }

    Eigen::MatrixXd table(const ObservationSequence& seq) const {
        Eigen::MatrixXd b(seq.steps.size(), kNumStates);
        for (std::size_t t = 0; t < seq.steps.size(); ++t)
            for (int j = 0; j < kNumStates; ++j) b(t, j) = (*this)(seq.steps[t], j);
        return b;
    }
};

struct LogParams {
    Eigen::Vector4d log_pi;
    Eigen::Matrix4d log_a;

    explicit LogParams(const HmmModel& m) {
        for (int i = 0; i < kNumStates; ++i) {
            log_pi(i) = safe_log(m.initial_probs(i));
            for (int j = 0; j < kNumStates; ++j) log_a(i, j) = safe_log(m.transitions(i, j));
        }
    }
};

Eigen::MatrixXd forward_table(const LogParams& lp, const Eigen::MatrixXd& logb) {
    const Eigen::Index big_t = logb.rows();
    Eigen::MatrixXd alpha(big_t, kNumStates);
    for (int j = 0; j < kNumStates; ++j) alpha(0, j) = lp.log_pi(j) + logb(0, j);
    std::array<double, kNumStates> tmp{};
    for (Eigen::Index t = 1; t < big_t; ++t) {
        for (int j = 0; j < kNumStates; ++j) {
            for (int i = 0; i < kNumStates; ++i) tmp[i] = alpha(t - 1, i) + lp.log_a(i, j);
            alpha(t, j) = logsumexp(tmp) + logb(t, j);
        }
    }
    return alpha;
}

Eigen::MatrixXd backward_table(const LogParams& lp, const Eigen::MatrixXd& logb) {
    const Eigen::Index big_t = logb.rows();
    Eigen::MatrixXd beta(big_t, kNumStates);
    beta.row(big_t - 1).setZero();
    std::array<double, kNumStates> tmp{};
    for (Eigen::Index t = big_t - 2; t >= 0; --t) {
        for (int i = 0; i < kNumStates; ++i) {
            for (int j = 0; j < kNumStates; ++j) tmp[j] = lp.log_a(i, j) + logb(t + 1, j) + beta(t + 1, j);
            beta(t, i) = logsumexp(tmp);
        }
    }
    return beta;
}

double percentile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

void regularize(Eigen::Matrix2d& s) {
    s = 0.5 * (s + s.transpose());
    s.diagonal().array() += 1e-6 * s.trace() / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < kMinCovarianceEigen) s.diagonal().array() += kMinCovarianceEigen - lo;
}

} // namespace

std::string_view state_name(int label) {
    switch (label) {
    case 1: return "normal_stance";
    case 2: return "normal_swing";
    case 3: return "abnormal_stance";
    case 4: return "abnormal_swing";
    default: throw ValidationError("invalid HMM state label " + std::to_string(label));
    }
}

void HmmModel::validate() const {
    constexpr double tol = 1e-9;
    if ((initial_probs.array() < 0.0).any() || std::abs(initial_probs.sum() - 1.0) > tol) {
        throw ValidationError("initial probabilities must be a probability vector");
    }
    for (int i = 0; i < kNumStates; ++i) {
        if ((transitions.row(i).array() < 0.0).any() || std::abs(transitions.row(i).sum() - 1.0) > tol) {
            throw ValidationError("transition row " + std::to_string(i + 1) + " is not stochastic");
        }
    }
    for (const auto& mu : state_means) {
        if (!mu.allFinite()) throw ValidationError("state mean is not finite");
    }
    if (std::abs(shared_covariance(0, 1) - shared_covariance(1, 0)) > 1e-12 * shared_covariance.norm()) {
        throw ValidationError("shared covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(shared_covariance);
    if (!(es.eigenvalues().minCoeff() >= kMinCovarianceEigen)) {
        throw ValidationError("shared covariance minimum eigenvalue below 1e-8");
    }
}

HmmModel default_model() {
    HmmModel m;
    m.initial_probs << 0.6, 0.3, 0.05, 0.05;
    m.transitions << 0.7, 0.25, 0.05, 0.0,
                     0.3, 0.6, 0.0, 0.1,
                     0.25, 0.2, 0.5, 0.05,
                     0.25, 0.2, 0.05, 0.5;
    for (auto& mu : m.state_means) mu.setZero();
    m.shared_covariance.setIdentity();
    return m;
}

double emission_logpdf(const HmmModel& model, const Observation& obs, int label) {
    check_label(label);
    return Emission(model)(obs, label - 1);
}

double forward_log_likelihood(const HmmModel& model, const ObservationSequence& seq) {
    check_sequence(seq);
    const Eigen::MatrixXd alpha = forward_table(LogParams(model), Emission(model).table(seq));
    const Eigen::Index last = alpha.rows() - 1;
    std::array<double, kNumStates> tmp{};
    for (int j = 0; j < kNumStates; ++j) tmp[j] = alpha(last, j);
    return logsumexp(tmp);
}

double path_log_joint(const HmmModel& model, const ObservationSequence& seq, std::span<const int> labels) {
    check_sequence(seq);
    if (labels.size() != seq.steps.size()) throw ValidationError("path length differs from sequence length");
    const Emission e(model);
    const LogParams lp(model);
    double s = 0.0;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        check_label(labels[t]);
        const int j = labels[t] - 1;
        s += (t == 0 ? lp.log_pi(j) : lp.log_a(labels[t - 1] - 1, j)) + e(seq.steps[t], j);
    }
    return s;
}

HmmModel initialize_emissions(HmmModel base, std::span<const ObservationSequence> sequences) {
    std::vector<double> right, left;
    for (const auto& seq : sequences) {
        check_sequence(seq);
        for (const auto& o : seq.steps) {
            right.push_back(o(0));
            left.push_back(o(1));
        }
    }
    if (right.size() < 2) throw ValidationError("need at least two observations to initialize the HMM");
    Eigen::Map<const Eigen::VectorXd> r(right.data(), right.size());
    Eigen::Map<const Eigen::VectorXd> l(left.data(), left.size());
    const double n = static_cast<double>(right.size());
    const Eigen::Vector2d mean(r.mean(), l.mean());
    Eigen::Matrix2d cov;
    cov(0, 0) = (r.array() - mean(0)).square().sum() / n;
    cov(1, 1) = (l.array() - mean(1)).square().sum() / n;
    cov(0, 1) = cov(1, 0) = ((r.array() - mean(0)) * (l.array() - mean(1))).sum() / n;
    const Eigen::Vector2d sd(std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)));

    base.state_means[0] = {percentile(right, 0.25), percentile(left, 0.25)};
    base.state_means[1] = {percentile(right, 0.75), percentile(left, 0.75)};
    base.state_means[2] = base.state_means[0] + sd;
    base.state_means[3] = base.state_means[1] + sd;
    regularize(cov);
    base.shared_covariance = cov;
    return base;
}

BaumWelchResult baum_welch_fit(const HmmModel& init, std::span<const ObservationSequence> sequences,
                               const BaumWelchConfig& config) {
    if (sequences.empty()) throw ValidationError("Baum-Welch needs at least one sequence");
    if (config.max_iterations < 0) throw ValidationError("EM iteration budget must be non-negative");
    for (const auto& seq : sequences) check_sequence(seq);
    init.validate();

    BaumWelchResult result{init, {}, 0, false};
    HmmModel& model = result.model;

    for (int it = 0;; ++it) {
        const Emission emission(model);
        const LogParams lp(model);

        double total_ll = 0.0;
        Eigen::Vector4d pi_acc = Eigen::Vector4d::Zero();
        Eigen::Matrix4d xi_acc = Eigen::Matrix4d::Zero();
        Eigen::Vector4d from_acc = Eigen::Vector4d::Zero(); // gamma mass on t < T-1
        Eigen::Vector4d mass = Eigen::Vector4d::Zero();
        std::array<Eigen::Vector2d, kNumStates> weighted{};
        for (auto& v : weighted) v.setZero();
        std::vector<Eigen::MatrixXd> gammas;
        gammas.reserve(sequences.size());

        for (const auto& seq : sequences) {
            Eigen::MatrixXd logb = emission.table(seq);
            for (int j = 0; j < kNumStates; ++j)
                if (!config.active_states[j]) logb.col(j).setConstant(kNegInf);
            const Eigen::MatrixXd alpha = forward_table(lp, logb);
            const Eigen::MatrixXd beta = backward_table(lp, logb);
            const Eigen::Index big_t = logb.rows();
            std::array<double, kNumStates> tmp{};
            for (int j = 0; j < kNumStates; ++j) tmp[j] = alpha(big_t - 1, j);
            const double ll = logsumexp(tmp);
            if (!std::isfinite(ll)) throw NumericError("sequence log-likelihood is not finite");
            total_ll += ll;

            Eigen::MatrixXd gamma = ((alpha + beta).array() - ll).exp().matrix();
            for (Eigen::Index t = 0; t < big_t; ++t) {
                for (int j = 0; j < kNumStates; ++j) {
                    weighted[j] += gamma(t, j) * seq.steps[t];
                    mass(j) += gamma(t, j);
                }
            }
            pi_acc += gamma.row(0).transpose();
            if (config.learn_transitions) {
                for (Eigen::Index t = 0; t + 1 < big_t; ++t) {
                    from_acc += gamma.row(t).transpose();
                    for (int i = 0; i < kNumStates; ++i)
                        for (int j = 0; j < kNumStates; ++j)
                            xi_acc(i, j) += std::exp(alpha(t, i) + lp.log_a(i, j) + logb(t + 1, j) +
                                                     beta(t + 1, j) - ll);
                }
            }
            gammas.push_back(std::move(gamma));
        }
        result.log_likelihood_trace.push_back(total_ll);

        if (it > 0) {
            const double prev = result.log_likelihood_trace[it - 1];
            if (std::abs(total_ll - prev) <= config.tolerance * std::abs(prev)) {
                result.converged = true;
                break;
            }
        }
        if (it >= config.max_iterations) break;

        // M-step
        HmmModel next = model;
        if (config.learn_transitions) {
            next.initial_probs = pi_acc / pi_acc.sum();
            for (int i = 0; i < kNumStates; ++i) {
                if (from_acc(i) < kEmptyStateMass) continue;
                next.transitions.row(i) = xi_acc.row(i) / xi_acc.row(i).sum();
            }
        }
        for (int j = 0; j < kNumStates; ++j) {
            if (mass(j) >= kEmptyStateMass) next.state_means[j] = weighted[j] / mass(j);
        }
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        double total_mass = 0.0;
        for (std::size_t s = 0; s < sequences.size(); ++s) {
            const auto& steps = sequences[s].steps;
            for (std::size_t t = 0; t < steps.size(); ++t) {
                for (int j = 0; j < kNumStates; ++j) {
                    const Eigen::Vector2d d = steps[t] - next.state_means[j];
                    cov += gammas[s](static_cast<Eigen::Index>(t), j) * d * d.transpose();
                }
                total_mass += 1.0;
            }
        }
        cov /= total_mass;
        regularize(cov);
        next.shared_covariance = cov;
        model = next;
        result.iterations = it + 1;
    }
    return result;
}

BaumWelchResult fit_anchored(const HmmModel& base, std::span<const ObservationSequence> sequences,
                             const BaumWelchConfig& config) {
    const HmmModel init = initialize_emissions(base, sequences);
    const Observation offset = init.state_means[2] - init.state_means[0];
    BaumWelchConfig normal_only = config;
    normal_only.active_states = {true, true, false, false};
    BaumWelchResult result = baum_welch_fit(init, sequences, normal_only);
    result.model.state_means[2] = result.model.state_means[0] + offset;
    result.model.state_means[3] = result.model.state_means[1] + offset;
    return result;
}

DecodedStates viterbi_decode(const HmmModel& model, const ObservationSequence& seq) {
    check_sequence(seq);
    const Emission emission(model);
    const LogParams lp(model);
    const Eigen::MatrixXd logb = emission.table(seq);
    const Eigen::Index big_t = logb.rows();

    Eigen::MatrixXd delta(big_t, kNumStates);
    Eigen::MatrixXi back(big_t, kNumStates);
    for (Eigen::Index t = 0; t < big_t; ++t) {
        if ((logb.row(t).array() == kNegInf).all()) {
            throw NumericError("emission underflow: observation " + std::to_string(t) +
                               " is impossible under every state");
        }
    }
    for (int j = 0; j < kNumStates; ++j) {
        delta(0, j) = lp.log_pi(j) + logb(0, j);
        back(0, j) = 0;
    }
    for (Eigen::Index t = 1; t < big_t; ++t) {
        for (int j = 0; j < kNumStates; ++j) {
            int arg = 0;
            double best = delta(t - 1, 0) + lp.log_a(0, j);
            for (int i = 1; i < kNumStates; ++i) {
                const double v = delta(t - 1, i) + lp.log_a(i, j);
                if (v > best) {
                    best = v;
                    arg = i;
                }
            }
            delta(t, j) = best + logb(t, j);
            back(t, j) = arg;
        }
    }
    int state = 0;
    for (int j = 1; j < kNumStates; ++j) {
        if (delta(big_t - 1, j) > delta(big_t - 1, state)) state = j;
    }
    DecodedStates out;
    out.log_joint = delta(big_t - 1, state);
    if (!std::isfinite(out.log_joint)) {
        throw NumericError("no path has positive probability under the model");
    }
    out.states.resize(big_t);
    for (Eigen::Index t = big_t - 1; t >= 0; --t) {
        out.states[t] = state + 1;
        state = back(t, state);
    }
    return out;
}

std::vector<AnomalousSegment> anomalous_segments(const DecodedStates& decoded,
                                                 std::span<const double> time_grid) {
    if (decoded.states.size() != time_grid.size()) {
        throw ValidationError("decoded states and time grid differ in length");
    }
    std::vector<AnomalousSegment> out;
    const std::size_t n = decoded.states.size();
    std::size_t t = 0;
    while (t < n) {
        if (decoded.states[t] < 3) {
            ++t;
            continue;
        }
        const std::size_t start = t;
        int count3 = 0;
        int count4 = 0;
        while (t < n && decoded.states[t] >= 3) {
            (decoded.states[t] == 3 ? count3 : count4)++;
            ++t;
        }
        out.push_back({time_grid[start], time_grid[t - 1], count4 > count3 ? 4 : 3});
    }
    return out;
}

std::string save_model(const HmmModel& model) {
    kv::Document doc;
    doc.set("schema", std::string(kModelSchema));
    doc.set("pi", std::vector<double>(model.initial_probs.data(), model.initial_probs.data() + kNumStates));
    for (int i = 0; i < kNumStates; ++i) {
        std::vector<double> row(kNumStates);
        for (int j = 0; j < kNumStates; ++j) row[j] = model.transitions(i, j);
        doc.set("A." + std::to_string(i + 1), row);
    }
    for (int i = 0; i < kNumStates; ++i) {
        doc.set("mu." + std::to_string(i + 1),
                std::vector<double>{model.state_means[i](0), model.state_means[i](1)});
    }
    const auto& s = model.shared_covariance;
    doc.set("sigma", std::vector<double>{s(0, 0), s(0, 1), s(1, 0), s(1, 1)});
    return doc.to_string();
}

HmmModel load_model(std::string_view text) {
    const kv::Document doc = kv::Document::parse(text);
    if (doc.get("schema") != kModelSchema) {
        throw ValidationError("unsupported HMM schema '" + doc.get("schema") + "'");
    }
    auto fixed = [&](const std::string& key, std::size_t n) {
        auto v = doc.get_doubles(key);
        if (v.size() != n) throw ValidationError("field '" + key + "' needs " + std::to_string(n) + " values");
        return v;
    };
    HmmModel m;
    const auto pi = fixed("pi", kNumStates);
    for (int i = 0; i < kNumStates; ++i) m.initial_probs(i) = pi[i];
    for (int i = 0; i < kNumStates; ++i) {
        const auto row = fixed("A." + std::to_string(i + 1), kNumStates);
        for (int j = 0; j < kNumStates; ++j) m.transitions(i, j) = row[j];
    }
    for (int i = 0; i < kNumStates; ++i) {
        const auto mu = fixed("mu." + std::to_string(i + 1), 2);
        m.state_means[i] = {mu[0], mu[1]};
    }
    const auto s = fixed("sigma", 4);
    m.shared_covariance << s[0], s[1], s[2], s[3];
    m.validate();
    return m;
}

} // namespace gaitgp::hmm
