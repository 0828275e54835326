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

#include <cmath>
#include <random>

#include "gaitgp/errors.hpp"
#include "gaitgp/kernels.hpp"
#include "gaitgp/mogp.hpp"
#include "oracles.hpp"

using namespace gaitgp::kernels;

namespace {

CompositeKernelSpec random_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> var(0.1, 5.0), len(0.05, 2.0), per(0.3, 2.0);
    CompositeKernelSpec s;
    s.periodic = {var(rng), len(rng), per(rng)};
    s.se = {var(rng), len(rng), 1.0};
    s.matern32 = {var(rng), len(rng), 1.0};
    return s;
}

CoregionalizationFactor random_coreg(std::mt19937_64& rng, int m, int r) {
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> kap(0.01, 1.0);
    CoregionalizationFactor c;
    c.w.resize(m, r);
    c.kappa.resize(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < r; ++j) c.w(i, j) = n01(rng);
        c.kappa(i) = kap(rng);
    }
    return c;
}

} // namespace

TEST_CASE("matern32 closed-form values") {
    CHECK(eval_matern32({3.0, 0.2, 1.0}, 0.4, 0.4) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(eval_matern32({1.0, std::sqrt(3.0), 1.0}, 0.0, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(eval_matern32({1.0, 0.01, 1.0}, 0.0, 1.0) < 1e-30);
}

TEST_CASE("periodic closed-form values") {
    CHECK(eval_periodic({1.0, 1.0, 0.5}, 0.1, 0.6) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eval_periodic({1.0, 1.0, 1.0}, 0.0, 0.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(eval_periodic({4.0, 2.0, 1.0}, 0.0, 0.0) == 4.0);
}

TEST_CASE("se closed-form values") {
    CHECK(eval_se({2.0, 0.5, 1.0}, 0.3, 0.3) == 2.0);
    CHECK(eval_se({1.0, 1.0, 1.0}, 0.0, 0.5) == doctest::Approx(std::exp(-0.125)).epsilon(1e-15));
}

TEST_CASE("composite sums the three sub-kernels") {
    CompositeKernelSpec unit{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
    CHECK(eval_composite(unit, 0.2, 0.2) == doctest::Approx(3.0));
    const double expected =
        std::exp(-2.0) + std::exp(-0.125) + (1.0 + std::sqrt(3.0) / 2.0) * std::exp(-std::sqrt(3.0) / 2.0);
    CHECK(eval_composite(unit, 0.0, 0.5) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(eval_composite(unit, 0.0, 0.5) == doctest::Approx(1.80272).epsilon(1e-5));

    CompositeKernelSpec zero{{0.0, 1.0, 1.0}, {0.0, 1.0, 1.0}, {0.0, 1.0, 1.0}};
    CHECK(eval_composite(zero, 0.1, 0.1) == doctest::Approx(3.0 * kParamFloor).epsilon(1e-12));
}

TEST_CASE("sub-kernels match the long double oracle and are symmetric") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_spec(rng);
        const double t = u(rng), v = u(rng);
        const double pe = eval_periodic(s.periodic, t, v);
        const double se = eval_se(s.se, t, v);
        const double ma = eval_matern32(s.matern32, t, v);
        CHECK(std::abs(pe - static_cast<double>(oracle::periodic(s.periodic.variance, s.periodic.lengthscale,
                                                                 s.periodic.period, t, v))) <= 1e-12 * pe);
        CHECK(std::abs(se - static_cast<double>(oracle::se(s.se.variance, s.se.lengthscale, t, v))) <= 1e-12 * se);
        CHECK(std::abs(ma - static_cast<double>(oracle::matern32(s.matern32.variance, s.matern32.lengthscale, t, v))) <=
              1e-12 * ma);
        CHECK(eval_composite(s, t, v) == eval_composite(s, v, t));
        CHECK(eval_se(s.se, t, t) >= se);
        CHECK(eval_matern32(s.matern32, t, t) >= ma);
        CHECK(eval_periodic(s.periodic, t, t) >= pe);
    }
}

TEST_CASE("periodic kernel peaks exactly at whole periods") {
    const SubKernelParams p{1.7, 0.4, 0.25};
    for (int k = 0; k <= 4; ++k) {
        CHECK(eval_periodic(p, 0.0, 0.25 * k) == doctest::Approx(1.7).epsilon(1e-12));
    }
    CHECK(eval_periodic(p, 0.0, 0.1) < 1.7);
}

TEST_CASE("icm covariance factorizes") {
    std::mt19937_64 rng(5);
    const auto s = random_spec(rng);

    CoregionalizationFactor diag;
    diag.w = Eigen::MatrixXd::Zero(3, 2);
    diag.kappa = Eigen::VectorXd::Ones(3);
    CHECK(icm_covariance(s, diag, 0, 2, 0.1, 0.4) == 0.0);

    CoregionalizationFactor ones;
    ones.w = Eigen::MatrixXd::Ones(3, 1);
    ones.kappa = Eigen::VectorXd::Zero(3);
    CHECK(icm_covariance(s, ones, 1, 2, 0.1, 0.4) == doctest::Approx(eval_composite(s, 0.1, 0.4)).epsilon(1e-15));

    const auto c = random_coreg(rng, 3, 2);
    const auto b = oracle::coreg_matrix(c);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double want = static_cast<double>(b(i, j)) * eval_composite(s, 0.2, 0.7);
            CHECK(std::abs(icm_covariance(s, c, i, j, 0.2, 0.7) - want) <= 1e-12 * (1.0 + std::abs(want)));
            CHECK(icm_covariance(s, c, i, j, 0.2, 0.7) == icm_covariance(s, c, j, i, 0.7, 0.2));
        }
    CHECK_THROWS_AS(icm_covariance(s, c, 3, 0, 0.0, 0.0), gaitgp::ValidationError);
    CHECK_THROWS_AS(icm_covariance(s, c, -1, 0, 0.0, 0.0), gaitgp::ValidationError);
}

TEST_CASE("gram matrix shape, symmetry and PSD") {
    std::mt19937_64 rng(9);
    const auto s = random_spec(rng);
    const auto c = random_coreg(rng, 2, 1);

    const std::vector<double> t1{0.3};
    const std::vector<int> o1{1};
    const auto k1 = gram_matrix(s, c, t1, o1);
    REQUIRE(k1.rows() == 1);
    CHECK(k1(0, 0) == doctest::Approx(c.matrix()(1, 1) * eval_composite(s, 0.3, 0.3)));

    const std::vector<double> td{0.3, 0.3, 0.6};
    const std::vector<int> od{0, 0, 1};
    const auto kd = gram_matrix(s, c, td, od);
    CHECK(kd.row(0) == kd.row(1));

    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> t4;
    std::vector<int> o4;
    for (int i = 0; i < 4; ++i) {
        t4.push_back(u(rng));
        o4.push_back(i % 2);
    }
    const auto k4 = gram_matrix(s, c, t4, o4);
    CHECK((k4 - k4.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k4);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * k4.trace());

    const std::vector<int> bad{0, 0, 0};
    CHECK_THROWS_AS(gram_matrix(s, c, t4, bad), gaitgp::ValidationError);
}

TEST_CASE("kernel gradient identities") {
    std::mt19937_64 rng(3);
    const auto s = random_spec(rng);
    const auto c = random_coreg(rng, 2, 1);
    const std::vector<double> t{0.1, 0.1, 0.45, 0.8, 0.95};
    const std::vector<int> o{0, 1, 0, 1, 1};
    const auto grads = kernel_gradients(s, c, t, o);
    REQUIRE(grads.size() == static_cast<std::size_t>(kNumKernelParams + 2 * 1 + 2));
    CHECK(kernel_gradient_names(2, 1).size() == grads.size());

    // d/d log sigma^2_SE equals the SE part of the Gram matrix
    const Eigen::MatrixXd b = c.matrix();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double want = b(o[i], o[j]) * eval_se(s.se, t[i], t[j]);
            CHECK(std::abs(grads[kLogSeVariance](i, j) - want) <= 1e-14 * (1.0 + std::abs(want)));
        }

    // zero-lag entries do not depend on the SE length-scale
    CHECK(grads[kLogSeLengthscale](0, 1) == 0.0);
    for (int i = 0; i < 5; ++i) CHECK(grads[kLogSeLengthscale](i, i) == 0.0);

    for (const auto& g : grads) CHECK((g - g.transpose()).norm() <= 1e-14 * (1.0 + g.norm()));
}

TEST_CASE("kernel gradients match central finite differences") {
    std::mt19937_64 rng(21);
    const auto s = random_spec(rng);
    const auto c = random_coreg(rng, 2, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> t;
    std::vector<int> o;
    for (int i = 0; i < 5; ++i) {
        t.push_back(u(rng));
        o.push_back(i % 2);
    }
    // pack into a HyperParameters to reuse its log-space layout
    gaitgp::mogp::HyperParameters p;
    p.kernel_log = {std::log(s.periodic.variance), std::log(s.periodic.lengthscale), std::log(s.periodic.period),
                    std::log(s.se.variance),       std::log(s.se.lengthscale),       std::log(s.matern32.variance),
                    std::log(s.matern32.lengthscale)};
    p.w = c.w;
    p.log_kappa = c.kappa.array().log();
    p.means = Eigen::VectorXd::Zero(2);
    p.log_noise = std::log(0.1);
    const auto analytic = kernel_gradients(p.kernel(), p.coreg(), t, o);
    const Eigen::VectorXd theta = p.pack();
    const double h = 1e-5;
    for (std::size_t g = 0; g < analytic.size(); ++g) {
        Eigen::VectorXd a = theta, b = theta;
        a(static_cast<Eigen::Index>(g)) += h;
        b(static_cast<Eigen::Index>(g)) -= h;
        gaitgp::mogp::HyperParameters pa = p, pb = p;
        pa.unpack(a);
        pb.unpack(b);
        const Eigen::MatrixXd fd =
            (gram_matrix(pa.kernel(), pa.coreg(), t, o) - gram_matrix(pb.kernel(), pb.coreg(), t, o)) / (2.0 * h);
        const double scale = std::max(analytic[g].cwiseAbs().maxCoeff(), 1e-12);
        CHECK((analytic[g] - fd).cwiseAbs().maxCoeff() / scale < 1e-4);
    }
}
