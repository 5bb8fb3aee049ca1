#include "doctest.h"
#include "scdt/nn/gradcheck.hpp"
#include "scdt/nn/loss.hpp"
#include "scdt/nn/optimizer.hpp"
#include "scdt/nn/serialize.hpp"
#include "scdt/nn/train.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace scdt;
using namespace scdt::nn;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  auto rng = substream(seed, Stream::init);
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = 2.0 * uniform_open(rng) - 1.0;
  return m;
}

Sequence random_sequence(int steps, Eigen::Index batch, Eigen::Index features, std::uint64_t seed) {
  Sequence s;
  for (int t = 0; t < steps; ++t) s.push_back(random_matrix(batch, features, seed + 100 * t));
  return s;
}

}  // namespace

TEST_CASE("dense identity layer passes input through") {
  Dense d(3, 3, Activation::linear);
  d.weight = Matrix::Identity(3, 3);
  d.bias = Matrix::Zero(1, 3);
  Rng rng;
  const Matrix x = random_matrix(4, 3, 1);
  CHECK((d.forward(as_sequence(x), Mode::eval, rng).back() - x).norm() == 0.0);
}

TEST_CASE("lstm with zero weights keeps hidden state at zero") {
  Lstm l(5, 4, true);
  Rng rng;
  const auto out = l.forward(random_sequence(6, 3, 5, 2), Mode::train, rng);
  for (const auto& h : out) CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("softmax rows sum to one") {
  const Matrix p = activate(Activation::softmax, 50.0 * random_matrix(10, 6, 3));
  for (Eigen::Index r = 0; r < p.rows(); ++r) CHECK(std::abs(p.row(r).sum() - 1.0) < 1e-12);
}

TEST_CASE("dense gradients match finite differences") {
  for (auto act : {Activation::linear, Activation::sigmoid, Activation::tanh, Activation::softmax,
                   Activation::relu}) {
    CAPTURE(to_string(act));
    Network net;
    net.add<Dense>(5, 7, Activation::tanh);
    net.add<Dense>(7, 4, act);
    net.initialize(9);
    const auto r = check_gradients(net, as_sequence(random_matrix(3, 5, 4)), 17);
    CHECK(r.max_relative_error < 1e-4);
  }
}

TEST_CASE("lstm gradients match finite differences") {
  for (bool sequences : {true, false}) {
    Network net;
    net.add<Lstm>(3, 4, true);
    net.add<Lstm>(4, 5, sequences);
    net.add<Dense>(5, 2, Activation::linear);
    net.initialize(21);
    for (auto& p : net.parameters()) *p.value += 0.3 * random_matrix(p.value->rows(), p.value->cols(), 8);
    const auto r = check_gradients(net, random_sequence(5, 2, 3, 30), 5);
    CAPTURE(sequences);
    CHECK(r.max_relative_error < 1e-4);
  }
}

TEST_CASE("gradient check including an l1 penalty") {
  Network net;
  net.add<Lstm>(3, 4, false);
  net.add<Dense>(4, 1, Activation::linear);
  net.initialize(2);
  const auto r = check_gradients(net, random_sequence(4, 3, 3, 6), 3, {1e-3, 1e-3});
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("loss values on hand cases") {
  Matrix p(1, 2), t(1, 2);
  p << 1, 3;
  t << 2, 5;
  CHECK(mae_loss(p, t) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(mae_loss(t, t) == 0.0);

  const Matrix uniform = Matrix::Constant(4, 6, 1.0 / 6.0);
  Matrix onehot = Matrix::Zero(4, 6);
  for (int r = 0; r < 4; ++r) onehot(r, r) = 1.0;
  CHECK(cce_loss(uniform, onehot) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(cce_loss(onehot, onehot) == doctest::Approx(0.0));
  const Matrix zero = Matrix::Zero(4, 6);
  CHECK(std::isfinite(cce_loss(zero, onehot)));

  Matrix w(1, 2);
  w << 1, -2;
  CHECK(l1_penalty(w, 1e-3) == doctest::Approx(0.003).epsilon(1e-15));
  CHECK(l1_penalty(w, 0.0) == 0.0);
  Matrix z = Matrix::Zero(1, 1);
  CHECK(l1_subgradient(z, 1.0)(0, 0) == 0.0);
}

TEST_CASE("loss gradients match finite differences") {
  const Matrix target = activate(Activation::softmax, random_matrix(3, 6, 7));
  Matrix prob = activate(Activation::softmax, random_matrix(3, 6, 8));
  const Matrix g = cce_gradient(prob, target);
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < prob.size(); ++k) {
    Matrix up = prob, down = prob;
    up.data()[k] += h;
    down.data()[k] -= h;
    const double n = (cce_loss(up, target) - cce_loss(down, target)) / (2 * h);
    CHECK(std::abs(n - g.data()[k]) < 1e-6);
  }
  const Matrix a = random_matrix(2, 3, 1), b = random_matrix(2, 3, 2);
  const Matrix gm = mae_gradient(a, b);
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    Matrix up = a, down = a;
    up.data()[k] += h;
    down.data()[k] -= h;
    CHECK(std::abs((mae_loss(up, b) - mae_loss(down, b)) / (2 * h) - gm.data()[k]) < 1e-8);
  }
}

TEST_CASE("adam first step moves by lr against the gradient sign") {
  AdamState s;
  Matrix v = Matrix::Constant(1, 1, 2.0);
  Matrix g = Matrix::Constant(1, 1, -0.37);
  adam_step(s, v, g, 0.01);
  CHECK(v(0, 0) == doctest::Approx(2.01).epsilon(1e-9));

  AdamState s2;
  Matrix v2 = Matrix::Constant(2, 2, 1.0);
  adam_step(s2, v2, Matrix::Zero(2, 2), 0.01);
  CHECK(v2 == Matrix::Constant(2, 2, 1.0));
}

TEST_CASE("adam decreases a convex quadratic") {
  AdamState s;
  Matrix x(1, 3);
  x << 3, -2, 1;
  auto loss = [](const Matrix& v) { return v.squaredNorm(); };
  double prev = loss(x);
  adam_step(s, x, 2.0 * x, 0.05);
  prev = loss(x);
  for (int k = 1; k < 100; ++k) {
    adam_step(s, x, 2.0 * x, 0.05);
    const double now = loss(x);
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("non-finite gradient aborts the step") {
  Network net;
  net.add<Dense>(2, 1, Activation::linear);
  net.initialize(1);
  Adam adam(net.parameters());
  const Matrix before = dynamic_cast<Dense&>(net.layer(0)).weight;
  net.parameters()[0].grad->setConstant(std::nan(""));
  CHECK_THROWS_AS(adam.step(0.1), std::domain_error);
  CHECK(dynamic_cast<Dense&>(net.layer(0)).weight == before);
}

TEST_CASE("non-finite input is rejected") {
  Network net;
  net.add<Dense>(2, 1, Activation::linear);
  net.initialize(1);
  Matrix x = Matrix::Zero(1, 2);
  x(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(net.predict(x), std::domain_error);
}

TEST_CASE("layer shape mismatch is rejected") {
  Network net;
  net.add<Dense>(2, 3, Activation::relu);
  CHECK_THROWS_AS(net.add<Dense>(4, 1, Activation::linear), std::invalid_argument);
  CHECK_THROWS_AS(net.predict(Matrix::Zero(1, 5)), std::invalid_argument);
}

TEST_CASE("training fits a small regression and is deterministic") {
  const Matrix x = random_matrix(64, 3, 40);
  Matrix y(64, 1);
  y.col(0) = 0.5 * x.col(0) - 0.25 * x.col(1) + 0.1 * x.col(2);
  MatrixSource src(x, y);

  auto run = [&] {
    Network net;
    net.add<Dense>(3, 8, Activation::tanh);
    net.add<Dense>(8, 1, Activation::linear);
    net.initialize(77);
    TrainConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.batch_size = 16;
    cfg.epochs = 60;
    cfg.seed = 5;
    auto res = train(net, src, &src, cfg);
    return std::make_pair(net, res);
  };
  auto [net_a, res_a] = run();
  auto [net_b, res_b] = run();
  REQUIRE(res_a.curve.train.size() == 60);
  CHECK(res_a.curve.validation.size() == 60);
  CHECK(res_a.curve.train.back() < 0.5 * res_a.curve.train.front());
  CHECK(res_a.curve.train == res_b.curve.train);
  CHECK(network_to_json(net_a).dump() == network_to_json(net_b).dump());
}

TEST_CASE("zero epochs leaves the model unchanged") {
  Network net;
  net.add<Dense>(2, 1, Activation::linear);
  net.initialize(3);
  const auto before = network_to_json(net).dump();
  MatrixSource src(random_matrix(4, 2, 1), random_matrix(4, 1, 2));
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto res = train(net, src, nullptr, cfg);
  CHECK(res.curve.train.empty());
  CHECK(network_to_json(net).dump() == before);
}

TEST_CASE("invalid train config is rejected") {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("dropout is identity in eval mode and at rate zero") {
  Lstm a(3, 4, true, 0.5);
  auto rng = substream(1, Stream::init);
  a.initialize(rng);
  Lstm b = a;
  b.dropout = 0.0;
  const auto x = random_sequence(3, 2, 3, 9);
  Rng r1, r2;
  const auto ea = a.forward(x, Mode::eval, r1);
  const auto tb = b.forward(x, Mode::train, r2);
  const auto eb = b.forward(x, Mode::eval, r2);
  for (std::size_t t = 0; t < x.size(); ++t) {
    CHECK(ea[t] == eb[t]);
    CHECK(tb[t] == eb[t]);
  }
}

TEST_CASE("model json round trip is exact") {
  Network net;
  net.add<Lstm>(3, 4, true, 0.1);
  net.add<Lstm>(4, 4, false, 0.1);
  net.add<Dense>(4, 6, Activation::softmax);
  net.initialize(123);
  const auto j = network_to_json(net);
  Network back = network_from_json(nlohmann::json::parse(j.dump()));
  auto p = net.parameters();
  auto q = back.parameters();
  REQUIRE(p.size() == q.size());
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(*p[k].value == *q[k].value);

  auto bad = j;
  bad["version"] = 99;
  CHECK_THROWS_AS(network_from_json(bad), std::runtime_error);
}
