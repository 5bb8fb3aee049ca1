#include "doctest.h"
#include "scdt/detect/ocsvm.hpp"
#include "scdt/detect/pca.hpp"
#include "scdt/random.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace scdt;
using namespace scdt::detect;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  auto rng = substream(seed, Stream::init);
  std::vector<double> x(n);
  for (auto& v : x) {
    const double u1 = uniform_open(rng), u2 = uniform_open(rng);
    v = scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  return x;
}

}  // namespace

TEST_CASE("pca of collinear points") {
  Eigen::MatrixXd x(5, 2);
  for (int k = 0; k < 5; ++k) x.row(k) << k - 1.0, 2.0 * (k - 1.0);
  const auto m = fit_pca1(x);
  CHECK(m.axis(0) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(m.axis(1) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(m.explained_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(project(m, m.mean)) < 1e-15);
  CHECK(std::abs(m.axis.norm() - 1.0) < 1e-12);
}

TEST_CASE("pca sign convention and degenerate input") {
  Eigen::MatrixXd x(4, 3);
  x << 1, -5, 0, 2, -10, 0, 3, -15, 0.1, 4, -20, 0;
  const auto m = fit_pca1(x);
  CHECK(m.axis(1) > 0);
  CHECK_THROWS_AS(fit_pca1(Eigen::MatrixXd::Ones(4, 3)), std::domain_error);
  CHECK_THROWS_AS(fit_pca1(Eigen::MatrixXd::Ones(1, 3)), std::invalid_argument);
}

TEST_CASE("power iteration agrees with the eigensolver") {
  auto rng = substream(4, Stream::init);
  Eigen::MatrixXd a(40, 13);
  for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = uniform_open(rng) * (1 + k % 13);
  const Eigen::MatrixXd cov = covariance(a);
  const auto pi = power_iteration(cov);
  const auto m = fit_pca1(a);
  CHECK(std::abs(pi.value - m.eigenvalue) < 1e-8);
  CHECK((pi.vector - m.axis).norm() < 1e-6);
}

TEST_CASE("pca works in single precision") {
  Eigen::MatrixXf x(3, 2);
  x << 0, 0, 1, 1, 2, 2;
  const auto m = fit_pca1(x);
  static_assert(std::is_same_v<decltype(m.eigenvalue), float>);
  CHECK(m.axis(0) == doctest::Approx(std::sqrt(0.5f)));
}

TEST_CASE("capped simplex projection") {
  Eigen::VectorXd v(4);
  v << 0.9, 0.1, -0.3, 0.4;
  const auto p = project_capped_simplex(v, 0.5);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.maxCoeff() <= 0.5);
  CHECK(p.minCoeff() >= 0.0);
}

TEST_CASE("smo matches the dense QP reference on 20 points") {
  for (std::uint64_t seed : {1, 2, 3}) {
    for (double nu : {0.1, 0.25, 0.5}) {
      CAPTURE(seed);
      CAPTURE(nu);
      // jittered grid keeps the kernel matrix well conditioned
      auto x = normal_sample(20, seed, 0.1);
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += 0.5 * static_cast<double>(k);
      const double gamma = 2.0;
      OcsvmParams p{nu, gamma};
      const auto s = ocsvm_solve(x, p);
      CHECK(s.converged);
      const auto ref = qp_reference(x, nu, gamma);
      CHECK((s.alpha - ref).cwiseAbs().maxCoeff() < 1e-6);
      const auto model = ocsvm_fit(x, p);
      auto kernel_sum = [&](double q) {
        double f = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) f += ref(static_cast<Eigen::Index>(k)) * rbf(x[k], q, gamma);
        return f;
      };
      // offset of the reference solution from its free points
      double rho_ref = 0.0;
      int free = 0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = ref(static_cast<Eigen::Index>(k));
        if (a > 1e-9 && a < s.bound - 1e-9) {
          rho_ref += kernel_sum(x[k]);
          ++free;
        }
      }
      REQUIRE(free > 0);
      rho_ref /= free;
      CHECK(std::abs(rho_ref - model.rho) < 1e-6);
      const auto probe = normal_sample(200, seed + 50, 4.0);
      for (double q : probe) {
        const double f = model.decision(q);
        if (std::abs(f) > 1e-6) CHECK((kernel_sum(q) - rho_ref >= 0.0) == (f >= 0.0));
      }
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = ref(static_cast<Eigen::Index>(k));
        if (a < 1e-9) CHECK(model.is_normal(x[k]));
        if (a > s.bound - 1e-9) CHECK_FALSE(model.decision(x[k]) > 1e-9);
      }
      CHECK(kkt_violation(x, s.alpha, s.rho, gamma, s.bound) < 1e-6);
      CHECK(s.alpha.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("training outlier fraction is close to nu") {
  const auto x = normal_sample(2000, 9);
  for (double nu : {0.025, 0.1}) {
    const auto m = ocsvm_fit(x, OcsvmParams{nu, 1.0});
    int out = 0;
    for (double v : x) out += !m.is_normal(v);
    const double frac = out / 2000.0;
    CAPTURE(nu);
    CHECK(std::abs(frac - nu) <= 1.0 / std::sqrt(2000.0));
  }
}

TEST_CASE("a far outlier lies outside the boundary") {
  auto x = normal_sample(60, 5, 0.05);
  x.push_back(25.0);
  const auto m = ocsvm_fit(x, OcsvmParams{0.1, 1.0});
  CHECK_FALSE(m.is_normal(25.0));
  CHECK(m.is_normal(0.0));
}

TEST_CASE("flag count is non-decreasing in nu") {
  const auto x = normal_sample(500, 13);
  int prev = -1;
  for (double nu : {0.01, 0.025, 0.05, 0.1, 0.2, 0.4}) {
    const auto m = ocsvm_fit(x, OcsvmParams{nu, 1.0});
    int out = 0;
    for (double v : x) out += !m.is_normal(v);
    CHECK(out >= prev);
    prev = out;
  }
}

TEST_CASE("affine rescaling with a co-scaled gamma keeps every flag") {
  const auto x = normal_sample(300, 17);
  const double s = 3.5, shift = -2.0, gamma = 1.0;
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = s * x[k] + shift;
  const auto a = ocsvm_fit(x, OcsvmParams{0.05, gamma});
  const auto b = ocsvm_fit(y, OcsvmParams{0.05, gamma / (s * s)});
  const auto probe = normal_sample(200, 18, 2.0);
  for (double q : probe) CHECK(a.is_normal(q) == b.is_normal(s * q + shift));
}

TEST_CASE("ocsvm argument checks and json") {
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(ocsvm_fit(one, OcsvmParams{}), std::invalid_argument);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(ocsvm_fit(two, OcsvmParams{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ocsvm_fit(two, OcsvmParams{0.5, -1.0}), std::invalid_argument);
  const auto x = normal_sample(50, 2);
  const auto m = ocsvm_fit(x, OcsvmParams{0.1, 3.0});
  const auto back = ocsvm_from_json(nlohmann::json::parse(to_json(m).dump()));
  for (double q : x) CHECK(back.decision(q) == m.decision(q));
}
