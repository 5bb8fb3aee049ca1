#include "scdt/nn/gradcheck.hpp"

#include <algorithm>

#include "scdt/nn/loss.hpp"

namespace scdt::nn {

namespace {

double objective(Network& net, const Sequence& input, const Sequence& weights,
                 const std::vector<double>& l1) {
  const Sequence out = net.forward(input, Mode::eval);
  double total = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) total += out[t].cwiseProduct(weights[t]).sum();
  auto layers = net.layer_parameters();
  for (std::size_t l = 0; l < layers.size() && l < l1.size(); ++l)
    for (auto& p : layers[l])
      if (p.regularized) total += l1_penalty(*p.value, l1[l]);
  return total;
}

double relative(const Matrix& analytic, const Matrix& numeric) {
  const double denom = std::max(analytic.norm() + numeric.norm(), 1e-12);
  return (analytic - numeric).norm() / denom;
}

}  // namespace

GradientCheck check_gradients(Network& net, const Sequence& input, std::uint64_t seed,
                              const std::vector<double>& l1, double step) {
  auto rng = substream(seed, Stream::init);
  const Sequence probe = net.forward(input, Mode::eval);
  Sequence weights(probe.size());
  for (std::size_t t = 0; t < probe.size(); ++t) {
    weights[t].resize(probe[t].rows(), probe[t].cols());
    for (Eigen::Index k = 0; k < weights[t].size(); ++k)
      weights[t].data()[k] = 2.0 * uniform_open(rng) - 1.0;
  }

  net.zero_grad();
  net.forward(input, Mode::eval);
  const Sequence input_grad = net.backward(weights);
  auto layers = net.layer_parameters();
  for (std::size_t l = 0; l < layers.size() && l < l1.size(); ++l)
    for (auto& p : layers[l])
      if (p.regularized) *p.grad += l1_subgradient(*p.value, l1[l]);

  GradientCheck result;
  auto numeric_for = [&](Matrix& value) {
    Matrix numeric(value.rows(), value.cols());
    for (Eigen::Index k = 0; k < value.size(); ++k) {
      const double saved = value.data()[k];
      value.data()[k] = saved + step;
      const double up = objective(net, input, weights, l1);
      value.data()[k] = saved - step;
      const double down = objective(net, input, weights, l1);
      value.data()[k] = saved;
      numeric.data()[k] = (up - down) / (2.0 * step);
      ++result.checked;
    }
    return numeric;
  };

  for (auto& p : net.parameters()) {
    const Matrix analytic = *p.grad;
    result.max_relative_error =
        std::max(result.max_relative_error, relative(analytic, numeric_for(*p.value)));
  }

  Sequence perturbed = input;
  for (std::size_t t = 0; t < perturbed.size(); ++t) {
    Matrix numeric(perturbed[t].rows(), perturbed[t].cols());
    for (Eigen::Index k = 0; k < perturbed[t].size(); ++k) {
      const double saved = perturbed[t].data()[k];
      perturbed[t].data()[k] = saved + step;
      const double up = objective(net, perturbed, weights, l1);
      perturbed[t].data()[k] = saved - step;
      const double down = objective(net, perturbed, weights, l1);
      perturbed[t].data()[k] = saved;
      numeric.data()[k] = (up - down) / (2.0 * step);
      ++result.checked;
    }
    result.max_relative_error =
        std::max(result.max_relative_error, relative(input_grad[t], numeric));
  }
  return result;
}

}  // namespace scdt::nn
