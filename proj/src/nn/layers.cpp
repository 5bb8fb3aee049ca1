#include "scdt/nn/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scdt::nn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::linear: return "linear";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::softmax: return "softmax";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::linear, Activation::relu, Activation::sigmoid, Activation::tanh,
                 Activation::softmax})
    if (name == to_string(a)) return a;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

namespace {

Matrix sigmoid(const Matrix& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

void glorot_uniform(Matrix& w, Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = (2.0 * uniform_open(rng) - 1.0) * limit;
}

}  // namespace

Matrix activate(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::linear: return z;
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::sigmoid: return sigmoid(z);
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::softmax: {
      Matrix out = (z.colwise() - z.rowwise().maxCoeff()).array().exp().matrix();
      out.array().colwise() /= out.rowwise().sum().array();
      return out;
    }
  }
  throw std::logic_error("activate: unhandled activation");
}

Matrix activation_backward(Activation a, const Matrix& y, const Matrix& grad) {
  switch (a) {
    case Activation::linear: return grad;
    case Activation::relu: return (y.array() > 0.0).select(grad, 0.0);
    case Activation::sigmoid: return (grad.array() * y.array() * (1.0 - y.array())).matrix();
    case Activation::tanh: return (grad.array() * (1.0 - y.array().square())).matrix();
    case Activation::softmax: {
      const Eigen::VectorXd dot = (grad.array() * y.array()).rowwise().sum();
      return (y.array() * (grad.colwise() - dot).array()).matrix();
    }
  }
  throw std::logic_error("activation_backward: unhandled activation");
}

void Layer::zero_grad() {
  for (auto& p : parameters()) p.grad->setZero();
}

// ---------------------------------------------------------------- Dense

Dense::Dense(Eigen::Index inputs, Eigen::Index units, Activation act)
    : weight(Matrix::Zero(inputs, units)),
      bias(Matrix::Zero(1, units)),
      activation(act),
      weight_grad_(Matrix::Zero(inputs, units)),
      bias_grad_(Matrix::Zero(1, units)) {
  if (inputs < 1 || units < 1) throw std::invalid_argument("Dense: sizes must be positive");
}

void Dense::initialize(Rng& rng) {
  glorot_uniform(weight, weight.rows(), weight.cols(), rng);
  bias.setZero();
}

Sequence Dense::forward(const Sequence& input, Mode, Rng&) {
  inputs_ = input;
  outputs_.resize(input.size());
  for (std::size_t t = 0; t < input.size(); ++t) {
    if (input[t].cols() != weight.rows())
      throw std::invalid_argument("Dense: expected " + std::to_string(weight.rows()) +
                                  " inputs, got " + std::to_string(input[t].cols()));
    Matrix z = input[t] * weight;
    z.rowwise() += bias.row(0);
    outputs_[t] = activate(activation, z);
  }
  return outputs_;
}

Sequence Dense::backward(const Sequence& grad_output) {
  if (grad_output.size() != outputs_.size()) throw std::invalid_argument("Dense: bad gradient length");
  Sequence grad_input(grad_output.size());
  for (std::size_t t = 0; t < grad_output.size(); ++t) {
    const Matrix dz = activation_backward(activation, outputs_[t], grad_output[t]);
    weight_grad_.noalias() += inputs_[t].transpose() * dz;
    bias_grad_ += dz.colwise().sum();
    grad_input[t].noalias() = dz * weight.transpose();
  }
  return grad_input;
}

std::vector<Parameter> Dense::parameters() {
  return {{&weight, &weight_grad_, true}, {&bias, &bias_grad_, false}};
}

std::unique_ptr<Layer> Dense::clone() const {
  auto out = std::make_unique<Dense>(weight.rows(), weight.cols(), activation);
  out->weight = weight;
  out->bias = bias;
  return out;
}

// ---------------------------------------------------------------- Lstm

Lstm::Lstm(Eigen::Index inputs, Eigen::Index units, bool return_seq, double rate)
    : input_weight(Matrix::Zero(inputs, 4 * units)),
      recurrent_weight(Matrix::Zero(units, 4 * units)),
      bias(Matrix::Zero(1, 4 * units)),
      return_sequences(return_seq),
      dropout(rate),
      input_grad_(Matrix::Zero(inputs, 4 * units)),
      recurrent_grad_(Matrix::Zero(units, 4 * units)),
      bias_grad_(Matrix::Zero(1, 4 * units)) {
  if (inputs < 1 || units < 1) throw std::invalid_argument("Lstm: sizes must be positive");
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("Lstm: dropout must be in [0, 1)");
}

void Lstm::initialize(Rng& rng) {
  const Eigen::Index u = units();
  glorot_uniform(input_weight, input_weight.rows(), 4 * u, rng);
  glorot_uniform(recurrent_weight, u, 4 * u, rng);
  bias.setZero();
  bias.block(0, u, 1, u).setOnes();
}

Sequence Lstm::forward(const Sequence& input, Mode mode, Rng& rng) {
  if (input.empty()) throw std::invalid_argument("Lstm: empty sequence");
  const Eigen::Index u = units();
  const Eigen::Index batch = input.front().rows();
  const bool drop = mode == Mode::train && dropout > 0.0;
  const double keep_scale = 1.0 / (1.0 - dropout);

  steps_.resize(input.size());
  Matrix h = Matrix::Zero(batch, u);
  Matrix c = Matrix::Zero(batch, u);
  Sequence out;
  out.reserve(return_sequences ? input.size() : 1);

  for (std::size_t t = 0; t < input.size(); ++t) {
    if (input[t].cols() != input_weight.rows() || input[t].rows() != batch)
      throw std::invalid_argument("Lstm: input shape mismatch at step " + std::to_string(t));
    auto& s = steps_[t];
    s.x = input[t];
    s.h_prev = h;
    s.c_prev = c;
    Matrix z = s.x * input_weight;
    z.noalias() += h * recurrent_weight;
    z.rowwise() += bias.row(0);
    s.i = activate(Activation::sigmoid, z.middleCols(0, u));
    s.f = activate(Activation::sigmoid, z.middleCols(u, u));
    s.g = z.middleCols(2 * u, u).array().tanh().matrix();
    s.o = activate(Activation::sigmoid, z.middleCols(3 * u, u));
    s.c = (s.f.array() * s.c_prev.array() + s.i.array() * s.g.array()).matrix();
    s.tanh_c = s.c.array().tanh().matrix();
    h = (s.o.array() * s.tanh_c.array()).matrix();
    c = s.c;

    if (drop) {
      s.mask.resize(batch, u);
      for (Eigen::Index j = 0; j < u; ++j)
        for (Eigen::Index b = 0; b < batch; ++b)
          s.mask(b, j) = uniform_open(rng) >= dropout ? keep_scale : 0.0;
    } else {
      s.mask.resize(0, 0);
    }
    if (return_sequences || t + 1 == input.size())
      out.push_back(drop ? Matrix((h.array() * s.mask.array()).matrix()) : h);
  }
  return out;
}

Sequence Lstm::backward(const Sequence& grad_output) {
  const std::size_t steps = steps_.size();
  if (grad_output.size() != (return_sequences ? steps : 1))
    throw std::invalid_argument("Lstm: bad gradient length");
  const Eigen::Index u = units();
  const Eigen::Index batch = steps_.front().x.rows();

  Sequence grad_input(steps);
  Matrix dh_next = Matrix::Zero(batch, u);
  Matrix dc_next = Matrix::Zero(batch, u);
  Matrix dz(batch, 4 * u);

  for (std::size_t k = steps; k-- > 0;) {
    const auto& s = steps_[k];
    Matrix dh = dh_next;
    const Matrix* gy = nullptr;
    if (return_sequences)
      gy = &grad_output[k];
    else if (k + 1 == steps)
      gy = &grad_output[0];
    if (gy != nullptr) {
      if (s.mask.size() > 0)
        dh.array() += gy->array() * s.mask.array();
      else
        dh += *gy;
    }

    const auto o = s.o.array();
    const auto tc = s.tanh_c.array();
    const Eigen::ArrayXXd dc = dh.array() * o * (1.0 - tc.square()) + dc_next.array();
    dz.middleCols(0, u) = (dc * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
    dz.middleCols(u, u) = (dc * s.c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
    dz.middleCols(2 * u, u) = (dc * s.i.array() * (1.0 - s.g.array().square())).matrix();
    dz.middleCols(3 * u, u) = (dh.array() * tc * o * (1.0 - o)).matrix();

    input_grad_.noalias() += s.x.transpose() * dz;
    recurrent_grad_.noalias() += s.h_prev.transpose() * dz;
    bias_grad_ += dz.colwise().sum();
    grad_input[k].noalias() = dz * input_weight.transpose();
    dh_next.noalias() = dz * recurrent_weight.transpose();
    dc_next = (dc * s.f.array()).matrix();
  }
  return grad_input;
}

std::vector<Parameter> Lstm::parameters() {
  return {{&input_weight, &input_grad_, true},
          {&recurrent_weight, &recurrent_grad_, false},
          {&bias, &bias_grad_, false}};
}

std::unique_ptr<Layer> Lstm::clone() const {
  auto out = std::make_unique<Lstm>(input_weight.rows(), units(), return_sequences, dropout);
  out->input_weight = input_weight;
  out->recurrent_weight = recurrent_weight;
  out->bias = bias;
  return out;
}

}  // namespace scdt::nn
