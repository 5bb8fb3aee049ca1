#include "scdt/nn/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace scdt::nn {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json values = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", std::move(values)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& values = j.at("values");
  if (rows < 0 || cols < 0 || values.size() != static_cast<std::size_t>(rows * cols))
    throw std::runtime_error("matrix: value count does not match shape");
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[k++].get<double>();
  return m;
}

json network_to_json(const Network& net) {
  json layers = json::array();
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Layer& l = net.layer(i);
    if (const auto* d = dynamic_cast<const Dense*>(&l)) {
      layers.push_back({{"type", "dense"},
                        {"activation", std::string(to_string(d->activation))},
                        {"weight", matrix_to_json(d->weight)},
                        {"bias", matrix_to_json(d->bias)}});
    } else if (const auto* r = dynamic_cast<const Lstm*>(&l)) {
      layers.push_back({{"type", "lstm"},
                        {"return_sequences", r->return_sequences},
                        {"dropout", r->dropout},
                        {"input_weight", matrix_to_json(r->input_weight)},
                        {"recurrent_weight", matrix_to_json(r->recurrent_weight)},
                        {"bias", matrix_to_json(r->bias)}});
    } else {
      throw std::logic_error("network_to_json: unsupported layer kind");
    }
  }
  return json{{"format", kModelFormat}, {"version", kModelFormatVersion}, {"layers", layers}};
}

Network network_from_json(const json& j) {
  if (j.value("format", "") != kModelFormat)
    throw std::runtime_error("model file: unexpected format tag");
  if (j.value("version", 0) != kModelFormatVersion)
    throw std::runtime_error("model file: unsupported version " +
                             std::to_string(j.value("version", 0)));
  Network net;
  for (const auto& l : j.at("layers")) {
    const auto type = l.at("type").get<std::string>();
    if (type == "dense") {
      Matrix w = matrix_from_json(l.at("weight"));
      auto& d = net.add<Dense>(w.rows(), w.cols(),
                               parse_activation(l.at("activation").get<std::string>()));
      d.weight = std::move(w);
      d.bias = matrix_from_json(l.at("bias"));
    } else if (type == "lstm") {
      Matrix wx = matrix_from_json(l.at("input_weight"));
      Matrix wh = matrix_from_json(l.at("recurrent_weight"));
      if (wx.cols() != 4 * wh.rows() || wh.cols() != 4 * wh.rows())
        throw std::runtime_error("model file: inconsistent lstm shapes");
      auto& r = net.add<Lstm>(wx.rows(), wh.rows(), l.at("return_sequences").get<bool>(),
                              l.at("dropout").get<double>());
      r.input_weight = std::move(wx);
      r.recurrent_weight = std::move(wh);
      r.bias = matrix_from_json(l.at("bias"));
    } else {
      throw std::runtime_error("model file: unknown layer type '" + type + "'");
    }
  }
  return net;
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

}  // namespace scdt::nn
