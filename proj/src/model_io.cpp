#include "frem/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace frem {

namespace {

using nlohmann::json;

json layer_to_json(const DenseLayer& layer) {
  std::vector<double> values;
  values.reserve(layer.weight.size());
  for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) values.push_back(layer.weight(r, c));
  }
  std::vector<double> bias(layer.bias.data(), layer.bias.data() + layer.bias.size());
  return json::array({layer.weight.rows(), layer.weight.cols(), values, bias});
}

DenseLayer layer_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::runtime_error("model file: malformed layer");
  const auto rows = j[0].get<Eigen::Index>();
  const auto cols = j[1].get<Eigen::Index>();
  const auto values = j[2].get<std::vector<double>>();
  const auto bias = j[3].get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != rows * cols ||
      static_cast<Eigen::Index>(bias.size()) != cols) {
    throw std::runtime_error("model file: layer shape mismatch");
  }
  DenseLayer layer;
  layer.weight.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = values[r * cols + c];
  }
  layer.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), cols);
  return layer;
}

}  // namespace

void save_model(const ModelBundle& bundle, const std::string& path) {
  json j;
  j["dims"] = {bundle.net.dims[0], bundle.net.dims[1], bundle.net.dims[2]};
  j["activation"] = "selu";
  j["encoder"] = json::array();
  for (const auto& layer : bundle.net.encoder) j["encoder"].push_back(layer_to_json(layer));
  j["head"] = layer_to_json(bundle.net.head);
  j["scaling"] = {
      {"x_min", std::vector<double>(bundle.scaling.x_min.data(),
                                    bundle.scaling.x_min.data() + bundle.scaling.x_min.size())},
      {"x_max", std::vector<double>(bundle.scaling.x_max.data(),
                                    bundle.scaling.x_max.data() + bundle.scaling.x_max.size())},
      {"s_min", bundle.scaling.s_min},
      {"s_max", bundle.scaling.s_max}};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model to '" + path + "'");
  out << j.dump(2) << '\n';
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model '" + path + "'");
  json j;
  in >> j;

  if (j.value("activation", "") != "selu") {
    throw std::runtime_error("model file: unsupported activation");
  }
  ModelBundle bundle;
  const auto dims = j.at("dims").get<std::vector<Eigen::Index>>();
  if (dims.size() != 3) throw std::runtime_error("model file: dims must have 3 entries");
  bundle.net.dims = {dims[0], dims[1], dims[2]};
  for (const auto& layer : j.at("encoder")) bundle.net.encoder.push_back(layer_from_json(layer));
  if (bundle.net.encoder.size() != 2) throw std::runtime_error("model file: expected 2 encoder layers");
  bundle.net.head = layer_from_json(j.at("head"));

  const auto& scaling = j.at("scaling");
  const auto x_min = scaling.at("x_min").get<std::vector<double>>();
  const auto x_max = scaling.at("x_max").get<std::vector<double>>();
  bundle.scaling.x_min = Eigen::Map<const Eigen::VectorXd>(x_min.data(), x_min.size());
  bundle.scaling.x_max = Eigen::Map<const Eigen::VectorXd>(x_max.data(), x_max.size());
  bundle.scaling.s_min = scaling.at("s_min").get<double>();
  bundle.scaling.s_max = scaling.at("s_max").get<double>();
  return bundle;
}

}  // namespace frem
