#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ganlab/nn/net.hpp"

namespace ganlab::nn {

/// JSON form: {"layer_dims": [...], "hidden_activation": "relu",
/// "output_activation": "...", "params": [...]} with params in the flat order.
inline nlohmann::json to_json(const MultilayerNet& net) {
  nlohmann::json j;
  j["layer_dims"] = net.layer_dims();
  j["hidden_activation"] = "relu";
  j["output_activation"] = std::string(activation_name(net.output_activation()));
  const Vector p = net.params();
  j["params"] = std::vector<double>(p.data(), p.data() + p.size());
  return j;
}

inline MultilayerNet net_from_json(const nlohmann::json& j) {
  if (j.value("hidden_activation", "relu") != "relu")
    throw std::invalid_argument("only relu hidden layers are supported");
  MultilayerNet net(j.at("layer_dims").get<std::vector<Index>>(),
                    parse_activation(j.at("output_activation").get<std::string>()));
  const auto values = j.at("params").get<std::vector<double>>();
  net.set_params(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())));
  return net;
}

}  // namespace ganlab::nn
