#pragma once

#include <string>

#include "frem/data.hpp"
#include "frem/net.hpp"

namespace frem {

// A trained network together with the scaling fitted on its training split,
// so held-out data can be mapped identically at audit time.
struct ModelBundle {
  Network net;
  ScalingParams scaling;
};

// JSON layout: {dims, activation: "selu",
//               encoder: [[rows, cols, row-major values, bias values], ...],
//               head: [rows, cols, values, bias],
//               scaling: {x_min, x_max, s_min, s_max}}.
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace frem
