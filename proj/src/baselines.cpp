#include "vegahedge/baselines.hpp"

#include <stdexcept>

namespace vegahedge {

double delta_strategy(const Observation&) { return 0.0; }

double delta_vega_strategy(const Observation&) { return 1.0; }

Policy baseline_by_name(const std::string& name) {
  if (name == "delta") return delta_strategy;
  if (name == "delta_vega") return delta_vega_strategy;
  throw std::invalid_argument("unknown baseline strategy: " + name);
}

}  // namespace vegahedge
