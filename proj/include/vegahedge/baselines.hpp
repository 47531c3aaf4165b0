#pragma once

#include <functional>
#include <string>

#include "vegahedge/env.hpp"

namespace vegahedge {

/// Maps an observation to a vega-hedge fraction in [0, 1].
using Policy = std::function<double(const Observation&)>;

/// Delta hedging: never trades options; the environment's daily
/// neutralization provides the delta hedge.
double delta_strategy(const Observation& obs);

/// Delta-Vega hedging: neutralizes the full vega every day (the environment
/// clips to a_max).
double delta_vega_strategy(const Observation& obs);

/// "delta" or "delta_vega"; throws std::invalid_argument otherwise.
Policy baseline_by_name(const std::string& name);

}  // namespace vegahedge
