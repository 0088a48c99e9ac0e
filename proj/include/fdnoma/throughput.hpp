#pragma once

#include <cstddef>
#include <vector>

#include "fdnoma/params.hpp"

namespace fdnoma {

/// Delay-limited throughput: each link delivers its target rate unless in outage.
struct Throughput {
  double primary = 0.0;
  double secondary = 0.0;
};

inline Throughput throughput_from_outage(const SystemParams& p, const std::vector<double>& outage) {
  Throughput t;
  t.primary = (1.0 - outage.at(0)) * p.target_rates[0];
  for (std::size_t m = 1; m < p.receivers(); ++m) t.secondary += (1.0 - outage.at(m)) * p.target_rates[m];
  return t;
}

}  // namespace fdnoma
