#pragma once

#include <string>

namespace tw_test {

// REF2 geometry with coarse sampling so the whole pipeline runs in seconds.
inline std::string quick_ref2_yaml(const std::string& out_dir) {
  return R"(geometry:
  cell:
    l1: 1.0
    l2: 1.0
    hole: [-0.5, 0.5, -0.5, 0.5]
  strip:
    J: 2
    K: 6
  window:
    J1: 4
    J2: 4
    guide_length: 6
    padding: 5
grid:
  h: 0.125
sampling:
  band_grid: [5, 5]
  bands: 2
  essential_samples: 9
  zetas: [-0.3, -0.1, -0.05, 0.0, 0.05, 0.1, 0.3]
  group_velocity_zetas: [0.3]
outputs:
  directory: )" + out_dir + "\n";
}

}  // namespace tw_test
