#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "trapwave/geometry.hpp"
#include "trapwave/operator.hpp"

namespace tw_test {

using trapwave::CellSpec;
using trapwave::GridSpec;
using trapwave::Hole;
using trapwave::StripSpec;

inline constexpr double pi = std::numbers::pi;

inline CellSpec plain_cell(double l = 1.0) { return CellSpec{l, l, std::nullopt}; }
inline CellSpec ref1_cell() { return CellSpec{1.0, 1.0, Hole{-0.5, 0.5, -0.5, 0.5}}; }
inline GridSpec ref_grid() { return GridSpec{0.125}; }
inline StripSpec ref2_strip() { return StripSpec{ref1_cell(), 2, 6}; }

// Full spectrum of the phased periodic 5-point stencil on an n1 x n2 torus.
inline std::vector<double> plane_wave_spectrum(int n1, int n2, double h, double t1, double t2) {
  std::vector<double> out;
  for (int p = 0; p < n1; ++p)
    for (int q = 0; q < n2; ++q) {
      const double s1 = std::sin((2.0 * pi * p + t1) / (2.0 * n1));
      const double s2 = std::sin((2.0 * pi * q + t2) / (2.0 * n2));
      out.push_back(4.0 / (h * h) * (s1 * s1 + s2 * s2));
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<trapwave::Complex> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<trapwave::Complex> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v;
}

inline double random_phase(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(-pi, pi)(rng);
}

}  // namespace tw_test
