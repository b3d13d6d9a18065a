#pragma once

#include <array>
#include <string>
#include <vector>

#include "trapwave/eigensolve.hpp"
#include "trapwave/geometry.hpp"
#include "trapwave/strip.hpp"

namespace trapwave {

// lambda_sq = (pi^2 / 4) (1 / (J1 l1)^2 + 1 / (J2 l2)^2), principal Dirichlet
// eigenvalue of the 2 J1 l1 x 2 J2 l2 rectangle.
double explicit_bound(int J1, int J2, const CellSpec& cell);

// A J1 x J2 block of filled cells at columns [0, J1), rows [0, J2), a guide of
// `guide_rows` filled rows running `guide_length` cells to the right from the
// block's middle rows, and `padding` perforated cells on the other three sides.
// The guide runs into the right edge of the window.
struct PerturbedLayout {
  int J1 = 4;
  int J2 = 4;
  int guide_rows = 2;
  int guide_length = 6;
  int padding = 5;

  void validate() const;
  int guide_row_lo() const { return (J2 - guide_rows) / 2; }
  friend bool operator==(const PerturbedLayout&, const PerturbedLayout&) = default;
};

WindowSpec make_perturbed_window(const CellSpec& cell, const PerturbedLayout& layout);

// Lowest eigenpair of the Dirichlet window operator.
EigenPair perturbed_ground_state(const WindowSpec& window, const GridSpec& grid,
                                 const SolverOptions& opts = {});

// Discrete Rayleigh quotient of the separable cosine supported on the filled
// block, evaluated with the window operator.
double test_function_quotient(const WindowSpec& window, const PerturbedLayout& layout,
                              const GridSpec& grid);

enum class Direction { Left, Right, Down, Up };

std::string to_string(Direction d);

// Slab norms moving away from the block: whole columns for Left/Right, whole
// rows for Down/Up, one cell thick.
std::array<DecayEstimate, 4> directional_decay(const EigenPair& pair, const WindowSpec& window,
                                               const PerturbedLayout& layout, const GridSpec& grid);

enum class TrappedVerdict { Pass, Fail, BoundNotApplicable };

std::string to_string(TrappedVerdict v);

struct TrappedInputs {
  CellSpec window_cell;
  PerturbedLayout layout;
  GridSpec grid;
  double lambda_computed = 0.0;
  double quotient = 0.0;
  StripSpec strip;   // the strip that produced m1_at_zero
  double m1_at_zero = 0.0;
  std::array<DecayEstimate, 4> decay;
};

struct TrappedReport {
  double lambda_computed = 0.0;
  double lambda_square = 0.0;
  double quotient = 0.0;
  double m1_at_zero = 0.0;
  std::array<DecayEstimate, 4> decay;
  TrappedVerdict verdict = TrappedVerdict::Fail;
  std::vector<std::string> failures;
};

// Rejects inputs whose window cell or guide width differ from the strip.
TrappedReport verify_trapped(const TrappedInputs& in);

}  // namespace trapwave
