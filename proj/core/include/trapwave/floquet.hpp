#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "trapwave/eigensolve.hpp"
#include "trapwave/strip.hpp"

namespace trapwave {

enum class WaveKind { Standing, Resonance, PacketPlus, PacketMinus, Propagating };

std::string to_string(WaveKind kind);

// Field on the strip unknowns of one period, plus the rule extending it along
// x1: w(x + 2 l1 m) = e^{i zeta m} (w(x) + m g). `growth` is empty for pure
// Floquet fields.
struct WaveField {
  WaveKind kind = WaveKind::Propagating;
  double zeta = 0.0;
  StripSpec strip;
  GridSpec grid;
  std::vector<Complex> values;
  std::vector<Complex> growth;

  bool same_domain(const WaveField& other) const {
    return strip == other.strip && grid == other.grid && values.size() == other.values.size();
  }
};

// h^2 sum over one period of conj(v) d1 u - u conj(d1 v), with d1 the central
// difference. `shift` moves the summation period by that many node columns.
Complex symplectic_form(const WaveField& u, const WaveField& v, int shift = 0);

struct JordanOptions {
  int essential_samples = 17;
  SolverOptions solver;
  double cg_tolerance = 1e-10;
  // Largest tolerated |<W0, F1>| relative to ||W0||^2.
  double compatibility_tolerance = 1e-10;
};

struct JordanChain {
  StripSpec strip;
  GridSpec grid;
  double m0 = 0.0;
  double ess0 = 0.0;
  std::vector<double> w0;  // real, positive mean
  std::vector<double> y;   // W1 = i y, orthogonal to W0
  double b = 0.0;
  double b_imag_residue = 0.0;
  double norm_w0_sq = 0.0;
  double compatibility = 0.0;  // |<W0, 2i d1 W0>|
  double w1_residual = 0.0;    // ||(A - M0) y - P(2 d1 W0)|| / ||2 d1 W0||
  double w0_w1_overlap = 0.0;  // |<W0, W1>|
  int cg_iterations = 0;

  // d^2 M1 / d kappa^2 / 2, kappa the wavenumber per unit length.
  double curvature() const { return b / norm_w0_sq; }
};

// Throws InvalidInput when zeta = 0 carries no trapped mode and
// ScientificFailure when the compatibility integral does not vanish.
JordanChain jordan_chain(const StripSpec& strip, const GridSpec& grid, const JordanOptions& opts = {});

// w0 = W0; w1 = i x1 W0 + W1 with growth i (2 l1) W0.
WaveField standing_wave(const JordanChain& chain);
WaveField resonance_wave(const JordanChain& chain);

struct WavePackets {
  WaveField plus;
  WaveField minus;
  // q[r][c] = q(w_r, w_c), index 0 = plus, 1 = minus.
  std::array<std::array<Complex, 2>, 2> q{};
  double diagonal_error = 0.0;   // max |q(w+-, w+-) -+ 2ib| / (2b)
  double off_diagonal = 0.0;     // max |q(w+-, w-+)| / b
};

WavePackets wave_packets(const JordanChain& chain);

enum class Verdict { Outgoing, Incoming, Null };

std::string to_string(Verdict v);

struct WaveClassification {
  Complex q_value;
  Verdict verdict = Verdict::Null;
  double margin = 0.0;  // |Im q| / ||w||^2
};

WaveClassification classify_wave(const WaveField& w);

struct FloquetWave {
  WaveField field;
  double m1 = 0.0;
};

// Lowest strip eigenfield at phase zeta as a Floquet wave.
FloquetWave floquet_wave(const StripSpec& strip, const GridSpec& grid, double zeta,
                         const SolverOptions& opts = {});

struct GroupVelocityReport {
  double zeta = 0.0;
  bool skipped = false;           // zeta = 0
  double fd_slope = 0.0;          // central difference dM1/dkappa
  double flux_slope = 0.0;        // a / ||w+||^2
  double a = 0.0;                 // Im q(w+, w+)
  double relative_error = 0.0;
  Verdict verdict = Verdict::Null;
};

// Compares the central difference of M1 over zeta +- step with the flux
// identity. Throws InvalidInput when zeta +- step leaves [-pi, pi].
GroupVelocityReport group_velocity_check(const StripSpec& strip, const GridSpec& grid, double zeta,
                                         double step = 1e-2, const SolverOptions& opts = {});

struct ParabolaReport {
  double fit_curvature = 0.0;    // coefficient of kappa^2, least squares over |zeta| <= window
  double chain_curvature = 0.0;  // b / ||W0||^2
  double relative_error = 0.0;
  double residual_small = 0.0;   // r(0.05)
  double residual_large = 0.0;   // r(0.1)
  double residual_ratio = 0.0;
  int samples_used = 0;
  bool pass = false;
};

// Throws InvalidInput unless the curve holds zeta = +-0.05, +-0.1 and at
// least five samples with |zeta| <= window.
ParabolaReport parabola_check(const DispersionCurve& curve, const JordanChain& chain,
                              double window = 0.2, double tol = 5e-2);

}  // namespace trapwave
