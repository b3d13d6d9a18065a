#include "trapwave_cli/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <sstream>

#include "trapwave/errors.hpp"

#ifndef TRAPWAVE_VERSION
#define TRAPWAVE_VERSION "unknown"
#endif

namespace trapwave::cli {

std::string build_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::vector<double> real_parts(const std::vector<Complex>& v) {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k].real();
  return out;
}

// Re-throws solver failures with the stage name attached.
template <class F>
auto stage(const std::string& name, F fn) {
  try {
    return fn();
  } catch (const SolverFailure& e) {
    throw SolverFailure("stage " + name + ": " + e.what());
  }
}

}  // namespace

ResultBundle run_pipeline(const Config& cfg, const RunOptions& opts) {
  const StageSet stages = StageSet::for_subcommand(opts.subcommand);
  auto log = [&](const std::string& s) {
    if (opts.log) opts.log(s);
  };
  ResultBundle b;
  b.provenance = {cfg.hash(), TRAPWAVE_VERSION, build_timestamp(), opts.subcommand, opts.threads, opts.seed};
  b.config = cfg.to_json();
  b.stages = stages.names();
  auto failure = [&](const std::string& s) {
    b.failures.push_back(s);
    log("FAILURE: " + s);
  };

  std::optional<double> lambda_star;
  std::optional<double> cutoff;

  if (stages.bands) {
    log("bands: sweeping the Brillouin zone");
    b.bands = stage("bands", [&] {
      BandResults r;
      BandSweepOptions o;
      o.samples1 = cfg.band_samples1;
      o.samples2 = cfg.band_samples2;
      o.k = cfg.bands;
      o.solver = cfg.solver;
      o.threads = opts.threads;
      r.structure = cell_band_structure(cfg.cell, cfg.grid, o);
      r.bands = spectral_bands(r.structure);
      r.gaps = band_gaps(r.bands);
      r.lemma_a = check_lemma_a(r.structure);
      if (cfg.cell.hole) {
        r.friedrichs = friedrichs_constant(cfg.cell, cfg.grid, cfg.solver);
      } else {
        r.friedrichs = {0.0, cfg.grid};
      }
      return r;
    });
    if (!b.bands->lemma_a.pass) failure("cutoff is not a strict minimum at theta = 0");
    if (cfg.cell.hole) {
      lambda_star = b.bands->friedrichs.lambda_star;
      if (b.bands->lemma_a.lambda_at_zero < *lambda_star - 1e-8) failure("Lambda_1(0) < Lambda_*");
    }
    cutoff = b.bands->lemma_a.lambda_at_zero;
  }

  std::optional<DispersionCurve> curve;
  if (stages.dispersion) {
    log("dispersion: strip eigenvalues and essential bounds");
    b.dispersion = stage("dispersion", [&] {
      DispersionResults r;
      StripOptions so;
      so.essential_samples = cfg.essential_samples;
      so.solver = cfg.solver;
      so.threads = opts.threads;
      r.curve = dispersion_curve(cfg.strip, cfg.grid, cfg.zetas, so);
      r.cutoff = cutoff ? *cutoff : cell_eigenvalues(cfg.cell, cfg.grid, BlochParameter{}, 1, cfg.solver).front();
      const double ls = lambda_star ? *lambda_star
                        : cfg.cell.hole ? friedrichs_constant(cfg.cell, cfg.grid, cfg.solver).lambda_star
                                        : 0.0;
      r.feasibility = check_feasibility(cfg.strip, FriedrichsResult{ls, cfg.grid});
      r.monotone = check_monotone_start(r.curve);
      r.band = waveguide_band(r.curve, r.cutoff);
      return r;
    });
    DispersionResults& r = *b.dispersion;
    curve = r.curve;
    if (!r.feasibility.holds) failure("M_sharp is not below min(pi^2/(2 l1)^2, Lambda_*)");
    try {
      r.lemma_b = check_lemma_b(r.curve);
      if (!r.lemma_b->pass) failure("strip at zeta = 0 does not carry exactly one eigenvalue below M_sharp");
    } catch (const ScientificFailure& e) {
      failure(e.what());
    }
    if (r.curve.at_zero().trapped && !r.monotone.pass)
      failure("M1 does not rise away from zeta = 0 or is not even");
    if (r.band.exists && !r.band.below_cutoff) failure("waveguide band overlaps the periodic spectrum");
  }

  if (stages.floquet) {
    log("floquet: Jordan chain, packets, classification");
    FloquetResults fr = stage("floquet", [&] {
      FloquetResults r;
      JordanOptions jo;
      jo.essential_samples = cfg.essential_samples;
      jo.solver = cfg.solver;
      jo.cg_tolerance = cfg.cg_tolerance;
      const JordanChain chain = jordan_chain(cfg.strip, cfg.grid, jo);
      r.chain = {chain.m0, chain.ess0, chain.b, chain.b_imag_residue, chain.norm_w0_sq, chain.curvature(),
                 chain.compatibility, chain.w1_residual, chain.w0_w1_overlap, chain.cg_iterations};
      const WavePackets packets = wave_packets(chain);
      r.packet_q = packets.q;
      r.diagonal_error = packets.diagonal_error;
      r.off_diagonal = packets.off_diagonal;
      auto record = [&](const std::string& name, const WaveField& w) {
        const WaveClassification c = classify_wave(w);
        r.classifications.push_back({name, w.zeta, c.q_value, c.verdict, c.margin});
      };
      record("w0", standing_wave(chain));
      record("w+", packets.plus);
      record("w-", packets.minus);
      for (double z : cfg.group_velocity_zetas)
        r.group_velocity.push_back(group_velocity_check(cfg.strip, cfg.grid, z, cfg.group_velocity_step, cfg.solver));

      if (!curve) {
        std::vector<double> near;
        for (double z : cfg.zetas)
          if (std::abs(z) <= 0.2 + 1e-12) near.push_back(z);
        StripOptions so;
        so.essential_samples = cfg.essential_samples;
        so.solver = cfg.solver;
        so.threads = opts.threads;
        curve = dispersion_curve(cfg.strip, cfg.grid, near, so);
      }
      r.parabola = parabola_check(*curve, chain);

      if (cfg.write_fields) {
        const DomainMask mask = build_strip_mask(cfg.strip, cfg.grid);
        b.fields.push_back(make_field_grid("W0", "real", mask, chain.w0));
        b.fields.push_back(make_field_grid("W1", "imag", mask, chain.y));
      }
      return r;
    });
    b.floquet = fr;
    if (fr.chain.b_imag_residue > 1e-9) failure("b carries an imaginary residue above 1e-9");
    if (fr.diagonal_error > 1e-6) failure("q(w+-, w+-) differs from +-2ib");
    if (fr.off_diagonal > 1e-6) failure("q(w+-, w-+) does not vanish");
    const Verdict expected[3] = {Verdict::Null, Verdict::Outgoing, Verdict::Incoming};
    for (int i = 0; i < 3; ++i)
      if (fr.classifications[i].verdict != expected[i]) failure("unexpected verdict for " + fr.classifications[i].wave);
    for (const GroupVelocityReport& g : fr.group_velocity)
      if (!g.skipped && !(g.relative_error <= 5e-2)) failure("group velocity identity off at zeta = " + format_number(g.zeta));
    if (!fr.parabola.pass) failure("dispersion curvature at zeta = 0 disagrees with b / ||W0||^2");
  }

  if (stages.trapped) {
    log("trapped: perturbed window ground state");
    b.trapped = stage("trapped", [&] {
      TrappedResults r;
      r.layout = *cfg.window;
      r.cell = cfg.cell;
      const WindowSpec window = make_perturbed_window(cfg.cell, r.layout);
      const EigenPair ground = perturbed_ground_state(window, cfg.grid, cfg.solver);
      double m1 = 0.0;
      if (curve) {
        m1 = curve->at_zero().m1;
      } else {
        const StripDomain d = make_strip_domain(cfg.strip, cfg.grid);
        m1 = smallest_eigenpairs(strip_operator(d, 0.0), 1, cfg.solver).front().value;
      }
      TrappedInputs in;
      in.window_cell = cfg.cell;
      in.layout = r.layout;
      in.grid = cfg.grid;
      in.lambda_computed = ground.value;
      in.quotient = test_function_quotient(window, r.layout, cfg.grid);
      in.strip = cfg.strip;
      in.m1_at_zero = m1;
      in.decay = directional_decay(ground, window, r.layout, cfg.grid);
      r.report = verify_trapped(in);
      if (cfg.write_fields)
        b.fields.push_back(make_field_grid("trapped_ground", "real", build_window_mask(window, cfg.grid),
                                           real_parts(ground.field)));
      return r;
    });
    for (const std::string& f : b.trapped->report.failures) failure("trapped mode: " + f);
  }
  return b;
}

}  // namespace trapwave::cli
