#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trapwave/bands.hpp"
#include "trapwave/floquet.hpp"
#include "trapwave/strip.hpp"
#include "trapwave/trapped.hpp"
#include "trapwave_cli/config.hpp"

namespace trapwave::cli {

// Unreadable, inconsistent or mixed-provenance result directory.
class BundleError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct Provenance {
  std::string config_hash;
  std::string code_version;
  std::string timestamp;
  std::string subcommand;
  unsigned threads = 1;
  std::uint64_t seed = 0;
};

// Node grid with a real value per node; zero at inactive nodes.
struct FieldGrid {
  std::string name;
  std::string component;  // real | imag
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<std::uint8_t> mask;
  std::vector<double> values;  // row-major, j slow
};

struct BandResults {
  BandStructure structure;
  std::vector<Band> bands;
  std::vector<BandGap> gaps;
  FriedrichsResult friedrichs;
  LemmaAReport lemma_a;
};

struct DispersionResults {
  DispersionCurve curve;
  double cutoff = 0.0;  // Lambda_1(0), bottom of the periodic spectrum
  FeasibilityReport feasibility;
  std::optional<LemmaBReport> lemma_b;
  MonotoneReport monotone;
  WaveguideBand band;
};

struct JordanSummary {
  double m0 = 0.0;
  double ess0 = 0.0;
  double b = 0.0;
  double b_imag_residue = 0.0;
  double norm_w0_sq = 0.0;
  double curvature = 0.0;
  double compatibility = 0.0;
  double w1_residual = 0.0;
  double w0_w1_overlap = 0.0;
  int cg_iterations = 0;
};

struct ClassificationRecord {
  std::string wave;
  double zeta = 0.0;
  Complex q;
  Verdict verdict = Verdict::Null;
  double margin = 0.0;
};

struct FloquetResults {
  JordanSummary chain;
  std::array<std::array<Complex, 2>, 2> packet_q{};
  double diagonal_error = 0.0;
  double off_diagonal = 0.0;
  std::vector<ClassificationRecord> classifications;
  std::vector<GroupVelocityReport> group_velocity;
  ParabolaReport parabola;
};

struct TrappedResults {
  PerturbedLayout layout;
  CellSpec cell;
  TrappedReport report;
};

struct ResultBundle {
  Provenance provenance;
  nlohmann::json config;
  std::vector<std::string> stages;
  std::vector<std::string> failures;
  std::optional<BandResults> bands;
  std::optional<DispersionResults> dispersion;
  std::optional<FloquetResults> floquet;
  std::optional<TrappedResults> trapped;
  std::vector<FieldGrid> fields;
};

// Shortest decimal that reads back to the same double.
std::string format_number(double v);
double parse_number(const std::string& s);

FieldGrid make_field_grid(const std::string& name, const std::string& component, const DomainMask& mask,
                          const std::vector<double>& unknown_values);

// Writes summary.json, bands.csv, dispersion.csv, floquet.json,
// trapped.json and <name>.field.txt/.field.json for whatever is present.
void save_bundle(const ResultBundle& bundle, const std::filesystem::path& dir);

// Reads a directory back. Throws BundleError when a file is malformed or was
// produced under a different config hash.
ResultBundle load_bundle(const std::filesystem::path& dir);

// Recomputes the derived quantities from the stored data and compares.
void validate_bundle(const ResultBundle& bundle);

void write_bands_csv(const BandStructure& bs, const std::string& config_hash, const std::filesystem::path& file);
void write_dispersion_csv(const DispersionCurve& curve, const std::string& config_hash,
                          const std::filesystem::path& file);
void write_field(const FieldGrid& field, const std::string& config_hash, const std::filesystem::path& dir);

}  // namespace trapwave::cli
