#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trapwave/eigensolve.hpp"
#include "trapwave/geometry.hpp"
#include "trapwave/trapped.hpp"

namespace trapwave::cli {

// Bad config or command line; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stage { Bands, Dispersion, Floquet, Trapped };

struct StageSet {
  bool bands = false;
  bool dispersion = false;
  bool floquet = false;
  bool trapped = false;

  static StageSet for_subcommand(const std::string& name);
  std::vector<std::string> names() const;
};

struct Config {
  CellSpec cell;
  StripSpec strip;
  std::optional<PerturbedLayout> window;
  GridSpec grid;

  int band_samples1 = 17;
  int band_samples2 = 17;
  int bands = 4;
  int essential_samples = 17;
  std::vector<double> zetas;  // sorted, contains 0
  std::vector<double> group_velocity_zetas{0.3, 0.5, 0.8};
  double group_velocity_step = 1e-2;

  SolverOptions solver;
  double cg_tolerance = 1e-10;

  std::optional<std::filesystem::path> output_directory;
  bool write_fields = true;

  // Canonical form; the config hash is computed from its dump.
  nlohmann::json to_json() const;
  std::string hash() const;
};

// Parses and checks every precondition the requested stages will rely on.
// Throws ConfigError naming the file, line and field.
Config load_config(const std::filesystem::path& path, const StageSet& stages);
Config parse_config(const std::string& text, const std::string& source_name, const StageSet& stages);

// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace trapwave::cli
