#include "trapwave_cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "trapwave/errors.hpp"
#include "trapwave/strip.hpp"

namespace trapwave::cli {

StageSet StageSet::for_subcommand(const std::string& name) {
  StageSet s;
  if (name == "bands") s.bands = true;
  else if (name == "dispersion") s.dispersion = true;
  else if (name == "floquet") s.floquet = true;
  else if (name == "trapped") s.trapped = true;
  else if (name == "all") s = StageSet{true, true, true, true};
  else throw ConfigError("unknown subcommand '" + name + "'");
  return s;
}

std::vector<std::string> StageSet::names() const {
  std::vector<std::string> out;
  if (bands) out.emplace_back("bands");
  if (dispersion) out.emplace_back("dispersion");
  if (floquet) out.emplace_back("floquet");
  if (trapped) out.emplace_back("trapped");
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& what) const {
    std::ostringstream os;
    os << source_;
    if (at && at.Mark().line >= 0) os << ":" << at.Mark().line + 1 << ":" << at.Mark().column + 1;
    os << ": " << field << ": " << what;
    throw ConfigError(os.str());
  }

  YAML::Node child(const YAML::Node& parent, const std::string& path, const std::string& key,
                   bool required) const {
    if (parent && !parent.IsMap()) fail(parent, path, "expected a mapping");
    YAML::Node n = parent ? parent[key] : YAML::Node();
    if (required && (!n || n.IsNull())) fail(parent, join(path, key), "missing required field");
    return n;
  }

  double number(const YAML::Node& n, const std::string& field) const {
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, field, "expected a number");
    }
  }

  int integer(const YAML::Node& n, const std::string& field) const {
    try {
      return n.as<int>();
    } catch (const YAML::Exception&) {
      fail(n, field, "expected an integer");
    }
  }

  bool boolean(const YAML::Node& n, const std::string& field) const {
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, field, "expected true or false");
    }
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence()) fail(n, field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  double req_number(const YAML::Node& parent, const std::string& path, const std::string& key) const {
    return number(child(parent, path, key, true), join(path, key));
  }
  int req_int(const YAML::Node& parent, const std::string& path, const std::string& key) const {
    return integer(child(parent, path, key, true), join(path, key));
  }
  template <class T, class F>
  void opt(const YAML::Node& parent, const std::string& path, const std::string& key, T& target, F read) const {
    const YAML::Node n = child(parent, path, key, false);
    if (n && !n.IsNull()) target = read(n, join(path, key));
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::string source_;
};

// Runs a core validation and reports its message against a config field.
template <class F>
void check(const Reader& rd, const YAML::Node& at, const std::string& field, F fn) {
  try {
    fn();
  } catch (const InvalidInput& e) {
    rd.fail(at, field, e.what());
  }
}

bool has_zeta(const std::vector<double>& z, double v) {
  return std::any_of(z.begin(), z.end(), [&](double x) { return std::abs(x - v) <= 1e-9; });
}

}  // namespace

Config parse_config(const std::string& text, const std::string& source_name, const StageSet& stages) {
  const Reader rd(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source_name << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  if (!root || root.IsNull()) rd.fail(root, "geometry", "missing required field (config is empty)");
  if (!root.IsMap()) rd.fail(root, "<root>", "expected a mapping of sections");

  Config c;
  const YAML::Node geometry = rd.child(root, "", "geometry", true);
  const YAML::Node cell = rd.child(geometry, "geometry", "cell", true);
  c.cell.l1 = rd.req_number(cell, "geometry.cell", "l1");
  c.cell.l2 = rd.req_number(cell, "geometry.cell", "l2");
  const YAML::Node hole = rd.child(cell, "geometry.cell", "hole", false);
  if (hole && !hole.IsNull()) {
    const auto v = rd.numbers(hole, "geometry.cell.hole");
    if (v.size() != 4) rd.fail(hole, "geometry.cell.hole", "expected [x1min, x1max, x2min, x2max]");
    c.cell.hole = Hole{v[0], v[1], v[2], v[3]};
  }
  check(rd, cell, "geometry.cell", [&] { c.cell.validate(); });

  const YAML::Node grid = rd.child(root, "", "grid", true);
  c.grid.h = rd.req_number(grid, "grid", "h");
  check(rd, grid, "grid.h", [&] { rasterize(c.cell, c.grid); });

  const bool need_strip = stages.dispersion || stages.floquet || stages.trapped;
  const YAML::Node strip = rd.child(geometry, "geometry", "strip", need_strip);
  c.strip.cell = c.cell;
  if (strip && !strip.IsNull()) {
    c.strip.J = rd.req_int(strip, "geometry.strip", "J");
    c.strip.K = rd.req_int(strip, "geometry.strip", "K");
    check(rd, strip, "geometry.strip", [&] { c.strip.validate(); });
  }

  const YAML::Node window = rd.child(geometry, "geometry", "window", stages.trapped);
  if (window && !window.IsNull()) {
    PerturbedLayout w;
    w.J1 = rd.req_int(window, "geometry.window", "J1");
    w.J2 = rd.req_int(window, "geometry.window", "J2");
    w.guide_rows = c.strip.J;
    rd.opt(window, "geometry.window", "guide_length", w.guide_length,
           [&](const YAML::Node& n, const std::string& f) { return rd.integer(n, f); });
    rd.opt(window, "geometry.window", "padding", w.padding,
           [&](const YAML::Node& n, const std::string& f) { return rd.integer(n, f); });
    check(rd, window, "geometry.window", [&] { make_perturbed_window(c.cell, w); });
    c.window = w;
  }

  const YAML::Node sampling = rd.child(root, "", "sampling", false);
  auto as_int = [&](const YAML::Node& n, const std::string& f) { return rd.integer(n, f); };
  auto as_num = [&](const YAML::Node& n, const std::string& f) { return rd.number(n, f); };
  c.zetas = default_zeta_samples();
  if (sampling && !sampling.IsNull()) {
    const YAML::Node bg = rd.child(sampling, "sampling", "band_grid", false);
    if (bg && !bg.IsNull()) {
      if (!bg.IsSequence() || bg.size() != 2) rd.fail(bg, "sampling.band_grid", "expected [samples1, samples2]");
      c.band_samples1 = rd.integer(bg[0], "sampling.band_grid[0]");
      c.band_samples2 = rd.integer(bg[1], "sampling.band_grid[1]");
      if (c.band_samples1 < 5 || c.band_samples2 < 5 || c.band_samples1 % 2 == 0 || c.band_samples2 % 2 == 0)
        rd.fail(bg, "sampling.band_grid", "counts must be odd and >= 5 so theta = 0 is sampled");
    }
    rd.opt(sampling, "sampling", "bands", c.bands, as_int);
    if (c.bands < 1) rd.fail(sampling, "sampling.bands", "must be >= 1");
    rd.opt(sampling, "sampling", "essential_samples", c.essential_samples, as_int);
    if (c.essential_samples < 9) rd.fail(sampling, "sampling.essential_samples", "must be >= 9");
    const YAML::Node z = rd.child(sampling, "sampling", "zetas", false);
    if (z && !z.IsNull() && !(z.IsScalar() && z.Scalar() == "default")) {
      const auto list = rd.numbers(z, "sampling.zetas");
      for (double v : list)
        if (std::abs(v) > std::numbers::pi + 1e-12) rd.fail(z, "sampling.zetas", "phases must lie in [-pi, pi]");
      c.zetas = merge_zetas(list, {});
    }
    const YAML::Node gv = rd.child(sampling, "sampling", "group_velocity_zetas", false);
    if (gv && !gv.IsNull()) c.group_velocity_zetas = rd.numbers(gv, "sampling.group_velocity_zetas");
    rd.opt(sampling, "sampling", "group_velocity_step", c.group_velocity_step, as_num);
    if (!(c.group_velocity_step > 0.0)) rd.fail(sampling, "sampling.group_velocity_step", "must be positive");
    for (double v : c.group_velocity_zetas)
      if (std::abs(v) + c.group_velocity_step > std::numbers::pi)
        rd.fail(gv, "sampling.group_velocity_zetas", "zeta +- step must stay inside [-pi, pi]");
  }
  if ((stages.dispersion || stages.floquet) && !has_zeta(c.zetas, 0.0))
    rd.fail(sampling, "sampling.zetas", "must include 0");
  if (stages.floquet)
    for (double v : {-0.1, -0.05, 0.05, 0.1})
      if (!has_zeta(c.zetas, v)) rd.fail(sampling, "sampling.zetas", "must include +-0.05 and +-0.1 for the parabola check");

  const YAML::Node solver = rd.child(root, "", "solver", false);
  if (solver && !solver.IsNull()) {
    rd.opt(solver, "solver", "tolerance", c.solver.tolerance, as_num);
    rd.opt(solver, "solver", "max_restarts", c.solver.max_restarts, as_int);
    rd.opt(solver, "solver", "block_size", c.solver.block_size, as_int);
    rd.opt(solver, "solver", "max_basis", c.solver.max_basis, as_int);
    rd.opt(solver, "solver", "shift", c.solver.shift, as_num);
    int cap = static_cast<int>(c.solver.dense_cap);
    rd.opt(solver, "solver", "dense_cap", cap, as_int);
    if (cap < 0) rd.fail(solver, "solver.dense_cap", "must be non-negative");
    c.solver.dense_cap = static_cast<std::size_t>(cap);
    rd.opt(solver, "solver", "cg_tolerance", c.cg_tolerance, as_num);
    if (!(c.solver.tolerance > 0.0) || !(c.cg_tolerance > 0.0)) rd.fail(solver, "solver", "tolerances must be positive");
    if (c.solver.max_restarts < 1) rd.fail(solver, "solver.max_restarts", "must be >= 1");
    if (!(c.solver.shift < 0.0)) rd.fail(solver, "solver.shift", "must be negative (below the spectrum)");
  }

  const YAML::Node outputs = rd.child(root, "", "outputs", false);
  if (outputs && !outputs.IsNull()) {
    const YAML::Node dir = rd.child(outputs, "outputs", "directory", false);
    if (dir && !dir.IsNull()) c.output_directory = dir.as<std::string>();
    rd.opt(outputs, "outputs", "fields", c.write_fields,
           [&](const YAML::Node& n, const std::string& f) { return rd.boolean(n, f); });
  }
  return c;
}

Config load_config(const std::filesystem::path& path, const StageSet& stages) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string(), stages);
}

nlohmann::json Config::to_json() const {
  using nlohmann::json;
  json cellj = {{"l1", cell.l1}, {"l2", cell.l2}};
  cellj["hole"] = cell.hole ? json::array({cell.hole->x1min, cell.hole->x1max, cell.hole->x2min, cell.hole->x2max})
                            : json(nullptr);
  json geo = {{"cell", cellj}, {"strip", {{"J", strip.J}, {"K", strip.K}}}};
  if (window)
    geo["window"] = {{"J1", window->J1}, {"J2", window->J2}, {"guide_length", window->guide_length},
                     {"padding", window->padding}};
  return json{
      {"geometry", geo},
      {"grid", {{"h", grid.h}}},
      {"sampling",
       {{"band_grid", {band_samples1, band_samples2}},
        {"bands", bands},
        {"essential_samples", essential_samples},
        {"zetas", zetas},
        {"group_velocity_zetas", group_velocity_zetas},
        {"group_velocity_step", group_velocity_step}}},
      {"solver",
       {{"tolerance", solver.tolerance},
        {"max_restarts", solver.max_restarts},
        {"block_size", solver.block_size},
        {"max_basis", solver.max_basis},
        {"shift", solver.shift},
        {"dense_cap", solver.dense_cap},
        {"cg_tolerance", cg_tolerance}}},
  };
}

std::string Config::hash() const { return fnv1a_hex(to_json().dump()); }

}  // namespace trapwave::cli
