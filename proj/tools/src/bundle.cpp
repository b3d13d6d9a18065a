#include "trapwave_cli/bundle.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "trapwave/errors.hpp"

namespace trapwave::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw BundleError("not a number: '" + s + "'");
  return v;
}

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

double get_num(const json& j) {
  if (j.is_string()) return parse_number(j.get<std::string>());
  if (!j.is_number()) throw BundleError("expected a number in result file");
  return j.get<double>();
}

json cplx(Complex z) { return json::array({num(z.real()), num(z.imag())}); }
Complex get_cplx(const json& j) { return {get_num(j.at(0)), get_num(j.at(1))}; }

Verdict verdict_from(const std::string& s) {
  if (s == "Outgoing") return Verdict::Outgoing;
  if (s == "Incoming") return Verdict::Incoming;
  if (s == "Null") return Verdict::Null;
  throw BundleError("unknown verdict '" + s + "'");
}

TrappedVerdict trapped_verdict_from(const std::string& s) {
  for (TrappedVerdict v : {TrappedVerdict::Pass, TrappedVerdict::Fail, TrappedVerdict::BoundNotApplicable})
    if (to_string(v) == s) return v;
  throw BundleError("unknown trapped verdict '" + s + "'");
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw BundleError("cannot read " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_json(const fs::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

json read_json(const fs::path& file) {
  try {
    return json::parse(read_text(file));
  } catch (const json::exception& e) {
    throw BundleError(file.string() + ": " + e.what());
  }
}

std::string hash_line(const std::string& h) { return "# config_hash=" + h + "\n"; }

void check_hash(const fs::path& file, const std::string& found, const std::string& expected) {
  if (found != expected)
    throw BundleError(file.string() + ": config hash " + found + " differs from summary hash " + expected +
                      " (mixed provenance)");
}

// Splits a text file into its provenance hash and the remaining lines.
std::pair<std::string, std::vector<std::string>> read_lines(const fs::path& file) {
  std::istringstream in(read_text(file));
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config_hash=", 0) != 0)
    throw BundleError(file.string() + ": missing '# config_hash=' line");
  std::string hash = line.substr(14);
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return {hash, lines};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

json decay_json(const DecayEstimate& d) {
  json norms = json::array();
  for (double v : d.cell_norms) norms.push_back(num(v));
  return {{"beta_hat", num(d.beta_hat)}, {"decaying", d.decaying}, {"cell_norms", norms}};
}

DecayEstimate decay_from(const json& j) {
  DecayEstimate d;
  d.beta_hat = get_num(j.at("beta_hat"));
  d.decaying = j.at("decaying").get<bool>();
  for (const json& v : j.at("cell_norms")) d.cell_norms.push_back(get_num(v));
  return d;
}

json cell_json(const CellSpec& c) {
  json j = {{"l1", num(c.l1)}, {"l2", num(c.l2)}};
  j["hole"] = c.hole ? json::array({num(c.hole->x1min), num(c.hole->x1max), num(c.hole->x2min), num(c.hole->x2max)})
                     : json(nullptr);
  return j;
}

CellSpec cell_from(const json& j) {
  CellSpec c;
  c.l1 = get_num(j.at("l1"));
  c.l2 = get_num(j.at("l2"));
  if (!j.at("hole").is_null()) {
    const json& h = j.at("hole");
    c.hole = Hole{get_num(h.at(0)), get_num(h.at(1)), get_num(h.at(2)), get_num(h.at(3))};
  }
  return c;
}

const char* kDirections[4] = {"left", "right", "down", "up"};

}  // namespace

FieldGrid make_field_grid(const std::string& name, const std::string& component, const DomainMask& mask,
                          const std::vector<double>& unknown_values) {
  if (unknown_values.size() != static_cast<std::size_t>(mask.active_count()))
    throw InvalidInput("make_field_grid: value count does not match the mask");
  FieldGrid f;
  f.name = name;
  f.component = component;
  f.nx = mask.nx;
  f.ny = mask.ny;
  f.h = mask.h;
  f.x0 = mask.x0;
  f.y0 = mask.y0;
  f.mask = mask.active;
  f.values.assign(static_cast<std::size_t>(mask.nx) * mask.ny, 0.0);
  for (int u = 0; u < mask.active_count(); ++u) f.values[mask.node_of_unknown[u]] = unknown_values[u];
  return f;
}

void write_bands_csv(const BandStructure& bs, const std::string& config_hash, const fs::path& file) {
  std::string s = hash_line(config_hash) + "theta1,theta2,n,lambda\n";
  for (const BandSample& smp : bs.samples)
    for (std::size_t n = 0; n < smp.values.size(); ++n)
      s += format_number(smp.theta.theta1) + "," + format_number(smp.theta.theta2) + "," + std::to_string(n + 1) +
           "," + format_number(smp.values[n]) + "\n";
  write_text(file, s);
}

void write_dispersion_csv(const DispersionCurve& curve, const std::string& config_hash, const fs::path& file) {
  std::string s = hash_line(config_hash) + "zeta,M1,ess,trapped,M2\n";
  for (const DispersionSample& d : curve.samples)
    s += format_number(d.zeta) + "," + format_number(d.m1) + "," + format_number(d.ess) + "," +
         (d.trapped ? "1" : "0") + "," + format_number(d.m2) + "\n";
  write_text(file, s);
}

void write_field(const FieldGrid& f, const std::string& config_hash, const fs::path& dir) {
  std::string s = hash_line(config_hash);
  for (int j = 0; j < f.ny; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      if (i) s += ' ';
      s += format_number(f.values[static_cast<std::size_t>(j) * f.nx + i]);
    }
    s += '\n';
  }
  write_text(dir / (f.name + ".field.txt"), s);
  json mask = json::array();
  for (int j = 0; j < f.ny; ++j) {
    std::string row(static_cast<std::size_t>(f.nx), '0');
    for (int i = 0; i < f.nx; ++i)
      if (f.mask[static_cast<std::size_t>(j) * f.nx + i]) row[i] = '1';
    mask.push_back(row);
  }
  write_json(dir / (f.name + ".field.json"),
             {{"config_hash", config_hash}, {"name", f.name}, {"component", f.component},
              {"nx", f.nx}, {"ny", f.ny}, {"h", num(f.h)}, {"x0", num(f.x0)}, {"y0", num(f.y0)},
              {"row_order", "y ascending"}, {"mask", mask}});
}

void save_bundle(const ResultBundle& b, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string& hash = b.provenance.config_hash;
  json summary;
  summary["config_hash"] = hash;
  summary["provenance"] = {{"config_hash", hash},
                           {"code_version", b.provenance.code_version},
                           {"timestamp", b.provenance.timestamp},
                           {"subcommand", b.provenance.subcommand},
                           {"threads", b.provenance.threads},
                           {"seed", b.provenance.seed}};
  summary["config"] = b.config;
  summary["stages"] = b.stages;
  summary["failures"] = b.failures;
  json field_names = json::array();
  for (const FieldGrid& f : b.fields) field_names.push_back(f.name);
  summary["fields"] = field_names;

  if (b.bands) {
    const BandResults& r = *b.bands;
    json bands = json::array(), gaps = json::array();
    for (const Band& x : r.bands) bands.push_back({{"n", x.n}, {"lo", num(x.lo)}, {"hi", num(x.hi)}});
    for (const BandGap& g : r.gaps)
      gaps.push_back({{"below", g.below}, {"lo", num(g.lo)}, {"hi", num(g.hi)}, {"open", g.open}});
    summary["bands"] = {
        {"k", r.structure.k},
        {"samples", {r.structure.samples1, r.structure.samples2}},
        {"cutoff", num(r.structure.cutoff)},
        {"lambda_star", num(r.friedrichs.lambda_star)},
        {"friedrichs_h", num(r.friedrichs.grid.h)},
        {"lemma_a",
         {{"lambda_at_zero", num(r.lemma_a.lambda_at_zero)},
          {"min_elsewhere", num(r.lemma_a.min_elsewhere)},
          {"argmin", {num(r.lemma_a.argmin.theta1), num(r.lemma_a.argmin.theta2)}},
          {"margin", num(r.lemma_a.margin)},
          {"pass", r.lemma_a.pass}}},
        {"bands", bands},
        {"gaps", gaps}};
    write_bands_csv(r.structure, hash, dir / "bands.csv");
  }

  if (b.dispersion) {
    const DispersionResults& r = *b.dispersion;
    const DispersionCurve& c = r.curve;
    json d = {{"J", c.J},
              {"l1", num(c.l1)},
              {"l2", num(c.l2)},
              {"M_sharp", num(c.m_sharp)},
              {"samples", c.samples.size()},
              {"cutoff", num(r.cutoff)}};
    d["B_sharp"] = c.b_sharp ? json::array({num(c.b_sharp->lo), num(c.b_sharp->hi)}) : json(nullptr);
    d["feasibility"] = {{"M_sharp", num(r.feasibility.m_sharp)},
                         {"lateral_bound", num(r.feasibility.lateral_bound)},
                         {"lambda_star", num(r.feasibility.lambda_star)},
                         {"holds", r.feasibility.holds}};
    d["lemma_b"] = r.lemma_b ? json{{"M1", num(r.lemma_b->m1)},
                                    {"M2", num(r.lemma_b->m2)},
                                    {"M_sharp", num(r.lemma_b->m_sharp)},
                                    {"below_sharp", r.lemma_b->below_sharp},
                                    {"unique", r.lemma_b->unique},
                                    {"pass", r.lemma_b->pass}}
                             : json(nullptr);
    d["monotone"] = {{"min_rise", num(r.monotone.min_rise)},
                     {"max_asymmetry", num(r.monotone.max_asymmetry)},
                     {"mirrored_pairs", r.monotone.mirrored_pairs},
                     {"pass", r.monotone.pass}};
    d["waveguide_band"] = {{"exists", r.band.exists},
                           {"lo", num(r.band.lo)},
                           {"hi", num(r.band.hi)},
                           {"sampled_top", num(r.band.sampled_top)},
                           {"cutoff", r.band.cutoff ? num(*r.band.cutoff) : json(nullptr)},
                           {"below_cutoff", r.band.below_cutoff}};
    summary["dispersion"] = d;
    write_dispersion_csv(c, hash, dir / "dispersion.csv");
  }

  if (b.floquet) {
    const FloquetResults& r = *b.floquet;
    const JordanSummary& ch = r.chain;
    json f;
    f["config_hash"] = hash;
    f["jordan_chain"] = {{"M1_at_zero", num(ch.m0)},
                         {"ess_at_zero", num(ch.ess0)},
                         {"b", num(ch.b)},
                         {"b_imag_residue", num(ch.b_imag_residue)},
                         {"norm_W0_sq", num(ch.norm_w0_sq)},
                         {"curvature", num(ch.curvature)},
                         {"compatibility", num(ch.compatibility)},
                         {"W1_residual", num(ch.w1_residual)},
                         {"W0_W1_overlap", num(ch.w0_w1_overlap)},
                         {"cg_iterations", ch.cg_iterations}};
    f["packets"] = {{"q", {{cplx(r.packet_q[0][0]), cplx(r.packet_q[0][1])}, {cplx(r.packet_q[1][0]), cplx(r.packet_q[1][1])}}},
                    {"diagonal_error", num(r.diagonal_error)},
                    {"off_diagonal", num(r.off_diagonal)}};
    json cls = json::array();
    for (const ClassificationRecord& c : r.classifications)
      cls.push_back({{"wave", c.wave}, {"zeta", num(c.zeta)}, {"q", cplx(c.q)}, {"verdict", to_string(c.verdict)},
                     {"margin", num(c.margin)}});
    f["classifications"] = cls;
    json gv = json::array();
    for (const GroupVelocityReport& g : r.group_velocity)
      gv.push_back({{"zeta", num(g.zeta)},
                    {"skipped", g.skipped},
                    {"fd_slope", num(g.fd_slope)},
                    {"flux_slope", num(g.flux_slope)},
                    {"a", num(g.a)},
                    {"relative_error", num(g.relative_error)},
                    {"verdict", to_string(g.verdict)}});
    f["group_velocity"] = gv;
    const ParabolaReport& p = r.parabola;
    f["parabola"] = {{"fit_curvature", num(p.fit_curvature)},
                     {"chain_curvature", num(p.chain_curvature)},
                     {"relative_error", num(p.relative_error)},
                     {"residual_small", num(p.residual_small)},
                     {"residual_large", num(p.residual_large)},
                     {"residual_ratio", num(p.residual_ratio)},
                     {"samples_used", p.samples_used},
                     {"pass", p.pass}};
    write_json(dir / "floquet.json", f);
  }

  if (b.trapped) {
    const TrappedResults& r = *b.trapped;
    const TrappedReport& t = r.report;
    json decay;
    for (int d = 0; d < 4; ++d) decay[kDirections[d]] = decay_json(t.decay[d]);
    write_json(dir / "trapped.json",
               {{"config_hash", hash},
                {"layout",
                 {{"J1", r.layout.J1},
                  {"J2", r.layout.J2},
                  {"guide_rows", r.layout.guide_rows},
                  {"guide_length", r.layout.guide_length},
                  {"padding", r.layout.padding}}},
                {"cell", cell_json(r.cell)},
                {"lambda_computed", num(t.lambda_computed)},
                {"lambda_square", num(t.lambda_square)},
                {"quotient", num(t.quotient)},
                {"M1_at_zero", num(t.m1_at_zero)},
                {"decay", decay},
                {"verdict", to_string(t.verdict)},
                {"failures", t.failures}});
  }

  for (const FieldGrid& f : b.fields) write_field(f, hash, dir);
  write_json(dir / "summary.json", summary);
}

ResultBundle load_bundle(const fs::path& dir) {
  const fs::path summary_file = dir / "summary.json";
  if (!fs::exists(summary_file)) throw BundleError(dir.string() + ": no summary.json (missing result)");
  const json s = read_json(summary_file);
  ResultBundle b;
  try {
    const json& p = s.at("provenance");
    b.provenance.config_hash = p.at("config_hash").get<std::string>();
    b.provenance.code_version = p.at("code_version").get<std::string>();
    b.provenance.timestamp = p.at("timestamp").get<std::string>();
    b.provenance.subcommand = p.at("subcommand").get<std::string>();
    b.provenance.threads = p.at("threads").get<unsigned>();
    b.provenance.seed = p.at("seed").get<std::uint64_t>();
    check_hash(summary_file, s.at("config_hash").get<std::string>(), b.provenance.config_hash);
    b.config = s.at("config");
    if (fnv1a_hex(b.config.dump()) != b.provenance.config_hash)
      throw BundleError(summary_file.string() + ": embedded config does not hash to the recorded config hash");
    b.stages = s.at("stages").get<std::vector<std::string>>();
    b.failures = s.at("failures").get<std::vector<std::string>>();
    const std::string& hash = b.provenance.config_hash;

    if (s.contains("bands")) {
      const json& j = s.at("bands");
      BandResults r;
      r.structure.k = j.at("k").get<int>();
      r.structure.samples1 = j.at("samples").at(0).get<int>();
      r.structure.samples2 = j.at("samples").at(1).get<int>();
      r.structure.cutoff = get_num(j.at("cutoff"));
      r.friedrichs.lambda_star = get_num(j.at("lambda_star"));
      r.friedrichs.grid.h = get_num(j.at("friedrichs_h"));
      const json& la = j.at("lemma_a");
      r.lemma_a.lambda_at_zero = get_num(la.at("lambda_at_zero"));
      r.lemma_a.min_elsewhere = get_num(la.at("min_elsewhere"));
      r.lemma_a.argmin = {get_num(la.at("argmin").at(0)), get_num(la.at("argmin").at(1))};
      r.lemma_a.margin = get_num(la.at("margin"));
      r.lemma_a.pass = la.at("pass").get<bool>();
      for (const json& x : j.at("bands")) r.bands.push_back({x.at("n").get<int>(), get_num(x.at("lo")), get_num(x.at("hi"))});
      for (const json& g : j.at("gaps"))
        r.gaps.push_back({g.at("below").get<int>(), get_num(g.at("lo")), get_num(g.at("hi")), g.at("open").get<bool>()});

      const fs::path file = dir / "bands.csv";
      const auto [h, lines] = read_lines(file);
      check_hash(file, h, hash);
      if (lines.empty() || lines[0] != "theta1,theta2,n,lambda") throw BundleError(file.string() + ": bad header");
      const std::size_t expected = static_cast<std::size_t>(r.structure.samples1) * r.structure.samples2 * r.structure.k;
      if (lines.size() - 1 != expected) throw BundleError(file.string() + ": unexpected row count");
      for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto cols = split(lines[row], ',');
        if (cols.size() != 4) throw BundleError(file.string() + ": malformed row " + std::to_string(row + 1));
        const int n = std::stoi(cols[2]);
        if (n == 1) r.structure.samples.push_back({{parse_number(cols[0]), parse_number(cols[1])}, {}});
        if (r.structure.samples.empty() || n != static_cast<int>(r.structure.samples.back().values.size()) + 1)
          throw BundleError(file.string() + ": band index out of order at row " + std::to_string(row + 1));
        r.structure.samples.back().values.push_back(parse_number(cols[3]));
      }
      b.bands = std::move(r);
    }

    if (s.contains("dispersion")) {
      const json& j = s.at("dispersion");
      DispersionResults r;
      r.curve.J = j.at("J").get<int>();
      r.curve.l1 = get_num(j.at("l1"));
      r.curve.l2 = get_num(j.at("l2"));
      r.curve.m_sharp = get_num(j.at("M_sharp"));
      if (!j.at("B_sharp").is_null()) r.curve.b_sharp = Interval{get_num(j.at("B_sharp").at(0)), get_num(j.at("B_sharp").at(1))};
      r.cutoff = get_num(j.at("cutoff"));
      const json& fe = j.at("feasibility");
      r.feasibility = {get_num(fe.at("M_sharp")), get_num(fe.at("lateral_bound")), get_num(fe.at("lambda_star")),
                        fe.at("holds").get<bool>()};
      if (!j.at("lemma_b").is_null()) {
        const json& lb = j.at("lemma_b");
        r.lemma_b = LemmaBReport{get_num(lb.at("M1")), get_num(lb.at("M2")), get_num(lb.at("M_sharp")),
                                 lb.at("below_sharp").get<bool>(), lb.at("unique").get<bool>(), lb.at("pass").get<bool>()};
      }
      const json& mo = j.at("monotone");
      r.monotone = {get_num(mo.at("min_rise")), get_num(mo.at("max_asymmetry")), mo.at("mirrored_pairs").get<int>(),
                    mo.at("pass").get<bool>()};
      const json& wb = j.at("waveguide_band");
      r.band.exists = wb.at("exists").get<bool>();
      r.band.lo = get_num(wb.at("lo"));
      r.band.hi = get_num(wb.at("hi"));
      r.band.sampled_top = get_num(wb.at("sampled_top"));
      if (!wb.at("cutoff").is_null()) r.band.cutoff = get_num(wb.at("cutoff"));
      r.band.below_cutoff = wb.at("below_cutoff").get<bool>();

      const fs::path file = dir / "dispersion.csv";
      const auto [h, lines] = read_lines(file);
      check_hash(file, h, hash);
      if (lines.empty() || lines[0] != "zeta,M1,ess,trapped,M2") throw BundleError(file.string() + ": bad header");
      for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto cols = split(lines[row], ',');
        if (cols.size() != 5 || (cols[3] != "0" && cols[3] != "1"))
          throw BundleError(file.string() + ": malformed row " + std::to_string(row + 1));
        r.curve.samples.push_back({parse_number(cols[0]), parse_number(cols[1]), parse_number(cols[4]),
                                   parse_number(cols[2]), cols[3] == "1"});
      }
      if (r.curve.samples.size() != j.at("samples").get<std::size_t>())
        throw BundleError(file.string() + ": sample count differs from summary.json");
      b.dispersion = std::move(r);
    }

    if (fs::exists(dir / "floquet.json")) {
      const fs::path file = dir / "floquet.json";
      const json f = read_json(file);
      check_hash(file, f.at("config_hash").get<std::string>(), hash);
      FloquetResults r;
      const json& c = f.at("jordan_chain");
      r.chain = {get_num(c.at("M1_at_zero")), get_num(c.at("ess_at_zero")), get_num(c.at("b")),
                 get_num(c.at("b_imag_residue")), get_num(c.at("norm_W0_sq")), get_num(c.at("curvature")),
                 get_num(c.at("compatibility")), get_num(c.at("W1_residual")), get_num(c.at("W0_W1_overlap")),
                 c.at("cg_iterations").get<int>()};
      const json& q = f.at("packets").at("q");
      for (int a = 0; a < 2; ++a)
        for (int b2 = 0; b2 < 2; ++b2) r.packet_q[a][b2] = get_cplx(q.at(a).at(b2));
      r.diagonal_error = get_num(f.at("packets").at("diagonal_error"));
      r.off_diagonal = get_num(f.at("packets").at("off_diagonal"));
      for (const json& x : f.at("classifications"))
        r.classifications.push_back({x.at("wave").get<std::string>(), get_num(x.at("zeta")), get_cplx(x.at("q")),
                                     verdict_from(x.at("verdict").get<std::string>()), get_num(x.at("margin"))});
      for (const json& x : f.at("group_velocity")) {
        GroupVelocityReport g;
        g.zeta = get_num(x.at("zeta"));
        g.skipped = x.at("skipped").get<bool>();
        g.fd_slope = get_num(x.at("fd_slope"));
        g.flux_slope = get_num(x.at("flux_slope"));
        g.a = get_num(x.at("a"));
        g.relative_error = get_num(x.at("relative_error"));
        g.verdict = verdict_from(x.at("verdict").get<std::string>());
        r.group_velocity.push_back(g);
      }
      const json& p = f.at("parabola");
      r.parabola.fit_curvature = get_num(p.at("fit_curvature"));
      r.parabola.chain_curvature = get_num(p.at("chain_curvature"));
      r.parabola.relative_error = get_num(p.at("relative_error"));
      r.parabola.residual_small = get_num(p.at("residual_small"));
      r.parabola.residual_large = get_num(p.at("residual_large"));
      r.parabola.residual_ratio = get_num(p.at("residual_ratio"));
      r.parabola.samples_used = p.at("samples_used").get<int>();
      r.parabola.pass = p.at("pass").get<bool>();
      b.floquet = std::move(r);
    }

    if (fs::exists(dir / "trapped.json")) {
      const fs::path file = dir / "trapped.json";
      const json t = read_json(file);
      check_hash(file, t.at("config_hash").get<std::string>(), hash);
      TrappedResults r;
      const json& l = t.at("layout");
      r.layout = {l.at("J1").get<int>(), l.at("J2").get<int>(), l.at("guide_rows").get<int>(),
                  l.at("guide_length").get<int>(), l.at("padding").get<int>()};
      r.cell = cell_from(t.at("cell"));
      r.report.lambda_computed = get_num(t.at("lambda_computed"));
      r.report.lambda_square = get_num(t.at("lambda_square"));
      r.report.quotient = get_num(t.at("quotient"));
      r.report.m1_at_zero = get_num(t.at("M1_at_zero"));
      for (int d = 0; d < 4; ++d) r.report.decay[d] = decay_from(t.at("decay").at(kDirections[d]));
      r.report.verdict = trapped_verdict_from(t.at("verdict").get<std::string>());
      r.report.failures = t.at("failures").get<std::vector<std::string>>();
      b.trapped = std::move(r);
    }

    for (const json& name_j : s.at("fields")) {
      const std::string name = name_j.get<std::string>();
      const fs::path meta_file = dir / (name + ".field.json");
      const json m = read_json(meta_file);
      check_hash(meta_file, m.at("config_hash").get<std::string>(), hash);
      FieldGrid f;
      f.name = name;
      f.component = m.at("component").get<std::string>();
      f.nx = m.at("nx").get<int>();
      f.ny = m.at("ny").get<int>();
      f.h = get_num(m.at("h"));
      f.x0 = get_num(m.at("x0"));
      f.y0 = get_num(m.at("y0"));
      for (const json& row : m.at("mask"))
        for (char ch : row.get<std::string>()) f.mask.push_back(ch == '1' ? 1 : 0);
      const fs::path txt = dir / (name + ".field.txt");
      const auto [h, lines] = read_lines(txt);
      check_hash(txt, h, hash);
      if (static_cast<int>(lines.size()) != f.ny) throw BundleError(txt.string() + ": row count differs from sidecar");
      for (const std::string& line : lines) {
        const auto cols = split(line, ' ');
        if (static_cast<int>(cols.size()) != f.nx) throw BundleError(txt.string() + ": column count differs from sidecar");
        for (const std::string& c : cols) f.values.push_back(parse_number(c));
      }
      b.fields.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw BundleError(dir.string() + ": malformed result file: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw BundleError(dir.string() + ": malformed result file: " + e.what());
  }
  return b;
}

void validate_bundle(const ResultBundle& b) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw BundleError("bundle invariant violated: " + what);
  };
  if (b.bands) {
    const BandResults& r = *b.bands;
    try {
      r.structure.validate();
    } catch (const InvalidInput& e) {
      require(false, e.what());
    }
    const auto bands = spectral_bands(r.structure);
    require(bands.size() == r.bands.size(), "band count");
    for (std::size_t i = 0; i < bands.size(); ++i)
      require(bands[i].lo == r.bands[i].lo && bands[i].hi == r.bands[i].hi, "band edges recomputed from samples");
    const LemmaAReport la = check_lemma_a(r.structure);
    require(la.pass == r.lemma_a.pass && la.lambda_at_zero == r.lemma_a.lambda_at_zero &&
                la.min_elsewhere == r.lemma_a.min_elsewhere,
            "cutoff report recomputed from samples");
  }
  if (b.dispersion) {
    const DispersionResults& r = *b.dispersion;
    try {
      r.curve.validate();
    } catch (const InvalidInput& e) {
      require(false, e.what());
    }
    const WaveguideBand band = waveguide_band(r.curve, r.cutoff);
    require(band.exists == r.band.exists && band.lo == r.band.lo && band.hi == r.band.hi &&
                band.sampled_top == r.band.sampled_top && band.below_cutoff == r.band.below_cutoff,
            "waveguide band recomputed from samples");
    const MonotoneReport mo = check_monotone_start(r.curve);
    require(mo.pass == r.monotone.pass && mo.max_asymmetry == r.monotone.max_asymmetry, "monotone report");
    require(r.feasibility.m_sharp == r.curve.m_sharp &&
                r.feasibility.holds == (r.feasibility.m_sharp <
                                         std::min(r.feasibility.lateral_bound, r.feasibility.lambda_star)),
            "condition on M_sharp");
  }
  if (b.floquet) {
    const FloquetResults& r = *b.floquet;
    require(r.chain.b > 0.0, "b > 0");
    require(std::abs(r.packet_q[0][1] + std::conj(r.packet_q[1][0])) <= 1e-9 * std::max(1.0, r.chain.b),
            "packet q-matrix anti-Hermitian");
    for (const ClassificationRecord& c : r.classifications) {
      const double im = c.q.imag();
      const bool ok = (c.verdict == Verdict::Outgoing && im > 0) || (c.verdict == Verdict::Incoming && im < 0) ||
                      (c.verdict == Verdict::Null && c.margin <= 1e-6);
      require(ok, "classification of " + c.wave + " agrees with the sign of Im q");
    }
  }
  if (b.trapped) {
    const TrappedResults& r = *b.trapped;
    require(r.report.lambda_square == explicit_bound(r.layout.J1, r.layout.J2, r.cell), "lambda_square formula");
    require((r.report.verdict == TrappedVerdict::Fail) == !r.report.failures.empty(), "trapped verdict vs failures");
  }
  for (const FieldGrid& f : b.fields) {
    const std::size_t n = static_cast<std::size_t>(f.nx) * f.ny;
    require(f.values.size() == n && f.mask.size() == n, "field " + f.name + " dimensions");
    for (std::size_t k = 0; k < n; ++k) require(f.mask[k] || f.values[k] == 0.0, "field " + f.name + " zero off the mask");
  }
}

}  // namespace trapwave::cli
