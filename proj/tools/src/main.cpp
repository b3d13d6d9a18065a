#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "trapwave/errors.hpp"
#include "trapwave_cli/bundle.hpp"
#include "trapwave_cli/config.hpp"
#include "trapwave_cli/export.hpp"
#include "trapwave_cli/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 2, kSolver = 3, kScience = 4 };

int run_main(int argc, char** argv) {
  namespace cli = trapwave::cli;
  CLI::App app{"Trapped modes and waveguide bands in perforated periodic media"};
  app.set_version_flag("--version", TRAPWAVE_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool quiet = false;
  std::vector<CLI::App*> runs;
  for (const char* name : {"bands", "dispersion", "floquet", "trapped", "all"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " stage(s)");
    sub->add_option("--config", config_path, "YAML config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides outputs.directory)");
    sub->add_option("--threads", threads, "worker threads for independent solves")->check(CLI::Range(1u, 256u));
    sub->add_option("--seed", seed, "seed recorded for randomized studies");
    sub->add_flag("--quiet", quiet, "suppress progress lines");
    runs.push_back(sub);
  }

  std::string from_dir, kind, field, export_out;
  CLI::App* exp = app.add_subcommand("export", "write plot-ready data from a result directory");
  exp->add_option("--from", from_dir, "result directory")->required();
  exp->add_option("--kind", kind, "band-diagram | dispersion | field-heatmap")->required();
  exp->add_option("--field", field, "field name for heatmaps (default: all)");
  exp->add_option("--out", export_out, "destination directory")->required();

  std::string check_dir;
  CLI::App* chk = app.add_subcommand("check", "reload and re-validate a result directory");
  chk->add_option("dir", check_dir, "result directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (exp->parsed()) {
      const cli::ResultBundle b = cli::load_bundle(from_dir);
      cli::validate_bundle(b);
      for (const auto& p : cli::export_plot_data(b, cli::parse_plot_kind(kind), export_out, field))
        std::cout << p.string() << "\n";
      return kOk;
    }
    if (chk->parsed()) {
      const cli::ResultBundle b = cli::load_bundle(check_dir);
      cli::validate_bundle(b);
      std::cout << "ok: " << check_dir << " (config " << b.provenance.config_hash << ", "
                << b.failures.size() << " recorded failure(s))\n";
      return b.failures.empty() ? kOk : kScience;
    }
    for (CLI::App* sub : runs) {
      if (!sub->parsed()) continue;
      const std::string name = sub->get_name();
      const cli::Config cfg = cli::load_config(config_path, cli::StageSet::for_subcommand(name));
      std::filesystem::path dir = out_dir.empty() ? cfg.output_directory.value_or("") : std::filesystem::path(out_dir);
      if (dir.empty()) throw cli::ConfigError("no output directory: pass --out or set outputs.directory");
      cli::RunOptions ro;
      ro.subcommand = name;
      ro.threads = threads;
      ro.seed = seed;
      if (!quiet) ro.log = [](const std::string& s) { std::cerr << s << "\n"; };
      const cli::ResultBundle b = cli::run_pipeline(cfg, ro);
      cli::save_bundle(b, dir);
      if (!b.failures.empty()) {
        std::cerr << "scientific failure (" << b.failures.size() << "):\n";
        for (const auto& f : b.failures) std::cerr << "  " << f << "\n";
        return kScience;
      }
      return kOk;
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const trapwave::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const trapwave::ScientificFailure& e) {
    std::cerr << "scientific failure: " << e.what() << "\n";
    return kScience;
  } catch (const trapwave::InvalidInput& e) {
    std::cerr << "scientific failure: " << e.what() << "\n";
    return kScience;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) { return run_main(argc, argv); }
