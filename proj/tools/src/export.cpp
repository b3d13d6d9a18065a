#include "trapwave_cli/export.hpp"

#include <fstream>

namespace trapwave::cli {

namespace fs = std::filesystem;

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "band-diagram") return PlotKind::BandDiagram;
  if (name == "dispersion") return PlotKind::Dispersion;
  if (name == "field-heatmap") return PlotKind::FieldHeatmap;
  throw ConfigError("unknown plot kind '" + name + "' (band-diagram | dispersion | field-heatmap)");
}

std::vector<fs::path> export_plot_data(const ResultBundle& b, PlotKind kind, const fs::path& out,
                                       const std::string& field) {
  fs::create_directories(out);
  const std::string& hash = b.provenance.config_hash;
  std::vector<fs::path> written;
  switch (kind) {
    case PlotKind::BandDiagram: {
      if (!b.bands) throw BundleError("bundle has no band structure");
      written.push_back(out / "band_diagram.csv");
      write_bands_csv(b.bands->structure, hash, written.back());
      break;
    }
    case PlotKind::Dispersion: {
      if (!b.dispersion) throw BundleError("bundle has no dispersion curve");
      const DispersionCurve& c = b.dispersion->curve;
      std::string s = "# config_hash=" + hash + "\nzeta,kappa,M1,ess,trapped,M2,M_sharp\n";
      for (const DispersionSample& d : c.samples)
        s += format_number(d.zeta) + "," + format_number(wavenumber(d.zeta, CellSpec{c.l1, c.l2, {}})) + "," +
             format_number(d.m1) + "," + format_number(d.ess) + "," + (d.trapped ? "1" : "0") + "," +
             format_number(d.m2) + "," + format_number(c.m_sharp) + "\n";
      written.push_back(out / "dispersion_plot.csv");
      std::ofstream f(written.back(), std::ios::binary | std::ios::trunc);
      f << s;
      if (!f) throw std::runtime_error("cannot write " + written.back().string());
      break;
    }
    case PlotKind::FieldHeatmap: {
      bool any = false;
      for (const FieldGrid& g : b.fields) {
        if (!field.empty() && g.name != field) continue;
        write_field(g, hash, out);
        written.push_back(out / (g.name + ".field.txt"));
        any = true;
      }
      if (!any) throw BundleError(field.empty() ? "bundle has no stored fields" : "bundle has no field named '" + field + "'");
      break;
    }
  }
  return written;
}

}  // namespace trapwave::cli
