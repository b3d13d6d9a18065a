#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trapwave_cli/bundle.hpp"

namespace trapwave::cli {

enum class PlotKind { BandDiagram, Dispersion, FieldHeatmap };

// "band-diagram" | "dispersion" | "field-heatmap"; throws ConfigError otherwise.
PlotKind parse_plot_kind(const std::string& name);

// Long-format CSV (or matrix plus sidecar for heatmaps) under `out`. An empty
// `field` exports every stored field. Throws BundleError when the bundle
// lacks the requested result.
std::vector<std::filesystem::path> export_plot_data(const ResultBundle& bundle, PlotKind kind,
                                                    const std::filesystem::path& out,
                                                    const std::string& field = {});

}  // namespace trapwave::cli
