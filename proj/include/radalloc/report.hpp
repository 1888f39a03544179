// Plain-text, CSV and SVG renderings of a RunReport.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "radalloc/scenario.hpp"

namespace radalloc {

enum class OutputFormat { Table, Csv, Svg };

OutputFormat parse_format(const std::string& text);

/// Human-readable tables, one row per quantity, one column per target/direction.
std::string format_table(const RunReport& report);

/// Main CSV for the mode: per-target allocation, per-direction allocation
/// (direction,weight,t_ms,m,p_d) or the fleet timeline (sensor,target,start_ms,end_ms).
std::string format_csv(const RunReport& report);

/// Per-direction fit parameters (probabilistic mode only).
std::string format_fit_csv(const ProbReport& prob);

/// Step-1 durations and probabilities, one row per (sensor, target).
std::string format_step1_csv(const FleetReport& fleet);

/// OR-fused probability per (pseudo-sensor, target).
std::string format_pseudo_csv(const FleetReport& fleet);

/// Gantt chart of the fleet timeline.
std::string format_svg(const FleetReport& fleet);

/// Writes the requested format into `out_dir`; returns the files written.
std::vector<std::filesystem::path> emit(const RunReport& report, OutputFormat format,
                                        const std::filesystem::path& out_dir);

/// Minimal CSV reader: header row + numeric/text cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);

}  // namespace radalloc
