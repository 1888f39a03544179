#include "radalloc/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace radalloc {

namespace {

std::string num(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Rows of label + cells, right-aligned to a common width.
std::string grid_text(const std::vector<std::string>& col_labels,
                      const std::vector<std::pair<std::string, std::vector<std::string>>>& rows) {
  std::size_t w0 = 0, w = 0;
  for (const auto& [label, cells] : rows) {
    w0 = std::max(w0, label.size());
    for (const auto& c : cells) w = std::max(w, c.size());
  }
  for (const auto& c : col_labels) w = std::max(w, c.size());
  std::ostringstream os;
  os << pad_right("", w0);
  for (const auto& c : col_labels) os << "  " << pad(c, w);
  os << '\n';
  for (const auto& [label, cells] : rows) {
    os << pad_right(label, w0);
    for (const auto& c : cells) os << "  " << pad(c, w);
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> cells(const std::vector<double>& v, const char* spec) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(num(x, spec));
  return out;
}

std::string header(const RunReport& r) {
  std::ostringstream os;
  os << "Scenario: " << r.scenario_name << "\n";
  os << "Mode: " << to_string(r.mode) << ", T = " << num(r.horizon_ms) << " ms";
  if (r.scale_ms_per_km4) os << ", K = " << num(*r.scale_ms_per_km4) << " ms/km^4";
  os << "\n\n";
  return os.str();
}

std::string assignment_text(const Assignment& a, const FleetScenario& f) {
  const auto groups = a.groups(f.n_targets());
  std::vector<std::pair<std::size_t, std::string>> parts;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) continue;
    parts.emplace_back(groups[c].indices().front(), groups[c].label(f.sensor_names) + "->" + f.target_names[c]);
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& [key, text] : parts) out += (out.empty() ? "" : ", ") + text;
  return out;
}

std::string mono_table(const RunReport& r) {
  const auto& m = *r.mono;
  std::vector<std::pair<std::string, std::vector<std::string>>> rows{
      {"weight", cells(m.problem.weights, "%.4g")},
      {"tau (ms)", cells(m.problem.taus_ms, "%.4f")},
      {"t (ms)", cells(m.allocation.times_ms, "%.4f")},
  };
  if (m.looks) rows.push_back({"n", cells(*m.looks, "%.2f")});
  rows.push_back({"P_d", cells(m.probabilities, "%.4f")});
  std::ostringstream os;
  os << header(r) << "Optimal temporal allocation\n" << grid_text(m.names, rows);
  os << "\nlambda = " << num(m.allocation.lambda) << ", criterion = " << num(m.allocation.criterion, "%.6f") << "\n";
  return os.str();
}

std::string prob_table(const RunReport& r) {
  const auto& p = *r.prob;
  const auto& a = p.allocation;
  std::vector<std::string> dirs;
  for (std::size_t j = 0; j < a.n_directions; ++j) dirs.push_back(std::to_string(j + 1));
  std::vector<std::pair<std::string, std::vector<std::string>>> rows{
      {"eps", cells(a.weights, "%.2f")},
      {"t (ms)", cells(a.times_ms, "%.2f")},
      {"m", cells(a.looks, "%.2f")},
      {"P_d", cells(a.probabilities, "%.2f")},
  };
  std::ostringstream os;
  os << header(r) << "Optimal temporal allocation per direction\n";
  std::vector<std::string> label{"dir."};
  os << grid_text(dirs, rows);

  os << "\nFitted directions (P_dj ~ exp(-omega t^-n))\n";
  std::vector<std::string> cols{"dir", "mass", "theta(rad)", "omega", "n", "gamma_s", "tau(ms)", "fit_err"};
  std::vector<std::pair<std::string, std::vector<std::string>>> fit_rows;
  for (const auto& m : a.models) {
    fit_rows.push_back({"", {std::to_string(m.direction + 1), num(m.mass, "%.4f"), num(m.off_axis_rad, "%.4f"),
                             num(m.fit.omega, "%.5g"), num(m.fit.exponent, "%.4f"), num(m.gamma_s, "%.4f"),
                             num(m.tau_ms, "%.4f"), num(m.fit.fit_error, "%.2e")}});
  }
  os << grid_text(cols, fit_rows);
  os << "\nlambda = " << num(a.lambda) << ", criterion = " << num(a.criterion, "%.6f") << "\n";
  return os.str();
}

std::string fleet_table(const RunReport& r) {
  const auto& f = *r.fleet;
  const auto& sc = f.scenario;
  std::ostringstream os;
  os << header(r);

  auto by_target = [&](const Matrix& m, const char* spec) {
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
    for (std::size_t c = 0; c < sc.n_targets(); ++c) rows.push_back({sc.target_names[c], cells(m.col(c), spec)});
    return grid_text(sc.sensor_names, rows);
  };
  os << "Step 1: optimal temporal allocation (ms)\n" << by_target(f.step1.times_ms, "%.4f");
  os << "\nStep 1: detection probabilities\n" << by_target(f.step1.probabilities, "%.4f");

  const auto groups = enumerate_pseudo_sensors(sc.n_sensors());
  std::vector<std::string> glabels;
  for (auto g : groups) glabels.push_back(g.label(sc.sensor_names));
  std::vector<std::pair<std::string, std::vector<std::string>>> prow;
  for (std::size_t c = 0; c < sc.n_targets(); ++c) {
    std::vector<std::string> row;
    for (auto g : groups) row.push_back(num(f.pseudo.at(g, c), "%.3f"));
    prow.push_back({sc.target_names[c], row});
  }
  os << "\nStep 2: pseudo-sensor detection probabilities\n" << grid_text(glabels, prow);

  os << "\nStep 3: best assignment " << assignment_text(f.assignment.best, sc) << " : criterion "
     << num(f.assignment.criterion, "%.4f") << "\n";
  if (!f.ranked.empty()) {
    os << "Best candidates:\n";
    for (const auto& cand : f.ranked)
      os << "  " << num(cand.criterion, "%.4f") << "  " << assignment_text(cand.assignment, sc) << "\n";
  }

  os << "\nPlanning over T (rule 3: " << to_string(f.options.rule3) << (sc.weighted() ? ", rule 2 active" : "")
     << ")\n";
  bool first_residual = true;
  for (const auto& ev : f.timeline.events) {
    if (ev.moves.empty()) continue;
    os << "  t = " << num(ev.time_ms, "%.4f") << " ms:";
    for (const auto& [s, c] : ev.moves)
      os << " " << sc.sensor_names[s] << "->" << (c == Assignment::kIdle ? std::string("idle") : sc.target_names[static_cast<std::size_t>(c)]);
    os << "\n";
    if (first_residual && ev.time_ms > 0.0) {
      os << "  remaining step-1 durations at t = " << num(ev.time_ms, "%.4f") << " ms:\n";
      std::istringstream block(by_target(ev.remaining_ms, "%.4f"));
      for (std::string line; std::getline(block, line);) os << "    " << line << "\n";
      first_residual = false;
    }
  }
  os << "\nTimeline\n";
  for (const auto& seg : f.timeline.segments)
    os << "  " << pad_right(sc.sensor_names[seg.sensor], 4) << " " << pad_right(sc.target_names[seg.target], 4) << " "
       << num(seg.start_ms, "%.4f") << " - " << num(seg.end_ms, "%.4f") << " ms\n";

  std::vector<std::pair<std::string, std::vector<std::string>>> fin{
      {"observed (ms)", cells(f.timeline.observed_ms, "%.4f")},
      {"P_d", cells(f.timeline.final_probabilities, "%.4f")},
  };
  os << "\n" << grid_text(sc.target_names, fin);
  os << "\ncriterion = " << num(f.timeline.criterion, "%.4f") << " (initial assignment held over T: "
     << num(f.static_criterion, "%.4f") << ")\n";
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

OutputFormat parse_format(const std::string& text) {
  if (text == "table") return OutputFormat::Table;
  if (text == "csv") return OutputFormat::Csv;
  if (text == "svg") return OutputFormat::Svg;
  throw std::invalid_argument("unknown format '" + text + "' (expected table, csv or svg)");
}

std::string format_table(const RunReport& report) {
  switch (report.mode) {
    case ScenarioMode::MonoDeterministic: return mono_table(report);
    case ScenarioMode::MonoProbabilistic: return prob_table(report);
    case ScenarioMode::Fleet: return fleet_table(report);
  }
  return {};
}

std::string format_csv(const RunReport& report) {
  std::ostringstream os;
  switch (report.mode) {
    case ScenarioMode::MonoDeterministic: {
      const auto& m = *report.mono;
      os << "target,weight,tau_ms,t_ms,n,p_d\n";
      for (std::size_t i = 0; i < m.names.size(); ++i) {
        os << m.names[i] << ',' << num(m.problem.weights[i]) << ',' << num(m.problem.taus_ms[i]) << ','
           << num(m.allocation.times_ms[i]) << ',' << (m.looks ? num((*m.looks)[i]) : std::string()) << ','
           << num(m.probabilities[i]) << '\n';
      }
      break;
    }
    case ScenarioMode::MonoProbabilistic: {
      const auto& a = report.prob->allocation;
      os << "direction,weight,t_ms,m,p_d\n";
      for (std::size_t j = 0; j < a.n_directions; ++j)
        os << j + 1 << ',' << num(a.weights[j]) << ',' << num(a.times_ms[j]) << ',' << num(a.looks[j]) << ','
           << num(a.probabilities[j]) << '\n';
      break;
    }
    case ScenarioMode::Fleet: {
      const auto& f = *report.fleet;
      os << "sensor,target,start_ms,end_ms\n";
      for (const auto& s : f.timeline.segments)
        os << f.scenario.sensor_names[s.sensor] << ',' << f.scenario.target_names[s.target] << ',' << num(s.start_ms)
           << ',' << num(s.end_ms) << '\n';
      break;
    }
  }
  return os.str();
}

std::string format_fit_csv(const ProbReport& prob) {
  std::ostringstream os;
  os << "direction,mass,off_axis_rad,omega,n,gamma_s,tau_ms,fit_error\n";
  for (const auto& m : prob.allocation.models)
    os << m.direction + 1 << ',' << num(m.mass) << ',' << num(m.off_axis_rad) << ',' << num(m.fit.omega) << ','
       << num(m.fit.exponent) << ',' << num(m.gamma_s) << ',' << num(m.tau_ms) << ',' << num(m.fit.fit_error) << '\n';
  return os.str();
}

std::string format_step1_csv(const FleetReport& f) {
  std::ostringstream os;
  os << "sensor,target,tau_ms,t_ms,p_d\n";
  for (std::size_t s = 0; s < f.scenario.n_sensors(); ++s)
    for (std::size_t c = 0; c < f.scenario.n_targets(); ++c)
      os << f.scenario.sensor_names[s] << ',' << f.scenario.target_names[c] << ',' << num(f.scenario.taus_ms(s, c))
         << ',' << num(f.step1.times_ms(s, c)) << ',' << num(f.step1.probabilities(s, c)) << '\n';
  return os.str();
}

std::string format_pseudo_csv(const FleetReport& f) {
  std::ostringstream os;
  os << "group,target,p_d\n";
  for (auto g : enumerate_pseudo_sensors(f.scenario.n_sensors()))
    for (std::size_t c = 0; c < f.scenario.n_targets(); ++c)
      os << g.label(f.scenario.sensor_names) << ',' << f.scenario.target_names[c] << ',' << num(f.pseudo.at(g, c))
         << '\n';
  return os.str();
}

std::string format_svg(const FleetReport& f) {
  static constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                             "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  const auto& sc = f.scenario;
  const double left = 70.0, right = 30.0, top = 40.0, row_h = 44.0, bar_h = 30.0;
  const double width = 860.0;
  const double plot_w = width - left - right;
  const double height = top + row_h * static_cast<double>(sc.n_sensors()) + 70.0;
  const double T = sc.horizon_ms;
  auto x_of = [&](double t) { return left + plot_w * t / T; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
     << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  os << "<style>text{font-family:sans-serif;font-size:12px}</style>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(left) << "\" y=\"20\">Sensor utilisation over T = " << num(T) << " ms</text>\n";

  for (std::size_t s = 0; s < sc.n_sensors(); ++s) {
    const double y = top + row_h * static_cast<double>(s);
    os << "<text x=\"10\" y=\"" << num(y + bar_h * 0.65) << "\">" << sc.sensor_names[s] << "</text>\n";
  }
  for (const auto& seg : f.timeline.segments) {
    const double y = top + row_h * static_cast<double>(seg.sensor);
    const double x0 = x_of(seg.start_ms), x1 = x_of(seg.end_ms);
    const char* colour = kPalette[seg.target % std::size(kPalette)];
    os << "<rect x=\"" << num(x0, "%.2f") << "\" y=\"" << num(y) << "\" width=\"" << num(x1 - x0, "%.2f")
       << "\" height=\"" << num(bar_h) << "\" fill=\"" << colour << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    if (x1 - x0 > 24.0)
      os << "<text x=\"" << num(0.5 * (x0 + x1), "%.2f") << "\" y=\"" << num(y + bar_h * 0.65)
         << "\" text-anchor=\"middle\" fill=\"white\">" << sc.target_names[seg.target] << "</text>\n";
  }

  const double axis_y = top + row_h * static_cast<double>(sc.n_sensors());
  os << "<line x1=\"" << num(left) << "\" y1=\"" << num(axis_y) << "\" x2=\"" << num(left + plot_w) << "\" y2=\""
     << num(axis_y) << "\" stroke=\"black\"/>\n";
  constexpr int kTicks = 10;
  for (int k = 0; k <= kTicks; ++k) {
    const double t = T * k / kTicks;
    const double x = x_of(t);
    os << "<line x1=\"" << num(x, "%.2f") << "\" y1=\"" << num(axis_y) << "\" x2=\"" << num(x, "%.2f") << "\" y2=\""
       << num(axis_y + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x, "%.2f") << "\" y=\"" << num(axis_y + 18) << "\" text-anchor=\"middle\">"
       << num(t, "%.3g") << "</text>\n";
  }
  os << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(axis_y + 36)
     << "\" text-anchor=\"middle\">time (ms)</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> emit(const RunReport& report, OutputFormat format,
                                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const auto p = out_dir / name;
    write_file(p, text);
    written.push_back(p);
  };
  switch (format) {
    case OutputFormat::Table:
      put("report.txt", format_table(report));
      break;
    case OutputFormat::Csv:
      switch (report.mode) {
        case ScenarioMode::MonoDeterministic: put("allocation.csv", format_csv(report)); break;
        case ScenarioMode::MonoProbabilistic:
          put("directions.csv", format_csv(report));
          put("direction_fits.csv", format_fit_csv(*report.prob));
          break;
        case ScenarioMode::Fleet:
          put("timeline.csv", format_csv(report));
          put("step1.csv", format_step1_csv(*report.fleet));
          put("pseudo_sensors.csv", format_pseudo_csv(*report.fleet));
          break;
      }
      break;
    case OutputFormat::Svg:
      if (!report.fleet) throw std::invalid_argument("svg output is only available for fleet scenarios");
      put("timeline.svg", format_svg(*report.fleet));
      break;
  }
  return written;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("csv: no column '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) fields.push_back(cell);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

}  // namespace radalloc
