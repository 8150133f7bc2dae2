#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "imcdse/errors.hpp"
#include "imcdse/experiment.hpp"

namespace imcdse {

using nlohmann::json;

namespace {

constexpr const char* kConfigColumns[] = {"xbar_rows",  "xbar_cols", "c_per_tile",
                                          "t_per_router", "g_per_chip", "v_op",
                                          "bits_cell",  "t_cycle_ns", "glb_bytes"};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::string_view s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void append_config(std::string& row, const HardwareConfig& c) {
  for (double v : c.values()) {
    row += format_number(v);
    row += ',';
  }
}

// "<reason>@<workload>" for a per-workload failure, plain reason otherwise.
std::string reason_label(const Score& s, const std::vector<std::string>& names) {
  if (s.feasible) return "";
  for (std::size_t i = 0; i < s.per_workload.size() && i < names.size(); ++i) {
    if (!s.per_workload[i].feasible()) {
      return std::string(to_string(s.per_workload[i].reason)) + "@" + names[i];
    }
  }
  return std::string(to_string(s.reason));
}

json config_json(const HardwareConfig& c) {
  return {{"xbar_rows", c.xbar_rows},       {"xbar_cols", c.xbar_cols},
          {"c_per_tile", c.c_per_tile},     {"t_per_router", c.t_per_router},
          {"g_per_chip", c.g_per_chip},     {"v_op", c.v_op},
          {"bits_cell", c.bits_cell},       {"t_cycle_ns", c.t_cycle_ns},
          {"glb_kib", static_cast<double>(c.glb_bytes) / 1024.0}};
}

HardwareConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("config: expected an object");
  std::array<double, kNumParams> v{};
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const std::string key(param_key(static_cast<Param>(p)));
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw ParseError("config: missing numeric field '" + key + "'");
    v[p] = it->get<double>();
  }
  v[static_cast<std::size_t>(Param::Glb)] *= 1024.0;
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (std::size_t p = 0; p < kNumParams; ++p) known |= key == param_key(static_cast<Param>(p));
    if (!known) throw ParseError("config: unknown field '" + key + "'");
  }
  return HardwareConfig::from_values(v);
}

json params_json(const GaParams& p) {
  return {{"population_size", p.population_size}, {"generations", p.generations},
          {"crossover_prob", p.crossover_prob},   {"eta_crossover", p.eta_crossover},
          {"eta_mutation", p.eta_mutation},       {"mutation_prob", p.mutation_prob},
          {"tournament_size", p.tournament_size}, {"seed", p.seed}};
}

json run_json(const RunReport& r, bool include_wall_clock) {
  const std::string space = serialize_space(r.space);
  const std::string constants = serialize_constants(r.constants);

  std::size_t feasible = 0;
  for (const auto& ind : r.history.records) feasible += ind.score.feasible ? 1 : 0;
  json conv = json::array();
  for (double v : convergence(r.history)) conv.push_back(number_or_null(v));
  std::size_t distinct = top_k(r.history, r.history.records.size()).size();

  json top = json::array();
  for (std::size_t i = 0; i < r.top.size(); ++i) {
    const Individual& ind = r.top[i];
    json metrics = json::object();
    for (std::size_t w = 0; w < r.workload_names.size(); ++w) {
      const Evaluation& e = ind.score.per_workload.at(w);
      metrics[r.workload_names[w]] =
          e.feasible() ? json{{"energy_j", e.metrics->energy}, {"latency_s", e.metrics->latency}}
                       : json{{"infeasible", to_string(e.reason)}};
    }
    top.push_back({{"rank", i + 1},
                   {"generation", ind.generation_born},
                   {"config", config_json(ind.config)},
                   {"area_mm2", estimate_area(ind.config, r.constants)},
                   {"score", number_or_null(ind.score.value)},
                   {"feasible", ind.score.feasible},
                   {"reason", reason_label(ind.score, r.workload_names)},
                   {"metrics", std::move(metrics)}});
  }

  json out = {
      {"label", r.label},
      {"workloads", r.workload_names},
      {"seed", r.params.seed},
      {"init_seed", r.init_seed},
      {"shared_init", r.shared_init},
      {"params", params_json(r.params)},
      {"objective",
       {{"form", to_string(r.objective.form)},
        {"area_constraint_mm2",
         r.objective.area_constraint ? json(*r.objective.area_constraint) : json(nullptr)}}},
      {"space", json::parse(space)},
      {"space_digest", hex_digest(space)},
      {"constants", json::parse(constants)},
      {"constants_digest", hex_digest(constants)},
      {"history",
       {{"evaluations", r.history.records.size()},
        {"distinct_configs", distinct},
        {"feasible", feasible},
        {"convergence", std::move(conv)}}},
      {"top", std::move(top)},
  };
  if (include_wall_clock) out["wall_seconds"] = r.wall_seconds;
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(std::string_view s) {
  const std::string str(s);
  if (str == "inf") return kInfeasibleScore;
  if (str == "-inf") return -kInfeasibleScore;
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (str.empty() || end != str.c_str() + str.size()) {
    throw ParseError("expected a number, got '" + str + "'");
  }
  return v;
}

std::string serialize_config(const HardwareConfig& c) { return config_json(c).dump(); }

HardwareConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

std::string report_to_json(const std::vector<RunReport>& reports, bool include_wall_clock) {
  json runs = json::array();
  for (const auto& r : reports) runs.push_back(run_json(r, include_wall_clock));
  json doc = {{"generator", std::string(Rng::kAlgorithm)}, {"runs", std::move(runs)}};
  return doc.dump(2) + "\n";
}

std::vector<CrossEvalRow> designs_from_topk_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("topk: invalid JSON: ") + e.what());
  }
  auto runs = doc.find("runs");
  if (runs == doc.end() || !runs->is_array()) throw ParseError("topk: missing 'runs' array");
  std::vector<CrossEvalRow> rows;
  for (const auto& run : *runs) {
    const std::string label = run.value("label", std::string("?"));
    auto top = run.find("top");
    if (top == run.end() || !top->is_array()) throw ParseError("topk: run '" + label + "' has no 'top'");
    for (const auto& entry : *top) {
      CrossEvalRow row;
      row.source = label;
      row.config = config_from_json(entry.at("config"));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string history_csv(const std::vector<RunReport>& reports) {
  std::vector<std::string> names;
  for (const auto& r : reports) {
    for (const auto& n : r.workload_names) {
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
  }

  std::string out = "run,generation,index";
  for (const char* c : kConfigColumns) out += std::string(",") + c;
  for (const auto& n : names) out += ",E_" + n + ",L_" + n;
  out += ",area,score,feasible,reason\n";

  for (const auto& r : reports) {
    const std::size_t P = r.history.population_size;
    for (std::size_t i = 0; i < r.history.records.size(); ++i) {
      const Individual& ind = r.history.records[i];
      std::string row = r.label + "," + std::to_string(ind.generation_born) + "," +
                        std::to_string(P ? i % P : i) + ",";
      append_config(row, ind.config);
      for (const auto& n : names) {
        auto it = std::find(r.workload_names.begin(), r.workload_names.end(), n);
        if (it == r.workload_names.end()) {
          row += ",,";
          continue;
        }
        const Evaluation& e = ind.score.per_workload.at(it - r.workload_names.begin());
        if (e.feasible()) {
          row += format_number(e.metrics->energy) + "," + format_number(e.metrics->latency) + ",";
        } else {
          row += "infeasible,infeasible,";
        }
      }
      row += format_number(estimate_area(ind.config, r.constants)) + "," +
             format_number(ind.score.value) + "," + (ind.score.feasible ? "1" : "0") + "," +
             reason_label(ind.score, r.workload_names) + "\n";
      out += row;
    }
  }
  return out;
}

std::vector<HistoryRow> parse_history_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("history.csv: empty file");
  const auto header = split(lines[0], ',');
  const std::size_t fixed = 3 + kNumParams;
  if (header.size() < fixed + 4 || header[0] != "run") throw ParseError("history.csv: bad header");
  std::vector<std::string> names;
  for (std::size_t i = fixed; i + 4 < header.size(); i += 2) {
    if (header[i].rfind("E_", 0) != 0) throw ParseError("history.csv: bad workload column " + header[i]);
    names.push_back(header[i].substr(2));
  }

  std::vector<HistoryRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li], ',');
    if (f.size() != header.size()) {
      throw ParseError("history.csv line " + std::to_string(li + 1) + ": wrong field count");
    }
    HistoryRow row;
    row.run = f[0];
    row.generation = std::stoul(f[1]);
    row.index = std::stoul(f[2]);
    std::array<double, kNumParams> v{};
    for (std::size_t p = 0; p < kNumParams; ++p) v[p] = parse_number(f[3 + p]);
    row.config = HardwareConfig::from_values(v);
    for (std::size_t w = 0; w < names.size(); ++w) {
      const std::string& e = f[fixed + 2 * w];
      const std::string& l = f[fixed + 2 * w + 1];
      if (e.empty()) continue;
      if (e == "infeasible") {
        row.per_workload.emplace_back(names[w], std::nullopt);
      } else {
        row.per_workload.emplace_back(names[w], Metrics{parse_number(e), parse_number(l), 0.0});
      }
    }
    const std::size_t tail = header.size() - 4;
    row.area = parse_number(f[tail]);
    for (auto& [_, m] : row.per_workload) {
      if (m) m->area = row.area;
    }
    row.score = parse_number(f[tail + 1]);
    row.feasible = f[tail + 2] == "1";
    row.reason = f[tail + 3];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string crosseval_csv(const std::vector<CrossEvalTable>& tables) {
  std::vector<std::string> names;
  for (const auto& t : tables) {
    for (const auto& n : t.workload_names) {
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
  }
  std::string out = "table,design,source";
  for (const char* c : kConfigColumns) out += std::string(",") + c;
  for (const auto& n : names) out += ",E_" + n + ",L_" + n + ",status_" + n;
  out += ",area,recalculated_score,failed\n";
  for (const auto& t : tables) {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const CrossEvalRow& r = t.rows[i];
      std::string row = t.label + "," + std::to_string(i) + "," + r.source + ",";
      append_config(row, r.config);
      bool failed = false;
      for (const auto& n : names) {
        auto it = std::find(t.workload_names.begin(), t.workload_names.end(), n);
        if (it == t.workload_names.end()) {
          row += ",,,";
          continue;
        }
        const Evaluation& e = r.cells.at(it - t.workload_names.begin());
        if (e.feasible()) {
          row += format_number(e.metrics->energy) + "," + format_number(e.metrics->latency) + ",ok,";
        } else {
          failed = true;
          row += ",," + std::string(to_string(e.reason)) + ",";
        }
      }
      row += format_number(r.area) + "," + format_number(r.recalculated.value) + "," +
             (failed ? "1" : "0") + "\n";
      out += row;
    }
  }
  return out;
}

std::string oracle_csv(const OracleResult& oracle, const std::vector<Workload>& workloads) {
  std::vector<std::string> names;
  for (const auto& w : workloads) names.push_back(w.name);
  std::string out;
  for (const char* c : kConfigColumns) out += std::string(c) + ",";
  out += "score,feasible,reason\n";
  for (const auto& [config, score] : oracle.dump) {
    std::string row;
    append_config(row, config);
    row += format_number(score.value) + "," + (score.feasible ? "1" : "0") + "," +
           reason_label(score, names) + "\n";
    out += row;
  }
  return out;
}

std::vector<ConvergenceSeries> convergence_from_history(const std::vector<HistoryRow>& rows) {
  std::vector<ConvergenceSeries> series;
  std::map<std::string, std::size_t> index;
  for (const HistoryRow& r : rows) {
    auto [it, inserted] = index.try_emplace(r.run, series.size());
    if (inserted) series.push_back({r.run, {}});
    auto& best = series[it->second].best;
    if (best.size() <= r.generation) best.resize(r.generation + 1, kInfeasibleScore);
    best[r.generation] = std::min(best[r.generation], r.score);
  }
  for (auto& s : series) {
    for (std::size_t g = 1; g < s.best.size(); ++g) s.best[g] = std::min(s.best[g], s.best[g - 1]);
  }
  return series;
}

std::string convergence_svg(const std::vector<ConvergenceSeries>& series) {
  constexpr double kW = 800, kH = 480, kLeft = 80, kRight = 220, kTop = 30, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  std::size_t max_gen = 1;
  double lo = kInfeasibleScore, hi = -kInfeasibleScore;
  for (const auto& s : series) {
    max_gen = std::max(max_gen, s.best.size() > 0 ? s.best.size() - 1 : 0);
    for (double v : s.best) {
      if (std::isfinite(v) && v > 0) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
    }
  }
  if (!(lo <= hi)) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  auto x_of = [&](std::size_t g) { return kLeft + plot_w * static_cast<double>(g) / static_cast<double>(max_gen); };
  auto y_of = [&](double v) { return kTop + plot_h * (hi - std::log10(v)) / (hi - lo); };

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
     << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (std::size_t g = 0; g <= max_gen; ++g) {
    os << "<text x=\"" << x_of(g) << "\" y=\"" << kTop + plot_h + 16
       << "\" text-anchor=\"middle\">" << g << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double e = lo + (hi - lo) * i / 4.0;
    char label[32];
    std::snprintf(label, sizeof label, "1e%.2f", e);
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << y_of(std::pow(10.0, e)) + 4
       << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 10
     << "\" text-anchor=\"middle\">generation</text>\n";
  os << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 16 "
     << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">best score (log10)</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % std::size(kColors)];
    // Generations before the first feasible design have no finite score.
    os << "<polyline data-run=\"" << s.label << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t g = 0; g < s.best.size(); ++g) {
      if (!std::isfinite(s.best[g]) || s.best[g] <= 0) continue;
      os << (first ? "" : " ") << x_of(g) << "," << y_of(s.best[g]);
      first = false;
    }
    os << "\"/>\n";
    os << "<text x=\"" << kLeft + plot_w + 12 << "\" y=\"" << kTop + 16 * (i + 1) << "\" fill=\""
       << color << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit_reports(const std::vector<RunReport>& reports, const std::vector<CrossEvalTable>& tables,
                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  write_text_file(out_dir / "history.csv", history_csv(reports));
  write_text_file(out_dir / "topk.json", report_to_json(reports));
  write_text_file(out_dir / "crosseval.csv", crosseval_csv(tables));
  std::vector<ConvergenceSeries> series;
  for (const auto& r : reports) series.push_back({r.label, convergence(r.history)});
  write_text_file(out_dir / "convergence.svg", convergence_svg(series));
}

}  // namespace imcdse
