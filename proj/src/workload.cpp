#include "imcdse/workload.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "imcdse/errors.hpp"

namespace imcdse {

using nlohmann::json;

namespace {

LayerKind kind_from_string(const std::string& s, std::size_t index) {
  if (s == "conv") return LayerKind::Conv;
  if (s == "dwconv") return LayerKind::DepthwiseConv;
  if (s == "fc") return LayerKind::FullyConnected;
  throw ParseError("layers[" + std::to_string(index) + "].kind: unknown layer kind '" + s + "'");
}

std::int64_t read_int(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key + ": missing field");
  if (!it->is_number_integer()) throw ParseError(where + "." + key + ": expected integer");
  return it->get<std::int64_t>();
}

std::pair<std::int64_t, std::int64_t> read_pair(const json& obj, const char* key,
                                                const std::string& where, bool optional) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (optional) return {1, 1};
    throw ParseError(where + "." + key + ": missing field");
  }
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
      !(*it)[1].is_number_integer()) {
    throw ParseError(where + "." + key + ": expected [int, int]");
  }
  return {(*it)[0].get<std::int64_t>(), (*it)[1].get<std::int64_t>()};
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::DepthwiseConv: return "dwconv";
    case LayerKind::FullyConnected: return "fc";
  }
  return "?";
}

void validate_layer(const Layer& l) {
  for (auto v : {l.kernel_h, l.kernel_w, l.in_channels, l.out_channels, l.out_h, l.out_w, l.in_h,
                 l.in_w}) {
    if (v < 1) throw ValidationError("all layer dimensions must be >= 1");
  }
  if (l.kind == LayerKind::DepthwiseConv && l.in_channels != l.out_channels) {
    throw ValidationError("depthwise conv requires out_channels == in_channels");
  }
  if (l.kind == LayerKind::FullyConnected &&
      (l.kernel_h != 1 || l.kernel_w != 1 || l.out_h != 1 || l.out_w != 1 || l.in_h != 1 ||
       l.in_w != 1)) {
    throw ValidationError("fully connected layer must have unit kernel and spatial sizes");
  }
}

void validate_workload(const Workload& w) {
  if (w.name.empty() || w.name.find_first_of(",\n\r\"") != std::string::npos) {
    throw ValidationError("workload name must be non-empty and free of commas, quotes and newlines");
  }
  if (w.layers.empty()) throw ValidationError("workload '" + w.name + "' has no layers");
  if (w.weight_bits < 1 || w.activation_bits < 1) {
    throw ValidationError("workload '" + w.name + "': bit widths must be positive");
  }
  if (w.activation_bits % 8 != 0) {
    throw ValidationError("workload '" + w.name + "': activation_bits must be a multiple of 8");
  }
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    try {
      validate_layer(w.layers[i]);
    } catch (const ValidationError& e) {
      throw ValidationError("workload '" + w.name + "' layer " + std::to_string(i) + ": " +
                            e.what());
    }
  }
}

Workload parse_workload(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("workload: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("workload: top level must be an object");

  Workload w;
  auto name = doc.find("name");
  if (name == doc.end() || !name->is_string()) throw ParseError("name: expected string");
  w.name = name->get<std::string>();
  w.weight_bits = static_cast<int>(read_int(doc, "weight_bits", "workload"));
  w.activation_bits = static_cast<int>(read_int(doc, "activation_bits", "workload"));

  auto layers = doc.find("layers");
  if (layers == doc.end() || !layers->is_array()) throw ParseError("layers: expected array");
  for (std::size_t i = 0; i < layers->size(); ++i) {
    const json& jl = (*layers)[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    if (!jl.is_object()) throw ParseError(where + ": expected object");
    auto kind = jl.find("kind");
    if (kind == jl.end() || !kind->is_string()) throw ParseError(where + ".kind: expected string");

    Layer l;
    l.kind = kind_from_string(kind->get<std::string>(), i);
    const bool fc = l.kind == LayerKind::FullyConnected;
    std::tie(l.kernel_h, l.kernel_w) = read_pair(jl, "k", where, fc);
    l.in_channels = read_int(jl, "cin", where);
    l.out_channels = read_int(jl, "cout", where);
    std::tie(l.in_h, l.in_w) = read_pair(jl, "in", where, fc);
    std::tie(l.out_h, l.out_w) = read_pair(jl, "out", where, fc);
    w.layers.push_back(l);
  }
  validate_workload(w);
  return w;
}

std::string serialize_workload(const Workload& w) {
  json layers = json::array();
  for (const Layer& l : w.layers) {
    json jl = {{"kind", to_string(l.kind)}, {"cin", l.in_channels}, {"cout", l.out_channels}};
    if (l.kind != LayerKind::FullyConnected) {
      jl["k"] = {l.kernel_h, l.kernel_w};
      jl["in"] = {l.in_h, l.in_w};
      jl["out"] = {l.out_h, l.out_w};
    }
    layers.push_back(std::move(jl));
  }
  json doc = {{"name", w.name},
              {"weight_bits", w.weight_bits},
              {"activation_bits", w.activation_bits},
              {"layers", std::move(layers)}};
  return doc.dump(2);
}

Workload load_workload(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open workload file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_workload(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<Workload> load_workloads(const std::vector<std::filesystem::path>& paths) {
  std::vector<Workload> out;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) out.push_back(load_workload(f));
    } else {
      out.push_back(load_workload(p));
    }
  }
  return out;
}

StorageDemand layer_storage_demand(const Layer& l, int bits_per_cell, int weight_bits) {
  if (bits_per_cell < 1 || bits_per_cell > weight_bits) {
    throw ArgumentError("bits_per_cell must lie in [1, weight_bits]");
  }
  const std::int64_t cells_per_weight = ceil_div(weight_bits, bits_per_cell);
  switch (l.kind) {
    case LayerKind::Conv:
      return {l.kernel_h * l.kernel_w * l.in_channels, l.out_channels * cells_per_weight, 1};
    case LayerKind::DepthwiseConv:
      return {l.kernel_h * l.kernel_w, cells_per_weight, l.in_channels};
    case LayerKind::FullyConnected:
      return {l.in_channels, l.out_channels * cells_per_weight, 1};
  }
  return {};
}

std::int64_t layer_mvm_count(const Layer& l) {
  return l.kind == LayerKind::FullyConnected ? 1 : l.out_h * l.out_w;
}

ActivationBytes layer_activation_bytes(const Layer& l, int activation_bits) {
  const std::int64_t bytes_per = activation_bits / 8;
  return {l.in_h * l.in_w * l.in_channels * bytes_per,
          l.out_h * l.out_w * l.out_channels * bytes_per};
}

std::int64_t total_weight_cells(const Workload& w, int bits_per_cell) {
  std::int64_t total = 0;
  for (const Layer& l : w.layers) {
    total += layer_storage_demand(l, std::min(bits_per_cell, w.weight_bits), w.weight_bits).cells();
  }
  return total;
}

std::size_t largest_workload(const std::vector<Workload>& workloads, int bits_per_cell) {
  if (workloads.empty()) throw ArgumentError("largest_workload: empty workload list");
  std::size_t best = 0;
  std::int64_t best_cells = total_weight_cells(workloads[0], bits_per_cell);
  for (std::size_t i = 1; i < workloads.size(); ++i) {
    const std::int64_t cells = total_weight_cells(workloads[i], bits_per_cell);
    if (cells > best_cells) {
      best = i;
      best_cells = cells;
    }
  }
  return best;
}

}  // namespace imcdse
