#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace imcdse {

enum class LayerKind { Conv, DepthwiseConv, FullyConnected };

std::string_view to_string(LayerKind kind);

/// Shape of one MVM-bearing CNN layer. Spatial sizes count output/input
/// positions; pooling, activations and normalization are not represented.
struct Layer {
  LayerKind kind = LayerKind::Conv;
  std::int64_t kernel_h = 1;
  std::int64_t kernel_w = 1;
  std::int64_t in_channels = 1;
  std::int64_t out_channels = 1;
  std::int64_t out_h = 1;
  std::int64_t out_w = 1;
  std::int64_t in_h = 1;
  std::int64_t in_w = 1;

  bool operator==(const Layer&) const = default;
};

struct Workload {
  std::string name;
  std::vector<Layer> layers;
  int weight_bits = 8;
  int activation_bits = 8;

  bool operator==(const Workload&) const = default;
};

/// Crossbar footprint of a layer's weights under the weight-stationary
/// mapping: one rows_req x cols_req logical matrix, repeated `replicas` times.
struct StorageDemand {
  std::int64_t rows_req = 0;
  std::int64_t cols_req = 0;
  std::int64_t replicas = 0;

  std::int64_t cells() const { return rows_req * cols_req * replicas; }
  bool operator==(const StorageDemand&) const = default;
};

struct ActivationBytes {
  std::int64_t input_bytes = 0;
  std::int64_t output_bytes = 0;

  std::int64_t total() const { return input_bytes + output_bytes; }
  bool operator==(const ActivationBytes&) const = default;
};

/// Throws ValidationError if a layer breaks its kind's shape rules.
void validate_layer(const Layer& layer);
/// Validates every layer; the error message names the failing layer index.
void validate_workload(const Workload& w);

Workload parse_workload(std::string_view json_text);
Workload load_workload(const std::filesystem::path& path);
std::string serialize_workload(const Workload& w);

/// Loads each file, or every *.json inside each directory (sorted by name).
std::vector<Workload> load_workloads(const std::vector<std::filesystem::path>& paths);

StorageDemand layer_storage_demand(const Layer& layer, int bits_per_cell, int weight_bits);
std::int64_t layer_mvm_count(const Layer& layer);
ActivationBytes layer_activation_bytes(const Layer& layer, int activation_bits);

/// Sum of rows_req * cols_req * replicas over all layers.
std::int64_t total_weight_cells(const Workload& w, int bits_per_cell);

/// Index of the workload with the largest total weight-cell demand at the
/// given cell precision; ties resolve to the earliest entry.
std::size_t largest_workload(const std::vector<Workload>& workloads, int bits_per_cell);

}  // namespace imcdse
