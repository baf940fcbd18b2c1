#pragma once

#include <cstdint>
#include <string>

namespace sfl {

enum class CutMode { PerLayer, PerBlock };

const char* to_string(CutMode mode);
CutMode cut_mode_from_string(const std::string& name);

/// Layer structure of the full model. The continuous cut fraction alpha maps
/// onto a discrete cut index, defined as the number of layers kept on the
/// client side (0 = everything on the server, total_layers = everything on
/// the client).
struct ModelTopology {
  std::int64_t total_params = 1;
  int total_layers = 2;
  int layers_per_block = 1;
  int blocks = 2;

  void validate() const;
  /// Block-wise cuts additionally require blocks * layers_per_block == total_layers.
  void validate_block_mode() const;
};

/// floor(alpha * total_layers), or floor(alpha * blocks) * layers_per_block in
/// block mode. Result is in [0, total_layers].
int map_alpha_to_layer(double alpha, const ModelTopology& topo,
                       CutMode mode = CutMode::PerLayer);

/// Inverse of the per-layer mapping up to floor quantization: cut_index / total_layers.
double layer_to_alpha(int cut_index, const ModelTopology& topo);

/// True when the cut leaves one side with zero layers. Callers warn on these,
/// they are never clamped away.
bool is_degenerate_cut(int cut_index, const ModelTopology& topo);

}  // namespace sfl
