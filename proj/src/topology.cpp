#include "sfl/topology.hpp"

#include <cmath>
#include <limits>

#include "sfl/errors.hpp"

namespace sfl {

namespace {

// floor(x) with a snap to the nearest integer when x sits within a few ulps of
// it. Quantized fractions (cut_index / total_layers) otherwise round back down
// a whole layer, e.g. fl(3/7) * 7 < 3.
int floor_snapped(double x) {
  const double nearest = std::nearbyint(x);
  if (std::abs(x - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
    x = nearest;
  }
  return static_cast<int>(std::floor(x));
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must be in [0, 1], got " + std::to_string(alpha));
  }
}

}  // namespace

const char* to_string(CutMode mode) {
  return mode == CutMode::PerLayer ? "per-layer" : "per-block";
}

CutMode cut_mode_from_string(const std::string& name) {
  if (name == "per-layer") return CutMode::PerLayer;
  if (name == "per-block") return CutMode::PerBlock;
  throw ConfigError("unknown cut mode '" + name + "' (expected per-layer or per-block)");
}

void ModelTopology::validate() const {
  if (total_params < 1) {
    throw ConfigError("topology: total_params must be >= 1");
  }
  if (total_layers < 2) {
    throw ConfigError("topology: total_layers must be >= 2 so a cut is possible");
  }
  if (layers_per_block < 1) {
    throw ConfigError("topology: layers_per_block must be >= 1");
  }
  if (blocks < 1) {
    throw ConfigError("topology: blocks must be >= 1");
  }
}

void ModelTopology::validate_block_mode() const {
  validate();
  if (blocks * layers_per_block != total_layers) {
    throw ConfigError("topology: block mode requires blocks * layers_per_block == total_layers (" +
                      std::to_string(blocks) + " * " + std::to_string(layers_per_block) +
                      " != " + std::to_string(total_layers) + ")");
  }
}

int map_alpha_to_layer(double alpha, const ModelTopology& topo, CutMode mode) {
  check_alpha(alpha);
  if (mode == CutMode::PerBlock) {
    topo.validate_block_mode();
    return floor_snapped(alpha * topo.blocks) * topo.layers_per_block;
  }
  topo.validate();
  return floor_snapped(alpha * topo.total_layers);
}

double layer_to_alpha(int cut_index, const ModelTopology& topo) {
  topo.validate();
  if (cut_index < 0 || cut_index > topo.total_layers) {
    throw DomainError("cut_index must be in [0, " + std::to_string(topo.total_layers) +
                      "], got " + std::to_string(cut_index));
  }
  return static_cast<double>(cut_index) / static_cast<double>(topo.total_layers);
}

bool is_degenerate_cut(int cut_index, const ModelTopology& topo) {
  return cut_index == 0 || cut_index == topo.total_layers;
}

}  // namespace sfl
