#include <algorithm>
#include <random>
#include <vector>

#include <doctest.h>

#include "sfl/errors.hpp"
#include "sfl/topology.hpp"

using namespace sfl;

namespace {
const ModelTopology kTen{31'484'464, 10, 2, 5};
}

TEST_CASE("reference cut mapping") {
  CHECK(map_alpha_to_layer(0.4201, kTen) == 4);
  CHECK(map_alpha_to_layer(0.4201, kTen, CutMode::PerBlock) == 4);
  CHECK(map_alpha_to_layer(0.0, kTen) == 0);
  CHECK(map_alpha_to_layer(1.0, kTen) == 10);
  CHECK(map_alpha_to_layer(1.0, kTen, CutMode::PerBlock) == 10);
  CHECK(map_alpha_to_layer(0.973589102029469, kTen) == 9);
  // Block cuts quantize downward to whole blocks.
  CHECK(map_alpha_to_layer(0.39, kTen) == 3);
  CHECK(map_alpha_to_layer(0.39, kTen, CutMode::PerBlock) == 2);
}

TEST_CASE("layer_to_alpha inverts the mapping on every layer count") {
  for (int layers = 2; layers <= 24; ++layers) {
    ModelTopology topo{1000, layers, 1, layers};
    for (int cut = 0; cut <= layers; ++cut) {
      const double alpha = layer_to_alpha(cut, topo);
      CAPTURE(layers);
      CAPTURE(cut);
      // Exercises the quantized fractions that round below cut/layers in
      // binary floating point (e.g. 3/7).
      CHECK(map_alpha_to_layer(alpha, topo) == cut);
    }
  }
}

TEST_CASE("mapping is monotone in alpha") {
  std::mt19937_64 rng(20240814);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> alphas(1000);
  for (double& a : alphas) a = dist(rng);
  std::sort(alphas.begin(), alphas.end());
  int prev_layer = -1;
  int prev_block = -1;
  for (const double a : alphas) {
    const int per_layer = map_alpha_to_layer(a, kTen);
    const int per_block = map_alpha_to_layer(a, kTen, CutMode::PerBlock);
    CHECK(per_layer >= prev_layer);
    CHECK(per_block >= prev_block);
    CHECK(per_block % kTen.layers_per_block == 0);
    CHECK(per_block <= per_layer);
    prev_layer = per_layer;
    prev_block = per_block;
  }
}

TEST_CASE("degenerate cuts are flagged, not clamped") {
  CHECK(is_degenerate_cut(0, kTen));
  CHECK(is_degenerate_cut(10, kTen));
  CHECK_FALSE(is_degenerate_cut(4, kTen));
}

TEST_CASE("cut mode names round-trip") {
  CHECK(cut_mode_from_string("per-layer") == CutMode::PerLayer);
  CHECK(cut_mode_from_string("per-block") == CutMode::PerBlock);
  CHECK(to_string(CutMode::PerLayer) == std::string("per-layer"));
  CHECK(to_string(CutMode::PerBlock) == std::string("per-block"));
  CHECK_THROWS_AS(cut_mode_from_string("layerwise"), ConfigError);
}

TEST_CASE("domain and configuration errors") {
  CHECK_THROWS_AS(map_alpha_to_layer(-0.01, kTen), DomainError);
  CHECK_THROWS_AS(map_alpha_to_layer(1.01, kTen), DomainError);
  CHECK_THROWS_AS(layer_to_alpha(-1, kTen), DomainError);
  CHECK_THROWS_AS(layer_to_alpha(11, kTen), DomainError);

  ModelTopology flat{100, 1, 1, 1};
  CHECK_THROWS_AS(flat.validate(), ConfigError);

  ModelTopology ragged{100, 10, 3, 5};  // 3 * 5 != 10
  CHECK_NOTHROW(ragged.validate());
  CHECK_THROWS_AS(ragged.validate_block_mode(), ConfigError);
  CHECK_THROWS_AS(map_alpha_to_layer(0.5, ragged, CutMode::PerBlock), ConfigError);

  ModelTopology no_params{0, 10, 2, 5};
  CHECK_THROWS_AS(no_params.validate(), ConfigError);
}
