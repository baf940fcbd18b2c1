#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfl/energy.hpp"
#include "sfl/privacy.hpp"
#include "sfl/topology.hpp"

namespace sfl {

enum class OutputFormat { Csv, Json };

const char* to_string(OutputFormat format);
OutputFormat output_format_from_string(const std::string& name);

struct SweepRange {
  double start = 0.0;
  double end = 1.0;
  double step = 0.1;

  void validate() const;
  /// start, start+step, ... while <= end (never empty once validated).
  std::vector<double> points() const;
};

/// Fully-resolved run configuration. Precedence: flags > config file > defaults.
struct RunConfig {
  std::vector<SystemParams> profiles;  // size 1 = homogeneous, else one per client
  ModelTopology topo;
  CutMode cut_mode = CutMode::PerLayer;
  RsModel rs;
  std::string rs_source = "builtin:fmnist-ssim";
  std::optional<double> alpha;
  std::optional<double> e_req_j;
  std::optional<SweepRange> sweep;
  double grid_step = 1e-4;
  std::optional<std::string> out_path;  // data-file destination; unset = stdout
  OutputFormat out_format = OutputFormat::Csv;
  /// Where each resolved value came from: "default", "file" or "flag".
  std::map<std::string, std::string> provenance;

  const SystemParams& base_params() const { return profiles.front(); }
  bool heterogeneous() const { return profiles.size() > 1; }
};

/// Per-field overrides collected from command-line flags.
struct ConfigOverrides {
  std::optional<int> clients, global_epochs, local_iterations, minibatch;
  std::optional<double> smashed_bits, gradient_bits, bits_per_param;
  std::optional<long long> total_params;
  std::optional<double> full_train_time_s;
  std::optional<double> fed_uplink_bps, fed_downlink_bps;
  std::optional<double> main_uplink_bps, main_downlink_bps;
  std::optional<double> compute_power_w, transmit_power_w, receive_power_w;
  std::optional<int> total_layers, layers_per_block, blocks;
  std::optional<std::string> cut_mode;
  std::optional<std::string> rs_model_name;      // builtin model name
  std::optional<std::vector<double>> rs_coeffs;  // a2, a1, a0
  std::optional<std::string> rs_fit_path;        // fit from a samples file
  std::optional<std::string> rs_model_file;      // load a previously fitted model
  std::optional<double> alpha, e_req_j, grid_step;
  std::optional<double> sweep_start, sweep_end, sweep_step;
  std::optional<std::string> out_path, out_format;
};

/// Built-in defaults: the reference parameter set plus the ten-layer,
/// five-block topology and the "fmnist-ssim" RS model.
RunConfig default_config();

/// Loads the optional JSON config file, then applies flag overrides.
RunConfig resolve_config(const std::optional<std::string>& config_path,
                         const ConfigOverrides& overrides);

/// JSON document of the effective configuration, re-loadable through
/// resolve_config and carrying per-key provenance.
std::string effective_config_text(const RunConfig& config);

/// Fitted-model files written by `fit` and consumed via --rs-model-file.
void write_rs_model_file(const RsModel& model, std::size_t sample_count,
                         const std::string& path);
RsModel load_rs_model_file(const std::string& path);

}  // namespace sfl
