#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfl/energy.hpp"
#include "sfl/topology.hpp"

namespace sfl {

/// Protocol steps of one training round, in schedule order. Messages carry
/// sizes only; no model weights or data flow through the simulator.
enum class SimStep {
  ClientForward,
  SmashedUpload,
  ServerForwardBackward,
  GradientDownload,
  ClientBackward,
  LocalModelUpload,
  FedAggregate,
  GlobalModelDownload,
};

const char* to_string(SimStep step);

struct SimEvent {
  int epoch = 0;
  int iteration = -1;  // -1 for epoch-level events
  int client = -1;     // -1 for global server events (FedAggregate)
  SimStep step = SimStep::ClientForward;
  double energy_j = 0.0;    // charged to the client; server steps charge 0
  double bits_moved = 0.0;
  double duration_s = 0.0;
};

struct SimConfig {
  std::vector<SystemParams> profiles;  // one shared profile, or one per client
  double alpha = 0.0;
  ModelTopology topo;
  CutMode cut_mode = CutMode::PerLayer;
  bool record_trace = false;

  void validate() const;
  int client_count() const;
  const SystemParams& profile_of(int client) const;
};

struct SimTrace {
  std::vector<SimEvent> events;  // populated only when record_trace is set
  std::vector<double> per_client_energy_j;
  std::int64_t total_rounds = 0;
  std::int64_t event_count = 0;  // counted even when events are not stored
  double total_bits_up = 0.0;
  double total_bits_down = 0.0;
  double wall_latency_s = 0.0;
  int cut_index = -1;
  std::vector<std::string> warnings;
};

using EventSink = std::function<void(const SimEvent&)>;

/// Executes the nine-step workflow for g_e epochs and returns the energy
/// ledger. Deterministic: identical configs yield identical traces. An
/// optional sink receives every event as it is produced, which keeps memory
/// flat when streaming large traces to disk.
SimTrace run_simulation(const SimConfig& cfg, const EventSink& sink = {});

/// Synchronous-round wall-clock estimate: per epoch, the slowest client's path
/// (compute + transfers, with the server training its share in (1-alpha)*T per
/// item), summed over epochs. An estimate, not a measured quantity.
double latency_estimate(const SimConfig& cfg);

/// Line-delimited trace export: one event record per line, then one summary
/// record. Field order is stable; output is byte-reproducible.
void write_event_line(const SimEvent& event, std::ostream& out);
void write_trace_summary_line(const SimTrace& trace, std::ostream& out);
void write_trace(const SimTrace& trace, std::ostream& out);

}  // namespace sfl
