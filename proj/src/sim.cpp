#include "sfl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "sfl/errors.hpp"

namespace sfl {

namespace {

enum class Dir { None, Up, Down };

// Per-client event charges, fixed for the whole run.
struct ClientRates {
  int minibatch = 0;
  double fwd_e = 0, fwd_t = 0;
  double up_e = 0, up_t = 0, up_bits = 0;
  double srv_t = 0;
  double down_e = 0, down_t = 0, down_bits = 0;
  double bwd_e = 0, bwd_t = 0;
  double model_up_e = 0, model_up_t = 0, model_up_bits = 0;
  double model_down_e = 0, model_down_t = 0, model_down_bits = 0;
};

ClientRates make_rates(double alpha, const SystemParams& p) {
  ClientRates r;
  r.minibatch = p.minibatch;
  const double k = static_cast<double>(p.clients);

  // The combined forward+backward charge alpha*T*P_c is attributed 50/50 to
  // the two client compute events; only the sum is contractual.
  const double compute_item = alpha * p.full_train_time_s * p.compute_power_w;
  r.fwd_e = 0.5 * compute_item;
  r.bwd_e = 0.5 * compute_item;
  r.fwd_t = 0.5 * alpha * p.full_train_time_s;
  r.bwd_t = 0.5 * alpha * p.full_train_time_s;

  r.up_bits = p.smashed_bits;
  r.up_t = p.smashed_bits * k / p.main_uplink_bps;
  r.up_e = r.up_t * p.transmit_power_w;

  // The server trains its share in time proportional to its model fraction.
  r.srv_t = (1.0 - alpha) * p.full_train_time_s;

  r.down_bits = p.gradient_bits;
  r.down_t = p.gradient_bits * k / p.main_downlink_bps;
  r.down_e = r.down_t * p.receive_power_w;

  const double model_bits = alpha * p.bits_per_param * static_cast<double>(p.total_params);
  r.model_up_bits = model_bits;
  r.model_up_t = model_bits * k / p.fed_uplink_bps;
  r.model_up_e = r.model_up_t * p.transmit_power_w;
  r.model_down_bits = model_bits;
  r.model_down_t = model_bits * k / p.fed_downlink_bps;
  r.model_down_e = r.model_down_t * p.receive_power_w;
  return r;
}

}  // namespace

const char* to_string(SimStep step) {
  switch (step) {
    case SimStep::ClientForward: return "client_forward";
    case SimStep::SmashedUpload: return "smashed_upload";
    case SimStep::ServerForwardBackward: return "server_forward_backward";
    case SimStep::GradientDownload: return "gradient_download";
    case SimStep::ClientBackward: return "client_backward";
    case SimStep::LocalModelUpload: return "local_model_upload";
    case SimStep::FedAggregate: return "fed_aggregate";
    case SimStep::GlobalModelDownload: return "global_model_download";
  }
  return "unknown";
}

int SimConfig::client_count() const { return profiles.front().clients; }

const SystemParams& SimConfig::profile_of(int client) const {
  return profiles.size() == 1 ? profiles.front() : profiles[static_cast<std::size_t>(client)];
}

void SimConfig::validate() const {
  if (profiles.empty()) {
    throw ConfigError("sim: profile list is empty");
  }
  for (const SystemParams& p : profiles) {
    p.validate();
  }
  const SystemParams& base = profiles.front();
  if (profiles.size() > 1 && profiles.size() != static_cast<std::size_t>(base.clients)) {
    throw ConfigError("sim: per-client profiles need exactly K = " +
                      std::to_string(base.clients) + " entries, got " +
                      std::to_string(profiles.size()));
  }
  for (const SystemParams& p : profiles) {
    if (p.clients != base.clients) {
      throw ConfigError("sim: all profiles must agree on the client count K");
    }
    if (p.global_epochs != base.global_epochs || p.local_iterations != base.local_iterations) {
      throw ConfigError(
          "sim: the synchronous schedule requires equal global_epochs and local_iterations "
          "across profiles");
    }
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("sim: alpha must be in [0, 1], got " + std::to_string(alpha));
  }
  if (cut_mode == CutMode::PerBlock) {
    topo.validate_block_mode();
  } else {
    topo.validate();
  }
}

SimTrace run_simulation(const SimConfig& cfg, const EventSink& sink) {
  cfg.validate();
  const int clients = cfg.client_count();
  const SystemParams& base = cfg.profiles.front();
  const int epochs = base.global_epochs;
  const int iterations = base.local_iterations;

  SimTrace trace;
  trace.per_client_energy_j.assign(static_cast<std::size_t>(clients), 0.0);
  trace.total_rounds = epochs;
  trace.cut_index = map_alpha_to_layer(cfg.alpha, cfg.topo, cfg.cut_mode);
  if (is_degenerate_cut(trace.cut_index, cfg.topo)) {
    trace.warnings.push_back(
        "cut index " + std::to_string(trace.cut_index) +
        (trace.cut_index == 0 ? " leaves no layers on the client" : " leaves no layers on the server") +
        "; the split is degenerate");
  }

  std::vector<ClientRates> rates;
  rates.reserve(static_cast<std::size_t>(clients));
  for (int c = 0; c < clients; ++c) {
    rates.push_back(make_rates(cfg.alpha, cfg.profile_of(c)));
  }

  std::vector<double> epoch_time(static_cast<std::size_t>(clients));
  const bool keep = cfg.record_trace;
  const auto emit = [&](int epoch, int iteration, int client, SimStep step, double energy,
                        double bits, double duration, Dir dir) {
    ++trace.event_count;
    if (client >= 0) {
      trace.per_client_energy_j[static_cast<std::size_t>(client)] += energy;
      epoch_time[static_cast<std::size_t>(client)] += duration;
    }
    if (dir == Dir::Up) {
      trace.total_bits_up += bits;
    } else if (dir == Dir::Down) {
      trace.total_bits_down += bits;
    }
    if (keep || sink) {
      const SimEvent event{epoch, iteration, client, step, energy, bits, duration};
      if (keep) trace.events.push_back(event);
      if (sink) sink(event);
    }
  };

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(epoch_time.begin(), epoch_time.end(), 0.0);
    for (int iteration = 0; iteration < iterations; ++iteration) {
      for (int c = 0; c < clients; ++c) {
        const ClientRates& r = rates[static_cast<std::size_t>(c)];
        for (int item = 0; item < r.minibatch; ++item) {
          emit(epoch, iteration, c, SimStep::ClientForward, r.fwd_e, 0.0, r.fwd_t, Dir::None);
          emit(epoch, iteration, c, SimStep::SmashedUpload, r.up_e, r.up_bits, r.up_t, Dir::Up);
          emit(epoch, iteration, c, SimStep::ServerForwardBackward, 0.0, 0.0, r.srv_t, Dir::None);
          emit(epoch, iteration, c, SimStep::GradientDownload, r.down_e, r.down_bits, r.down_t,
               Dir::Down);
          emit(epoch, iteration, c, SimStep::ClientBackward, r.bwd_e, 0.0, r.bwd_t, Dir::None);
        }
      }
    }
    for (int c = 0; c < clients; ++c) {
      const ClientRates& r = rates[static_cast<std::size_t>(c)];
      emit(epoch, -1, c, SimStep::LocalModelUpload, r.model_up_e, r.model_up_bits, r.model_up_t,
           Dir::Up);
    }
    emit(epoch, -1, -1, SimStep::FedAggregate, 0.0, 0.0, 0.0, Dir::None);
    for (int c = 0; c < clients; ++c) {
      const ClientRates& r = rates[static_cast<std::size_t>(c)];
      emit(epoch, -1, c, SimStep::GlobalModelDownload, r.model_down_e, r.model_down_bits,
           r.model_down_t, Dir::Down);
    }
    // Synchronous round: every epoch lasts as long as its slowest client.
    trace.wall_latency_s += *std::max_element(epoch_time.begin(), epoch_time.end());
  }
  return trace;
}

double latency_estimate(const SimConfig& cfg) {
  cfg.validate();
  const SystemParams& base = cfg.profiles.front();
  double worst_epoch = 0.0;
  for (int c = 0; c < cfg.client_count(); ++c) {
    const SystemParams& p = cfg.profile_of(c);
    const double k = static_cast<double>(p.clients);
    const double per_item = cfg.alpha * p.full_train_time_s +
                            p.smashed_bits * k / p.main_uplink_bps +
                            p.gradient_bits * k / p.main_downlink_bps +
                            (1.0 - cfg.alpha) * p.full_train_time_s;
    const double model_bits = cfg.alpha * p.bits_per_param * static_cast<double>(p.total_params);
    const double exchange =
        model_bits * k / p.fed_uplink_bps + model_bits * k / p.fed_downlink_bps;
    const double epoch_time =
        static_cast<double>(p.local_iterations) * static_cast<double>(p.minibatch) * per_item +
        exchange;
    worst_epoch = std::max(worst_epoch, epoch_time);
  }
  return static_cast<double>(base.global_epochs) * worst_epoch;
}

void write_event_line(const SimEvent& event, std::ostream& out) {
  const nlohmann::ordered_json record{
      {"type", "event"},          {"epoch", event.epoch},
      {"iteration", event.iteration}, {"client", event.client},
      {"step", to_string(event.step)}, {"energy_j", event.energy_j},
      {"bits", event.bits_moved}, {"duration_s", event.duration_s},
  };
  out << record.dump() << '\n';
}

void write_trace_summary_line(const SimTrace& trace, std::ostream& out) {
  const nlohmann::ordered_json record{
      {"type", "summary"},
      {"schema_version", 1},
      {"rounds", trace.total_rounds},
      {"event_count", trace.event_count},
      {"cut_index", trace.cut_index},
      {"per_client_energy_j", trace.per_client_energy_j},
      {"total_bits_up", trace.total_bits_up},
      {"total_bits_down", trace.total_bits_down},
      {"wall_latency_s", trace.wall_latency_s},
      {"warnings", trace.warnings},
  };
  out << record.dump() << '\n';
}

void write_trace(const SimTrace& trace, std::ostream& out) {
  for (const SimEvent& event : trace.events) {
    write_event_line(event, out);
  }
  write_trace_summary_line(trace, out);
}

}  // namespace sfl
