#include "sfl/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfl/config.hpp"
#include "sfl/energy.hpp"
#include "sfl/errors.hpp"
#include "sfl/numfmt.hpp"
#include "sfl/optimizer.hpp"
#include "sfl/privacy.hpp"
#include "sfl/sim.hpp"
#include "sfl/topology.hpp"

namespace sfl {
namespace {

using nlohmann::ordered_json;

struct CliState {
  std::optional<std::string> config_path;
  ConfigOverrides overrides;
  std::vector<double> rs_coeffs;  // bound by CLI11, moved into overrides after parse
  bool emit_config = false;
  std::optional<std::string> trace_path;
  std::string samples_path;
};

void add_config_flags(CLI::App* cmd, CliState& s) {
  cmd->add_option("--config", s.config_path, "JSON configuration file");
  cmd->add_flag("--emit-config", s.emit_config,
                "Print the fully-resolved configuration as JSON and exit");

  ConfigOverrides& o = s.overrides;
  cmd->add_option("--clients", o.clients, "Number of clients K");
  cmd->add_option("--global-epochs", o.global_epochs, "Synchronization rounds g_e");
  cmd->add_option("--local-iterations", o.local_iterations, "Local steps per epoch l_e");
  cmd->add_option("--minibatch", o.minibatch, "Data items per local iteration D_b");
  cmd->add_option("--smashed-bits", o.smashed_bits, "Activation upload size per item, bits");
  cmd->add_option("--gradient-bits", o.gradient_bits, "Gradient download size per item, bits");
  cmd->add_option("--bits-per-param", o.bits_per_param, "Serialized size of one parameter, bits");
  cmd->add_option("--total-params", o.total_params, "Full model parameter count |W|");
  cmd->add_option("--full-train-time", o.full_train_time_s,
                  "Per-item forward+backward time on the full model, seconds");
  cmd->add_option("--fed-uplink", o.fed_uplink_bps, "Fed-server uplink rate, bit/s");
  cmd->add_option("--fed-downlink", o.fed_downlink_bps, "Fed-server downlink rate, bit/s");
  cmd->add_option("--main-uplink", o.main_uplink_bps, "Main-server uplink rate, bit/s");
  cmd->add_option("--main-downlink", o.main_downlink_bps, "Main-server downlink rate, bit/s");
  cmd->add_option("--compute-power", o.compute_power_w, "Client compute power, watts");
  cmd->add_option("--transmit-power", o.transmit_power_w, "Client transmit power, watts");
  cmd->add_option("--receive-power", o.receive_power_w, "Client receive power, watts");

  cmd->add_option("--total-layers", o.total_layers, "Layer count of the full model");
  cmd->add_option("--layers-per-block", o.layers_per_block, "Layers per block (block cuts)");
  cmd->add_option("--blocks", o.blocks, "Block count (block cuts)");
  cmd->add_option("--cut-mode", o.cut_mode, "Cut granularity: per-layer or per-block");

  cmd->add_option("--rs-model", o.rs_model_name, "Builtin RS model name (fmnist-ssim)");
  cmd->add_option("--rs-coeffs", s.rs_coeffs, "RS quadratic coefficients a2 a1 a0")
      ->expected(3);
  cmd->add_option("--rs-fit", o.rs_fit_path, "Fit the RS model from an alpha,ssim sample file");
  cmd->add_option("--rs-model-file", o.rs_model_file, "Load a fitted RS model file");
}

void add_output_flags(CLI::App* cmd, CliState& s) {
  cmd->add_option("--out", s.overrides.out_path, "Data file destination (default: stdout)");
  cmd->add_option("--format", s.overrides.out_format, "Data file format: csv or json");
}

RunConfig resolve(CliState& s) {
  if (!s.rs_coeffs.empty()) s.overrides.rs_coeffs = s.rs_coeffs;
  return resolve_config(s.config_path, s.overrides);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

/// Report line: aligned "key = value".
void report_line(std::ostream& out, const std::string& key, const std::string& value) {
  out << key;
  for (std::size_t i = key.size(); i < 22; ++i) out << ' ';
  out << " = " << value << "\n";
}

void report_line(std::ostream& out, const std::string& key, double value) {
  report_line(out, key, fmt_sig6(value));
}

/// Runs `write` against --out (binary, so bytes are platform-stable) or stdout.
void with_output(const std::optional<std::string>& path,
                 const std::function<void(std::ostream&)>& write) {
  if (!path) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw ConfigError(*path + ": cannot open for writing");
  write(out);
  out.flush();
  if (!out) throw ConfigError(*path + ": write failed");
}

double require_alpha(const RunConfig& cfg, const char* cmd) {
  if (!cfg.alpha)
    throw ConfigError(std::string(cmd) + " needs an alpha (--alpha or config key)");
  return *cfg.alpha;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const RunConfig& cfg) {
  const double alpha = require_alpha(cfg, "eval");
  const int cut = map_alpha_to_layer(alpha, cfg.topo, cfg.cut_mode);
  print_warnings(rs_model_warnings(cfg.rs));
  if (is_degenerate_cut(cut, cfg.topo))
    std::cerr << "warning: cut index " << cut << " leaves one side with zero layers\n";

  // Across-profile averages; the per-profile totals are reported individually.
  EnergyBreakdown avg;
  std::vector<double> per_profile;
  for (const SystemParams& p : cfg.profiles) {
    const EnergyBreakdown b = total_energy(alpha, p);
    per_profile.push_back(b.total);
    avg.e_main_per_item += b.e_main_per_item;
    avg.e_fed_per_epoch += b.e_fed_per_epoch;
    avg.total += b.total;
    avg.terms.client_compute += b.terms.client_compute;
    avg.terms.smashed_tx += b.terms.smashed_tx;
    avg.terms.gradient_rx += b.terms.gradient_rx;
    avg.terms.model_tx += b.terms.model_tx;
    avg.terms.model_rx += b.terms.model_rx;
  }
  const auto n = static_cast<double>(cfg.profiles.size());
  avg.e_main_per_item /= n;
  avg.e_fed_per_epoch /= n;
  avg.total /= n;
  avg.terms.client_compute /= n;
  avg.terms.smashed_tx /= n;
  avg.terms.gradient_rx /= n;
  avg.terms.model_tx /= n;
  avg.terms.model_rx /= n;

  std::ostream& out = std::cout;
  report_line(out, "alpha", alpha);
  report_line(out, "cut_index", std::to_string(cut) + " of " +
                                    std::to_string(cfg.topo.total_layers) + " (" +
                                    to_string(cfg.cut_mode) + ")");
  report_line(out, "rs", rs_eval(cfg.rs, alpha));
  report_line(out, "rs_model", cfg.rs_source);
  report_line(out, "e_main_per_item_j", avg.e_main_per_item);
  report_line(out, "e_fed_per_epoch_j", avg.e_fed_per_epoch);
  report_line(out, "e_total_j", avg.total);
  report_line(out, "  client_compute_j", avg.terms.client_compute);
  report_line(out, "  smashed_tx_j", avg.terms.smashed_tx);
  report_line(out, "  gradient_rx_j", avg.terms.gradient_rx);
  report_line(out, "  model_tx_j", avg.terms.model_tx);
  report_line(out, "  model_rx_j", avg.terms.model_rx);
  if (cfg.heterogeneous()) {
    for (std::size_t i = 0; i < per_profile.size(); ++i)
      report_line(out, "profile[" + std::to_string(i) + "].e_total_j", per_profile[i]);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  double alpha = 0.0;
  int cut_index = 0;
  double e_main_total_j = 0.0;
  double e_fed_total_j = 0.0;
  double e_total_j = 0.0;
  double rs = 0.0;
};

SweepRow sweep_row(const RunConfig& cfg, double alpha) {
  SweepRow row;
  row.alpha = alpha;
  row.cut_index = map_alpha_to_layer(alpha, cfg.topo, cfg.cut_mode);
  for (const SystemParams& p : cfg.profiles) {
    const EnergyBreakdown b = total_energy(alpha, p);
    const double items = static_cast<double>(p.local_iterations) * p.minibatch;
    row.e_main_total_j += p.global_epochs * items * b.e_main_per_item;
    row.e_fed_total_j += p.global_epochs * b.e_fed_per_epoch;
    row.e_total_j += b.total;
  }
  const auto n = static_cast<double>(cfg.profiles.size());
  row.e_main_total_j /= n;
  row.e_fed_total_j /= n;
  row.e_total_j /= n;
  row.rs = rs_eval(cfg.rs, alpha);
  return row;
}

/// Rows are computed concurrently but stored by index, so the output is
/// always sorted by alpha no matter which worker finishes first.
std::vector<SweepRow> compute_sweep(const RunConfig& cfg, const std::vector<double>& points) {
  std::vector<SweepRow> rows(points.size());
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::once_flag error_once;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
        try {
          rows[i] = sweep_row(cfg, points[i]);
        } catch (...) {
          std::call_once(error_once, [&] { first_error = std::current_exception(); });
          return;
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "alpha,cut_index,e_main_total_j,e_fed_total_j,e_total_j,rs\n";
  for (const SweepRow& r : rows) {
    out << fmt_full(r.alpha) << ',' << r.cut_index << ',' << fmt_full(r.e_main_total_j) << ','
        << fmt_full(r.e_fed_total_j) << ',' << fmt_full(r.e_total_j) << ',' << fmt_full(r.rs)
        << '\n';
  }
}

void write_sweep_json(const std::vector<SweepRow>& rows, std::ostream& out) {
  ordered_json j;
  j["schema_version"] = 1;
  j["type"] = "sweep";
  ordered_json arr = ordered_json::array();
  for (const SweepRow& r : rows) {
    ordered_json row;
    row["alpha"] = r.alpha;
    row["cut_index"] = r.cut_index;
    row["e_main_total_j"] = r.e_main_total_j;
    row["e_fed_total_j"] = r.e_fed_total_j;
    row["e_total_j"] = r.e_total_j;
    row["rs"] = r.rs;
    arr.push_back(std::move(row));
  }
  j["rows"] = std::move(arr);
  out << j.dump(2) << '\n';
}

int cmd_sweep(const RunConfig& cfg) {
  print_warnings(rs_model_warnings(cfg.rs));
  const SweepRange range = cfg.sweep.value_or(SweepRange{});
  const std::vector<double> points = range.points();
  const std::vector<SweepRow> rows = compute_sweep(cfg, points);
  with_output(cfg.out_path, [&](std::ostream& out) {
    if (cfg.out_format == OutputFormat::Csv)
      write_sweep_csv(rows, out);
    else
      write_sweep_json(rows, out);
  });
  if (cfg.out_path)
    std::cout << "wrote " << rows.size() << " rows to " << *cfg.out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// optimize

void write_optimize_csv(const OptimizationResult& r, double e_req_j, std::ostream& out) {
  out << "alpha_star,cut_index,rs_at_star,energy_at_star_j,e_req_j,binding,"
         "feasible_alpha_max,method\n";
  out << fmt_full(r.alpha_star) << ',' << r.cut_index << ',' << fmt_full(r.rs_at_star) << ','
      << fmt_full(r.energy_at_star_j) << ',' << fmt_full(e_req_j) << ','
      << (r.binding ? "true" : "false") << ',' << fmt_full(r.feasible_alpha_max) << ','
      << to_string(r.method) << '\n';
}

void write_optimize_json(const OptimizationResult& r, double e_req_j, std::ostream& out) {
  ordered_json j;
  j["schema_version"] = 1;
  j["type"] = "optimize";
  j["alpha_star"] = r.alpha_star;
  j["cut_index"] = r.cut_index;
  j["rs_at_star"] = r.rs_at_star;
  j["energy_at_star_j"] = r.energy_at_star_j;
  j["e_req_j"] = e_req_j;
  j["binding"] = r.binding;
  j["feasible_alpha_max"] = r.feasible_alpha_max;
  j["method"] = to_string(r.method);
  if (!r.per_profile_energy_j.empty()) j["per_profile_energy_j"] = r.per_profile_energy_j;
  out << j.dump(2) << '\n';
}

int cmd_optimize(const RunConfig& cfg) {
  if (!cfg.e_req_j)
    throw ConfigError("optimize needs an energy budget (--e-req or config key e_req_j)");
  OptimizationProblem problem;
  problem.rs = cfg.rs;
  problem.profiles = cfg.profiles;
  problem.e_req_j = *cfg.e_req_j;
  problem.grid_step = cfg.grid_step;
  const OptimizationResult result = solve(problem, cfg.topo, cfg.cut_mode);
  print_warnings(result.warnings);

  std::ostream& out = std::cout;
  report_line(out, "method", to_string(result.method));
  report_line(out, "alpha_star", result.alpha_star);
  report_line(out, "cut_index", std::to_string(result.cut_index) + " of " +
                                    std::to_string(cfg.topo.total_layers) + " (" +
                                    to_string(cfg.cut_mode) + ")");
  report_line(out, "rs_at_star", result.rs_at_star);
  report_line(out, "energy_at_star_j", result.energy_at_star_j);
  report_line(out, "e_req_j", *cfg.e_req_j);
  report_line(out, "binding", result.binding ? "true" : "false");
  report_line(out, "feasible_alpha_max", result.feasible_alpha_max);
  for (std::size_t i = 0; i < result.per_profile_energy_j.size(); ++i)
    report_line(out, "profile[" + std::to_string(i) + "].energy_j",
                result.per_profile_energy_j[i]);

  if (cfg.out_path) {
    with_output(cfg.out_path, [&](std::ostream& file) {
      if (cfg.out_format == OutputFormat::Csv)
        write_optimize_csv(result, *cfg.e_req_j, file);
      else
        write_optimize_json(result, *cfg.e_req_j, file);
    });
    std::cout << "wrote solution to " << *cfg.out_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

int cmd_fit(const CliState& s) {
  const std::vector<RsSample> samples = load_rs_samples(s.samples_path);
  const RsModel model = fit_quadratic(samples);
  print_warnings(rs_model_warnings(model));

  std::ostream& out = std::cout;
  report_line(out, "samples", std::to_string(samples.size()) + " from " + s.samples_path);
  report_line(out, "a2", model.a2);
  report_line(out, "a1", model.a1);
  report_line(out, "a0", model.a0);
  report_line(out, "fit_rmse", model.fit_rmse);
  if (model.convex()) report_line(out, "vertex_alpha", rs_minimizer_alpha(model));

  if (s.overrides.out_path) {
    write_rs_model_file(model, samples.size(), *s.overrides.out_path);
    std::cout << "wrote model to " << *s.overrides.out_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const RunConfig& cfg, const std::optional<std::string>& trace_path) {
  SimConfig sim;
  sim.profiles = cfg.profiles;
  sim.alpha = require_alpha(cfg, "simulate");
  sim.topo = cfg.topo;
  sim.cut_mode = cfg.cut_mode;
  sim.record_trace = false;

  SimTrace trace;
  if (trace_path) {
    std::ofstream file(*trace_path, std::ios::binary);
    if (!file) throw ConfigError(*trace_path + ": cannot open for writing");
    trace = run_simulation(sim, [&file](const SimEvent& e) { write_event_line(e, file); });
    write_trace_summary_line(trace, file);
    file.flush();
    if (!file) throw ConfigError(*trace_path + ": write failed");
  } else {
    trace = run_simulation(sim);
  }
  print_warnings(trace.warnings);

  // Ledger-vs-closed-form agreement is asserted on every run: the event ledger
  // must reproduce the per-client formula to 1e-9 relative.
  double max_rel_diff = 0.0;
  for (int c = 0; c < sim.client_count(); ++c) {
    const double expected = total_energy(sim.alpha, sim.profile_of(c)).total;
    const double got = trace.per_client_energy_j[static_cast<std::size_t>(c)];
    const double scale = std::max(std::abs(expected), 1e-300);
    max_rel_diff = std::max(max_rel_diff, std::abs(got - expected) / scale);
  }
  const bool ledger_ok = max_rel_diff <= 1e-9;

  std::ostream& out = std::cout;
  report_line(out, "alpha", sim.alpha);
  report_line(out, "cut_index", std::to_string(trace.cut_index) + " of " +
                                    std::to_string(cfg.topo.total_layers) + " (" +
                                    to_string(cfg.cut_mode) + ")");
  report_line(out, "clients", std::to_string(sim.client_count()));
  report_line(out, "rounds", std::to_string(trace.total_rounds));
  report_line(out, "events", std::to_string(trace.event_count));
  for (std::size_t c = 0; c < trace.per_client_energy_j.size(); ++c)
    report_line(out, "client[" + std::to_string(c) + "].energy_j",
                trace.per_client_energy_j[c]);
  report_line(out, "total_bits_up", trace.total_bits_up);
  report_line(out, "total_bits_down", trace.total_bits_down);
  report_line(out, "wall_latency_s", latency_estimate(sim));
  report_line(out, "closed_form_check",
              std::string(ledger_ok ? "PASS" : "FAIL") + " (max rel diff " +
                  fmt_sig6(max_rel_diff) + ")");
  if (trace_path) std::cout << "wrote trace to " << *trace_path << "\n";

  if (!ledger_ok) {
    std::cerr << "error: event ledger disagrees with the closed-form energy\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Split federated learning energy model and cut-layer optimizer"};
  app.require_subcommand(1);

  CliState s;

  CLI::App* eval = app.add_subcommand("eval", "Energy and reconstruction score at one alpha");
  add_config_flags(eval, s);
  eval->add_option("--alpha", s.overrides.alpha, "Cut fraction in [0, 1]");

  CLI::App* sweep = app.add_subcommand("sweep", "Tabulate the alpha range into a data file");
  add_config_flags(sweep, s);
  add_output_flags(sweep, s);
  sweep->add_option("--sweep-start", s.overrides.sweep_start, "First alpha (default 0)");
  sweep->add_option("--sweep-end", s.overrides.sweep_end, "Last alpha (default 1)");
  sweep->add_option("--sweep-step", s.overrides.sweep_step, "Alpha increment (default 0.1)");

  CLI::App* optimize =
      app.add_subcommand("optimize", "Minimize the reconstruction score under an energy budget");
  add_config_flags(optimize, s);
  add_output_flags(optimize, s);
  optimize->add_option("--e-req", s.overrides.e_req_j, "Per-client energy budget, joules");
  optimize->add_option("--grid-step", s.overrides.grid_step,
                       "Grid resolution for the fallback solver");

  CLI::App* fit = app.add_subcommand("fit", "Fit the RS quadratic from alpha,ssim samples");
  fit->add_option("samples", s.samples_path, "Sample file: alpha,ssim per line")->required();
  fit->add_option("--out", s.overrides.out_path, "Write the fitted model file here");

  CLI::App* simulate = app.add_subcommand("simulate", "Run the message-level protocol simulator");
  add_config_flags(simulate, s);
  simulate->add_option("--alpha", s.overrides.alpha, "Cut fraction in [0, 1]");
  simulate->add_option("--trace", s.trace_path, "Stream the event trace to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (app.got_subcommand(fit)) return cmd_fit(s);
    const RunConfig cfg = resolve(s);
    if (s.emit_config) {
      std::cout << effective_config_text(cfg);
      return kExitOk;
    }
    if (app.got_subcommand(eval)) return cmd_eval(cfg);
    if (app.got_subcommand(sweep)) return cmd_sweep(cfg);
    if (app.got_subcommand(optimize)) return cmd_optimize(cfg);
    return cmd_simulate(cfg, s.trace_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace sfl
