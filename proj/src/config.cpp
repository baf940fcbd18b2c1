#include "sfl/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <utility>

#include <json.hpp>

#include "sfl/errors.hpp"

namespace sfl {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail_parse(const std::string& source, const std::string& message) {
  throw ParseError(source + ": " + message);
}

double need_number(const json& v, const std::string& source, const std::string& where) {
  if (!v.is_number()) fail_parse(source, where + ": expected a number");
  return v.get<double>();
}

std::int64_t need_i64(const json& v, const std::string& source, const std::string& where) {
  if (!v.is_number_integer()) fail_parse(source, where + ": expected an integer");
  return v.get<std::int64_t>();
}

int need_int(const json& v, const std::string& source, const std::string& where) {
  const std::int64_t x = need_i64(v, source, where);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    fail_parse(source, where + ": integer out of range");
  return static_cast<int>(x);
}

std::string need_string(const json& v, const std::string& source, const std::string& where) {
  if (!v.is_string()) fail_parse(source, where + ": expected a string");
  return v.get<std::string>();
}

const json& need_object(const json& v, const std::string& source, const std::string& where) {
  if (!v.is_object()) fail_parse(source, where + ": expected an object");
  return v;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& source, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (known.find(item.key()) == known.end())
      fail_parse(source, where + ": unknown key '" + item.key() + "'");
  }
}

// One parameter field applied from JSON; `where` names the enclosing object
// ("params" or "profiles[i]") for diagnostics and provenance.
void apply_param_field(SystemParams& p, const std::string& key, const json& v,
                       const std::string& source, const std::string& where) {
  if (key == "clients") {
    p.clients = need_int(v, source, where + ".clients");
  } else if (key == "global_epochs") {
    p.global_epochs = need_int(v, source, where + ".global_epochs");
  } else if (key == "local_iterations") {
    p.local_iterations = need_int(v, source, where + ".local_iterations");
  } else if (key == "minibatch") {
    p.minibatch = need_int(v, source, where + ".minibatch");
  } else if (key == "smashed_bits") {
    p.smashed_bits = need_number(v, source, where + ".smashed_bits");
  } else if (key == "gradient_bits") {
    p.gradient_bits = need_number(v, source, where + ".gradient_bits");
  } else if (key == "bits_per_param") {
    p.bits_per_param = need_number(v, source, where + ".bits_per_param");
  } else if (key == "total_params") {
    p.total_params = need_i64(v, source, where + ".total_params");
  } else if (key == "full_train_time_s") {
    p.full_train_time_s = need_number(v, source, where + ".full_train_time_s");
  } else if (key == "fed_uplink_bps") {
    p.fed_uplink_bps = need_number(v, source, where + ".fed_uplink_bps");
  } else if (key == "fed_downlink_bps") {
    p.fed_downlink_bps = need_number(v, source, where + ".fed_downlink_bps");
  } else if (key == "main_uplink_bps") {
    p.main_uplink_bps = need_number(v, source, where + ".main_uplink_bps");
  } else if (key == "main_downlink_bps") {
    p.main_downlink_bps = need_number(v, source, where + ".main_downlink_bps");
  } else if (key == "compute_power_w") {
    p.compute_power_w = need_number(v, source, where + ".compute_power_w");
  } else if (key == "transmit_power_w") {
    p.transmit_power_w = need_number(v, source, where + ".transmit_power_w");
  } else if (key == "receive_power_w") {
    p.receive_power_w = need_number(v, source, where + ".receive_power_w");
  } else {
    fail_parse(source, where + ": unknown key '" + key + "'");
  }
}

RsModel builtin_rs_model(const std::string& name) {
  if (name == "fmnist-ssim") return fmnist_ssim_model();
  throw ConfigError("unknown builtin RS model '" + name + "' (available: fmnist-ssim)");
}

RsModel rs_model_from_coeffs(const std::vector<double>& coeffs, double fit_rmse) {
  if (coeffs.size() != 3)
    throw ConfigError("rs coeffs must be exactly [a2, a1, a0], got " +
                      std::to_string(coeffs.size()) + " values");
  return RsModel{coeffs[0], coeffs[1], coeffs[2], fit_rmse};
}

RsModel rs_model_from_fit(const std::string& samples_path) {
  const std::vector<RsSample> samples = load_rs_samples(samples_path);
  return fit_quadratic(samples);
}

void apply_rs_json(const json& v, const std::string& source, RunConfig& cfg) {
  const json& obj = need_object(v, source, "rs");
  reject_unknown_keys(obj, {"model", "coeffs", "fit", "file", "fit_rmse", "source"}, source,
                      "rs");
  const int sources = static_cast<int>(obj.contains("model")) +
                      static_cast<int>(obj.contains("coeffs")) +
                      static_cast<int>(obj.contains("fit")) +
                      static_cast<int>(obj.contains("file"));
  if (sources != 1)
    fail_parse(source, "rs: exactly one of 'model', 'coeffs', 'fit', 'file' must be given");
  if (obj.contains("fit_rmse") && !obj.contains("coeffs"))
    fail_parse(source, "rs.fit_rmse: only meaningful together with 'coeffs'");

  if (obj.contains("model")) {
    const std::string name = need_string(obj.at("model"), source, "rs.model");
    cfg.rs = builtin_rs_model(name);
    cfg.rs_source = "builtin:" + name;
  } else if (obj.contains("coeffs")) {
    const json& arr = obj.at("coeffs");
    if (!arr.is_array()) fail_parse(source, "rs.coeffs: expected an array [a2, a1, a0]");
    std::vector<double> coeffs;
    for (std::size_t i = 0; i < arr.size(); ++i)
      coeffs.push_back(need_number(arr.at(i), source, "rs.coeffs[" + std::to_string(i) + "]"));
    double rmse = 0.0;
    if (obj.contains("fit_rmse")) rmse = need_number(obj.at("fit_rmse"), source, "rs.fit_rmse");
    cfg.rs = rs_model_from_coeffs(coeffs, rmse);
    cfg.rs_source = obj.contains("source")
                        ? need_string(obj.at("source"), source, "rs.source")
                        : "coeffs";
  } else if (obj.contains("fit")) {
    const std::string path = need_string(obj.at("fit"), source, "rs.fit");
    cfg.rs = rs_model_from_fit(path);
    cfg.rs_source = "fit:" + path;
  } else {
    const std::string path = need_string(obj.at("file"), source, "rs.file");
    cfg.rs = load_rs_model_file(path);
    cfg.rs_source = "file:" + path;
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail_parse(path, e.what());
  }
  need_object(j, path, "config");
  reject_unknown_keys(j,
                      {"schema_version", "params", "profiles", "topology", "cut_mode", "rs",
                       "alpha", "e_req_j", "sweep", "grid_step", "output", "provenance"},
                      path, "config");

  // Informational on output; their presence on input is tolerated, not used.
  (void)j.value("schema_version", 1);

  bool base_total_params_set = false;
  if (j.contains("params")) {
    const json& obj = need_object(j.at("params"), path, "params");
    SystemParams base = cfg.base_params();
    for (const auto& item : obj.items()) {
      apply_param_field(base, item.key(), item.value(), path, "params");
      cfg.provenance["params." + item.key()] = "file";
    }
    base_total_params_set = obj.contains("total_params");
    cfg.profiles.assign(1, base);
  }

  if (j.contains("profiles")) {
    const json& arr = j.at("profiles");
    if (!arr.is_array() || arr.empty())
      fail_parse(path, "profiles: expected a non-empty array of parameter objects");
    const SystemParams base = cfg.base_params();
    std::vector<SystemParams> profiles;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "profiles[" + std::to_string(i) + "]";
      const json& obj = need_object(arr.at(i), path, where);
      SystemParams p = base;
      for (const auto& item : obj.items())
        apply_param_field(p, item.key(), item.value(), path, where);
      profiles.push_back(p);
    }
    cfg.profiles = std::move(profiles);
    cfg.provenance["profiles"] = "file";
  }

  // The model size lives both in the parameter set (exchange cost) and in the
  // topology (cut context); a file that sets only params.total_params keeps
  // the two in sync, an explicit topology.total_params wins below.
  if (base_total_params_set) {
    cfg.topo.total_params = cfg.base_params().total_params;
    cfg.provenance["topology.total_params"] = "file";
  }

  if (j.contains("topology")) {
    const json& obj = need_object(j.at("topology"), path, "topology");
    reject_unknown_keys(obj, {"total_params", "total_layers", "layers_per_block", "blocks"},
                        path, "topology");
    if (obj.contains("total_params")) {
      cfg.topo.total_params = need_i64(obj.at("total_params"), path, "topology.total_params");
      cfg.provenance["topology.total_params"] = "file";
    }
    if (obj.contains("total_layers")) {
      cfg.topo.total_layers = need_int(obj.at("total_layers"), path, "topology.total_layers");
      cfg.provenance["topology.total_layers"] = "file";
    }
    if (obj.contains("layers_per_block")) {
      cfg.topo.layers_per_block =
          need_int(obj.at("layers_per_block"), path, "topology.layers_per_block");
      cfg.provenance["topology.layers_per_block"] = "file";
    }
    if (obj.contains("blocks")) {
      cfg.topo.blocks = need_int(obj.at("blocks"), path, "topology.blocks");
      cfg.provenance["topology.blocks"] = "file";
    }
  }

  if (j.contains("cut_mode")) {
    const std::string name = need_string(j.at("cut_mode"), path, "cut_mode");
    try {
      cfg.cut_mode = cut_mode_from_string(name);
    } catch (const ConfigError& e) {
      fail_parse(path, std::string("cut_mode: ") + e.what());
    }
    cfg.provenance["cut_mode"] = "file";
  }

  if (j.contains("rs")) {
    apply_rs_json(j.at("rs"), path, cfg);
    cfg.provenance["rs"] = "file";
  }

  if (j.contains("alpha")) {
    cfg.alpha = need_number(j.at("alpha"), path, "alpha");
    cfg.provenance["alpha"] = "file";
  }

  if (j.contains("e_req_j")) {
    cfg.e_req_j = need_number(j.at("e_req_j"), path, "e_req_j");
    cfg.provenance["e_req_j"] = "file";
  }

  if (j.contains("sweep")) {
    const json& obj = need_object(j.at("sweep"), path, "sweep");
    reject_unknown_keys(obj, {"start", "end", "step"}, path, "sweep");
    SweepRange range;
    if (obj.contains("start")) range.start = need_number(obj.at("start"), path, "sweep.start");
    if (obj.contains("end")) range.end = need_number(obj.at("end"), path, "sweep.end");
    if (obj.contains("step")) range.step = need_number(obj.at("step"), path, "sweep.step");
    cfg.sweep = range;
    cfg.provenance["sweep"] = "file";
  }

  if (j.contains("grid_step")) {
    cfg.grid_step = need_number(j.at("grid_step"), path, "grid_step");
    cfg.provenance["grid_step"] = "file";
  }

  if (j.contains("output")) {
    const json& obj = need_object(j.at("output"), path, "output");
    reject_unknown_keys(obj, {"path", "format"}, path, "output");
    if (obj.contains("path")) {
      cfg.out_path = need_string(obj.at("path"), path, "output.path");
      cfg.provenance["output.path"] = "file";
    }
    if (obj.contains("format")) {
      const std::string name = need_string(obj.at("format"), path, "output.format");
      try {
        cfg.out_format = output_format_from_string(name);
      } catch (const ConfigError& e) {
        fail_parse(path, std::string("output.format: ") + e.what());
      }
      cfg.provenance["output.format"] = "file";
    }
  }
}

void apply_overrides(RunConfig& cfg, const ConfigOverrides& o) {
  const auto set_param = [&cfg](const char* key, const auto& value, auto member) {
    for (SystemParams& p : cfg.profiles) p.*member = value;
    cfg.provenance[std::string("params.") + key] = "flag";
  };
  if (o.clients) set_param("clients", *o.clients, &SystemParams::clients);
  if (o.global_epochs) set_param("global_epochs", *o.global_epochs, &SystemParams::global_epochs);
  if (o.local_iterations)
    set_param("local_iterations", *o.local_iterations, &SystemParams::local_iterations);
  if (o.minibatch) set_param("minibatch", *o.minibatch, &SystemParams::minibatch);
  if (o.smashed_bits) set_param("smashed_bits", *o.smashed_bits, &SystemParams::smashed_bits);
  if (o.gradient_bits) set_param("gradient_bits", *o.gradient_bits, &SystemParams::gradient_bits);
  if (o.bits_per_param)
    set_param("bits_per_param", *o.bits_per_param, &SystemParams::bits_per_param);
  if (o.total_params) {
    set_param("total_params", *o.total_params, &SystemParams::total_params);
    cfg.topo.total_params = *o.total_params;
    cfg.provenance["topology.total_params"] = "flag";
  }
  if (o.full_train_time_s)
    set_param("full_train_time_s", *o.full_train_time_s, &SystemParams::full_train_time_s);
  if (o.fed_uplink_bps)
    set_param("fed_uplink_bps", *o.fed_uplink_bps, &SystemParams::fed_uplink_bps);
  if (o.fed_downlink_bps)
    set_param("fed_downlink_bps", *o.fed_downlink_bps, &SystemParams::fed_downlink_bps);
  if (o.main_uplink_bps)
    set_param("main_uplink_bps", *o.main_uplink_bps, &SystemParams::main_uplink_bps);
  if (o.main_downlink_bps)
    set_param("main_downlink_bps", *o.main_downlink_bps, &SystemParams::main_downlink_bps);
  if (o.compute_power_w)
    set_param("compute_power_w", *o.compute_power_w, &SystemParams::compute_power_w);
  if (o.transmit_power_w)
    set_param("transmit_power_w", *o.transmit_power_w, &SystemParams::transmit_power_w);
  if (o.receive_power_w)
    set_param("receive_power_w", *o.receive_power_w, &SystemParams::receive_power_w);

  if (o.total_layers) {
    cfg.topo.total_layers = *o.total_layers;
    cfg.provenance["topology.total_layers"] = "flag";
  }
  if (o.layers_per_block) {
    cfg.topo.layers_per_block = *o.layers_per_block;
    cfg.provenance["topology.layers_per_block"] = "flag";
  }
  if (o.blocks) {
    cfg.topo.blocks = *o.blocks;
    cfg.provenance["topology.blocks"] = "flag";
  }
  if (o.cut_mode) {
    cfg.cut_mode = cut_mode_from_string(*o.cut_mode);
    cfg.provenance["cut_mode"] = "flag";
  }

  const int rs_sources = static_cast<int>(o.rs_model_name.has_value()) +
                         static_cast<int>(o.rs_coeffs.has_value()) +
                         static_cast<int>(o.rs_fit_path.has_value()) +
                         static_cast<int>(o.rs_model_file.has_value());
  if (rs_sources > 1)
    throw ConfigError(
        "at most one of --rs-model, --rs-coeffs, --rs-fit, --rs-model-file may be given");
  if (o.rs_model_name) {
    cfg.rs = builtin_rs_model(*o.rs_model_name);
    cfg.rs_source = "builtin:" + *o.rs_model_name;
    cfg.provenance["rs"] = "flag";
  } else if (o.rs_coeffs) {
    cfg.rs = rs_model_from_coeffs(*o.rs_coeffs, 0.0);
    cfg.rs_source = "coeffs";
    cfg.provenance["rs"] = "flag";
  } else if (o.rs_fit_path) {
    cfg.rs = rs_model_from_fit(*o.rs_fit_path);
    cfg.rs_source = "fit:" + *o.rs_fit_path;
    cfg.provenance["rs"] = "flag";
  } else if (o.rs_model_file) {
    cfg.rs = load_rs_model_file(*o.rs_model_file);
    cfg.rs_source = "file:" + *o.rs_model_file;
    cfg.provenance["rs"] = "flag";
  }

  if (o.alpha) {
    cfg.alpha = *o.alpha;
    cfg.provenance["alpha"] = "flag";
  }
  if (o.e_req_j) {
    cfg.e_req_j = *o.e_req_j;
    cfg.provenance["e_req_j"] = "flag";
  }
  if (o.grid_step) {
    cfg.grid_step = *o.grid_step;
    cfg.provenance["grid_step"] = "flag";
  }
  if (o.sweep_start || o.sweep_end || o.sweep_step) {
    SweepRange range = cfg.sweep.value_or(SweepRange{});
    if (o.sweep_start) range.start = *o.sweep_start;
    if (o.sweep_end) range.end = *o.sweep_end;
    if (o.sweep_step) range.step = *o.sweep_step;
    cfg.sweep = range;
    cfg.provenance["sweep"] = "flag";
  }
  if (o.out_path) {
    cfg.out_path = *o.out_path;
    cfg.provenance["output.path"] = "flag";
  }
  if (o.out_format) {
    cfg.out_format = output_format_from_string(*o.out_format);
    cfg.provenance["output.format"] = "flag";
  }
}

void validate_resolved(const RunConfig& cfg) {
  if (cfg.profiles.empty()) throw ConfigError("config: profile list is empty");
  for (const SystemParams& p : cfg.profiles) p.validate();
  if (cfg.heterogeneous()) {
    for (const SystemParams& p : cfg.profiles) {
      if (p.clients != cfg.base_params().clients)
        throw ConfigError("config: all profiles must agree on the client count K");
    }
    if (static_cast<int>(cfg.profiles.size()) != cfg.base_params().clients)
      throw ConfigError("config: per-client profiles need exactly K = " +
                        std::to_string(cfg.base_params().clients) + " entries, got " +
                        std::to_string(cfg.profiles.size()));
  }
  cfg.topo.validate();
  if (cfg.cut_mode == CutMode::PerBlock) cfg.topo.validate_block_mode();
  if (cfg.alpha && !(*cfg.alpha >= 0.0 && *cfg.alpha <= 1.0))
    throw DomainError("alpha must be in [0, 1], got " + std::to_string(*cfg.alpha));
  if (cfg.e_req_j && !(*cfg.e_req_j > 0.0))
    throw DomainError("e_req_j must be > 0, got " + std::to_string(*cfg.e_req_j));
  if (cfg.sweep) cfg.sweep->validate();
  if (!(cfg.grid_step > 0.0 && cfg.grid_step <= 0.1))
    throw DomainError("grid_step must be in (0, 0.1], got " + std::to_string(cfg.grid_step));
}

ordered_json params_json(const SystemParams& p) {
  ordered_json obj;
  obj["clients"] = p.clients;
  obj["global_epochs"] = p.global_epochs;
  obj["local_iterations"] = p.local_iterations;
  obj["minibatch"] = p.minibatch;
  obj["smashed_bits"] = p.smashed_bits;
  obj["gradient_bits"] = p.gradient_bits;
  obj["bits_per_param"] = p.bits_per_param;
  obj["total_params"] = p.total_params;
  obj["full_train_time_s"] = p.full_train_time_s;
  obj["fed_uplink_bps"] = p.fed_uplink_bps;
  obj["fed_downlink_bps"] = p.fed_downlink_bps;
  obj["main_uplink_bps"] = p.main_uplink_bps;
  obj["main_downlink_bps"] = p.main_downlink_bps;
  obj["compute_power_w"] = p.compute_power_w;
  obj["transmit_power_w"] = p.transmit_power_w;
  obj["receive_power_w"] = p.receive_power_w;
  return obj;
}

}  // namespace

const char* to_string(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "json";
}

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("unknown output format '" + name + "' (expected csv or json)");
}

void SweepRange::validate() const {
  if (!(start >= 0.0 && start <= 1.0))
    throw DomainError("sweep start must be in [0, 1], got " + std::to_string(start));
  if (!(end >= 0.0 && end <= 1.0))
    throw DomainError("sweep end must be in [0, 1], got " + std::to_string(end));
  if (!(step > 0.0)) throw DomainError("sweep step must be > 0, got " + std::to_string(step));
  if (start > end)
    throw DomainError("sweep range is empty: start " + std::to_string(start) + " > end " +
                      std::to_string(end));
}

std::vector<double> SweepRange::points() const {
  validate();
  // Absolute cushion so fractional steps land on the intended count
  // (0.3 / 0.1 evaluates below 3 in binary floating point).
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(std::min(start + static_cast<double>(i) * step, end));
  return out;
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.profiles.assign(1, SystemParams{});
  cfg.topo = ModelTopology{cfg.base_params().total_params, 10, 2, 5};
  cfg.cut_mode = CutMode::PerLayer;
  cfg.rs = fmnist_ssim_model();
  cfg.rs_source = "builtin:fmnist-ssim";
  cfg.grid_step = 1e-4;
  cfg.out_format = OutputFormat::Csv;

  static const char* const kParamKeys[] = {
      "clients",         "global_epochs",   "local_iterations",  "minibatch",
      "smashed_bits",    "gradient_bits",   "bits_per_param",    "total_params",
      "full_train_time_s", "fed_uplink_bps", "fed_downlink_bps", "main_uplink_bps",
      "main_downlink_bps", "compute_power_w", "transmit_power_w", "receive_power_w"};
  for (const char* key : kParamKeys) cfg.provenance[std::string("params.") + key] = "default";
  for (const char* key : {"total_params", "total_layers", "layers_per_block", "blocks"})
    cfg.provenance[std::string("topology.") + key] = "default";
  cfg.provenance["cut_mode"] = "default";
  cfg.provenance["rs"] = "default";
  cfg.provenance["grid_step"] = "default";
  cfg.provenance["output.format"] = "default";
  return cfg;
}

RunConfig resolve_config(const std::optional<std::string>& config_path,
                         const ConfigOverrides& overrides) {
  RunConfig cfg = default_config();
  if (config_path) apply_config_file(cfg, *config_path);
  apply_overrides(cfg, overrides);
  validate_resolved(cfg);
  return cfg;
}

std::string effective_config_text(const RunConfig& config) {
  ordered_json j;
  j["schema_version"] = 1;
  j["params"] = params_json(config.base_params());
  if (config.heterogeneous()) {
    ordered_json arr = ordered_json::array();
    for (const SystemParams& p : config.profiles) arr.push_back(params_json(p));
    j["profiles"] = std::move(arr);
  }
  j["topology"] = {{"total_params", config.topo.total_params},
                   {"total_layers", config.topo.total_layers},
                   {"layers_per_block", config.topo.layers_per_block},
                   {"blocks", config.topo.blocks}};
  j["cut_mode"] = to_string(config.cut_mode);
  j["rs"] = {{"source", config.rs_source},
             {"coeffs", {config.rs.a2, config.rs.a1, config.rs.a0}},
             {"fit_rmse", config.rs.fit_rmse}};
  if (config.alpha) j["alpha"] = *config.alpha;
  if (config.e_req_j) j["e_req_j"] = *config.e_req_j;
  if (config.sweep)
    j["sweep"] = {
        {"start", config.sweep->start}, {"end", config.sweep->end}, {"step", config.sweep->step}};
  j["grid_step"] = config.grid_step;
  ordered_json output;
  if (config.out_path) output["path"] = *config.out_path;
  output["format"] = to_string(config.out_format);
  j["output"] = std::move(output);
  j["provenance"] = config.provenance;
  return j.dump(2) + "\n";
}

void write_rs_model_file(const RsModel& model, std::size_t sample_count,
                         const std::string& path) {
  ordered_json j;
  j["schema_version"] = 1;
  j["type"] = "rs-model";
  j["coeffs"] = {model.a2, model.a1, model.a0};
  j["fit_rmse"] = model.fit_rmse;
  j["sample_count"] = sample_count;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError(path + ": write failed");
}

RsModel load_rs_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open RS model file");
  json j;
  try {
    j = json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail_parse(path, e.what());
  }
  need_object(j, path, "rs model");
  if (j.value("type", "") != "rs-model")
    fail_parse(path, "not an RS model file (missing type: rs-model)");
  if (!j.contains("coeffs") || !j.at("coeffs").is_array() || j.at("coeffs").size() != 3)
    fail_parse(path, "coeffs: expected an array [a2, a1, a0]");
  RsModel model;
  model.a2 = need_number(j.at("coeffs").at(0), path, "coeffs[0]");
  model.a1 = need_number(j.at("coeffs").at(1), path, "coeffs[1]");
  model.a0 = need_number(j.at("coeffs").at(2), path, "coeffs[2]");
  if (j.contains("fit_rmse")) model.fit_rmse = need_number(j.at("fit_rmse"), path, "fit_rmse");
  return model;
}

}  // namespace sfl
