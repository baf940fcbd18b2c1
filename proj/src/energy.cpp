#include "sfl/energy.hpp"

#include <string>

#include "sfl/errors.hpp"

namespace sfl {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must be in [0, 1], got " + std::to_string(alpha));
  }
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw ConfigError(std::string("params: ") + name + " must be > 0");
  }
}

void check_non_negative(double v, const char* name) {
  if (!(v >= 0.0)) {
    throw ConfigError(std::string("params: ") + name + " must be >= 0");
  }
}

void check_count(long long v, const char* name) {
  if (v < 1) {
    throw ConfigError(std::string("params: ") + name + " must be >= 1");
  }
}

}  // namespace

void SystemParams::validate() const {
  check_count(clients, "clients");
  check_count(global_epochs, "global_epochs");
  check_count(local_iterations, "local_iterations");
  check_count(minibatch, "minibatch");
  check_count(total_params, "total_params");
  check_positive(full_train_time_s, "full_train_time_s");
  check_positive(fed_uplink_bps, "fed_uplink_bps");
  check_positive(fed_downlink_bps, "fed_downlink_bps");
  check_positive(main_uplink_bps, "main_uplink_bps");
  check_positive(main_downlink_bps, "main_downlink_bps");
  // Message sizes and powers may be zero: q = q' = 0 models compute-only runs
  // and P_r = 0 recovers the "reception is negligible" reading.
  check_non_negative(smashed_bits, "smashed_bits");
  check_non_negative(gradient_bits, "gradient_bits");
  check_non_negative(bits_per_param, "bits_per_param");
  check_non_negative(compute_power_w, "compute_power_w");
  check_non_negative(transmit_power_w, "transmit_power_w");
  check_non_negative(receive_power_w, "receive_power_w");
}

double energy_main_per_item(double alpha, const SystemParams& p) {
  check_alpha(alpha);
  p.validate();
  const double k = static_cast<double>(p.clients);
  const double compute = alpha * p.full_train_time_s * p.compute_power_w;
  const double smashed_tx = (p.smashed_bits * k / p.main_uplink_bps) * p.transmit_power_w;
  const double gradient_rx = (p.gradient_bits * k / p.main_downlink_bps) * p.receive_power_w;
  return compute + smashed_tx + gradient_rx;
}

double energy_fed_per_epoch(double alpha, const SystemParams& p) {
  check_alpha(alpha);
  p.validate();
  const double k = static_cast<double>(p.clients);
  const double model_bits = p.bits_per_param * static_cast<double>(p.total_params);
  return alpha * model_bits * k *
         (p.transmit_power_w / p.fed_uplink_bps + p.receive_power_w / p.fed_downlink_bps);
}

EnergyBreakdown total_energy(double alpha, const SystemParams& p) {
  EnergyBreakdown result;
  result.e_main_per_item = energy_main_per_item(alpha, p);
  result.e_fed_per_epoch = energy_fed_per_epoch(alpha, p);

  const double g_e = static_cast<double>(p.global_epochs);
  const double items = static_cast<double>(p.local_iterations) * static_cast<double>(p.minibatch);
  result.total = g_e * (items * result.e_main_per_item + result.e_fed_per_epoch);

  const double k = static_cast<double>(p.clients);
  const double model_bits = p.bits_per_param * static_cast<double>(p.total_params);
  result.terms.client_compute = g_e * items * (alpha * p.full_train_time_s * p.compute_power_w);
  result.terms.smashed_tx =
      g_e * items * ((p.smashed_bits * k / p.main_uplink_bps) * p.transmit_power_w);
  result.terms.gradient_rx =
      g_e * items * ((p.gradient_bits * k / p.main_downlink_bps) * p.receive_power_w);
  result.terms.model_tx = g_e * (alpha * model_bits * k / p.fed_uplink_bps) * p.transmit_power_w;
  result.terms.model_rx = g_e * (alpha * model_bits * k / p.fed_downlink_bps) * p.receive_power_w;
  return result;
}

double average_energy(double alpha, std::span<const SystemParams> profiles) {
  if (profiles.empty()) {
    throw DomainError("average_energy: profile list is empty");
  }
  double sum = 0.0;
  for (const SystemParams& p : profiles) {
    sum += total_energy(alpha, p).total;
  }
  return sum / static_cast<double>(profiles.size());
}

AffineEnergy affine_energy(const SystemParams& p) {
  p.validate();
  const double k = static_cast<double>(p.clients);
  const double g_e = static_cast<double>(p.global_epochs);
  const double items = static_cast<double>(p.local_iterations) * static_cast<double>(p.minibatch);
  const double model_bits = p.bits_per_param * static_cast<double>(p.total_params);

  AffineEnergy aff;
  aff.slope_j = g_e * (items * p.full_train_time_s * p.compute_power_w +
                       model_bits * k *
                           (p.transmit_power_w / p.fed_uplink_bps +
                            p.receive_power_w / p.fed_downlink_bps));
  aff.intercept_j = g_e * items *
                    ((p.smashed_bits * k / p.main_uplink_bps) * p.transmit_power_w +
                     (p.gradient_bits * k / p.main_downlink_bps) * p.receive_power_w);
  return aff;
}

AffineEnergy average_affine_energy(std::span<const SystemParams> profiles) {
  if (profiles.empty()) {
    throw DomainError("average_affine_energy: profile list is empty");
  }
  AffineEnergy sum;
  for (const SystemParams& p : profiles) {
    const AffineEnergy aff = affine_energy(p);
    sum.slope_j += aff.slope_j;
    sum.intercept_j += aff.intercept_j;
  }
  sum.slope_j /= static_cast<double>(profiles.size());
  sum.intercept_j /= static_cast<double>(profiles.size());
  return sum;
}

}  // namespace sfl
