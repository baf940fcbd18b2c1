#pragma once

#include <cstdint>
#include <span>

namespace sfl {

/// Parameters of the per-client energy model.
///
/// Link rates are system totals shared by the K clients, so every transmission
/// term sees an effective per-client rate of rate/K. Defaults are the
/// reference configuration used throughout the docs and tests.
struct SystemParams {
  int clients = 5;                         // K
  int global_epochs = 50;                  // synchronization rounds
  int local_iterations = 75;               // per-client steps per epoch
  int minibatch = 128;                     // data items per local iteration
  double smashed_bits = 491'520.0;         // activation upload per item
  double gradient_bits = 491'520.0;        // gradient download per item
  double bits_per_param = 32.0;
  std::int64_t total_params = 31'484'464;  // |W| of the full model
  double full_train_time_s = 0.00055;      // forward+backward on the full model, per item
  double fed_uplink_bps = 200e6;
  double fed_downlink_bps = 200e6;
  double main_uplink_bps = 100e6;
  double main_downlink_bps = 100e6;
  double compute_power_w = 4.0;
  double transmit_power_w = 0.2;
  double receive_power_w = 0.2;            // 0 recovers the "reception is negligible" reading

  void validate() const;
};

/// Run-scale energy attribution, all in joules.
struct EnergyTerms {
  double client_compute = 0.0;
  double smashed_tx = 0.0;
  double gradient_rx = 0.0;
  double model_tx = 0.0;
  double model_rx = 0.0;
};

struct EnergyBreakdown {
  double e_main_per_item = 0.0;   // one data item's worth of main-server interaction
  double e_fed_per_epoch = 0.0;   // one epoch's worth of fed-server interaction
  double total = 0.0;             // g_e * (l_e * D_b * e_main_per_item + e_fed_per_epoch)
  EnergyTerms terms;
};

/// The per-client total is affine in alpha: total(alpha) = slope * alpha + intercept.
struct AffineEnergy {
  double slope_j = 0.0;
  double intercept_j = 0.0;

  double eval(double alpha) const { return slope_j * alpha + intercept_j; }
};

/// alpha*T*P_c + (q*K/R2_U)*P_t + (q'*K/R2_D)*P_r, per sampled data item.
double energy_main_per_item(double alpha, const SystemParams& p);

/// alpha*b*|W|*K*(P_t/R1_U + P_r/R1_D), per global epoch.
double energy_fed_per_epoch(double alpha, const SystemParams& p);

EnergyBreakdown total_energy(double alpha, const SystemParams& p);

/// Arithmetic mean of total_energy over heterogeneous client profiles.
double average_energy(double alpha, std::span<const SystemParams> profiles);

AffineEnergy affine_energy(const SystemParams& p);
AffineEnergy average_affine_energy(std::span<const SystemParams> profiles);

}  // namespace sfl
