#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sfl/energy.hpp"
#include "sfl/errors.hpp"

using namespace sfl;

namespace {

// Expected values frozen from an independent arithmetic script over the
// reference parameter set.
constexpr double kEMainAt0 = 0.009830400000000001;
constexpr double kEMainAt1 = 0.0120304;
constexpr double kEFedAt1 = 10.07502848;
constexpr double kEFedAtHalf = 5.03751424;
constexpr double kTotalAt0 = 4718.592000000001;
constexpr double kTotalAt1 = 6278.343424;
constexpr double kTotalAtStar = 5373.843573222401;
constexpr double kSlope = 1559.7514239999991;

doctest::Approx near(double v, double eps = 1e-12) {
  return doctest::Approx(v).epsilon(eps);
}

SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> counts(1, 6);
  std::uniform_real_distribution<double> bits(0.0, 1e6);
  std::uniform_real_distribution<double> rate(1e6, 1e9);
  std::uniform_real_distribution<double> power(0.0, 5.0);
  std::uniform_real_distribution<double> time(1e-5, 1e-3);
  std::uniform_int_distribution<std::int64_t> params(1'000, 10'000'000);
  SystemParams p;
  p.clients = counts(rng);
  p.global_epochs = counts(rng);
  p.local_iterations = counts(rng);
  p.minibatch = counts(rng);
  p.smashed_bits = bits(rng);
  p.gradient_bits = bits(rng);
  p.bits_per_param = 8.0 * counts(rng);
  p.total_params = params(rng);
  p.full_train_time_s = time(rng);
  p.fed_uplink_bps = rate(rng);
  p.fed_downlink_bps = rate(rng);
  p.main_uplink_bps = rate(rng);
  p.main_downlink_bps = rate(rng);
  p.compute_power_w = power(rng);
  p.transmit_power_w = power(rng);
  p.receive_power_w = power(rng);
  return p;
}

}  // namespace

TEST_CASE("reference per-item and per-epoch energies") {
  const SystemParams p;
  CHECK(energy_main_per_item(0.0, p) == near(kEMainAt0));
  CHECK(energy_main_per_item(1.0, p) == near(kEMainAt1));
  CHECK(energy_fed_per_epoch(0.0, p) == 0.0);
  CHECK(energy_fed_per_epoch(1.0, p) == near(kEFedAt1));
  CHECK(energy_fed_per_epoch(0.5, p) == near(kEFedAtHalf));
}

TEST_CASE("reference run totals") {
  const SystemParams p;
  CHECK(total_energy(0.0, p).total == near(kTotalAt0));
  CHECK(total_energy(1.0, p).total == near(kTotalAt1));
  CHECK(total_energy(0.4201, p).total == near(kTotalAtStar));
}

TEST_CASE("breakdown terms add up to the total") {
  std::mt19937_64 rng(97);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p = random_params(rng);
    const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const EnergyBreakdown b = total_energy(alpha, p);
    const double sum = b.terms.client_compute + b.terms.smashed_tx + b.terms.gradient_rx +
                       b.terms.model_tx + b.terms.model_rx;
    const double items = static_cast<double>(p.local_iterations) * p.minibatch;
    CHECK(sum == near(b.total).epsilon(1e-10));
    CHECK(b.total ==
          near(p.global_epochs * (items * b.e_main_per_item + b.e_fed_per_epoch), 1e-12));
  }
}

TEST_CASE("total energy is affine in alpha") {
  const SystemParams p;
  const AffineEnergy aff = affine_energy(p);
  CHECK(aff.slope_j == near(kSlope));
  CHECK(aff.intercept_j == near(kTotalAt0));
  for (const double alpha : {0.0, 0.1, 0.25, 0.4201, 0.5, 0.75, 0.9, 1.0}) {
    CHECK(aff.eval(alpha) == near(total_energy(alpha, p).total));
  }

  std::mt19937_64 rng(98);
  for (int i = 0; i < 100; ++i) {
    const SystemParams q = random_params(rng);
    const AffineEnergy a = affine_energy(q);
    const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double direct = total_energy(alpha, q).total;
    CHECK(a.eval(alpha) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("total energy rises with alpha, powers, and slower links") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const SystemParams p = random_params(rng);
    const double alpha = unit(rng);
    const double base = total_energy(alpha, p).total;

    SystemParams hotter = p;
    hotter.compute_power_w += 1.0;
    hotter.transmit_power_w += 0.5;
    hotter.receive_power_w += 0.5;
    CHECK(total_energy(alpha, hotter).total >= base);

    SystemParams slower = p;
    slower.fed_uplink_bps /= 2.0;
    slower.fed_downlink_bps /= 2.0;
    slower.main_uplink_bps /= 2.0;
    slower.main_downlink_bps /= 2.0;
    CHECK(total_energy(alpha, slower).total >= base);

    const double higher = std::min(1.0, alpha + 0.1);
    CHECK(total_energy(higher, p).total >= base);
  }
}

TEST_CASE("profile averages") {
  const SystemParams p;
  std::vector<SystemParams> same(3, p);
  CHECK(average_energy(0.37, same) == near(total_energy(0.37, p).total));

  SystemParams fast = p;
  fast.compute_power_w = 2.0;
  SystemParams slow = p;
  slow.main_uplink_bps = 50e6;
  std::vector<SystemParams> mixed = {p, fast, slow};
  const double expected = (total_energy(0.5, p).total + total_energy(0.5, fast).total +
                           total_energy(0.5, slow).total) /
                          3.0;
  CHECK(average_energy(0.5, mixed) == near(expected));

  const AffineEnergy avg = average_affine_energy(mixed);
  CHECK(avg.eval(0.5) == near(average_energy(0.5, mixed), 1e-10));

  const std::vector<SystemParams> none;
  CHECK_THROWS_AS(average_energy(0.5, none), DomainError);
  CHECK_THROWS_AS(average_affine_energy(none), DomainError);
}

TEST_CASE("zero-size messages and zero powers are valid, zero rates are not") {
  SystemParams p;
  p.smashed_bits = 0.0;
  p.gradient_bits = 0.0;
  p.bits_per_param = 0.0;
  p.receive_power_w = 0.0;
  CHECK_NOTHROW(p.validate());
  CHECK(energy_main_per_item(0.0, p) == 0.0);
  CHECK(energy_fed_per_epoch(1.0, p) == 0.0);

  SystemParams bad = SystemParams{};
  bad.main_uplink_bps = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SystemParams{};
  bad.full_train_time_s = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SystemParams{};
  bad.clients = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SystemParams{};
  bad.smashed_bits = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SystemParams{};
  bad.total_params = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("alpha domain is enforced") {
  const SystemParams p;
  CHECK_THROWS_AS(energy_main_per_item(-0.1, p), DomainError);
  CHECK_THROWS_AS(energy_fed_per_epoch(1.1, p), DomainError);
  CHECK_THROWS_AS(total_energy(std::nan(""), p), DomainError);
}
