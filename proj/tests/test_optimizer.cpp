#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sfl/energy.hpp"
#include "sfl/errors.hpp"
#include "sfl/optimizer.hpp"
#include "sfl/privacy.hpp"
#include "sfl/topology.hpp"

using namespace sfl;

namespace {

constexpr double kTotalAt0 = 4718.592000000001;    // E(0), reference params
constexpr double kTotalAtStar = 5373.843573222401; // E(0.4201), reference params
constexpr double kVertex = 0.973589102029469;

OptimizationProblem reference_problem(double e_req) {
  OptimizationProblem p;
  p.rs = fmnist_ssim_model();
  p.profiles = {SystemParams{}};
  p.e_req_j = e_req;
  return p;
}

SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> counts(1, 6);
  std::uniform_real_distribution<double> bits(1e3, 1e6);
  std::uniform_real_distribution<double> rate(1e6, 1e9);
  std::uniform_real_distribution<double> power(0.05, 5.0);
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

// Convex model with a controlled vertex; bounds on RS values are irrelevant
// to the solvers.
RsModel random_convex_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a2(0.05, 0.8);
  std::uniform_real_distribution<double> vertex(0.0, 1.2);
  std::uniform_real_distribution<double> a0(0.3, 0.9);
  RsModel m;
  m.a2 = a2(rng);
  m.a1 = -2.0 * m.a2 * vertex(rng);
  m.a0 = a0(rng);
  return m;
}

}  // namespace

TEST_CASE("boundary-constructed budget binds at the reference optimum") {
  const OptimizationProblem p = reference_problem(kTotalAtStar);

  const OptimizationResult cf = solve_closed_form(p);
  CHECK(cf.method == SolveMethod::ClosedForm);
  CHECK(std::abs(cf.alpha_star - 0.4201) < 1e-6);
  CHECK(cf.binding);
  CHECK(cf.feasible_alpha_max == cf.alpha_star);
  CHECK(std::abs(cf.rs_at_star - 0.536743258397) < 1e-9);
  CHECK(cf.energy_at_star_j <= p.e_req_j * (1.0 + 1e-12));

  const OptimizationResult grid = solve_grid(p);
  CHECK(grid.method == SolveMethod::Grid);
  CHECK(std::abs(grid.alpha_star - cf.alpha_star) <= p.grid_step + 1e-12);
  CHECK(grid.binding);

  const OptimizationResult full = solve(p, ModelTopology{31'484'464, 10, 2, 5});
  CHECK(full.cut_index == 4);
  CHECK(full.method == SolveMethod::ClosedForm);
  CHECK(full.warnings.empty());
}

TEST_CASE("a loose budget leaves the vertex unconstrained") {
  const OptimizationProblem p = reference_problem(1e9);
  const OptimizationResult cf = solve_closed_form(p);
  CHECK(cf.alpha_star == doctest::Approx(kVertex).epsilon(1e-12));
  CHECK_FALSE(cf.binding);
  CHECK(cf.feasible_alpha_max == 1.0);

  const OptimizationResult grid = solve_grid(p);
  CHECK(std::abs(grid.alpha_star - kVertex) <= p.grid_step + 1e-12);
  CHECK_FALSE(grid.binding);

  const OptimizationResult full = solve(p, ModelTopology{31'484'464, 10, 2, 5});
  CHECK(full.cut_index == 9);
}

TEST_CASE("loosening the budget never worsens the optimum") {
  const double floor_j = kTotalAt0;
  double prev_rs = 2.0;
  for (int i = 0; i <= 20; ++i) {
    const OptimizationProblem p = reference_problem(floor_j + 100.0 * i);
    const OptimizationResult r = solve_closed_form(p);
    CHECK(r.rs_at_star <= prev_rs + 1e-15);
    prev_rs = r.rs_at_star;
  }
}

TEST_CASE("budgets below the energy floor are infeasible in both solvers") {
  const OptimizationProblem p = reference_problem(1000.0);
  CHECK_THROWS_AS(solve_closed_form(p), InfeasibleError);
  CHECK_THROWS_AS(solve_grid(p), InfeasibleError);
  CHECK_THROWS_AS(feasible_alpha_max(p), InfeasibleError);
  try {
    solve(p, ModelTopology{31'484'464, 10, 2, 5});
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.min_achievable_energy_j() == doctest::Approx(kTotalAt0).epsilon(1e-12));
  }
}

TEST_CASE("ties break toward the smaller alpha") {
  OptimizationProblem p = reference_problem(1e9);
  p.rs = RsModel{0.0, 0.0, 0.5, 0.0};  // flat: every alpha is optimal
  p.grid_step = 0.1;
  const OptimizationResult grid = solve_grid(p);
  CHECK(grid.alpha_star == 0.0);
  CHECK_FALSE(grid.binding);

  // Flat models are not convex (a2 = 0), so the dispatcher uses the grid.
  const OptimizationResult full = solve(p, ModelTopology{31'484'464, 10, 2, 5});
  CHECK(full.method == SolveMethod::Grid);
  CHECK(full.alpha_star == 0.0);
}

TEST_CASE("non-convex models fall back to grid search") {
  OptimizationProblem p = reference_problem(1e9);
  p.rs = RsModel{-0.1, 0.0, 0.6, 0.0};  // decreasing on [0, 1], minimum at 1
  CHECK_THROWS_AS(solve_closed_form(p), NonConvexModelError);
  const OptimizationResult full = solve(p, ModelTopology{31'484'464, 10, 2, 5});
  CHECK(full.method == SolveMethod::Grid);
  CHECK(full.alpha_star == 1.0);
  REQUIRE(full.warnings.size() == 1);  // degenerate cut at the top layer
  CHECK(full.warnings[0].find("degenerate") != std::string::npos);
}

TEST_CASE("grid endpoint is visited even when the step does not divide 1") {
  OptimizationProblem p = reference_problem(1e9);
  p.rs = RsModel{0.1, -0.4, 0.6, 0.0};  // vertex at 2.0, minimum on [0,1] is 1
  p.grid_step = 0.03;                   // 33 * 0.03 = 0.99
  const OptimizationResult grid = solve_grid(p);
  CHECK(grid.alpha_star == 1.0);
  CHECK(grid.feasible_alpha_max == 1.0);
}

TEST_CASE("closed form agrees with the grid oracle on random problems") {
  std::mt19937_64 rng(20240814);
  std::uniform_real_distribution<double> mix(0.0, 1.3);
  int infeasible_seen = 0;
  for (int i = 0; i < 150; ++i) {
    OptimizationProblem p;
    p.rs = random_convex_model(rng);
    p.profiles = {random_params(rng)};
    const double e0 = average_energy(0.0, p.profiles);
    const double e1 = average_energy(1.0, p.profiles);
    if (!(e0 > 0.0)) continue;  // a zero floor cannot be made infeasible
    if (i % 5 == 0) {
      p.e_req_j = e0 * std::uniform_real_distribution<double>(0.2, 0.999)(rng);
    } else {
      p.e_req_j = e0 + mix(rng) * (e1 - e0);
      if (!(p.e_req_j > 0.0)) continue;
    }

    bool cf_infeasible = false;
    bool grid_infeasible = false;
    OptimizationResult cf, grid;
    try {
      cf = solve_closed_form(p);
    } catch (const InfeasibleError&) {
      cf_infeasible = true;
    }
    try {
      grid = solve_grid(p);
    } catch (const InfeasibleError&) {
      grid_infeasible = true;
    }
    CAPTURE(i);
    CHECK(cf_infeasible == grid_infeasible);
    if (cf_infeasible) {
      ++infeasible_seen;
      continue;
    }
    CHECK(std::abs(cf.alpha_star - grid.alpha_star) <= p.grid_step + 1e-12);
    CHECK(grid.energy_at_star_j <= p.e_req_j * (1.0 + 1e-12));
  }
  CHECK(infeasible_seen >= 20);
}

TEST_CASE("heterogeneous profiles constrain the average and report per-profile energies") {
  std::mt19937_64 rng(5);
  OptimizationProblem p;
  p.rs = fmnist_ssim_model();
  for (int c = 0; c < 5; ++c) {
    SystemParams prof = random_params(rng);
    prof.clients = 5;
    p.profiles.push_back(prof);
  }
  const double e0 = average_energy(0.0, p.profiles);
  const double e1 = average_energy(1.0, p.profiles);
  p.e_req_j = 0.5 * (e0 + e1);

  const OptimizationResult r = solve(p, ModelTopology{31'484'464, 10, 2, 5});
  REQUIRE(r.per_profile_energy_j.size() == 5);
  double sum = 0.0;
  for (int c = 0; c < 5; ++c) {
    CHECK(r.per_profile_energy_j[static_cast<std::size_t>(c)] ==
          doctest::Approx(total_energy(r.alpha_star, p.profiles[static_cast<std::size_t>(c)]).total)
              .epsilon(1e-12));
    sum += r.per_profile_energy_j[static_cast<std::size_t>(c)];
  }
  CHECK(sum / 5.0 == doctest::Approx(r.energy_at_star_j).epsilon(1e-12));
  CHECK(r.energy_at_star_j <= p.e_req_j * (1.0 + 1e-12));
}

TEST_CASE("problem validation") {
  OptimizationProblem p = reference_problem(5000.0);
  p.e_req_j = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = reference_problem(5000.0);
  p.grid_step = 0.2;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = reference_problem(5000.0);
  p.profiles.clear();
  CHECK_THROWS_AS(p.validate(), DomainError);
}
