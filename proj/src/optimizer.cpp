#include "sfl/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "sfl/errors.hpp"
#include "sfl/numfmt.hpp"

namespace sfl {

namespace {

double constraint_energy(const OptimizationProblem& p, double alpha) {
  return average_energy(alpha, p.profiles);
}

// Both solvers gate infeasibility on the same expression so their verdicts
// agree bit-for-bit.
double require_feasible_at_zero(const OptimizationProblem& p) {
  const double floor_energy = constraint_energy(p, 0.0);
  if (floor_energy > p.e_req_j) {
    throw InfeasibleError("infeasible budget: minimum achievable energy " +
                              fmt_sig6(floor_energy) + " J exceeds e_req " +
                              fmt_sig6(p.e_req_j) + " J",
                          floor_energy);
  }
  return floor_energy;
}

}  // namespace

const char* to_string(SolveMethod method) {
  return method == SolveMethod::ClosedForm ? "closed-form" : "grid";
}

void OptimizationProblem::validate() const {
  if (profiles.empty()) {
    throw DomainError("optimizer: profile list is empty");
  }
  for (const SystemParams& prof : profiles) {
    prof.validate();
  }
  if (!(e_req_j > 0.0)) {
    throw DomainError("optimizer: e_req must be > 0");
  }
  if (!(grid_step > 0.0 && grid_step <= 0.1)) {
    throw DomainError("optimizer: grid_step must be in (0, 0.1]");
  }
}

double feasible_alpha_max(const OptimizationProblem& p) {
  p.validate();
  const double floor_energy = require_feasible_at_zero(p);
  const AffineEnergy aff = average_affine_energy(p.profiles);
  if (aff.slope_j <= 0.0) {
    return 1.0;  // flat energy model, the budget never binds
  }
  return std::clamp((p.e_req_j - floor_energy) / aff.slope_j, 0.0, 1.0);
}

OptimizationResult solve_closed_form(const OptimizationProblem& p) {
  p.validate();
  if (!p.rs.convex()) {
    throw NonConvexModelError("solve_closed_form: RS model is not convex (a2 = " +
                              fmt_sig6(p.rs.a2) + "); use solve_grid");
  }
  OptimizationResult result;
  result.method = SolveMethod::ClosedForm;
  result.feasible_alpha_max = feasible_alpha_max(p);
  // KKT: the unconstrained vertex when it is feasible (slack constraint,
  // multiplier 0), otherwise the constraint boundary (RS still decreasing
  // there, so the multiplier is non-negative).
  const double vertex = rs_minimizer_alpha(p.rs);
  result.binding = result.feasible_alpha_max < vertex;
  result.alpha_star = std::min(result.feasible_alpha_max, vertex);
  result.rs_at_star = rs_eval(p.rs, result.alpha_star);
  result.energy_at_star_j = constraint_energy(p, result.alpha_star);
  return result;
}

OptimizationResult solve_grid(const OptimizationProblem& p) {
  p.validate();
  require_feasible_at_zero(p);

  OptimizationResult result;
  result.method = SolveMethod::Grid;

  bool have_best = false;
  double best_alpha = 0.0, best_rs = 0.0, best_energy = 0.0;
  double unconstrained_rs = 0.0, unconstrained_energy = 0.0;
  bool have_unconstrained = false;
  double feasible_max = 0.0;

  // Ascending visit order, strict improvement only: ties break toward the
  // smaller alpha.
  const auto visit = [&](double alpha) {
    const double rs = rs_eval(p.rs, alpha);
    const double energy = constraint_energy(p, alpha);
    if (!have_unconstrained || rs < unconstrained_rs) {
      have_unconstrained = true;
      unconstrained_rs = rs;
      unconstrained_energy = energy;
    }
    if (energy <= p.e_req_j) {
      feasible_max = alpha;
      if (!have_best || rs < best_rs) {
        have_best = true;
        best_alpha = alpha;
        best_rs = rs;
        best_energy = energy;
      }
    }
  };

  const auto count = static_cast<long long>(std::floor(1.0 / p.grid_step + 1e-9));
  double last = -1.0;
  for (long long i = 0; i <= count; ++i) {
    const double alpha = std::min(static_cast<double>(i) * p.grid_step, 1.0);
    visit(alpha);
    last = alpha;
  }
  if (last < 1.0) {
    visit(1.0);  // the grid always contains the right endpoint
  }

  // alpha = 0 is on every grid and passed the feasibility gate above.
  result.alpha_star = best_alpha;
  result.rs_at_star = best_rs;
  result.energy_at_star_j = best_energy;
  result.feasible_alpha_max = feasible_max;
  result.binding = unconstrained_energy > p.e_req_j;
  return result;
}

OptimizationResult solve(const OptimizationProblem& p, const ModelTopology& topo, CutMode mode) {
  p.validate();
  if (mode == CutMode::PerBlock) {
    topo.validate_block_mode();
  } else {
    topo.validate();
  }

  OptimizationResult result = p.rs.convex() ? solve_closed_form(p) : solve_grid(p);
  result.cut_index = map_alpha_to_layer(result.alpha_star, topo, mode);
  if (p.profiles.size() > 1) {
    result.per_profile_energy_j.reserve(p.profiles.size());
    for (const SystemParams& prof : p.profiles) {
      result.per_profile_energy_j.push_back(total_energy(result.alpha_star, prof).total);
    }
  }
  if (result.rs_at_star < 0.0 || result.rs_at_star > 1.0) {
    result.warnings.push_back("RS(alpha*) = " + fmt_sig6(result.rs_at_star) +
                              " lies outside [0, 1]; the model is not a valid SSIM proxy there");
  }
  if (is_degenerate_cut(result.cut_index, topo)) {
    result.warnings.push_back(
        "cut index " + std::to_string(result.cut_index) +
        (result.cut_index == 0 ? " leaves no layers on the client" : " leaves no layers on the server") +
        "; the split is degenerate");
  }
  return result;
}

}  // namespace sfl
