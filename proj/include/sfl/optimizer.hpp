#pragma once

#include <string>
#include <vector>

#include "sfl/energy.hpp"
#include "sfl/privacy.hpp"
#include "sfl/topology.hpp"

namespace sfl {

/// Cut-layer selection: minimize RS(alpha) subject to E(alpha) <= e_req and
/// 0 <= alpha <= 1. With heterogeneous profiles the constraint uses the
/// across-client average energy.
struct OptimizationProblem {
  RsModel rs;
  std::vector<SystemParams> profiles;  // >= 1 entry
  double e_req_j = 0.0;
  double grid_step = 1e-4;

  void validate() const;
};

enum class SolveMethod { ClosedForm, Grid };

const char* to_string(SolveMethod method);

struct OptimizationResult {
  double alpha_star = 0.0;
  double rs_at_star = 0.0;
  double energy_at_star_j = 0.0;       // constraint (average) energy at alpha_star
  bool binding = false;                // energy constraint active at the optimum
  double feasible_alpha_max = 0.0;     // boundary of the feasible interval
  int cut_index = -1;                  // filled by solve(); -1 from the raw solvers
  SolveMethod method = SolveMethod::ClosedForm;
  std::vector<double> per_profile_energy_j;  // one entry per profile when heterogeneous
  std::vector<std::string> warnings;
};

/// Largest feasible alpha: min(1, (e_req - E(0)) / slope), clamped to [0, 1].
/// Throws InfeasibleError when even alpha = 0 exceeds the budget.
double feasible_alpha_max(const OptimizationProblem& p);

/// KKT solution of the convex program: alpha* = min(feasible_alpha_max, RS vertex).
/// Requires a convex RS model (a2 > 0); the energy constraint is affine by construction.
OptimizationResult solve_closed_form(const OptimizationProblem& p);

/// Exhaustive search over {0, step, 2*step, ..., 1}; ties break toward smaller
/// alpha. Serves as the oracle for the closed form and as the fallback for
/// non-convex fitted models.
OptimizationResult solve_grid(const OptimizationProblem& p);

/// Dispatches to the closed form when RS is convex, else to grid search, and
/// maps alpha* onto a discrete cut index.
OptimizationResult solve(const OptimizationProblem& p, const ModelTopology& topo,
                         CutMode mode = CutMode::PerLayer);

}  // namespace sfl
