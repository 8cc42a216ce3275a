#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdc/cost.hpp"
#include "sdc/flow.hpp"
#include "sdc/plant.hpp"
#include "sdc/riccati.hpp"

namespace sdc {

struct HamiltonianPoint {
  int k = 0;
  Vec x;
  Vec u;  // empty at the terminal index
  Vec p;
};

enum class UInitStrategy { PreviousU, LinearLQ };

struct NewtonOptions {
  double tol = 1e-12;  // absolute residual threshold, infinity norm
  int max_iter = 50;
  UInitStrategy u_init = UInitStrategy::PreviousU;
};

struct StepStats {
  int iterations = 0;
  double residual_dynamics = 0.0;      // |phi_h(x,u) - x+|_inf
  double residual_stationarity = 0.0;  // |dH/du|_inf
  bool hessian_not_pd = false;         // input Hessian of H lost definiteness
  bool left_domain = false;            // accepted iterate outside the domain box
};

struct TrajectoryMeta {
  double max_residual_dynamics = 0.0;
  double max_residual_stationarity = 0.0;
  int total_newton_iterations = 0;
  std::vector<StepStats> steps;  // index 0 corresponds to k = 0
  std::vector<std::string> warnings;
};

// Stable-manifold trajectory samples (x[k], u[k], p[k]), k = 0..N, with
// p[N] = 2 S x[N] by construction.
struct Trajectory {
  std::vector<HamiltonianPoint> points;
  CostMode mode = CostMode::Sampled;
  Mat S_used;
  TrajectoryMeta meta;

  int horizon() const { return static_cast<int>(points.size()) - 1; }
};

// H(x,u,p+) = phi_h(x,u)' p+ + stage cost; flow must be integrated at (x,u).
double hamiltonian_value(const PlantModel& plant, const CostSpec& spec,
                         const Vec& x, const Vec& u, const Vec& p_plus,
                         const FlowResult& flow);

struct BackwardStepResult {
  Vec x, u, p;
  StepStats stats;
};

// Given (x+, p+), Newton-solves the implicit Hamiltonian dynamics backward
// for (x,u) and substitutes to get p.  `lin` provides the linear-optimal
// initial input; `u_warm` the previous-step input when available.
BackwardStepResult backward_step(const PlantModel& plant, const CostSpec& spec,
                                 const Vec& x_plus, const Vec& p_plus,
                                 const RiccatiSolution& lin,
                                 const NewtonOptions& opts,
                                 const Vec* u_warm = nullptr);

struct ForwardStepResult {
  Vec x_plus, u, p_plus;
  StepStats stats;
};

// Given (x, p), Newton-solves for (u, p+) and advances to x+.  This is the
// forward direction of the implicit dynamics; it also evaluates the
// manifold-implied input at (x, p = s(x)).
ForwardStepResult forward_step(const PlantModel& plant, const CostSpec& spec,
                               const Vec& x, const Vec& p,
                               const RiccatiSolution& lin,
                               const NewtonOptions& opts);

// Backward generation of a stable-manifold trajectory from x_N with
// p[N] = 2 S x_N.  Warm starts: previous u, linear optimal control at the
// first solved step.  A warning is recorded when |x_N| exceeds
// terminal_radius.
Trajectory backward_trajectory(const PlantModel& plant, const CostSpec& spec,
                               const Vec& x_N, int N,
                               const RiccatiSolution& lin,
                               const NewtonOptions& opts,
                               double terminal_radius = 1e-2);

// The 2n x 2n linearized backward map H_k taking perturbations
// (dx+, dp+) -> (dx, dp) at a trajectory point; flow must carry order-2
// sensitivities including phi_xx.
Mat linearized_backward_map(const PlantModel& plant, const CostSpec& spec,
                            const Vec& x, const Vec& u, const Vec& p_plus,
                            const FlowResult& flow);

// Stage cost dispatch for the active mode (intersample needs the flow).
StageCostEval stage_cost(const PlantModel& plant, const CostSpec& spec,
                         const Vec& x, const Vec& u, const FlowResult& flow);

// Flow request matching the Hamiltonian machinery's needs at (x,u).
FlowResult hamiltonian_flow(const PlantModel& plant, const CostSpec& spec,
                            const Vec& x, const Vec& u, bool want_fxx = false);

}  // namespace sdc
