#pragma once

#include <span>
#include <vector>

#include "sdc/flow.hpp"
#include "sdc/plant.hpp"

namespace sdc {

enum class CostMode { Sampled, Intersample };

struct CostSpec {
  Mat Q;             // n x n, positive semidefinite
  Mat R;             // m x m, positive definite
  double h = 1.0;    // sampling period
  CostMode mode = CostMode::Sampled;
  int M = 64;        // quadrature / flow grid steps, even
};

// Throws ConfigError on asymmetric or indefinite weights, odd M, h <= 0.
void validate_cost_spec(const CostSpec& spec, int n, int m);

// One-stage cost and its derivatives.  Row-vector gradients follow the
// derivative convention d/du of a scalar = 1 x m.
//   hess_ux(a,j) = d^2 value / du_a dx_j
struct StageCostEval {
  double value = 0.0;
  Eigen::RowVectorXd grad_x;
  Eigen::RowVectorXd grad_u;
  Mat hess_xx;
  Mat hess_ux;
  Mat hess_uu;
  bool has_hess_xx = false;
};

// Stage cost h x'Qx + h u'Ru of the sampled objective.
StageCostEval stage_cost_sampled(const CostSpec& spec, const Vec& x, const Vec& u);

// Intersample stage cost: Simpson quadrature of phi'Q phi over one period
// plus h u'Ru, with derivatives assembled from the flow sensitivities.
// Requires flow integrated at (x,u) with matching (h,M) and order 2;
// hess_xx is filled only when the flow carries phi_xx blocks.
StageCostEval stage_cost_intersample(const PlantModel& plant, const CostSpec& spec,
                                     const Vec& x, const Vec& u,
                                     const FlowResult& flow);

// Value-only variants used by the simulator (no sensitivities needed).
struct StagePenalty {
  double state = 0.0;
  double input = 0.0;
};
StagePenalty sampled_stage_penalty(const CostSpec& spec, const Vec& x, const Vec& u);
StagePenalty intersample_stage_penalty(const CostSpec& spec, const Vec& u,
                                       const FlowResult& flow);

struct ObjectiveTotals {
  double state = 0.0;
  double input = 0.0;
  double total = 0.0;
};

// Plain truncated sum with the state/input split kept separate.
ObjectiveTotals accumulate_objective(std::span<const StagePenalty> stages);

// Composite Simpson weights w_j on the grid t_j = j h / M, so that
// integral_0^h g dt ~= sum_j w_j g(t_j).
std::vector<double> simpson_weights(double h, int M);

}  // namespace sdc
