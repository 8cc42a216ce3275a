#pragma once

#include "sdc/cost.hpp"
#include "sdc/plant.hpp"

namespace sdc {

// Exact one-period discretization of the plant linearization:
// A_h = d phi/dx (h;0,0), B_h = d phi/du (h;0,0).
struct DiscretizedLinear {
  Mat A_h;
  Mat B_h;
  double h = 0.0;
};

// Quadrature of the continuous state penalty over one hold interval,
// expressed as weights on (x[k], u[k]):
//   [Qbar Wbar; Wbar' Rbar] = int_0^h [A_t B_t]' Q [A_t B_t] dt + blkdiag(0, hR)
struct IntersampleWeights {
  Mat Qbar;
  Mat Wbar;
  Mat Rbar;
};

struct RiccatiSolution {
  Mat S;          // stabilizing solution, symmetric PSD
  Mat K;          // feedback gain, u = -K x
  Mat Acl;        // A_h - B_h K
  double residual = 0.0;       // Frobenius norm of the equation residual
  double spectral_radius = 0.0;
  int iterations = 0;
};

DiscretizedLinear discretize_linear(const PlantModel& plant, double h, int M);

IntersampleWeights intersample_weights(const PlantModel& plant,
                                       const CostSpec& spec, int M);

// Stabilizing solution of the cross-weighted discrete algebraic Riccati
// equation
//   A'SA - S + Qd - (A'SB + Wd)(B'SB + Rd)^{-1}(B'SA + Wd') = 0
// by backward iteration of the Riccati difference equation from S = 0,
// followed by one Newton (Lyapunov) refinement step.  The plain equation is
// the Wd = 0 case.  Throws NonConvergenceError / StabilizationError.
RiccatiSolution solve_dare(const DiscretizedLinear& dl, const Mat& Qd,
                           const Mat& Rd, const Mat& Wd);

// Riccati solution matching the cost spec: sampled mode solves with
// (hQ, hR), intersample mode with the intersample weights.
RiccatiSolution riccati_for_spec(const PlantModel& plant, const CostSpec& spec);

}  // namespace sdc
