#pragma once

#include <cstdint>
#include <vector>

#include "sdc/shooting.hpp"

namespace sdc {

struct SamplePair {
  Vec x;
  Vec u;
  int target_idx = -1;  // -1 marks the structural origin pair
  int step_k = -1;
};

struct SampleCloud {
  std::vector<SamplePair> pairs;
  int failed_shots = 0;
  int attempted_shots = 0;
};

// Polynomial state-feedback law u = C m(x) over the monomial basis with no
// constant term, so u(0) = 0 structurally.
struct ControlLaw {
  int degree = 0;
  int state_dim = 0;
  int input_dim = 0;
  std::vector<std::vector<int>> basis;  // exponent multi-indices
  Mat coeffs;                           // input_dim x basis size
  double fit_residual = 0.0;            // training RMS
  std::vector<std::vector<int>> deficient;  // unidentifiable monomials, if any
};

// Monomial multi-indices with 1 <= total degree <= degree, ordered by
// (total degree, lexicographic).
std::vector<std::vector<int>> monomial_basis(int n, int degree);

// Shoots Gaussian-perturbed targets around each base target (per-target RNG
// stream derived from (seed, target index), so results are independent of
// scheduling) and harvests all (x[k], u[k]) pairs of converged trajectories.
// Failed shots are skipped and counted; all failing raises SolverError.
SampleCloud generate_cloud(const PlantModel& plant, const CostSpec& spec,
                           const std::vector<Vec>& base_targets,
                           double noise_std, int per_target,
                           std::uint64_t seed, int N,
                           const RiccatiSolution& lin,
                           const ShootingOptions& shoot_opts,
                           const NewtonOptions& newton,
                           double terminal_radius = 1e-2, int jobs = 1);

// Ordinary least squares per input channel.  A rank-deficient design matrix
// is accepted with the minimum-norm solution when it still reproduces the
// training data (e.g. an all-origin cloud); otherwise throws FitError
// naming the unidentifiable monomials.
ControlLaw fit_polynomial_law(const SampleCloud& cloud, int degree);

Vec eval_law(const ControlLaw& law, const Vec& x);

}  // namespace sdc
