#pragma once

#include <vector>

#include "sdc/hamiltonian.hpp"

namespace sdc {

struct ShootingOptions {
  double target_tol = 1e-6;   // Euclidean distance |x* - x[0]| to accept
  int max_updates = 30;       // Newton updates per shoot call
  int max_halvings = 30;      // damping halvings per update
  int continuation_steps = 4; // homotopy stages in seed_and_shoot
};

// Cascaded thin-QR factors of H_0 H_1 ... H_{N-1} (I; 2S): stacked
// orthonormal blocks (Y_k; Z_k) and upper-triangular R_k with nonnegative
// diagonals, k = 0..N.
struct QrCascade {
  std::vector<Mat> Y, Z, R;
};

struct ShootReport {
  int updates = 0;
  std::vector<double> distances;         // accepted distance after each update
  std::vector<int> halvings;             // damping halvings per update
  double initial_distance = 0.0;
};

struct ShootResult {
  Trajectory trajectory;
  ShootReport report;
};

// Builds the QR cascade along a trajectory; exposed for validation.
QrCascade build_cascade(const PlantModel& plant, const CostSpec& spec,
                        const Trajectory& traj);

// Newton shooting on the terminal state: updates x[N] until the
// regenerated trajectory's x[0] lies within target_tol of x_star,
// halving rejected perturbations.  Throws GeometryError when the target
// is unreachable in the linearization, NonConvergenceError when updates
// run out, StallError when damping exhausts.
ShootResult shoot(const PlantModel& plant, const CostSpec& spec,
                  const Trajectory& traj, const Vec& x_star,
                  const RiccatiSolution& lin, const ShootingOptions& opts,
                  const NewtonOptions& newton);

// Seeds a short trajectory in the direction of x_star and shoots along the
// continuation path (j/steps) x_star, j = 1..steps, reusing each converged
// trajectory as the next seed.
ShootResult seed_and_shoot(const PlantModel& plant, const CostSpec& spec,
                           const Vec& x_star, int N,
                           const RiccatiSolution& lin,
                           const ShootingOptions& opts,
                           const NewtonOptions& newton,
                           double terminal_radius = 1e-2);

}  // namespace sdc
