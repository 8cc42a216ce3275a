#include "sdc/shooting.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace sdc {

namespace {

// Thin QR of a 2n x n stack with the R diagonal forced nonnegative so the
// factorization is deterministic across platforms.
void thin_qr(const Mat& A, Mat& Q, Mat& R) {
  const Eigen::Index rows = A.rows(), cols = A.cols();
  Eigen::HouseholderQR<Mat> qr(A);
  Q = qr.householderQ() * Mat::Identity(rows, cols);
  R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (R(j, j) < 0.0) {
      R.row(j) = -R.row(j);
      Q.col(j) = -Q.col(j);
    }
  }
}

Mat trajectory_backward_map(const PlantModel& plant, const CostSpec& spec,
                            const Trajectory& traj, int k) {
  const HamiltonianPoint& pt = traj.points[k];
  const HamiltonianPoint& next = traj.points[k + 1];
  const FlowResult flow = hamiltonian_flow(plant, spec, pt.x, pt.u, true);
  return linearized_backward_map(plant, spec, pt.x, pt.u, next.p, flow);
}

}  // namespace

QrCascade build_cascade(const PlantModel& plant, const CostSpec& spec,
                        const Trajectory& traj) {
  const int n = plant.n;
  const int N = traj.horizon();
  QrCascade c;
  c.Y.resize(N + 1);
  c.Z.resize(N + 1);
  c.R.resize(N + 1);

  Mat stack(2 * n, n);
  stack.topRows(n) = Mat::Identity(n, n);
  stack.bottomRows(n) = 2.0 * traj.S_used;
  Mat Q, R;
  thin_qr(stack, Q, R);
  c.Y[N] = Q.topRows(n);
  c.Z[N] = Q.bottomRows(n);
  c.R[N] = R;

  for (int k = N - 1; k >= 0; --k) {
    const Mat Hk = trajectory_backward_map(plant, spec, traj, k);
    stack.topRows(n) = c.Y[k + 1];
    stack.bottomRows(n) = c.Z[k + 1];
    const Mat prod = Hk * stack;
    thin_qr(prod, Q, R);
    c.Y[k] = Q.topRows(n);
    c.Z[k] = Q.bottomRows(n);
    c.R[k] = R;
  }
  return c;
}

ShootResult shoot(const PlantModel& plant, const CostSpec& spec,
                  const Trajectory& traj, const Vec& x_star,
                  const RiccatiSolution& lin, const ShootingOptions& opts,
                  const NewtonOptions& newton) {
  if (x_star.size() != plant.n)
    throw std::invalid_argument("shooting target dimension mismatch");
  const int N = traj.horizon();

  ShootResult out;
  out.trajectory = traj;
  double dist = (x_star - traj.points[0].x).norm();
  out.report.initial_distance = dist;

  while (dist > opts.target_tol) {
    if (out.report.updates >= opts.max_updates) {
      std::string history;
      for (double d : out.report.distances) history += " " + std::to_string(d);
      throw NonConvergenceError("shooting exhausted " +
                                std::to_string(opts.max_updates) +
                                " updates; distances:" + history);
    }

    const QrCascade cascade = build_cascade(plant, spec, out.trajectory);
    Eigen::FullPivLU<Mat> y0(cascade.Y[0]);
    if (!y0.isInvertible())
      throw GeometryError("target unreachable in the trajectory linearization "
                          "(singular Y_0)");
    Vec w = y0.solve(x_star - out.trajectory.points[0].x);
    for (int k = 0; k <= N; ++k)
      w = cascade.R[k].triangularView<Eigen::Upper>().solve(w);
    Vec dxN = w;

    // damped acceptance: halve the terminal perturbation until the
    // regenerated trajectory improves the distance
    int halvings = 0;
    for (;; ++halvings) {
      if (halvings > opts.max_halvings)
        throw StallError("shooting stalled: " + std::to_string(opts.max_halvings) +
                         " halvings without improving distance " +
                         std::to_string(dist));
      const Vec x_N_new = out.trajectory.points[N].x + dxN;
      Trajectory candidate;
      try {
        candidate = backward_trajectory(plant, spec, x_N_new, N, lin, newton,
                                        std::numeric_limits<double>::infinity());
      } catch (const Error&) {
        dxN *= 0.5;  // regeneration blew up; treat as a rejected step
        continue;
      }
      const double new_dist = (x_star - candidate.points[0].x).norm();
      if (new_dist < dist) {
        out.trajectory = std::move(candidate);
        dist = new_dist;
        break;
      }
      dxN *= 0.5;
    }
    out.report.updates += 1;
    out.report.distances.push_back(dist);
    out.report.halvings.push_back(halvings);
  }
  return out;
}

ShootResult seed_and_shoot(const PlantModel& plant, const CostSpec& spec,
                           const Vec& x_star, int N,
                           const RiccatiSolution& lin,
                           const ShootingOptions& opts,
                           const NewtonOptions& newton,
                           double terminal_radius) {
  if (opts.continuation_steps < 1)
    throw std::invalid_argument("continuation_steps must be >= 1");

  const double target_norm = x_star.norm();
  ShootResult out;
  if (target_norm == 0.0) {
    out.trajectory = backward_trajectory(plant, spec, Vec::Zero(plant.n), N,
                                         lin, newton, terminal_radius);
    return out;
  }

  const Vec x_N_seed = terminal_radius * x_star / target_norm;
  out.trajectory =
      backward_trajectory(plant, spec, x_N_seed, N, lin, newton, terminal_radius);

  for (int j = 1; j <= opts.continuation_steps; ++j) {
    const Vec stage_target =
        (static_cast<double>(j) / opts.continuation_steps) * x_star;
    ShootResult stage;
    try {
      stage = shoot(plant, spec, out.trajectory, stage_target, lin, opts, newton);
    } catch (const Error& e) {
      throw NonConvergenceError("continuation stage " + std::to_string(j) + "/" +
                                std::to_string(opts.continuation_steps) +
                                " failed: " + e.what());
    }
    out.trajectory = std::move(stage.trajectory);
    out.report.updates += stage.report.updates;
    out.report.distances.insert(out.report.distances.end(),
                                stage.report.distances.begin(),
                                stage.report.distances.end());
    out.report.halvings.insert(out.report.halvings.end(),
                               stage.report.halvings.begin(),
                               stage.report.halvings.end());
    if (j == 1) out.report.initial_distance = stage.report.initial_distance;
  }
  return out;
}

}  // namespace sdc
